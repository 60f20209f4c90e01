import json


def _restore(cls, args, state):
    error = cls.__new__(cls)
    error.args = args
    error.__dict__.update(state)
    return error


class GrowthRateError(Exception):
    default_exit_code = 1

    def __init__(self, msg, exit_code: int = None):
        super(GrowthRateError, self).__init__(msg)
        self.detail = msg
        content = {'detail': msg}
        self.content = json.dumps(content)
        self.exit_code = exit_code or self.default_exit_code
        self.content_type = 'application/json'

    def __reduce__(self):
        # rebuilt without __init__, subclasses take extra arguments
        return _restore, (type(self), self.args, self.__dict__)
