import dataclasses
import datetime
import json
import math

import numpy as np
import pandas as pd


class GrowthRateJSONEncoder(json.JSONEncoder):
    """
    JSON encoder for result sidecars and validation reports
    """
    def default(self, obj):
        """
        numpy scalars and arrays, pandas frames and dataclasses are not
        handled by the standard encoder, so they are converted to plain
        Python containers first.
        """
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return finite_or_none(float(obj))
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, pd.DataFrame):
            return obj.to_dict(orient='records')
        if isinstance(obj, datetime.datetime):
            return obj.isoformat()
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return dataclasses.asdict(obj)
        if hasattr(obj, 'to_json'):
            return obj.to_json()
        return json.JSONEncoder.default(self, obj)


def finite_or_none(value: float):
    """ NaN and infinities are not valid JSON, report them as null """
    return value if math.isfinite(value) else None


def dumps(obj, **kwargs) -> str:
    return json.dumps(obj, cls=GrowthRateJSONEncoder, sort_keys=True, **kwargs)
