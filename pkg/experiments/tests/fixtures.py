import json

import pytest

from experiments.serializers import ExperimentConfigSerializer

THREE_PHASE = {'kind': 'multiphase', 'K': [10, 10, 10], 'ages': [10 / 24, 12 / 24, 2 / 24]}


def make_config(experiment, **blocks):
    data = {'experiment': experiment}
    data.update(blocks)
    serializer = ExperimentConfigSerializer(data=data)
    assert serializer.is_valid(), serializer.errors
    return serializer.save()


@pytest.fixture
def write_config(tmp_path):
    def write(text, name='config.json'):
        path = tmp_path / name
        path.write_text(text if isinstance(text, str) else json.dumps(text, indent=2))
        return str(path)
    return write
