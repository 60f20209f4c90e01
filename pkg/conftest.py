import pytest


@pytest.fixture
def prefix(tmp_path):
    """ Output prefix inside a directory the writers have to create """
    return str(tmp_path / 'out' / 'run')
