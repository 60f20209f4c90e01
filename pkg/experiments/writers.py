import logging
import os
from typing import List

import pandas as pd

from core.utils import dumps
from .config import JSON, ExperimentConfig
from .runners import ExperimentResult
from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def _ensure_directory(prefix: str):
    directory = os.path.dirname(prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)


def write_table(frame: pd.DataFrame, path: str):
    frame.to_csv(path, index=False, header=True, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_json(obj, path: str):
    with open(path, 'w', encoding='utf-8') as out:
        out.write(dumps(obj, indent=2))
        out.write('\n')


def write_result(result: ExperimentResult, config: ExperimentConfig, prefix: str = None) -> List[str]:
    """
    Writes ``<prefix>_<experiment>.csv`` (or ``.json``), one CSV per extra
    table, one JSON file per document and the ``<prefix>_meta.json`` sidecar.

    :return: paths written, main table first
    """
    prefix = prefix or config.output.prefix
    _ensure_directory(prefix)
    written = []
    if config.output.format == JSON:
        path = f'{prefix}_{result.experiment}.json'
        write_json(result.documents.get(result.experiment, result.frame), path)
    else:
        path = f'{prefix}_{result.experiment}.csv'
        write_table(result.frame, path)
    written.append(path)

    for suffix, table in result.tables.items():
        path = f'{prefix}_{suffix}.csv'
        write_table(table, path)
        written.append(path)

    for suffix, document in result.documents.items():
        if config.output.format == JSON and suffix == result.experiment:
            continue
        path = f'{prefix}_{suffix}.json'
        write_json(document, path)
        written.append(path)

    meta = dict(result.meta)
    meta['experiment'] = result.experiment
    meta['converged'] = result.converged
    meta['failures'] = list(result.failures)
    meta['config'] = ExperimentConfigSerializer(config).data
    path = f'{prefix}_meta.json'
    write_json(meta, path)
    written.append(path)
    logger.info(f'Wrote {", ".join(written)}')
    return written
