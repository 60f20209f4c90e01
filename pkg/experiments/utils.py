import json
import logging
from json.decoder import scanstring
from typing import Dict, Iterator, List, Tuple

from rest_framework.exceptions import ErrorDetail

from .config import ExperimentConfig
from .exceptions import ConfigurationError
from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)

Path = Tuple[str, ...]

_WHITESPACE = ' \t\n\r'
_decoder = json.JSONDecoder()


def _skip(text: str, index: int) -> int:
    while index < len(text) and text[index] in _WHITESPACE:
        index += 1
    return index


def key_lines(text: str) -> Dict[Path, int]:
    """
    Line number of every object key and array element of a valid JSON document,
    keyed by its path (array indices as strings).
    """
    lines = {}

    def line_of(index):
        return text.count('\n', 0, index) + 1

    def value(index: int, path: Path) -> int:
        index = _skip(text, index)
        if text[index] == '{':
            index = _skip(text, index + 1)
            if text[index] == '}':
                return index + 1
            while True:
                key_start = index
                key, index = scanstring(text, index + 1)
                lines[path + (key,)] = line_of(key_start)
                index = _skip(text, index)
                index = value(index + 1, path + (key,))
                index = _skip(text, index)
                if text[index] == '}':
                    return index + 1
                index = _skip(text, index + 1)
        if text[index] == '[':
            index = _skip(text, index + 1)
            if text[index] == ']':
                return index + 1
            position = 0
            while True:
                lines[path + (str(position),)] = line_of(index)
                index = _skip(text, value(index, path + (str(position),)))
                if text[index] == ']':
                    return index + 1
                index = _skip(text, index + 1)
                position += 1
        _, end = _decoder.raw_decode(text, index)
        return end

    value(0, ())
    return lines


def flatten_errors(errors, path: Path = ()) -> Iterator[Tuple[Path, str]]:
    """ (path, message) pairs of a nested DRF error structure """
    if isinstance(errors, dict):
        for key, nested in errors.items():
            yield from flatten_errors(nested, path + (str(key),))
    elif isinstance(errors, list) and errors and not isinstance(errors[0], (str, ErrorDetail)):
        for position, nested in enumerate(errors):
            if nested:
                yield from flatten_errors(nested, path + (str(position),))
    elif isinstance(errors, list):
        for message in errors:
            yield path, str(message)
    else:
        yield path, str(errors)


def format_errors(filename: str, text: str, errors) -> List[str]:
    """
    ``<file>:<line>: <dotted.path>: <message>`` for every validation error, the
    line being the one of the deepest key of the path present in the document.
    """
    lines = key_lines(text) if text.strip() else {}
    messages = []
    for path, message in flatten_errors(errors):
        if path and path[-1] == 'non_field_errors':
            path = path[:-1]
        line = 1
        for depth in range(len(path), 0, -1):
            if path[:depth] in lines:
                line = lines[path[:depth]]
                break
        messages.append(f'{filename}:{line}: {".".join(path) or "<document>"}: {message}')
    return messages


def _set_path(data: dict, path: Path, value):
    for key in path[:-1]:
        data = data.setdefault(key, {})
    data[path[-1]] = value


def load_config(filename: str = None, overrides: Dict[Path, object] = None) -> ExperimentConfig:
    """
    Reads and validates a configuration document. ``overrides`` maps config
    paths to values taken from the command line and wins over the document.
    """
    text = ''
    data = {}
    if filename:
        try:
            with open(filename, 'r', encoding='utf-8') as config_file:
                text = config_file.read()
        except OSError as e:
            raise ConfigurationError(f'{filename}: cannot read configuration: {e.strerror}')
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f'{filename}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}')
        if not isinstance(data, dict):
            raise ConfigurationError(f'{filename}:1: <document>: Expected a JSON object.')

    for path, value in (overrides or {}).items():
        if value is not None:
            _set_path(data, path, value)

    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        messages = format_errors(filename or '<command line>', text, serializer.errors)
        for message in messages:
            logger.error(message)
        raise ConfigurationError('\n'.join(messages))
    return serializer.save()
