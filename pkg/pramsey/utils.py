import hashlib
import json
import logging
import math
import numbers
import os
import re
import tempfile

import numpy as np

from fractions import Fraction
from pramsey.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

RATIONAL_RE = re.compile(r'^[-+]?[0-9]+(/[0-9]+)?$')


def deep_compare(left, right):
    """Structural equality of two nested dicts, comparing leaf values by their text

    >>> deep_compare({'level': 'INFO'}, {})
    False
    >>> deep_compare({'loggers': {}}, {'loggers': None})
    False
    >>> deep_compare({'file_num': 4}, {'file_num': '4'})
    True
    >>> deep_compare({'loggers': {'pramsey': 'DEBUG'}}, {'loggers': {'pramsey': 'DEBUG'}})
    True
    """

    if left.keys() != right.keys():
        return False
    for key, value in left.items():
        other = right[key]
        if isinstance(value, dict) or isinstance(other, dict):
            if not (isinstance(value, dict) and isinstance(other, dict) and deep_compare(value, other)):
                return False
        elif str(value) != str(other):
            return False
    return True


def patch_config(config, data):
    """Merges `data` into `config` in place. A None value removes the key, nested dicts are merged.

    >>> config = {'seed': 0, 'pipeline': {'grid': 64, 'window': 80}}
    >>> patch_config(config, {'pipeline': {'grid': 16, 'window': None}, 'tol': 1e-6})
    >>> config == {'seed': 0, 'pipeline': {'grid': 16}, 'tol': 1e-6}
    True
    """
    for name, value in data.items():
        if value is None:
            config.pop(name, None)
        elif isinstance(value, dict) and isinstance(config.get(name), dict):
            patch_config(config[name], value)
        else:
            config[name] = value


def parse_bool(value):
    """
    >>> parse_bool('Yes'), parse_bool(0), parse_bool('maybe')
    (True, False, None)
    """
    return {'on': True, 'true': True, 'yes': True, '1': True,
            'off': False, 'false': False, 'no': False, '0': False}.get(str(value).lower())


def is_exact(value):
    """
    >>> is_exact(Fraction(1, 3)), is_exact(2), is_exact(0.5), is_exact(True)
    (True, True, False, False)
    """
    return isinstance(value, (Fraction, numbers.Integral)) and not isinstance(value, bool)


def format_number(value):
    """Rationals are written as "p/q" strings, floats stay JSON numbers

    >>> format_number(Fraction(1, 3))
    '1/3'
    >>> format_number(2)
    '2/1'
    >>> format_number(0.5)
    0.5
    """
    if isinstance(value, bool):
        raise InvalidInputError('Boolean is not a number: {0!r}'.format(value))
    if is_exact(value):
        value = Fraction(value)
        return '{0}/{1}'.format(value.numerator, value.denominator)
    if isinstance(value, numbers.Real):
        return float(value)
    raise InvalidInputError('Can not format number: {0!r}'.format(value))


def parse_number(value):
    """
    >>> parse_number('5/7')
    Fraction(5, 7)
    >>> parse_number(3)
    Fraction(3, 1)
    >>> parse_number(' 0.25 ')
    0.25
    >>> parse_number('1/0')
    Traceback (most recent call last):
    ...
    pramsey.exceptions.InvalidInputError: "Can not parse number: '1/0'"
    """
    if isinstance(value, bool):
        raise InvalidInputError('Boolean is not a number: {0!r}'.format(value))
    if is_exact(value):
        return Fraction(value)
    if isinstance(value, numbers.Real):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if RATIONAL_RE.match(text):
                return Fraction(text)
            return float(text)
        except (ValueError, ZeroDivisionError):
            pass
    raise InvalidInputError('Can not parse number: {0!r}'.format(value))


def parse_number_list(value):
    """
    >>> parse_number_list('3, 4')
    [Fraction(3, 1), Fraction(4, 1)]
    >>> parse_number_list([1, '1/2', 0.5])
    [Fraction(1, 1), Fraction(1, 2), 0.5]
    """
    if isinstance(value, str):
        value = [v for v in value.split(',') if v.strip()]
    return [parse_number(v) for v in value]


def sqrt_number(value):
    """Square root, exact when `value` is the square of a rational

    >>> sqrt_number(Fraction(9, 4))
    Fraction(3, 2)
    >>> sqrt_number(2)
    1.4142135623730951
    """
    if is_exact(value):
        value = Fraction(value)
        if value < 0:
            raise InvalidInputError('Negative square: {0}'.format(value))
        num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if num * num == value.numerator and den * den == value.denominator:
            return Fraction(num, den)
    return float(np.sqrt(float(value)))


def to_jsonable(obj):
    """Recursively converts tuples, Fractions and numpy values into plain JSON types.
    Integers stay integers (counts, indices, labels), other rationals become "p/q"

    >>> to_jsonable({'a': (Fraction(1, 2), np.float64(0.5)), 'b': None})
    {'a': ['1/2', 0.5], 'b': None}
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if hasattr(obj, 'to_json'):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Number):
        return format_number(obj)
    raise InvalidInputError('Can not serialize {0!r}'.format(obj))


def canonical_json(obj):
    """Sorted keys, 2-space indent, trailing newline

    >>> print(canonical_json({'b': 1, 'a': [0.5]}), end='')
    {
      "a": [
        0.5
      ],
      "b": 1
    }
    """
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + '\n'


def digest(text):
    """
    >>> digest('')[:12]
    'e3b0c44298fc'
    """
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def _quietly(action, target, what):
    try:
        action(target)
    except Exception:
        logger.error('Can not %s %s', what, target)


def atomic_write(path, text):
    """Writes `text` through a temporary file in the target directory and renames it over `path`"""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmpfile = tempfile.mkstemp(prefix='.' + os.path.basename(path), suffix='.tmp', dir=directory)
    try:
        with os.fdopen(fd, 'w') as f:
            fd = None
            f.write(text)
        os.replace(tmpfile, path)
    except Exception:
        logger.error('Failed to write %s', path)
        if fd is not None:
            _quietly(os.close, fd, 'close')
        if os.path.exists(tmpfile):
            _quietly(os.remove, tmpfile, 'remove')
        raise
