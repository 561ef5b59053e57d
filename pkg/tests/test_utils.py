import numpy as np
import os
import shutil
import tempfile
import unittest

from fractions import Fraction
from mock import Mock, patch
from pramsey.exceptions import InvalidInputError, PRamseyException
from pramsey.utils import atomic_write, canonical_json, format_number, parse_number, parse_number_list, \
    sqrt_number, to_jsonable

from . import unit_segment


class TestUtils(unittest.TestCase):

    def test_numbers(self):
        self.assertRaises(InvalidInputError, parse_number, True)
        self.assertRaises(InvalidInputError, parse_number, 'abc')
        self.assertRaises(InvalidInputError, parse_number, None)
        self.assertRaises(InvalidInputError, format_number, False)
        self.assertRaises(InvalidInputError, format_number, 'x')
        self.assertEqual(parse_number('-3/4'), Fraction(-3, 4))
        self.assertEqual(parse_number('1e-9'), 1e-9)
        self.assertEqual(parse_number_list(''), [])
        self.assertAlmostEqual(sqrt_number(Fraction(2, 9)), np.sqrt(2.0) / 3.0)
        self.assertEqual(sqrt_number(4), 2)
        self.assertRaises(InvalidInputError, sqrt_number, -1)

    def test_to_jsonable(self):
        self.assertEqual(to_jsonable({1: np.int64(3), 'b': np.bool_(True), 'c': np.array([0.5])}),
                         {'1': 3, 'b': True, 'c': [0.5]})
        self.assertEqual(to_jsonable(unit_segment())['points'], [['0/1'], ['1/1']])
        self.assertRaises(InvalidInputError, to_jsonable, object())
        self.assertRaises(ValueError, canonical_json, float('nan'))

    def test_exception(self):
        self.assertEqual(str(PRamseyException('foo')), "'foo'")
        self.assertEqual(InvalidInputError('bar').value, 'bar')


class TestAtomicWrite(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_atomic_write(self):
        path = os.path.join(self.directory, 'result.json')
        atomic_write(path, 'first\n')
        atomic_write(path, 'second\n')
        with open(path) as f:
            self.assertEqual(f.read(), 'second\n')
        self.assertEqual(os.listdir(self.directory), ['result.json'])

    @patch('tempfile.mkstemp', Mock(return_value=[3000, 'blabla']))
    @patch('os.fdopen', Mock(side_effect=IOError))
    @patch('os.path.exists', Mock(return_value=True))
    @patch('os.remove', Mock(side_effect=IOError))
    @patch('os.close', Mock(side_effect=IOError))
    def test_cleanup_errors(self):
        self.assertRaises(IOError, atomic_write, os.path.join(self.directory, 'result.json'), 'text')
