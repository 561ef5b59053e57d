import itertools
import os
import unittest

from click.testing import CliRunner
from fractions import Fraction
from mock import patch
from pramsey.constructions import SegmentSpec, segment_config_points
from pramsey.ctl import ctl, error_kind, load_config, load_document
from pramsey.exceptions import InvalidInputError, NotASimplexError
from pramsey.geometry import PointConfig, squared_distance_matrix
from pramsey.utils import digest

from . import collinear, equilateral_matrix, flat_obtuse, read_json, unit_segment, unit_square, write_json

CONFIG_FILE_PATH = './test-pramseyctl.yaml'


def test_load_document():
    runner = CliRunner()
    with runner.isolated_filesystem():
        with open('params.yaml', 'w') as f:
            f.write('delta: 1e-6\nmax_span: 4\n')
        assert load_document('params.yaml') == {'delta': '1e-6', 'max_span': 4}
        write_json('m.json', equilateral_matrix())
        assert load_config('m.json', 1e-9).dim == 2


class TestCtl(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(ctl, ['-c', CONFIG_FILE_PATH] + list(args))

    def test_error_kind(self):
        self.assertEqual(error_kind(NotASimplexError('x')), 'not-a-simplex')
        self.assertEqual(error_kind(InvalidInputError('x')), 'invalid-input')

    def test_construct(self):
        with self.runner.isolated_filesystem():
            result = self.invoke('--out', 'seg.json', 'construct', 'segment', '--a', '1', '--gamma', '2', '--n', '4')
            assert result.exit_code == 0, result.output
            config = PointConfig.from_json(read_json('seg.json'))
            self.assertEqual(config.size, 6)
            self.assertEqual(set(squared_distance_matrix(config).off_diagonal()),
                             {1, Fraction(1, 7), Fraction(4, 7), Fraction(5, 7)})
            manifest = read_json('seg.manifest.json')
            with open('seg.json') as f:
                self.assertEqual(manifest['digest'], digest(f.read()))
            self.assertEqual(manifest['command'], 'construct')
            self.assertEqual(manifest['params']['n'], 4)

            result = self.invoke('--out', 'edge.json', 'construct', 'brick', '--sides', '1')
            assert result.exit_code == 0, result.output
            result = self.invoke('--out', 'prod.json', 'construct', 'product', '--left', 'seg.json',
                                 '--right', 'edge.json')
            assert result.exit_code == 0, result.output
            self.assertEqual(PointConfig.from_json(read_json('prod.json')).size, 12)

    def test_construct_output(self):
        result = self.invoke('construct', 'brick', '--sides', '3,4')
        assert result.exit_code == 0, result.output
        assert '| brick |' in result.output
        assert ' 5 ' in result.output

        result = self.invoke('construct', 'spread', '--c', '1,2', '--n', '3')
        assert result.exit_code == 0, result.output

        result = self.invoke('construct', 'segment', '--a', '1')
        assert result.exit_code == 2
        assert 'invalid-input' in result.output

        result = self.invoke('--tol', '-1', 'construct', 'brick', '--sides', '1')
        assert result.exit_code == 2

    def test_config_file(self):
        with self.runner.isolated_filesystem():
            with open(CONFIG_FILE_PATH, 'w') as f:
                f.write('seed: 5\nlog:\n  level: ERROR\n')
            result = self.invoke('--out', 'b.json', 'construct', 'brick', '--sides', '1')
            assert result.exit_code == 0, result.output
            self.assertEqual(read_json('b.manifest.json')['seed'], 5)

            with open(CONFIG_FILE_PATH, 'w') as f:
                f.write('pipeline:\n  radius_split: 2\n')
            result = self.invoke('construct', 'brick', '--sides', '1')
            assert result.exit_code == 2

    def test_verify(self):
        with self.runner.isolated_filesystem():
            assert self.invoke('verify', 'triangle-free', '--n', '10').exit_code == 0
            assert self.invoke('verify', 'triangle-free', '--n', '13').exit_code == 2
            assert self.invoke('verify', 'distance-set', '--a', '1', '--gamma', '2').exit_code == 0

            write_json('seg.json', segment_config_points(SegmentSpec(1, 2), itertools.combinations(range(1, 5), 2)))
            result = self.invoke('verify', 'distance-set', '--config', 'seg.json', '--values', '1,1/7,4/7,5/7')
            assert result.exit_code == 0, result.output
            result = self.invoke('verify', 'distance-set', '--config', 'seg.json', '--values', '1,1/7')
            assert result.exit_code == 1
            assert 'FAILED' in result.output

            assert self.invoke('verify', 'congruence', '--a', 'seg.json', '--b', 'seg.json').exit_code == 0
            write_json('square.json', unit_square())
            assert self.invoke('verify', 'congruence', '--a', 'seg.json', '--b', 'square.json').exit_code == 2

            write_json('ind.json', {'pairs': [[1, 2], [2, 3]], 'weights': ['1/2', '1/2']})
            result = self.invoke('--out', 'ind-out.json', 'verify', 'independent-set', '--input', 'ind.json')
            assert result.exit_code == 0, result.output
            self.assertEqual(read_json('ind-out.json')['weight'], '1/2')

            write_json('edge.json', unit_segment())
            result = self.invoke('verify', 'density', '--config', 'seg.json', '--pattern', 'edge.json',
                                 '--a-sq', '1', '--gamma', '2')
            assert result.exit_code == 0, result.output

    def test_negative_type(self):
        with self.runner.isolated_filesystem():
            write_json('line.json', {'sq': [[0, 1, 4], [1, 0, 1], [4, 1, 0]]})
            result = self.invoke('verify', 'negative-type', '--matrix', 'line.json')
            assert result.exit_code == 0, result.output
            assert 'negative type, not strict' in result.output

            write_json('bad.json', {'sq': [[0, 1, 1], [1, 0, 9], [1, 9, 0]]})
            result = self.invoke('verify', 'negative-type', '--matrix', 'bad.json')
            assert result.exit_code == 1
            assert 'not of negative type' in result.output

            write_json('tri.json', equilateral_matrix())
            result = self.invoke('verify', 'negative-type', '--config', 'tri.json')
            assert result.exit_code == 0, result.output
            assert 'strict negative type' in result.output

            assert self.invoke('verify', 'negative-type').exit_code == 2

    def test_copies_and_search(self):
        with self.runner.isolated_filesystem():
            write_json('square.json', unit_square())
            write_json('edge.json', unit_segment())
            result = self.invoke('--out', 'copies.json', 'copies', '--host', 'square.json', '--pattern', 'edge.json')
            assert result.exit_code == 0, result.output
            self.assertEqual(read_json('copies.json')['count'], 8)
            result = self.invoke('--out', 'sets.json', 'copies', '--host', 'square.json', '--pattern', 'edge.json',
                                 '--unordered')
            assert result.exit_code == 0, result.output
            self.assertEqual(read_json('sets.json')['count'], 4)

            spec = SegmentSpec(1, 2)
            write_json('host.json', segment_config_points(spec, itertools.combinations(range(1, 5), 2)))
            write_json('triple.json', segment_config_points(spec, [(1, 2), (1, 3), (2, 3)]))
            result = self.invoke('--out', 'search.json', 'color-search', '--host', 'host.json',
                                 '--pattern', 'triple.json')
            assert result.exit_code == 0, result.output
            self.assertFalse(read_json('search.json')['holds'])
            assert 'counterexample' in result.output

            result = self.invoke('--out', 'extract.json', 'extract', '--config', 'host.json', '--a-sq', '1',
                                 '--gamma', '2')
            assert result.exit_code == 0, result.output
            self.assertEqual(read_json('extract.json')['ratio'], '2/3')

    def test_certify_brick(self):
        result = self.invoke('certify-brick', '--sides', '3,4', '--subset', '0,1,3', '--trials', '1',
                             '--sample-size', '12')
        assert result.exit_code == 0, result.output
        assert 'Certificate is valid' in result.output

        result = self.invoke('certify-brick', '--sides', '3,4', '--subset', '0,x')
        assert result.exit_code == 2

    def test_pipeline_failure(self):
        with self.runner.isolated_filesystem():
            write_json('line.json', collinear())
            result = self.invoke('pipeline', '--input', 'line.json')
            assert result.exit_code == 1
            assert 'step1' in result.output
            assert 'not-a-simplex' in result.output
            trace = read_json('trace.json')
            self.assertEqual(trace['stage'], 'step1')
            self.assertEqual(trace['error'], 'not-a-simplex')

            with open('params.yaml', 'w') as f:
                f.write('speed: 11\n')
            result = self.invoke('pipeline', '--input', 'line.json', '--params', 'params.yaml')
            assert result.exit_code == 2

    def test_pipeline_flat_obtuse(self):
        with self.runner.isolated_filesystem():
            write_json('obtuse.json', flat_obtuse())
            result = self.invoke('pipeline', '--input', 'obtuse.json')
            assert result.exit_code == 1
            assert 'shrink-limit' in result.output
            self.assertEqual(read_json('trace.json')['error'], 'shrink-limit')

    def test_pipeline_out_dir(self):
        with self.runner.isolated_filesystem():
            write_json('line.json', collinear())
            result = self.invoke('--out', 'run-', 'pipeline', '--input', 'line.json', '--out-dir', 'runs/a')
            assert result.exit_code == 1
            self.assertEqual(read_json(os.path.join('runs', 'a', 'run-trace.json'))['stage'], 'step1')
            assert not os.path.exists('run-trace.json')

    def test_pipeline(self):
        with self.runner.isolated_filesystem():
            write_json('tri.json', equilateral_matrix())
            result = self.invoke('--out', 'run-', 'pipeline', '--input', 'tri.json', '--trials', '1',
                                 '--sample-size', '12')
            assert result.exit_code == 0, result.output
            assert 'Certificate is valid' in result.output
            certificate = read_json('run-certificate.json')
            self.assertTrue(certificate['valid'])
            self.assertEqual(len(certificate['density_trials']), 1)
            trace = read_json('run-trace.json')
            self.assertEqual(trace['d'], 2)
            self.assertLessEqual(trace['f_residual'], 1e-9)
            manifest = read_json('run-manifest.json')
            with open('run-trace.json') as f:
                self.assertEqual(manifest['digest']['trace'], digest(f.read()))
            self.assertEqual(manifest['params']['sample_size'], 12)

    def test_deterministic_output(self):
        def contents(directory):
            ret = {}
            for name in sorted(os.listdir(directory)):
                with open(os.path.join(directory, name), 'rb') as f:
                    ret[name] = f.read()
            return ret

        with self.runner.isolated_filesystem():
            write_json('tri.json', equilateral_matrix())
            for run in ('first', 'second'):
                os.makedirs(run)
                result = self.invoke('--out', os.path.join(run, 'seg.json'), 'construct', 'segment', '--a', '1',
                                     '--gamma', '2', '--n', '5')
                assert result.exit_code == 0, result.output
                result = self.invoke('pipeline', '--input', 'tri.json', '--out-dir', run, '--trials', '2',
                                     '--sample-size', '20')
                assert result.exit_code == 0, result.output
            first = contents('first')
            self.assertEqual(sorted(first), ['certificate.json', 'manifest.json', 'seg.json', 'seg.manifest.json',
                                             'trace.json'])
            self.assertEqual(first, contents('second'))

    @patch('pramsey.ctl.pramsey_certificate')
    def test_pipeline_invalid_certificate(self, mock_certificate):
        mock_certificate.return_value.valid = False
        mock_certificate.return_value.density_trials = ()
        mock_certificate.return_value.to_json.return_value = {'valid': False}
        with self.runner.isolated_filesystem():
            write_json('tri.json', equilateral_matrix())
            result = self.invoke('pipeline', '--input', 'tri.json')
            assert result.exit_code == 1
            assert 'INVALID' in result.output
