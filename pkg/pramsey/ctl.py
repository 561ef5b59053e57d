'''
P-Ramsey toolkit control
'''

import click
import json
import os
import re
import yaml

from click import ClickException
from contextlib import contextmanager
from fractions import Fraction
from pramsey.combinatorics import brute_force_copies, extract_dense_free_subset, monochromatic_copy_search, \
    verify_triangle_free, weighted_independent_set
from pramsey.config import Config
from pramsey.constructions import BrickDescriptor, BrickSpec, FiniteDescriptor, ProductDescriptor, \
    SegmentDescriptor, SegmentSpec, SpreadDescriptor, SpreadSpec, descriptor_from_json, predicted_sq_distance
from pramsey.exceptions import InvalidInputError, PipelineStageError, PRamseyException, SizeLimitError
from pramsey.geometry import PointConfig, SquaredDistanceMatrix, congruent, describe_distances, diameter, \
    embed_distance_matrix, find_copies, negative_type_slack, squared_distance_matrix
from pramsey.log import ToolkitLogger
from pramsey.pipeline import PipelineParams, run_pipeline
from pramsey.pipeline.certificate import brick_certificate, pramsey_certificate
from pramsey.utils import atomic_write, canonical_json, digest, format_number, is_exact, parse_number, \
    parse_number_list
from pramsey.version import __version__
from prettytable import PrettyTable

CONFIG_DIR_PATH = click.get_app_dir('pramsey')
CONFIG_FILE_PATH = os.path.join(CONFIG_DIR_PATH, 'pramseyctl.yaml')

_toolkit_logger = ToolkitLogger()


class PRamseyCtlException(ClickException):
    pass


class InvalidInputException(ClickException):
    exit_code = 2


def error_kind(error):
    """
    >>> error_kind(InvalidInputError('x'))
    'invalid-input'
    """
    name = re.sub(r'Error$', '', type(error).__name__)
    return re.sub(r'(?<!^)(?=[A-Z])', '-', name).lower()


@contextmanager
def translate_errors():
    try:
        yield
    except PipelineStageError:
        raise
    except (InvalidInputError, SizeLimitError) as e:
        raise InvalidInputException('{0}: {1}'.format(error_kind(e), e.value))
    except PRamseyException as e:
        raise PRamseyCtlException('{0}: {1}'.format(error_kind(e), e.value))


def load_document(path):
    """JSON first, YAML for hand written parameter files"""
    with open(path) as f:
        text = f.read()
    try:
        return json.loads(text)
    except ValueError:
        pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise InvalidInputError('Can not parse {0}: {1}'.format(path, e))


def load_config(path, tol):
    """Reads a point configuration, or embeds a squared distance matrix"""
    data = load_document(path)
    if isinstance(data, dict) and 'sq' in data and 'points' not in data:
        return embed_distance_matrix(SquaredDistanceMatrix.from_json(data), tol)
    return PointConfig.from_json(data)


def load_descriptor(path):
    data = load_document(path)
    if isinstance(data, dict) and 'type' in data:
        return descriptor_from_json(data)
    return FiniteDescriptor(PointConfig.from_json(data))


def print_output(columns, rows=None, alignment=None):
    t = PrettyTable(columns)
    for k, v in (alignment or {}).items():
        t.align[k] = v
    for r in rows or []:
        t.add_row(r)
    click.echo(t)


def emit(obj, command, document, inputs=None, params=None, path=None, write_manifest=True):
    """Writes `document` as canonical JSON next to a manifest carrying its digest"""
    text = canonical_json(document)
    manifest = {
        'command': command,
        'inputs': inputs or {},
        'params': params or {},
        'seed': obj['seed'],
        'version': __version__,
        'digest': digest(text)
    }
    path = path or obj['out']
    if path:
        atomic_write(path, text)
    if path and write_manifest:
        atomic_write(os.path.splitext(path)[0] + '.manifest.json', canonical_json(manifest))
    return manifest


def _fmt(value):
    if is_exact(value):
        return format_number(value)
    if isinstance(value, float):
        return '{0:.6g}'.format(value)
    return value


option_tol = click.option('--tol', type=float, help='Geometric tolerance (default from configuration, 1e-9)')
option_seed = click.option('--seed', type=int, help='Random seed (default from configuration, 0)')
option_budget = click.option('--budget', type=int, help='Enumeration budget for exhaustive searches')
option_out = click.option('--out', '-o', type=click.Path(dir_okay=False), help='Write the JSON result here')
option_trials = click.option('--trials', type=int, help='Number of density trials')
option_sample_size = click.option('--sample-size', type=int, help='Points per density trial')
arg_config = click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                          help='Point configuration (or squared distance matrix) JSON file')


@click.group()
@click.option('--config-file', '-c', help='Configuration file', envvar='PRAMSEYCTL_CONFIG_FILE',
              default=CONFIG_FILE_PATH)
@option_tol
@option_seed
@option_budget
@option_out
@click.version_option(__version__)
@click.pass_context
def ctl(ctx, config_file, tol, seed, budget, out):
    with translate_errors():
        config = Config(config_file)
    _toolkit_logger.reload_config(config.get('log', {}))
    ctx.obj = {
        'config': config,
        'tol': config['tol'] if tol is None else tol,
        'seed': config['seed'] if seed is None else seed,
        'budget': config['search']['budget'] if budget is None else budget,
        'out': out
    }
    if ctx.obj['tol'] < 0:
        raise InvalidInputException('invalid-input: tol must be nonnegative')


def build_descriptor(kind, a, gamma, c, sides, left, right):
    def need(name, value):
        if value is None:
            raise InvalidInputError('{0} needs --{1}'.format(kind, name))
        return value

    if kind == 'segment':
        spec = SegmentSpec.from_length(parse_number(need('a', a)), parse_number(need('gamma', gamma)))
        return SegmentDescriptor(spec)
    if kind == 'spread':
        return SpreadDescriptor(SpreadSpec(parse_number_list(need('c', c))))
    if kind == 'brick':
        return BrickDescriptor(BrickSpec.from_sides(parse_number_list(need('sides', sides))))
    return ProductDescriptor(load_descriptor(need('left', left)), load_descriptor(need('right', right)))


@ctl.command('construct', help='Materialize a segment, spread, brick or product configuration')
@click.argument('kind', type=click.Choice(['segment', 'spread', 'brick', 'product']))
@click.option('--a', 'a', help='Segment length')
@click.option('--gamma', help='Segment parameter gamma')
@click.option('--c', 'c', help='Comma separated spread weights')
@click.option('--sides', help='Comma separated brick sides')
@click.option('--left', type=click.Path(exists=True, dir_okay=False), help='Left factor file')
@click.option('--right', type=click.Path(exists=True, dir_okay=False), help='Right factor')
@click.option('--n', 'n', type=int, default=4, show_default=True, help='Truncate on the ground set [n]')
@click.pass_obj
def construct(obj, kind, a, gamma, c, sides, left, right, n):
    with translate_errors():
        desc = build_descriptor(kind, a, gamma, c, sides, left, right)
        config = desc.materialize(n)
        emit(obj, 'construct', config, {'left': left, 'right': right}, dict(desc.to_json(), n=n))
        distances = describe_distances(config)
    print_output(['Kind', 'Points', 'Dimension', 'Diameter', 'Squared distances'],
                 [[kind, config.size, config.dim, _fmt(diameter(config)), ', '.join(map(str, distances))]])


@ctl.group('verify', help='Check a property, exit code 1 when it does not hold')
def verify():
    pass


def report(obj, check, passed, document, inputs=None, params=None, rows=None):
    document = dict(document, check=check, passed=passed)
    emit(obj, 'verify ' + check, document, inputs, params)
    print_output(['Check', 'Result'] + [r[0] for r in rows or []],
                 [[check, 'passed' if passed else 'FAILED'] + [_fmt(r[1]) for r in rows or []]])
    if not passed:
        raise PRamseyCtlException('{0} check failed'.format(check))


def _matches(value, allowed, tol):
    if is_exact(value) and all(is_exact(v) for v in allowed):
        return value in allowed
    return any(abs(float(value) - float(v)) <= tol for v in allowed)


@verify.command('distance-set', help='Squared distances of a segment configuration, or of a file against --values')
@click.option('--a', 'a', help='Segment length')
@click.option('--gamma', help='Segment parameter gamma')
@click.option('--n', 'n', type=int, default=7, show_default=True, help='Ground set [n]')
@arg_config
@click.option('--values', help='Comma separated allowed squared distances for --config')
@click.pass_obj
def verify_distance_set(obj, a, gamma, n, config_path, values):
    tol = obj['tol']
    with translate_errors():
        violations = []
        if config_path:
            if values is None:
                raise InvalidInputError('--config needs --values')
            config = load_config(config_path, tol)
            allowed = parse_number_list(values)
            matrix = squared_distance_matrix(config)
            for i in range(config.size):
                for j in range(i + 1, config.size):
                    if not _matches(matrix.entry(i, j), allowed, tol):
                        violations.append({'pair': [i, j], 'sq': matrix.entry(i, j)})
        else:
            if a is None or gamma is None:
                raise InvalidInputError('Need --a and --gamma, or --config with --values')
            spec = SegmentSpec.from_length(parse_number(a), parse_number(gamma))
            config = SegmentDescriptor(spec).materialize(n)
            allowed = sorted(set(spec.gamma_values()) | {spec.a_sq})
            matrix = squared_distance_matrix(config)
            for i in range(config.size):
                for j in range(i + 1, config.size):
                    value, e, e2 = matrix.entry(i, j), config.labels[i], config.labels[j]
                    if not _matches(value, [predicted_sq_distance(e, e2, spec)], tol):
                        violations.append({'pair': [list(e), list(e2)], 'sq': value})
        found = sorted(set(matrix.off_diagonal()))
    report(obj, 'distance-set', not violations, {'values': found, 'allowed': allowed, 'violations': violations},
           {'config': config_path}, {'a': a, 'gamma': gamma, 'n': n, 'values': values},
           [('Points', config.size), ('Distinct values', len(found)), ('Violations', len(violations))])


@verify.command('triangle-free', help='The shift graph on [n] has no triangle')
@click.option('--n', 'n', type=int, required=True, help='Ground set [n]')
@click.pass_obj
def verify_triangle_free_cmd(obj, n):
    with translate_errors():
        passed = verify_triangle_free(n)
    report(obj, 'triangle-free', passed, {'n': n}, params={'n': n}, rows=[('n', n)])


@verify.command('independent-set', help='Derandomized independent set of weight at least 1/4')
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True,
              help='JSON with "pairs" and matching "weights"')
@click.pass_obj
def verify_independent_set(obj, input_path):
    with translate_errors():
        data = load_document(input_path)
        try:
            pairs = [tuple(p) for p in data['pairs']]
            weights = dict(zip(pairs, parse_number_list(data['weights'])))
        except (KeyError, TypeError) as e:
            raise InvalidInputError('Input needs "pairs" and "weights": {0}'.format(e))
        result = weighted_independent_set(pairs, weights)
    document = {'members': result.members, 'weight': result.weight, 'coloring': result.coloring}
    report(obj, 'independent-set', result.weight >= Fraction(1, 4), document, {'input': input_path},
           rows=[('Members', len(result.members)), ('Weight', result.weight)])


def base_labels(config):
    """Pair labels, or the first component of (pair, rest) product labels"""
    ret = []
    for label in config.labels:
        if isinstance(label, tuple) and len(label) == 2 and isinstance(label[0], tuple):
            label = label[0]
        ret.append(tuple(label) if isinstance(label, (tuple, list)) else label)
    return ret


@verify.command('density', help='Extracted subset is F-free and keeps a quarter of the points')
@arg_config
@click.option('--pattern', type=click.Path(exists=True, dir_okay=False), required=True, help='Configuration F')
@click.option('--a-sq', required=True, help='Squared segment length of the base')
@click.option('--gamma', required=True, help='Segment parameter gamma of the base')
@click.pass_obj
def verify_density(obj, config_path, pattern, a_sq, gamma):
    tol = obj['tol']
    with translate_errors():
        if not config_path:
            raise InvalidInputError('density needs --config')
        config, f = load_config(config_path, tol), load_config(pattern, tol)
        spec = SegmentSpec(parse_number(a_sq), parse_number(gamma))
        extraction = extract_dense_free_subset(config, base_labels(config), spec, tol)
        f_free = not find_copies(extraction.config, f, tol, limit=1)
        oracle_free = not brute_force_copies(extraction.config, f, tol)
    passed = extraction.ratio >= Fraction(1, 4) and f_free and oracle_free
    document = {'indices': extraction.indices, 'ratio': extraction.ratio, 'f_free': f_free,
                'oracle_free': oracle_free}
    report(obj, 'density', passed, document, {'config': config_path, 'pattern': pattern},
           {'a_sq': a_sq, 'gamma': gamma},
           [('Ratio', extraction.ratio), ('F-free', f_free), ('Oracle', oracle_free)])


@verify.command('congruence', help='Two configurations are congruent')
@click.option('--a', 'a', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--b', 'b', type=click.Path(exists=True, dir_okay=False), required=True)
@click.pass_obj
def verify_congruence(obj, a, b):
    tol = obj['tol']
    with translate_errors():
        mapping = congruent(load_config(a, tol), load_config(b, tol), tol)
    document = {'map': mapping}
    rows = [('Map', ' '.join(map(str, mapping.correspondence)) if mapping else '-')]
    report(obj, 'congruence', mapping is not None, document, {'a': a, 'b': b}, rows=rows)


@verify.command('negative-type', help='Negative type slack of a squared distance matrix')
@click.option('--matrix', type=click.Path(exists=True, dir_okay=False), help='Squared distance matrix JSON')
@arg_config
@click.pass_obj
def verify_negative_type(obj, matrix, config_path):
    tol = obj['tol']
    with translate_errors():
        if matrix:
            sq = SquaredDistanceMatrix.from_json(load_document(matrix))
        elif config_path:
            sq = squared_distance_matrix(load_config(config_path, tol))
        else:
            raise InvalidInputError('negative-type needs --matrix or --config')
        result = negative_type_slack(sq)
    if result.slack > tol:
        status = 'strict negative type'
    elif result.slack >= -tol:
        status = 'negative type, not strict'
    else:
        status = 'not of negative type'
    document = {'slack': result.slack, 'witness': result.witness, 'status': status}
    report(obj, 'negative-type', result.slack >= -tol, document, {'matrix': matrix, 'config': config_path},
           rows=[('Slack', result.slack), ('Status', status)])


@ctl.command('copies', help='Every congruent copy of a pattern inside a host configuration')
@click.option('--host', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--pattern', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--limit', type=int, help='Stop after this many copies')
@click.option('--unordered', is_flag=True, help='Count each set of host points once')
@click.pass_obj
def copies(obj, host, pattern, limit, unordered):
    tol = obj['tol']
    with translate_errors():
        found = find_copies(load_config(host, tol), load_config(pattern, tol), tol, limit, unordered)
        emit(obj, 'copies', {'copies': found, 'count': len(found)}, {'host': host, 'pattern': pattern},
             {'limit': limit, 'unordered': unordered, 'tol': tol})
    print_output(['Copy', 'Host points', 'Residual'],
                 [[i, ' '.join(map(str, c.correspondence)), _fmt(c.max_residual)] for i, c in enumerate(found)],
                 {'Host points': 'l'})


@ctl.command('color-search', help='Look for a coloring without a monochromatic copy of the pattern')
@click.option('--host', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--pattern', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--r', 'r', type=int, default=2, show_default=True, help='Number of colors')
@click.option('--mode', type=click.Choice(['exhaustive', 'sampled']), default='exhaustive', show_default=True)
@click.option('--samples', type=int, help='Colorings drawn in sampled mode')
@click.option('--workers', type=int, help='Processes for the exhaustive enumeration')
@click.pass_obj
def color_search(obj, host, pattern, r, mode, samples, workers):
    tol = obj['tol']
    search = obj['config']['search']
    samples = search['samples'] if samples is None else samples
    workers = search['workers'] if workers is None else workers
    with translate_errors():
        result = monochromatic_copy_search(load_config(host, tol), load_config(pattern, tol), r, tol, mode,
                                           samples, obj['seed'], obj['budget'], search['block_size'], workers)
        emit(obj, 'color-search', result, {'host': host, 'pattern': pattern},
             {'r': r, 'mode': mode, 'samples': samples, 'budget': obj['budget'], 'tol': tol})
    holds = {True: 'every coloring', False: 'counterexample', None: 'none found'}[result.holds]
    print_output(['Mode', 'Colors', 'Checked', 'Copies', 'Monochromatic'],
                 [[mode, r, result.checked, len(result.copies), holds]])


@ctl.command('extract', help='Dense F-free subset over an independent set of base pairs')
@arg_config
@click.option('--a-sq', required=True, help='Squared segment length of the base')
@click.option('--gamma', required=True, help='Segment parameter gamma of the base')
@click.pass_obj
def extract(obj, config_path, a_sq, gamma):
    tol = obj['tol']
    with translate_errors():
        if not config_path:
            raise InvalidInputError('extract needs --config')
        config = load_config(config_path, tol)
        spec = SegmentSpec(parse_number(a_sq), parse_number(gamma))
        extraction = extract_dense_free_subset(config, base_labels(config), spec, tol)
        independent = extraction.independent
        document = {'indices': extraction.indices, 'ratio': extraction.ratio, 'config': extraction.config,
                    'members': independent.members, 'weight': independent.weight,
                    'coloring': independent.coloring}
        emit(obj, 'extract', document, {'config': config_path}, {'a_sq': a_sq, 'gamma': gamma, 'tol': tol})
    print_output(['Points', 'Kept', 'Ratio', 'Base pairs'],
                 [[config.size, len(extraction.indices), _fmt(extraction.ratio), len(independent.members)]])


def certificate_options(obj, trials, sample_size):
    section = obj['config']['certificate']
    return {
        'trials': section['trials'] if trials is None else trials,
        'sample_size': section['sample_size'] if sample_size is None else sample_size,
        'seed': obj['seed'],
        'ground': section['ground'],
        'coloring_checks': section['coloring_checks']
    }


def print_certificate(certificate):
    rows = [[i, len(t.sample), len(t.extracted), _fmt(t.ratio), t.segment_copies,
             'yes' if t.passed else 'NO'] for i, t in enumerate(certificate.density_trials)]
    print_output(['Trial', 'Sample', 'Kept', 'Ratio', 'Copies', 'Passed'], rows)
    click.echo('Certificate is {0} (axis {1}, gamma {2})'.format('valid' if certificate.valid else 'INVALID',
                                                                certificate.axis, _fmt(certificate.gamma)))


@ctl.command('certify-brick', help='P-Ramsey certificate for a subset of the vertices of a brick')
@click.option('--sides', required=True, help='Comma separated brick sides')
@click.option('--subset', required=True, help='Comma separated vertex indices')
@option_trials
@option_sample_size
@click.option('--margin', type=float, help='Required gamma separation')
@click.pass_obj
def certify_brick(obj, sides, subset, trials, sample_size, margin):
    options = certificate_options(obj, trials, sample_size)
    options['margin'] = obj['config']['pipeline']['margin'] if margin is None else margin
    with translate_errors():
        spec = BrickSpec.from_sides(parse_number_list(sides))
        try:
            indices = [int(v) for v in subset.split(',') if v.strip()]
        except ValueError:
            raise InvalidInputError('Subset must list integers: {0}'.format(subset))
        certificate = brick_certificate(spec, indices, tol=obj['tol'], **options)
        emit(obj, 'certify-brick', certificate, params=dict(options, sides=sides, subset=subset, tol=obj['tol']))
    print_certificate(certificate)
    if not certificate.valid:
        raise PRamseyCtlException('Certificate trials failed')


def load_params(obj, path):
    overrides = {}
    if path:
        overrides = load_document(path) or {}
        if not isinstance(overrides, dict):
            raise InvalidInputError('Parameter file must hold a mapping')
        unknown = set(overrides) - set(PipelineParams._fields)
        if unknown:
            raise InvalidInputError('Unknown pipeline parameters: {0}'.format(', '.join(sorted(unknown))))
    for name in ('delta', 'epsilon', 'margin', 'radius_split', 'tol'):
        if overrides.get(name) is not None:
            overrides[name] = float(parse_number(overrides[name]))
    overrides.setdefault('tol', obj['tol'])
    return PipelineParams.from_config(obj['config'], **overrides)


@ctl.command('pipeline', help='Run the four step construction on a simplex and certify the result')
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Simplex as a configuration or squared distance matrix')
@click.option('--params', 'params_path', type=click.Path(exists=True, dir_okay=False),
              help='Pipeline parameters (YAML or JSON mapping)')
@click.option('--out-dir', type=click.Path(file_okay=False),
              help='Directory for the trace, certificate and manifest files')
@option_trials
@option_sample_size
@click.pass_obj
def pipeline(obj, input_path, params_path, out_dir, trials, sample_size):
    """The global --out is a file name prefix here: the run writes <prefix>trace.json,
    <prefix>certificate.json and <prefix>manifest.json inside --out-dir"""
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    def path(name):
        return os.path.join(out_dir or '', (obj['out'] or '') + name)

    options = certificate_options(obj, trials, sample_size)
    inputs = {'input': input_path, 'params': params_path}
    with translate_errors():
        params = load_params(obj, params_path)
        simplex = load_config(input_path, params.tol)
        try:
            trace = run_pipeline(simplex, params)
        except PipelineStageError as e:
            kind = error_kind(e.error)
            emit(obj, 'pipeline', {'stage': e.stage, 'error': kind, 'message': str(e.error.value)}, inputs,
                 dict(params.to_json(), **options), path('trace.json'))
            raise PRamseyCtlException('Pipeline failed at stage {0}: {1}: {2}'.format(e.stage, kind, e.error.value))
        certificate = pramsey_certificate(trace, margin=params.margin, tol=params.tol, **options)

        run_params = dict(params.to_json(), **options)
        traced = emit(obj, 'pipeline', trace, inputs, run_params, path('trace.json'), False)
        certified = emit(obj, 'pipeline', certificate, inputs, run_params, path('certificate.json'), False)
    atomic_write(path('manifest.json'), canonical_json({
        'command': 'pipeline', 'inputs': inputs, 'params': run_params, 'seed': obj['seed'], 'version': __version__,
        'digest': {'trace': traced['digest'], 'certificate': certified['digest']}
    }))

    rows = [['slack', _fmt(trace.slack)], ['shrink beta', _fmt(trace.shrink_beta)], ['rho', _fmt(trace.rho)],
            ['rho prime', _fmt(trace.rho_prime)], ['spread radius', _fmt(trace.spread_radius)],
            ['delta', _fmt(trace.delta)], ['spread k / n', '{0} / {1}'.format(trace.spread.spec.k,
                                                                              trace.spread.ground)],
            ['brick dimension', trace.brick.dim], ['congruence residual', _fmt(max(trace.residuals.values()))]]
    print_output(['Quantity', 'Value'], rows, {'Quantity': 'l'})
    print_certificate(certificate)
    if not certificate.valid:
        raise PRamseyCtlException('Certificate trials failed')
