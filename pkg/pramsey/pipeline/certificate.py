"""Density certificates for products of a segment configuration with an F-free rest.

For a configuration F sitting in A x R, where A is a segment of squared length a_sq, every vertex
of F projects either onto the near or onto the far end of A.  Replacing A by the segment
configuration Y_A turns F into a family of copies (y_e, r) / (y_e', r') over shift-adjacent pairs
e, e'.  Once gamma keeps the gamma-dependent squared distances of Y_A away from every difference
of an F distance and a rest distance, every copy of F inside Y_A x R projects onto one fiber or
onto one segment.  Fibers are F-free when R is, and keeping only fibers over an independent set of
the shift graph removes every segment, so the extracted points are F-free and hold at least a
quarter of the sample."""

import itertools
import logging
import numpy as np

from collections import namedtuple
from fractions import Fraction
from pramsey.combinatorics import ORACLE_BUDGET, brute_force_copies, classify_projection, \
    extract_dense_free_subset, monochromatic_copy_search
from pramsey.constructions import BrickDescriptor, BrickSpec, FiniteDescriptor, SegmentSpec, brick_points, \
    choose_gamma, segment_config_points, segment_separation, tower_descriptor
from pramsey.exceptions import CertificateInvalidError, ConsistencyError, InvalidInputError, SearchFailureError, \
    SizeLimitError
from pramsey.geometry import embed_distance_matrix, find_copies, product, squared_distance_matrix
from pramsey.utils import sqrt_number

logger = logging.getLogger(__name__)

MU = Fraction(1, 4)
COLORING_GROUND = 5

# `flags[v]` tells whether vertex v of F sits at the far end of the segment,
# `rest_index[v]` is the index of its projection in `rest`
ProductSplit = namedtuple('ProductSplit', 'axis,a_sq,flags,rest,rest_index,rest_descriptor')


class DensityTrial(namedtuple('DensityTrial', 'seed,sample,planted,extracted,ratio,copies,fiber_copies,'
                                              'segment_copies,f_free,oracle_free,separation')):

    @property
    def passed(self):
        return self.ratio >= MU and self.f_free and self.oracle_free and self.fiber_copies == 0

    def to_json(self):
        ret = dict(self._asdict())
        ret['sample'] = [[list(pair), index] for pair, index in self.sample]
        ret['passed'] = self.passed
        return ret


class PRamseyCertificate(namedtuple('PRamseyCertificate', 'mu,axis,gamma,separation,density_trials,'
                                                          'coloring_trials,witness,seed')):

    @property
    def valid(self):
        return all(t.passed for t in self.density_trials) and all(c.holds for c in self.coloring_trials)

    def to_json(self):
        return {
            'mu': self.mu,
            'axis': self.axis,
            'gamma': self.gamma,
            'separation': self.separation,
            'density_trials': self.density_trials,
            'coloring_trials': self.coloring_trials,
            'witness': self.witness,
            'seed': self.seed,
            'valid': self.valid
        }


def _vacuous(seed):
    return PRamseyCertificate(MU, None, None, None, (), (), None, seed)


def _off_diagonal(config):
    return squared_distance_matrix(config).off_diagonal()


def _prepare(f, split, margin, tol):
    """Checks that `split` can carry a certificate and picks gamma for it"""
    if find_copies(split.rest, f, tol, limit=1):
        logger.info('Rest configuration of axis %s contains a copy of F', split.axis)
        return None
    try:
        gamma = choose_gamma(sqrt_number(split.a_sq), _off_diagonal(split.rest), _off_diagonal(f), margin)
    except SearchFailureError as e:
        logger.info('Axis %s: %s', split.axis, e)
        return None
    return SegmentSpec(split.a_sq, gamma)


def _sample(rng, split, pairs, size, sample_size, ground):
    """Planted copies of F over random shift-adjacent pairs first, uniformly random points after"""
    chosen = {}
    if sample_size >= size:
        for _ in range(max(1, sample_size // (2 * size))):
            i, j, k = sorted(int(v) for v in rng.choice(np.arange(1, ground + 1), size=3, replace=False))
            near, far = pairs.index((i, j)), pairs.index((j, k))
            keys = [((far if flag else near), index) for flag, index in zip(split.flags, split.rest_index)]
            if len(chosen) + len([key for key in keys if key not in chosen]) > sample_size:
                break
            chosen.update((key, None) for key in keys)
    planted = len(chosen)

    available = len(pairs) * split.rest.size
    while len(chosen) < min(sample_size, available):
        key = (int(rng.integers(len(pairs))), int(rng.integers(split.rest.size)))
        chosen.setdefault(key, None)
    return list(chosen), planted


def _trial(f, split, spec, host, pairs, trial_seed, sample_size, ground, margin, tol):
    rng = np.random.default_rng(trial_seed)
    keys, planted = _sample(rng, split, pairs, f.size, sample_size, ground)
    sample = host.select([pair * split.rest.size + index for pair, index in keys])
    base_labels = [pairs[pair] for pair, _ in keys]

    used_rest = split.rest.select(sorted(set(index for _, index in keys)))
    separation = segment_separation(spec, _off_diagonal(used_rest), _off_diagonal(f))
    if not separation >= margin:
        raise CertificateInvalidError('gamma {0} separates the sampled distances only by {1}'
                                      .format(spec.gamma, separation))

    projections = {'fiber': 0, 'segment': 0}
    copies = find_copies(sample, f, tol)
    for copy in copies:
        try:
            projections[classify_projection([base_labels[i] for i in copy.correspondence])] += 1
        except ConsistencyError as e:
            raise CertificateInvalidError('gamma {0} does not separate the copies of F: {1}'.format(spec.gamma, e))

    extraction = extract_dense_free_subset(sample, base_labels, spec, tol)
    f_free = not find_copies(extraction.config, f, tol, limit=1)
    oracle_free = not brute_force_copies(extraction.config, f, tol)
    trial = DensityTrial(trial_seed, tuple((pairs[pair], index) for pair, index in keys), planted,
                         extraction.indices, extraction.ratio, len(copies), projections['fiber'],
                         projections['segment'], f_free, oracle_free, separation)
    if not trial.passed:
        logger.error('Density trial with seed %s failed: ratio %s, F-free %s, oracle %s', trial_seed,
                     extraction.ratio, f_free, oracle_free)
    return trial


def _coloring_check(spec, tol):
    """Every 2-coloring of the segment configuration on [5] holds a monochromatic segment"""
    host = segment_config_points(spec, itertools.combinations(range(1, COLORING_GROUND + 1), 2))
    pattern = segment_config_points(spec, [(1, 2), (2, 3)])
    return monochromatic_copy_search(host, pattern, 2, 0 if spec.exact else tol)


def _check_counts(trials, sample_size, ground, size):
    if trials < 0:
        raise InvalidInputError('Number of trials can not be negative')
    if sample_size < 1:
        raise InvalidInputError('sample_size must be positive')
    if ground < 3:
        raise InvalidInputError('Segment ground set needs at least 3 elements, got {0}'.format(ground))
    if sample_size ** size > ORACLE_BUDGET:
        raise SizeLimitError('Samples of {0} points are too large to re-verify copies of a {1}-point F'
                             .format(sample_size, size))


def product_certificate(f, splits, trials, sample_size, seed=0, ground=7, coloring_checks=True, margin=1e-6,
                        tol=1e-9):
    """Runs the density trials on the first split whose rest is F-free and admits a gamma"""
    _check_counts(trials, sample_size, ground, f.size)
    if trials == 0:
        return _vacuous(seed)

    for split in splits:
        spec = _prepare(f, split, margin, tol)
        if spec is not None:
            break
    else:
        raise CertificateInvalidError('No axis splits F off an F-free rest')
    logger.info('Certifying along axis %s with a_sq %s and gamma %s', split.axis, split.a_sq, spec.gamma)

    pairs = list(itertools.combinations(range(1, ground + 1), 2))
    host = product(segment_config_points(spec, pairs), split.rest)
    density_trials = tuple(_trial(f, split, spec, host, pairs, [seed, number], sample_size, ground, margin, tol)
                           for number in range(trials))

    coloring_trials = (_coloring_check(spec, tol),) if coloring_checks else ()
    witness = tower_descriptor([spec], split.rest_descriptor)
    separation = min(t.separation for t in density_trials)
    return PRamseyCertificate(MU, split.axis, spec.gamma, separation, density_trials, coloring_trials, witness,
                              seed)


def _vertex_index(bits):
    index = 0
    for bit in bits:
        index = 2 * index + bit
    return index


def _pipeline_splits(trace, tol):
    brick = trace.brick
    spread = embed_distance_matrix(squared_distance_matrix(trace.spread.points), tol)
    vertex_map = brick.vertex_map
    positive = [k for k in range(brick.dim) if brick.u[k] > 0]
    for axis in sorted(positive, key=lambda k: (brick.u[k], k)):
        others = [k for k in positive if k != axis]
        sub_brick = brick_points(BrickSpec([brick.u[k] for k in others]))
        rest = product(sub_brick, spread)
        rest_index = tuple(_vertex_index([vertex_map[v][k] for k in others]) * spread.size + v
                           for v in range(trace.f.size))
        flags = tuple(bool(vertex_map[v][axis]) for v in range(trace.f.size))
        yield ProductSplit(axis, brick.u[axis], flags, rest, rest_index, FiniteDescriptor(rest))


def pramsey_certificate(trace, trials=20, sample_size=60, seed=0, ground=7, coloring_checks=True, margin=1e-6,
                        tol=1e-9):
    if trace.f is None or trace.brick is None:
        raise InvalidInputError('The pipeline trace is not complete')
    return product_certificate(trace.f, _pipeline_splits(trace, tol), trials, sample_size, seed, ground,
                               coloring_checks, margin, tol)


def _brick_splits(spec, f):
    for axis in sorted(range(spec.d), key=lambda k: (spec.sides_sq[k], k)):
        others = [k for k in range(spec.d) if k != axis]
        flags = tuple(bool(label[axis]) for label in f.labels)
        projections = [tuple(label[k] for k in others) for label in f.labels]

        sub_spec = BrickSpec([spec.sides_sq[k] for k in others])
        yield ProductSplit(axis, spec.sides_sq[axis], flags, brick_points(sub_spec),
                           tuple(_vertex_index(p) for p in projections), BrickDescriptor(sub_spec))
        if len(set(projections)) == 1:
            # F is a single edge along this axis, its fibers are single points
            single = brick_points(sub_spec).select([_vertex_index(projections[0])])
            yield ProductSplit(axis, spec.sides_sq[axis], flags, single, (0,) * f.size, FiniteDescriptor(single))


def brick_certificate(spec, subset, trials=20, sample_size=60, seed=0, ground=7, coloring_checks=True,
                      margin=1e-6, tol=1e-9):
    """Certificate for F = the brick vertices listed in `subset` (indices in `brick_points` order)"""
    vertices = brick_points(spec)
    subset = list(subset)
    if len(set(subset)) != len(subset) or any(not 0 <= i < vertices.size for i in subset):
        raise InvalidInputError('Subset must list distinct vertex indices below {0}'.format(vertices.size))
    if len(subset) < 2:
        raise InvalidInputError('F needs at least two points')
    f = vertices.select(subset)
    return product_certificate(f, _brick_splits(spec, f), trials, sample_size, seed, ground, coloring_checks,
                               margin, tol)
