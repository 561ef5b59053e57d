import itertools
import logging
import numpy as np

from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pramsey.constructions import _check_pair, predicted_sq_distance
from pramsey.exceptions import ConsistencyError, InvalidInputError, SizeLimitError
from pramsey.geometry import find_copies, squared_distance_matrix

logger = logging.getLogger(__name__)

MAX_TRIANGLE_GROUND = 12
COLORING_BUDGET = 2 ** 25
ORACLE_BUDGET = 2 ** 26

IndependentSet = namedtuple('IndependentSet', 'members,weight,coloring')
MonochromaticWitness = namedtuple('MonochromaticWitness', 'color,copy')
DensityExtraction = namedtuple('DensityExtraction', 'indices,config,ratio,independent')


class Coloring(namedtuple('Coloring', 'r,colors')):

    def to_json(self):
        return {'r': self.r, 'colors': list(self.colors)}


class ColoringSearchResult(namedtuple('ColoringSearchResult', 'mode,r,holds,counterexample,checked,copies,seed')):

    """`holds` is True when every coloring was checked and carries a monochromatic copy, False when
    a counterexample was found and None when the sampled search found nothing"""

    def witness_for(self, coloring):
        colors = np.asarray(coloring.colors)
        for copy in self.copies:
            if np.all(colors[list(copy)] == colors[copy[0]]):
                return MonochromaticWitness(int(colors[copy[0]]), copy)

    def to_json(self):
        return {
            'mode': self.mode,
            'r': self.r,
            'holds': self.holds,
            'counterexample': self.counterexample,
            'checked': self.checked,
            'copies': len(self.copies),
            'seed': self.seed
        }


def shift_adjacent(e, e2):
    i, j = _check_pair(e)
    k, l = _check_pair(e2)
    return j == k or l == i


def shift_graph_edges(pairs):
    pairs = [_check_pair(p) for p in pairs]
    return [(a, b) for a, b in itertools.combinations(range(len(pairs)), 2) if shift_adjacent(pairs[a], pairs[b])]


def verify_triangle_free(n):
    if n < 3:
        raise InvalidInputError('Triangle check needs a ground set of at least 3, got {0}'.format(n))
    if n > MAX_TRIANGLE_GROUND:
        raise SizeLimitError('Triangle check is limited to ground sets up to {0}'.format(MAX_TRIANGLE_GROUND))
    vertices = list(itertools.combinations(range(1, n + 1), 2))
    adjacent = set(shift_graph_edges(vertices))
    for a, b, c in itertools.combinations(range(len(vertices)), 3):
        if (a, b) in adjacent and (b, c) in adjacent and (a, c) in adjacent:
            logger.info('Triangle %s %s %s in the shift graph on [%s]', vertices[a], vertices[b], vertices[c], n)
            return False
    return True


def _stochastic_weights(items, weights):
    ret = {}
    for item in items:
        if item not in weights:
            raise InvalidInputError('No weight for {0!r}'.format(item))
        value = Fraction(weights[item])
        if value < 0:
            raise InvalidInputError('Negative weight for {0!r}'.format(item))
        ret[item] = value
    if sum(ret.values(), Fraction(0)) != 1:
        raise InvalidInputError('Weights sum to {0}, not to 1'.format(sum(ret.values(), Fraction(0))))
    return ret


def weighted_independent_set(pairs, weights):
    """Derandomized random 2-coloring of the ground elements: every element in increasing order takes
    the color maximizing the conditional expectation of the weight of pairs colored (0, 1), ties to 0"""
    pairs = [_check_pair(p) for p in pairs]
    if len(set(pairs)) != len(pairs):
        raise InvalidInputError('Pairs must be distinct')
    weights = _stochastic_weights(pairs, {_check_pair(k): v for k, v in dict(weights).items()})

    as_first, as_second = {}, {}
    for pair in pairs:
        as_first.setdefault(pair[0], []).append(pair)
        as_second.setdefault(pair[1], []).append(pair)

    half = Fraction(1, 2)
    coloring = {}

    def probability(element, color):
        if element not in coloring:
            return half
        return Fraction(int(coloring[element] == color))

    for element in sorted(set(as_first) | set(as_second)):
        gain_zero = sum((weights[p] * probability(p[1], 1) for p in as_first.get(element, [])), Fraction(0))
        gain_one = sum((weights[p] * probability(p[0], 0) for p in as_second.get(element, [])), Fraction(0))
        coloring[element] = 0 if gain_zero >= gain_one else 1

    members = tuple(p for p in pairs if coloring[p[0]] == 0 and coloring[p[1]] == 1)
    weight = sum((weights[p] for p in members), Fraction(0))
    if weight * 4 < 1:
        raise ConsistencyError('Independent set weight {0} is below 1/4'.format(weight))
    return IndependentSet(members, weight, coloring)


def _copy_index_sets(host, pattern, tol):
    return sorted(tuple(sorted(copy.correspondence)) for copy in find_copies(host, pattern, tol, unordered=True))


def _digits(indices, n, r):
    powers = r ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % r


def _has_monochromatic(colorings, copies):
    if copies.size == 0:
        return np.zeros(colorings.shape[0], dtype=bool)
    colored = colorings[:, copies]
    return np.any(np.all(colored == colored[:, :, :1], axis=2), axis=1)


def _first_counterexample(args):
    start, stop, n, r, copies = args
    colorings = _digits(np.arange(start, stop, dtype=np.int64), n, r)
    bad = np.flatnonzero(~_has_monochromatic(colorings, copies))
    return int(start + bad[0]) if bad.size else None


def monochromatic_copy_search(host, pattern, r, tol, mode='exhaustive', samples=1000, seed=0,
                              budget=COLORING_BUDGET, block_size=4096, workers=1):
    if r < 1:
        raise InvalidInputError('Number of colors must be positive')
    if mode not in ('exhaustive', 'sampled'):
        raise InvalidInputError('Unknown search mode {0!r}'.format(mode))

    n = host.size
    copies = _copy_index_sets(host, pattern, tol)
    copy_array = np.array(copies, dtype=np.int64).reshape(len(copies), pattern.size)
    logger.info('%s copies of the pattern in a host of %s points', len(copies), n)

    if mode == 'exhaustive':
        total = r ** n
        if total > budget:
            raise SizeLimitError('{0}^{1} colorings exceed the budget {2}'.format(r, n, budget))
        blocks = [(start, min(start + block_size, total), n, r, copy_array) for start in range(0, total, block_size)]
        found = None
        if workers > 1 and len(blocks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                for index in executor.map(_first_counterexample, blocks):
                    if index is not None:
                        found = index
                        break
        else:
            for block in blocks:
                found = _first_counterexample(block)
                if found is not None:
                    break
        counterexample = None
        if found is not None:
            counterexample = Coloring(r, tuple(int(c) for c in _digits(np.array([found], dtype=np.int64), n, r)[0]))
        return ColoringSearchResult(mode, r, counterexample is None, counterexample, total, copies, None)

    rng = np.random.default_rng(seed)
    counterexamples = []
    for start in range(0, samples, block_size):
        colorings = rng.integers(0, r, size=(min(block_size, samples - start), n))
        bad = colorings[~_has_monochromatic(colorings, copy_array)]
        if bad.size:
            counterexamples.append(bad)
    counterexample = None
    if counterexamples:
        bad = np.vstack(counterexamples)
        first = bad[np.lexsort(bad.T[::-1])[0]]
        counterexample = Coloring(r, tuple(int(c) for c in first))
    return ColoringSearchResult(mode, r, False if counterexample else None, counterexample, samples, copies, seed)


def extract_dense_free_subset(config, base_labels, spec, tol):
    if config.size == 0:
        raise InvalidInputError('Can not extract from an empty configuration')
    if base_labels is None or len(base_labels) != config.size or any(label is None for label in base_labels):
        raise InvalidInputError('Every point needs a base pair label')
    base_labels = [_check_pair(tuple(label)) for label in base_labels]

    fibers = {}
    for index, label in enumerate(base_labels):
        fibers.setdefault(label, []).append(index)
    weights = {label: Fraction(len(indices), config.size) for label, indices in fibers.items()}
    independent = weighted_independent_set(sorted(fibers), weights)

    a_sq = spec.a_sq
    for e, e2 in itertools.combinations(independent.members, 2):
        value = predicted_sq_distance(e, e2, spec)
        if value == a_sq or abs(float(value) - float(a_sq)) <= tol:
            raise ConsistencyError('Base labels {0} and {1} of the extracted set form a segment'.format(e, e2))

    indices = sorted(i for label in independent.members for i in fibers[label])
    ratio = Fraction(len(indices), config.size)
    logger.debug('Extracted %s of %s points from %s fibers', len(indices), config.size, len(fibers))
    return DensityExtraction(tuple(indices), config.select(indices), ratio, independent)


def classify_projection(base_labels):
    labels = sorted(set(_check_pair(tuple(label)) for label in base_labels))
    if len(labels) == 1:
        return 'fiber'
    if len(labels) == 2 and shift_adjacent(*labels):
        return 'segment'
    raise ConsistencyError('Copy projects onto {0}, neither a point nor a segment'.format(labels))


def brute_force_copies(host, pattern, tol):
    """Every ordered injection of `pattern` into `host` realizing all distances within `tol`,
    evaluated as one dense boolean tensor over host index tuples"""
    m, n = pattern.size, host.size
    if m == 0:
        return [()]
    if n ** m > ORACLE_BUDGET:
        raise SizeLimitError('{0}^{1} injections exceed the oracle budget'.format(n, m))
    host_dist = np.sqrt(squared_distance_matrix(host).as_array())
    pattern_dist = np.sqrt(squared_distance_matrix(pattern).as_array())
    distinct = ~np.eye(n, dtype=bool)

    tensor = np.ones((n,) * m, dtype=bool)
    for a, b in itertools.combinations(range(m), 2):
        shape = [1] * m
        shape[a] = shape[b] = n
        allowed = (np.abs(host_dist - pattern_dist[a, b]) <= tol) & distinct
        tensor &= allowed.reshape(shape)
    return [tuple(int(i) for i in row) for row in np.argwhere(tensor)]
