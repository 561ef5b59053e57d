import abc
import itertools
import logging
import numpy as np

from collections import namedtuple
from fractions import Fraction
from pramsey.exceptions import InvalidInputError, SearchFailureError, SizeLimitError
from pramsey.geometry import PointConfig, product
from pramsey.utils import is_exact, parse_number, sqrt_number

logger = logging.getLogger(__name__)

MAX_BRICK_DIMENSION = 20
GAMMA_BUDGET = 10000


def _check_pair(pair):
    try:
        i, j = pair
    except (TypeError, ValueError):
        raise InvalidInputError('Not a pair: {0!r}'.format(pair))
    if not (isinstance(i, int) and isinstance(j, int)) or isinstance(i, bool) or isinstance(j, bool):
        raise InvalidInputError('Pair entries must be integers: {0!r}'.format(pair))
    if i < 1 or i >= j:
        raise InvalidInputError('Malformed pair {0!r}: need 1 <= i < j'.format(pair))
    return i, j


class SegmentSpec(namedtuple('SegmentSpec', 'a_sq,gamma')):

    """Segment configuration Y_A for a segment whose squared length is `a_sq`.

    Point y_e for e = {i, j} is beta * e_i - beta * gamma * e_j with
    beta = a / sqrt(2 * (1 + gamma + gamma ** 2))."""

    def __new__(cls, a_sq, gamma):
        if not a_sq > 0:
            raise InvalidInputError('Segment length must be positive')
        if not gamma > 0:
            raise InvalidInputError('gamma must be positive')
        if is_exact(a_sq):
            a_sq = Fraction(a_sq)
        if is_exact(gamma):
            gamma = Fraction(gamma)
        return super(SegmentSpec, cls).__new__(cls, a_sq, gamma)

    @classmethod
    def from_length(cls, a, gamma):
        if not a > 0:
            raise InvalidInputError('Segment length must be positive')
        return cls(a * a, gamma)

    @property
    def exact(self):
        return is_exact(self.a_sq) and is_exact(self.gamma)

    @property
    def a(self):
        return sqrt_number(self.a_sq)

    @property
    def beta_sq(self):
        return self.a_sq / (2 * (1 + self.gamma + self.gamma ** 2))

    @property
    def beta(self):
        return sqrt_number(self.beta_sq)

    def gamma_values(self):
        """The three squared distances that move with gamma (shared first, shared second, disjoint)"""
        unit = 2 * self.beta_sq
        return unit * self.gamma ** 2, unit, unit * (1 + self.gamma ** 2)

    def to_json(self):
        return {'a_sq': self.a_sq, 'gamma': self.gamma}


class SpreadSpec(namedtuple('SpreadSpec', 'c')):

    def __new__(cls, c):
        c = tuple(Fraction(v) if is_exact(v) else float(v) for v in c)
        if not c:
            raise InvalidInputError('Spread weight vector must be nonempty')
        return super(SpreadSpec, cls).__new__(cls, c)

    @property
    def k(self):
        return len(self.c)

    @property
    def exact(self):
        return all(is_exact(v) for v in self.c)

    @property
    def norm_sq(self):
        if self.exact:
            return sum((v * v for v in self.c), Fraction(0))
        return float(np.dot(self.c, self.c))

    @property
    def norm(self):
        return sqrt_number(self.norm_sq)

    def to_json(self):
        return {'c': self.c}


class BrickSpec(namedtuple('BrickSpec', 'sides_sq')):

    def __new__(cls, sides_sq):
        sides_sq = tuple(Fraction(v) if is_exact(v) else float(v) for v in sides_sq)
        if any(not s > 0 for s in sides_sq):
            raise InvalidInputError('Brick sides must be positive')
        return super(BrickSpec, cls).__new__(cls, sides_sq)

    @classmethod
    def from_sides(cls, sides):
        return cls([s * s for s in sides])

    @property
    def d(self):
        return len(self.sides_sq)

    @property
    def sides(self):
        return tuple(sqrt_number(s) for s in self.sides_sq)

    def to_json(self):
        return {'sides_sq': self.sides_sq}


def predicted_sq_distance(e, e2, spec):
    i, j = _check_pair(e)
    k, l = _check_pair(e2)
    unit = 2 * spec.beta_sq
    if (i, j) == (k, l):
        return 0 * unit
    if i == k:
        return unit * spec.gamma ** 2
    if j == l:
        return unit
    if j == k or l == i:
        return spec.a_sq
    return unit * (1 + spec.gamma ** 2)


def segment_config_points(spec, pairs):
    pairs = [_check_pair(p) for p in pairs]
    dim = max([j for _, j in pairs] or [0])
    points = []
    for i, j in pairs:
        point = [0] * dim
        point[i - 1] = 1
        point[j - 1] = -spec.gamma
        points.append(point)
    if not pairs:
        return PointConfig.from_coordinates([], [], None, 0)
    return PointConfig.from_coordinates(points, pairs, [spec.beta_sq] * dim, dim)


def brick_points(spec):
    if spec.d > MAX_BRICK_DIMENSION:
        raise SizeLimitError('Brick dimension {0} exceeds {1}'.format(spec.d, MAX_BRICK_DIMENSION))
    vertices = list(itertools.product((0, 1), repeat=spec.d))
    return PointConfig.from_coordinates(vertices, vertices, spec.sides_sq, spec.d)


def spread_vector(spec, tuple_, dim):
    point = [0] * dim
    for value, index in zip(spec.c, tuple_):
        point[index - 1] = value
    return point


def spread_points(spec, ground):
    ground = sorted(set(ground))
    if any(not isinstance(i, int) or i < 1 for i in ground):
        raise InvalidInputError('Ground set must hold positive integers')
    if len(ground) < spec.k:
        raise InvalidInputError('Ground set of size {0} is smaller than k = {1}'.format(len(ground), spec.k))
    dim = ground[-1]
    tuples = list(itertools.combinations(ground, spec.k))
    return PointConfig.from_coordinates([spread_vector(spec, t, dim) for t in tuples], tuples, None, dim)


def tuple_runs(tuple_):
    """
    >>> tuple_runs((1, 2, 3, 7, 9, 10))
    [[1, 3], [7, 1], [9, 2]]
    """
    runs = []
    for index in tuple_:
        if runs and runs[-1][0] + runs[-1][1] == index:
            runs[-1][1] += 1
        else:
            runs.append([index, 1])
    return runs


def runs_to_tuple(runs):
    """
    >>> runs_to_tuple([[1, 3], [7, 1]])
    (1, 2, 3, 7)
    """
    return tuple(index for start, length in runs for index in range(start, start + length))


def stern_brocot_rationals():
    """1, then level by level the Stern-Brocot values above 1 in decreasing order,
    each one followed by its reciprocal

    >>> [str(v) for v in itertools.islice(stern_brocot_rationals(), 11)]
    ['1', '2', '1/2', '3', '1/3', '3/2', '2/3', '4', '1/4', '5/2', '2/5']
    """
    yield Fraction(1)
    # right half of the tree as numerator/denominator pairs, 1/0 standing for infinity
    row = [(1, 1), (1, 0)]
    while True:
        mediants = [(p[0] + q[0], p[1] + q[1]) for p, q in zip(row, row[1:])]
        for num, den in reversed(mediants):
            yield Fraction(num, den)
            yield Fraction(den, num)
        merged = [row[0]]
        for mediant, right in zip(mediants, row[1:]):
            merged.extend([mediant, right])
        row = merged


def _difference_set(host_sq_dists, pattern_sq_dists):
    host = [0] + list(host_sq_dists)
    pattern = [0] + list(pattern_sq_dists)
    if all(is_exact(v) for v in host + pattern):
        return sorted({Fraction(s) - Fraction(t) for s in pattern for t in host})
    return np.unique(np.subtract.outer(np.array(pattern, dtype=float), np.array(host, dtype=float)).ravel())


def segment_separation(spec, host_sq_dists, pattern_sq_dists, differences=None):
    """Smallest gap between a gamma-dependent squared distance of `spec` and a difference s - t
    with s a pattern squared distance (or 0) and t a host squared distance (or 0)"""
    if differences is None:
        differences = _difference_set(host_sq_dists, pattern_sq_dists)
    values = spec.gamma_values()
    if isinstance(differences, list) and spec.exact:
        return min(abs(v - d) for v in values for d in differences)
    differences = np.asarray(differences, dtype=float)
    return float(min(np.min(np.abs(differences - float(v))) for v in values))


def choose_gamma(a, host_sq_dists, pattern_sq_dists, margin, budget=GAMMA_BUDGET):
    if not a > 0:
        raise InvalidInputError('Segment length must be positive')
    if not margin > 0:
        raise InvalidInputError('margin must be positive')
    a_sq = a * a
    differences = _difference_set(host_sq_dists, pattern_sq_dists)
    best = None
    for count, gamma in enumerate(stern_brocot_rationals()):
        if count >= budget:
            break
        separation = segment_separation(SegmentSpec(a_sq, gamma), None, None, differences)
        if separation >= margin:
            logger.debug('gamma %s accepted after %s candidates (separation %s)', gamma, count + 1, separation)
            return gamma
        if best is None or separation > best:
            best = separation
    raise SearchFailureError('No gamma within {0} candidates separates the distance sets by {1}'
                             .format(budget, margin), best)


class ConfigDescriptor(metaclass=abc.ABCMeta):

    """Lazy description of a countable configuration, materialized on the ground set [n]"""

    kind = None

    @abc.abstractmethod
    def materialize(self, n):
        """Finite truncation on the ground set [n]"""

    @abc.abstractmethod
    def _payload(self):
        """Variant specific JSON fields"""

    def to_json(self):
        ret = self._payload()
        ret['type'] = self.kind
        return ret

    @staticmethod
    def _check_size(n):
        if not isinstance(n, int) or n < 1:
            raise InvalidInputError('Truncation parameter must be a positive integer, got {0!r}'.format(n))


class FiniteDescriptor(ConfigDescriptor):

    kind = 'finite'

    def __init__(self, config):
        self.config = config

    def materialize(self, n):
        self._check_size(n)
        return self.config

    def _payload(self):
        return {'config': self.config.to_json()}


class SegmentDescriptor(ConfigDescriptor):

    kind = 'segment'

    def __init__(self, spec):
        self.spec = spec

    def materialize(self, n):
        self._check_size(n)
        return segment_config_points(self.spec, itertools.combinations(range(1, n + 1), 2))

    def _payload(self):
        return self.spec.to_json()


class SpreadDescriptor(ConfigDescriptor):

    kind = 'spread'

    def __init__(self, spec):
        self.spec = spec

    def materialize(self, n):
        self._check_size(n)
        if n < self.spec.k:
            return PointConfig.from_coordinates([], [], None, n)
        return spread_points(self.spec, range(1, n + 1))

    def _payload(self):
        return self.spec.to_json()


class BrickDescriptor(ConfigDescriptor):

    kind = 'brick'

    def __init__(self, spec):
        self.spec = spec

    def materialize(self, n):
        self._check_size(n)
        return brick_points(self.spec)

    def _payload(self):
        return self.spec.to_json()


class ProductDescriptor(ConfigDescriptor):

    kind = 'product'

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def materialize(self, n):
        self._check_size(n)
        return product(self.left.materialize(n), self.right.materialize(n))

    def _payload(self):
        return {'left': self.left.to_json(), 'right': self.right.to_json()}


def materialize(desc, n):
    return desc.materialize(n)


def descriptor_from_json(data):
    if not isinstance(data, dict) or 'type' not in data:
        raise InvalidInputError('Descriptor JSON must be an object with a "type"')
    kind = data['type']
    try:
        if kind == 'finite':
            return FiniteDescriptor(PointConfig.from_json(data['config']))
        if kind == 'segment':
            return SegmentDescriptor(SegmentSpec(parse_number(data['a_sq']), parse_number(data['gamma'])))
        if kind == 'spread':
            return SpreadDescriptor(SpreadSpec([parse_number(v) for v in data['c']]))
        if kind == 'brick':
            return BrickDescriptor(BrickSpec([parse_number(v) for v in data['sides_sq']]))
        if kind == 'product':
            return ProductDescriptor(descriptor_from_json(data['left']), descriptor_from_json(data['right']))
    except KeyError as e:
        raise InvalidInputError('Descriptor of type {0} misses field {1}'.format(kind, e))
    raise InvalidInputError('Unknown descriptor type {0!r}'.format(kind))


def tower_descriptor(segments, base):
    """Y_0 = base, Y_{i+1} = Segment_i x Y_i"""
    desc = base
    for spec in segments:
        desc = ProductDescriptor(SegmentDescriptor(spec), desc)
    return desc
