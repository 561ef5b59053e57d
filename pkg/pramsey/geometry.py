import logging
import numpy as np

from collections import namedtuple
from fractions import Fraction
from pramsey.exceptions import DegenerateConfigError, InvalidInputError, NotEmbeddableError
from pramsey.utils import format_number, is_exact, parse_number
from scipy.linalg import eigh, lstsq, null_space
from scipy.optimize import lsq_linear, nnls
from scipy.spatial.distance import pdist, squareform

logger = logging.getLogger(__name__)

EIGEN_CUTOFF = 1e-12
FIT_CUTOFF = 1e-12


def _freeze_label(label):
    if isinstance(label, list):
        return tuple(_freeze_label(v) for v in label)
    return label


class PointConfig(namedtuple('PointConfig', 'dim,points,labels,axis_sq')):

    """A finite labeled list of points in a common dimension.

    Exact configurations keep `points` as a tuple of tuples of rationals; the real coordinate k
    of a point is then `sqrt(axis_sq[k]) * point[k]`, which keeps squared distances rational when
    the coordinates themselves are not (segment configurations, bricks).  Float configurations keep
    a 2-d numpy array and `axis_sq` is None."""

    @classmethod
    def from_coordinates(cls, points, labels=None, axis_sq=None, dim=None):
        points = [list(p) for p in points]
        if dim is None:
            dim = len(points[0]) if points else 0
        for p in points:
            if len(p) != dim:
                raise InvalidInputError('Every point must have {0} coordinates, got {1}'.format(dim, len(p)))
        if labels is None:
            labels = tuple(range(len(points)))
        else:
            labels = tuple(_freeze_label(label) for label in labels)
            if len(labels) != len(points):
                raise InvalidInputError('Got {0} labels for {1} points'.format(len(labels), len(points)))
        if axis_sq is not None:
            axis_sq = tuple(axis_sq)
            if len(axis_sq) != dim:
                raise InvalidInputError('axis_sq must have {0} entries'.format(dim))
            if any(s < 0 for s in axis_sq):
                raise InvalidInputError('axis_sq entries must be nonnegative')

        values = [v for p in points for v in p] + list(axis_sq or ())
        if all(is_exact(v) for v in values):
            points = tuple(tuple(Fraction(v) for v in p) for p in points)
            if axis_sq is not None:
                axis_sq = tuple(Fraction(v) for v in axis_sq)
                if all(s == 1 for s in axis_sq):
                    axis_sq = None
            return cls(dim, points, labels, axis_sq)

        array = np.array(points, dtype=float).reshape(len(points), dim)
        if axis_sq is not None:
            array = array * np.sqrt(np.array(axis_sq, dtype=float))
        return cls(dim, array, labels, None)

    @classmethod
    def from_array(cls, array, labels=None):
        array = np.asarray(array, dtype=float)
        if array.ndim != 2:
            raise InvalidInputError('Coordinates must form a 2-d array')
        if labels is None:
            labels = tuple(range(array.shape[0]))
        return cls(array.shape[1], array, tuple(labels), None)

    @property
    def exact(self):
        return isinstance(self.points, tuple)

    @property
    def size(self):
        return len(self.points)

    def coordinates(self):
        """Real coordinates as a float array of shape (size, dim)"""
        if not self.exact:
            return self.points
        array = np.array([[float(v) for v in p] for p in self.points], dtype=float).reshape(self.size, self.dim)
        if self.axis_sq is not None:
            array = array * np.sqrt(np.array([float(s) for s in self.axis_sq]))
        return array

    def scales_sq(self):
        return self.axis_sq if self.axis_sq is not None else (Fraction(1),) * self.dim

    def select(self, indices):
        indices = list(indices)
        labels = tuple(self.labels[i] for i in indices)
        if self.exact:
            return self._replace(points=tuple(self.points[i] for i in indices), labels=labels)
        return self._replace(points=self.points[np.array(indices, dtype=int)].reshape(len(indices), self.dim),
                             labels=labels)

    def to_json(self):
        ret = {'dim': self.dim, 'points': self.points, 'labels': self.labels}
        if self.axis_sq is not None:
            ret['axis_sq'] = self.axis_sq
        return ret

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or 'points' not in data:
            raise InvalidInputError('PointConfig JSON must be an object with "points"')
        points = [[parse_number(v) for v in p] for p in data['points']]
        axis_sq = data.get('axis_sq')
        if axis_sq is not None:
            axis_sq = [parse_number(v) for v in axis_sq]
        return cls.from_coordinates(points, data.get('labels'), axis_sq, data.get('dim'))


class SquaredDistanceMatrix(object):

    def __init__(self, sq):
        if isinstance(sq, np.ndarray):
            self.mode = 'float'
            self.sq = np.array(sq, dtype=float)
            if self.sq.ndim != 2 or self.sq.shape[0] != self.sq.shape[1]:
                raise InvalidInputError('Squared distance matrix must be square')
        else:
            rows = [list(row) for row in sq]
            if any(len(row) != len(rows) for row in rows):
                raise InvalidInputError('Squared distance matrix must be square')
            if all(is_exact(v) for row in rows for v in row):
                self.mode = 'rational'
                self.sq = tuple(tuple(Fraction(v) for v in row) for row in rows)
            else:
                self.mode = 'float'
                self.sq = np.array(rows, dtype=float).reshape(len(rows), len(rows))
        self._validate()

    def _validate(self):
        n = self.n
        if self.mode == 'rational':
            for i in range(n):
                if self.sq[i][i] != 0:
                    raise InvalidInputError('Diagonal entry {0} is not zero'.format(i))
                for j in range(i + 1, n):
                    if self.sq[i][j] != self.sq[j][i]:
                        raise InvalidInputError('Matrix is not symmetric at ({0}, {1})'.format(i, j))
                    if self.sq[i][j] < 0:
                        raise InvalidInputError('Negative entry at ({0}, {1})'.format(i, j))
        else:
            if not np.all(np.isfinite(self.sq)):
                raise InvalidInputError('Matrix has non-finite entries')
            if np.any(np.diag(self.sq) != 0):
                raise InvalidInputError('Diagonal is not zero')
            if not np.array_equal(self.sq, self.sq.T):
                raise InvalidInputError('Matrix is not symmetric')
            if np.any(self.sq < 0):
                raise InvalidInputError('Matrix has negative entries')

    @property
    def n(self):
        return len(self.sq)

    def entry(self, i, j):
        return self.sq[i][j]

    def as_array(self):
        if self.mode == 'float':
            return self.sq
        return np.array([[float(v) for v in row] for row in self.sq], dtype=float).reshape(self.n, self.n)

    def off_diagonal(self):
        return [self.sq[i][j] for i in range(self.n) for j in range(i + 1, self.n)]

    def to_json(self):
        return {'n': self.n, 'mode': self.mode, 'sq': self.sq}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or 'sq' not in data:
            raise InvalidInputError('SquaredDistanceMatrix JSON must be an object with "sq"')
        rows = [[parse_number(v) for v in row] for row in data['sq']]
        if data.get('mode') == 'float':
            return cls(np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(len(rows), len(rows)))
        ret = cls(rows)
        if data.get('mode') == 'rational' and ret.mode != 'rational':
            raise InvalidInputError('Matrix tagged rational holds float entries')
        return ret


NegativeTypeReport = namedtuple('NegativeTypeReport', 'slack,witness')


class CongruenceMap(namedtuple('CongruenceMap', 'correspondence,max_residual')):

    def to_json(self):
        return {'correspondence': list(self.correspondence), 'max_residual': float(self.max_residual)}


def squared_distance_matrix(config):
    if config.exact:
        scales = config.scales_sq()
        n = config.size
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                value = sum((s * (a - b) ** 2 for s, a, b in zip(scales, config.points[i], config.points[j])),
                            Fraction(0))
                rows[i][j] = rows[j][i] = value
        return SquaredDistanceMatrix(rows)
    if config.size < 2:
        return SquaredDistanceMatrix(np.zeros((config.size, config.size)))
    return SquaredDistanceMatrix(squareform(pdist(config.coordinates(), 'sqeuclidean')))


def form_value(matrix, weights):
    """sum over i < j of m_ij * l_i * l_j"""
    weights = np.asarray(weights, dtype=float)
    return float(weights.dot(matrix.as_array()).dot(weights)) / 2.0


def _fix_sign(vector):
    if vector.size and vector[np.argmax(np.abs(vector))] < 0:
        return -vector
    return vector


def negative_type_slack(matrix):
    n = matrix.n
    if n < 2:
        return NegativeTypeReport(0.0, np.zeros(n))
    basis = null_space(np.ones((1, n)))
    restricted = basis.T.dot(matrix.as_array()).dot(basis)
    evals, evecs = eigh((restricted + restricted.T) / 2.0)
    witness = _fix_sign(basis.dot(evecs[:, -1]))
    return NegativeTypeReport(-float(evals[-1]) / 2.0, witness)


def embed_distance_matrix(matrix, tol):
    report = negative_type_slack(matrix)
    if report.slack < -tol:
        raise NotEmbeddableError('Matrix is not of negative type (slack {0:.6g})'.format(report.slack),
                                 report.witness)

    n = matrix.n
    sq = matrix.as_array()
    centering = np.eye(n) - np.ones((n, n)) / n
    gram = -centering.dot(sq).dot(centering) / 2.0
    evals, evecs = eigh((gram + gram.T) / 2.0)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    largest = max(float(evals[0]), 0.0) if n else 0.0
    keep = evals > EIGEN_CUTOFF * largest if largest > 0 else np.zeros(n, dtype=bool)
    coords = evecs[:, keep] * np.sqrt(evals[keep])
    coords = np.column_stack([_fix_sign(col) for col in coords.T]) if coords.shape[1] else np.zeros((n, 0))
    config = PointConfig.from_array(coords)

    scale = float(np.max(sq)) if n else 0.0
    residual = float(np.max(np.abs(squared_distance_matrix(config).as_array() - sq))) if n else 0.0
    if residual > max(tol, EIGEN_CUTOFF * max(1.0, scale)):
        raise NotEmbeddableError('Embedding reproduces the matrix only within {0:.3g}'.format(residual),
                                 report.witness)
    logger.debug('Embedded %s points in dimension %s (residual %.3g)', n, config.dim, residual)
    return config


def nonnegative_fit(matrix, rhs):
    """Nonnegative least squares for `matrix . x = rhs`, returning (x, ||matrix . x - rhs||).

    The residual is recomputed from x, the norm reported by `nnls` is not trusted.  When the
    active set solution is off, a bounded variable least squares solve is tried as well."""
    matrix, rhs = np.asarray(matrix, dtype=float), np.asarray(rhs, dtype=float)
    try:
        x = nnls(matrix, rhs)[0]
    except RuntimeError as e:
        logger.debug('nnls gave up: %s', e)
        x = np.zeros(matrix.shape[1])
    residual = float(np.linalg.norm(matrix.dot(x) - rhs))
    if residual > FIT_CUTOFF * max(1.0, float(np.linalg.norm(rhs))):
        try:
            other = np.maximum(lsq_linear(matrix, rhs, bounds=(0, np.inf), method='bvls').x, 0.0)
        except (ValueError, np.linalg.LinAlgError) as e:
            logger.debug('bvls failed: %s', e)
            return x, residual
        other_residual = float(np.linalg.norm(matrix.dot(other) - rhs))
        if other_residual < residual:
            logger.debug('bvls improved the nonnegative fit from %.3g to %.3g', residual, other_residual)
            x, residual = other, other_residual
    return x, residual


def circumsphere(config):
    if config.size == 0:
        raise InvalidInputError('circumsphere of an empty configuration')
    x = config.coordinates()
    if config.size == 1:
        return 0.0, x[0].copy()

    sq = squared_distance_matrix(config).as_array()
    if np.any(sq[np.triu_indices(config.size, 1)] == 0):
        raise DegenerateConfigError('Configuration has coincident points')

    a = x[1:] - x[0]
    gram = a.dot(a.T)
    t = lstsq(gram, np.diag(gram) / 2.0)[0]
    offset = a.T.dot(t)
    radius = float(np.linalg.norm(offset))
    center = x[0] + offset

    distances = np.linalg.norm(x - center, axis=1)
    if np.max(np.abs(distances - radius)) > 1e-9 * max(1.0, radius):
        raise DegenerateConfigError('No center in the affine hull is equidistant from all points')
    return radius, center


def diameter(config):
    if config.size < 2:
        return 0.0
    matrix = squared_distance_matrix(config)
    return float(np.sqrt(float(max(matrix.off_diagonal()))))


def _match_matrices(host, pattern, tol):
    """For every pattern pair (a, b) a boolean host matrix of pairs realizing the pattern distance"""
    host_sq, pattern_sq = squared_distance_matrix(host), squared_distance_matrix(pattern)
    m, n = pattern.size, host.size
    exact = tol == 0 and host_sq.mode == 'rational' and pattern_sq.mode == 'rational'

    cache, ret = {}, {}
    if not exact:
        host_dist = np.sqrt(host_sq.as_array())
        pattern_dist = np.sqrt(pattern_sq.as_array())
        residuals = {}
    for a in range(m):
        for b in range(a + 1, m):
            value = pattern_sq.entry(a, b)
            if value not in cache:
                if exact:
                    cache[value] = np.array([[host_sq.entry(i, j) == value for j in range(n)] for i in range(n)],
                                            dtype=bool).reshape(n, n)
                else:
                    diff = np.abs(host_dist - pattern_dist[a, b])
                    cache[value] = diff <= tol
                    residuals[value] = diff
            ret[a, b] = cache[value]
            ret[b, a] = cache[value].T

    def residual(correspondence):
        if exact or m < 2:
            return 0.0
        return max(float(residuals[pattern_sq.entry(a, b)][correspondence[a], correspondence[b]])
                   for a in range(m) for b in range(a + 1, m))
    return ret, residual


def find_copies(host, pattern, tol, limit=None, unordered=False):
    """Every injection of `pattern` into `host` realizing all pairwise distances within `tol`,
    in lexicographic order of the host index tuples.

    With `unordered` only the first injection onto each set of host points is kept, so symmetries
    of the pattern are not counted twice and `limit` counts distinct point sets."""
    m, n = pattern.size, host.size
    if m == 0:
        return [CongruenceMap((), 0.0)]
    if m > n:
        return []

    match, residual = _match_matrices(host, pattern, tol)
    results = []
    assignment = []
    seen = set()
    used = np.zeros(n, dtype=bool)

    def extend(depth):
        candidates = ~used
        for a, i in enumerate(assignment):
            candidates = candidates & match[a, depth][i]
        for i in np.flatnonzero(candidates):
            assignment.append(int(i))
            used[i] = True
            if depth + 1 == m:
                key = frozenset(assignment)
                if not unordered or key not in seen:
                    seen.add(key)
                    results.append(CongruenceMap(tuple(assignment), residual(assignment)))
            else:
                extend(depth + 1)
            used[i] = False
            assignment.pop()
            if limit is not None and len(results) >= limit:
                return

    extend(0)
    return results


def _sorted_distances(config):
    matrix = squared_distance_matrix(config)
    if matrix.mode == 'rational':
        return sorted(matrix.off_diagonal())
    return np.sort(np.sqrt(np.array(matrix.off_diagonal(), dtype=float)))


def congruent(a, b, tol):
    if a.size != b.size:
        raise InvalidInputError('Configurations have different sizes: {0} and {1}'.format(a.size, b.size))
    da, db = _sorted_distances(a), _sorted_distances(b)
    if isinstance(da, list) and isinstance(db, list) and tol == 0:
        if da != db:
            return None
    else:
        da = np.sqrt(np.array([float(v) for v in da])) if isinstance(da, list) else da
        db = np.sqrt(np.array([float(v) for v in db])) if isinstance(db, list) else db
        if da.size and np.max(np.abs(da - db)) > tol:
            return None
    copies = find_copies(b, a, tol, limit=1)
    return copies[0] if copies else None


def product(a, b):
    labels = tuple((la, lb) for la in a.labels for lb in b.labels)
    if a.exact and b.exact:
        points = [pa + pb for pa in a.points for pb in b.points]
        axis_sq = None
        if a.axis_sq is not None or b.axis_sq is not None:
            axis_sq = tuple(a.scales_sq()) + tuple(b.scales_sq())
        return PointConfig.from_coordinates(points, labels, axis_sq, a.dim + b.dim)
    xa, xb = a.coordinates(), b.coordinates()
    array = np.hstack([np.repeat(xa, b.size, axis=0), np.tile(xb, (a.size, 1))])
    return PointConfig.from_array(array.reshape(a.size * b.size, a.dim + b.dim), labels)


def join_pointwise(a, b, labels=None):
    """Point i of the result is the concatenation of point i of `a` with point i of `b`"""
    if a.size != b.size:
        raise InvalidInputError('Configurations have different sizes: {0} and {1}'.format(a.size, b.size))
    labels = a.labels if labels is None else labels
    if a.exact and b.exact:
        axis_sq = None
        if a.axis_sq is not None or b.axis_sq is not None:
            axis_sq = tuple(a.scales_sq()) + tuple(b.scales_sq())
        return PointConfig.from_coordinates([pa + pb for pa, pb in zip(a.points, b.points)],
                                            labels, axis_sq, a.dim + b.dim)
    array = np.hstack([a.coordinates(), b.coordinates()])
    return PointConfig.from_array(array.reshape(a.size, a.dim + b.dim), labels)


def describe_distances(config, limit=10):
    """Sorted distinct squared distances, formatted for reports"""
    values = set(squared_distance_matrix(config).off_diagonal())
    return [format_number(v) for v in sorted(values)[:limit]]
