import itertools
import logging
import numpy as np

from collections import namedtuple
from pramsey.exceptions import DegenerateConfigError, InvalidInputError, NotEmbeddableError, SizeLimitError
from pramsey.geometry import PointConfig, nonnegative_fit, squared_distance_matrix
from scipy.linalg import null_space

logger = logging.getLogger(__name__)

VERTEX_MAPS = ('pairs', 'cuts', 'auto')
MAX_CUT_DIMENSION = 14


class BrickEmbedding(namedtuple('BrickEmbedding', 'n,axes,u,method')):

    """Simplex vertices placed on the vertices of a brick.

    Every axis is recorded by the set of simplex vertices that sit at coordinate c = sqrt(u) on it,
    all other vertices sit at 0.  With the pair vertex map axis {j, k} holds exactly j and k."""

    @property
    def dim(self):
        return len(self.axes)

    @property
    def sides(self):
        return tuple(float(np.sqrt(u)) for u in self.u)

    @property
    def vertex_map(self):
        return tuple(tuple(int(i in side) for side in self.axes) for i in range(self.n))

    def u_map(self):
        return dict(zip(self.axes, self.u))

    def points(self, labels=None):
        coords = np.array(self.vertex_map, dtype=float).reshape(self.n, self.dim) * np.array(self.sides)
        return PointConfig.from_array(coords, labels)

    def to_json(self):
        return {'n': self.n, 'axes': self.axes, 'u': self.u, 'method': self.method}


def _separation_matrix(pairs, sides):
    return np.array([[float((p in side) != (q in side)) for side in sides] for p, q in pairs]).reshape(
        len(pairs), len(sides))


def _solve_pairs(pairs, target, tol, scale):
    system = _separation_matrix(pairs, pairs)
    if np.linalg.matrix_rank(system) < len(pairs):
        raise DegenerateConfigError('Pair brick system of size {0} is singular'.format(len(pairs)))
    u = np.linalg.solve(system, target)
    if np.min(u) < -tol * scale:
        raise NotEmbeddableError('Pair brick system needs a negative side square {0:.3g}'.format(np.min(u)))
    return list(pairs), np.maximum(u, 0.0)


def _reduce_support(system, weights):
    """Moves along null directions of the supporting columns until they are independent"""
    weights = weights.copy()
    while True:
        support = np.flatnonzero(weights > 0)
        kernel = null_space(system[:, support]) if support.size else np.zeros((0, 0))
        if kernel.shape[1] == 0:
            return weights
        direction = kernel[:, 0]
        if not np.any(direction > 0):
            direction = -direction
        positive = direction > 0
        ratios = weights[support][positive] / direction[positive]
        step = np.argmin(ratios)
        weights[support] = np.maximum(weights[support] - ratios[step] * direction, 0.0)
        weights[support[np.flatnonzero(positive)[step]]] = 0.0


def _solve_cuts(n, pairs, target, tol, scale):
    d = n - 1
    if d > MAX_CUT_DIMENSION:
        raise SizeLimitError('Cut decomposition is limited to {0} dimensions'.format(MAX_CUT_DIMENSION))
    cuts = [side for size in range(1, n) for side in itertools.combinations(range(1, n), size)]
    system = _separation_matrix(pairs, cuts)
    weights, rnorm = nonnegative_fit(system, target)
    if rnorm > tol * scale:
        raise NotEmbeddableError('Squared distances are not a nonnegative cut combination (residual {0:.3g})'
                                 .format(rnorm))
    weights = _reduce_support(system, weights)

    axes = [cuts[i] for i in np.flatnonzero(weights > 0)]
    u = [float(weights[i]) for i in np.flatnonzero(weights > 0)]
    for side in cuts:
        if len(axes) >= len(pairs):
            break
        if side not in axes:
            axes.append(side)
            u.append(0.0)
    return axes, np.array(u)


def brick_embed(config, tol=1e-9, vertex_map='pairs'):
    if vertex_map not in VERTEX_MAPS:
        raise InvalidInputError('Unknown vertex map {0!r}'.format(vertex_map))
    n = config.size
    if n < 2:
        raise InvalidInputError('Brick embedding needs at least two points')

    pairs = list(itertools.combinations(range(n), 2))
    matrix = squared_distance_matrix(config).as_array()
    target = np.array([matrix[p, q] for p, q in pairs])
    scale = max(1.0, float(np.max(target)))

    method = 'pairs' if vertex_map != 'cuts' else 'cuts'
    if method == 'pairs':
        try:
            axes, u = _solve_pairs(pairs, target, tol, scale)
        except (DegenerateConfigError, NotEmbeddableError) as e:
            if vertex_map == 'pairs':
                raise
            logger.info('%s, decomposing over cuts instead', e)
            method = 'cuts'
    if method == 'cuts':
        axes, u = _solve_cuts(n, pairs, target, tol, scale)

    embedding = BrickEmbedding(n, tuple(tuple(side) for side in axes), tuple(float(v) for v in u), method)
    reconstructed = squared_distance_matrix(embedding.points()).as_array()
    error = float(np.max(np.abs(np.sqrt(reconstructed) - np.sqrt(matrix))))
    if error > tol:
        raise NotEmbeddableError('Brick reproduces the distances only within {0:.3g}'.format(error))
    logger.debug('Brick of dimension %s via %s, smallest side square %.6g', embedding.dim, method, min(u))
    return embedding
