"""Approximating a shrunk simplex by points of a spread configuration.

The points z_i = spread(c, J_i) are built from blocks.  Inside a block every point uses the same
run of weights, shifted by a per-point offset taken from a shift pattern, so the inner product of
two points is the autocorrelation of the block sequences at the difference of their shifts.  A
block made of a sine-windowed cosine run and the matching sine run has autocorrelation
R**2 * weight * W(s) * cos(omega * s), where W is the normalized window autocorrelation.

The search fits the target correlation matrix of the simplex (lifted onto the sphere of the spread
radius) with a nonnegative combination of such (pattern, omega) columns plus a slack column whose
points never overlap.  Columns are generated on demand from the residual, and the span of the
shift patterns grows when the current span can not reach the target.  A zero residual of the fit
means the realization below reproduces the fitted Gram matrix exactly."""

import itertools
import logging
import numpy as np

from collections import namedtuple
from pramsey.constructions import SpreadSpec, tuple_runs
from pramsey.exceptions import InvalidInputError, SearchFailureError
from pramsey.geometry import PointConfig, circumsphere, nonnegative_fit
from scipy.linalg import eigh, orthogonal_procrustes

logger = logging.getLogger(__name__)

FIT_TOLERANCE = 1e-11
COLUMNS_PER_ROUND = 16
PATTERN_CHUNK = 512
BISECTION_STEPS = 200
NEGLIGIBLE = 1e-14

Atom = namedtuple('Atom', 'shifts,omega,weight')


class SpreadApproximation(namedtuple('SpreadApproximation',
                                     'spec,assignments,points,residual,radius,sigma,span,atoms,slack')):

    @property
    def ground(self):
        return self.points.dim

    def to_json(self):
        return {
            'c': self.spec.c,
            'k': self.spec.k,
            'n': self.ground,
            'assignments': [tuple_runs(t) for t in self.assignments],
            'residual': self.residual,
            'radius': self.radius,
            'sigma': self.sigma,
            'span': self.span,
            'atoms': [{'shifts': a.shifts, 'omega': a.omega, 'weight': a.weight} for a in self.atoms],
            'slack': self.slack
        }


def shift_patterns(n, span):
    """Injective shifts of n points into {0..span} with smallest shift 0, one per vector of absolute lags

    >>> shift_patterns(2, 2)[0]
    [(0, 1), (0, 2)]
    """
    pairs = list(itertools.combinations(range(n), 2))
    seen = {}
    for shifts in itertools.permutations(range(span + 1), n):
        if min(shifts) != 0:
            continue
        lags = tuple(abs(shifts[i] - shifts[j]) for i, j in pairs)
        if lags not in seen:
            seen[lags] = shifts
    return list(seen.values()), np.array(list(seen), dtype=int).reshape(len(seen), len(pairs))


def sine_window(length):
    return np.sin(np.pi * np.arange(1, length + 1) / (length + 1))


def window_correlation(window, span):
    """Autocorrelation of `window` at lags 0..span, normalized to 1 at lag 0"""
    full = np.correlate(window, window, mode='full')
    center = len(window) - 1
    return full[center:center + span + 1] / full[center]


def _lifted_target(s1, radius, delta):
    """Recentres `s1` on the sphere of `radius` and picks the scale sigma whose scaled copy sits
    delta/2 away from it, deeper inside the reachable correlations"""
    rho, center = circumsphere(s1)
    y = s1.coordinates() - center
    lift = np.sqrt(max(radius ** 2 - rho ** 2, 0.0))

    def height(sigma):
        return np.sqrt(max(radius ** 2 - (sigma * rho) ** 2, 0.0))

    def distance(sigma):
        return float(np.hypot((1.0 - sigma) * rho, height(sigma) - lift))

    upper = min(1.0, radius / rho)
    if distance(upper) > delta / 2.0:
        raise InvalidInputError('Points lie {0:.3g} away from the sphere of radius {1:.6g}, more than delta/2'
                                .format(distance(upper), radius))
    lower = min(0.5, upper)
    if distance(lower) <= delta / 2.0:
        sigma = lower
    else:
        for _ in range(BISECTION_STEPS):
            middle = (lower + upper) / 2.0
            if distance(middle) <= delta / 2.0:
                upper = middle
            else:
                lower = middle
        sigma = upper

    target = np.hstack([y, np.full((s1.size, 1), lift)])
    gram = sigma ** 2 * y.dot(y.T) + height(sigma) ** 2
    return target, gram, sigma


def _scores(lags, corr, omegas, residual):
    ret = np.empty((lags.shape[0], omegas.size))
    for start in range(0, lags.shape[0], PATTERN_CHUNK):
        chunk = lags[start:start + PATTERN_CHUNK]
        values = corr[chunk][:, None, :] * np.cos(omegas[None, :, None] * chunk[:, None, :])
        ret[start:start + chunk.shape[0]] = values.dot(residual[:-1]) + residual[-1]
    return ret


def _decompose(rhs, n, span, params):
    patterns, lags = shift_patterns(n, span)
    corr = window_correlation(sine_window(params.window * span), span)
    omegas = np.linspace(0.0, np.pi, params.grid * span + 1)

    slack = np.zeros(rhs.size)
    slack[-1] = 1.0
    keys, columns = [None], [slack]
    rnorm = None
    for round_ in range(params.search_budget):
        weights, rnorm = nonnegative_fit(np.column_stack(columns), rhs)
        if rnorm <= FIT_TOLERANCE:
            weights = weights / weights.sum()
            atoms = [Atom(patterns[k[0]], float(omegas[k[1]]), float(w))
                     for k, w in zip(keys, weights) if k is not None and w > 0]
            logger.info('Spread fit at span %s after %s rounds with %s atoms', span, round_ + 1, len(atoms))
            return atoms, float(weights[0]), rnorm

        residual = rhs - np.column_stack(columns).dot(weights)
        kept = [i for i, w in enumerate(weights) if i == 0 or w > 0]
        keys, columns = [keys[i] for i in kept], [columns[i] for i in kept]

        scores = _scores(lags, corr, omegas, residual)
        for key in keys[1:]:
            scores[key] = -np.inf
        order = np.argsort(scores, axis=None)[::-1][:COLUMNS_PER_ROUND]
        added = [np.unravel_index(i, scores.shape) for i in order if scores.flat[i] > FIT_TOLERANCE ** 2]
        if not added:
            break
        for q, o in added:
            keys.append((int(q), int(o)))
            columns.append(np.append(corr[lags[q]] * np.cos(omegas[o] * lags[q]), 1.0))
        logger.debug('span %s round %s: residual %.3g, %s active columns', span, round_, rnorm, len(columns))
    return None, None, rnorm


def _realize(atoms, slack_weight, n, span, radius, window_factor, labels):
    window = sine_window(window_factor * span)
    energy = float(window.dot(window))
    ell = np.arange(window.size)
    gap = np.zeros(span)

    blocks = []
    for shifts, group in itertools.groupby(sorted(atoms), key=lambda atom: atom.shifts):
        parts = []
        for atom in group:
            alpha = radius * np.sqrt(atom.weight / energy)
            parts.extend([alpha * window * np.cos(atom.omega * ell), gap,
                          alpha * window * np.sin(atom.omega * ell), gap])
        blocks.append((shifts, np.concatenate(parts[:-1])))
    if slack_weight > 0:
        blocks.append((tuple(range(n)), np.array([radius * np.sqrt(slack_weight)])))

    base, weights, positions = 0, [], [[] for _ in range(n)]
    for shifts, sequence in blocks:
        nonzero = np.flatnonzero(np.abs(sequence) > NEGLIGIBLE * radius)
        weights.append(sequence[nonzero])
        for i in range(n):
            positions[i].append(base + shifts[i] + nonzero + 1)
        base += sequence.size + max(shifts)

    c = np.concatenate(weights)
    assignments = tuple(tuple(int(v) for v in np.concatenate(p)) for p in positions)
    coords = np.zeros((n, base))
    for i, tuple_ in enumerate(assignments):
        coords[i, np.array(tuple_) - 1] = c
    return SpreadSpec(c), assignments, PointConfig.from_array(coords, labels)


def alignment_residual(points, target):
    """Largest point distance after the best rotation of `points` onto `target`"""
    gram = points.dot(points.T)
    evals, evecs = eigh((gram + gram.T) / 2.0)
    coords = evecs * np.sqrt(np.maximum(evals, 0.0))
    width = max(coords.shape[1], target.shape[1])
    coords = np.hstack([coords, np.zeros((coords.shape[0], width - coords.shape[1]))])
    target = np.hstack([target, np.zeros((target.shape[0], width - target.shape[1]))])
    rotation, _ = orthogonal_procrustes(coords, target)
    return float(np.max(np.linalg.norm(coords.dot(rotation) - target, axis=1)))


def spread_approximate(s1, radius, params):
    delta = params.delta
    if delta is None or not delta > 0:
        raise SearchFailureError('An exact spread representation is not searched for, delta must be positive')
    if not radius > 0:
        raise InvalidInputError('Spread radius must be positive')
    n = s1.size
    if n == 0:
        raise InvalidInputError('Nothing to approximate')
    if n == 1:
        points = PointConfig.from_array([[radius]], s1.labels)
        return SpreadApproximation(SpreadSpec([radius]), ((1,),), points, 0.0, radius, 1.0, 0, (), 0.0)

    target, gram, sigma = _lifted_target(s1, radius, delta)
    pairs = list(itertools.combinations(range(n), 2))
    rhs = np.append([gram[i, j] / radius ** 2 for i, j in pairs], 1.0)

    best = None
    for span in range(n - 1, params.max_span + 1):
        atoms, slack, rnorm = _decompose(rhs, n, span, params)
        if atoms is not None:
            break
        logger.info('Span %s can not reach the target correlations (residual %.3g)', span, rnorm)
        best = rnorm if best is None else min(best, rnorm)
    else:
        raise SearchFailureError('No spread decomposition with span up to {0}'.format(params.max_span), best)

    spec, assignments, points = _realize(atoms, slack, n, span, radius, params.window, s1.labels)
    residual = alignment_residual(points.coordinates(), target)
    if residual >= delta:
        raise SearchFailureError('Spread points lie {0:.3g} away from the target'.format(residual), residual)
    logger.info('Spread approximation with k=%s, n=%s, residual %.3g (delta %.3g)', spec.k, points.dim,
                residual, delta)
    return SpreadApproximation(spec, assignments, points, residual, radius, sigma, span, tuple(atoms), slack)
