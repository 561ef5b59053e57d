import logging
import numpy as np

from collections import namedtuple
from pramsey.exceptions import DegenerateConfigError, InvalidInputError, NotEmbeddableError, PipelineStageError, \
    PRamseyException, SearchFailureError
from pramsey.geometry import SquaredDistanceMatrix, circumsphere, squared_distance_matrix
from pramsey.pipeline.brick import brick_embed
from pramsey.pipeline.spread import spread_approximate
from pramsey.pipeline.steps import assemble_and_verify, realize_almost_regular, step1_shrink

logger = logging.getLogger(__name__)

_PARAMS = ('delta', 'epsilon', 'margin', 'search_budget', 'max_span', 'window', 'grid', 'radius_split',
           'delta_rounds', 'tol')


class PipelineParams(namedtuple('PipelineParams', _PARAMS)):

    def __new__(cls, delta=None, epsilon=None, margin=1e-6, search_budget=400, max_span=10, window=80, grid=64,
                radius_split=0.75, delta_rounds=8, tol=1e-9):
        for name, value in (('delta', delta), ('epsilon', epsilon)):
            if value is not None and not value > 0:
                raise InvalidInputError('{0} must be positive'.format(name))
        if not margin > 0:
            raise InvalidInputError('margin must be positive')
        if not 0 < radius_split < 1:
            raise InvalidInputError('radius_split must lie strictly between 0 and 1')
        for name, value in (('search_budget', search_budget), ('max_span', max_span), ('window', window),
                            ('grid', grid), ('delta_rounds', delta_rounds)):
            if int(value) < 1:
                raise InvalidInputError('{0} must be a positive integer'.format(name))
        return super(PipelineParams, cls).__new__(cls, delta, epsilon, margin, int(search_budget), int(max_span),
                                                  int(window), int(grid), radius_split, int(delta_rounds), tol)

    @classmethod
    def from_config(cls, config, **overrides):
        values = dict(config.get('pipeline') or {})
        values['tol'] = config.get('tol', 1e-9)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**{k: v for k, v in values.items() if k in _PARAMS})

    def to_json(self):
        return dict(self._asdict())


class PipelineTrace(object):

    """Everything `run_pipeline` computed, in the order the steps produce it"""

    def __init__(self, simplex, params):
        self.simplex = simplex
        self.params = params
        self.d = simplex.size - 1
        self.slack = None
        self.shrink_beta = None
        self.s1 = None
        self.rho = None
        self.rho_prime = None
        self.spread_radius = None
        self.epsilon = None
        self.delta = None
        self.spread = None
        self.s3 = None
        self.step3_deviation = None
        self.brick = None
        self.w = None
        self.f = None
        self.residuals = {}
        self.rounds = []

    @property
    def complete(self):
        return self.f is not None

    def to_json(self):
        return {
            'simplex': self.simplex,
            'params': self.params,
            'd': self.d,
            'slack': self.slack,
            'shrink_beta': self.shrink_beta,
            's1': self.s1,
            'rho': self.rho,
            'rho_prime': self.rho_prime,
            'spread_radius': self.spread_radius,
            'epsilon': self.epsilon,
            'delta': self.delta,
            'spread': self.spread,
            's3': self.s3,
            'step3_deviation': self.step3_deviation,
            'brick': self.brick,
            'f_residual': max(self.residuals.values()) if self.residuals else None,
            'rounds': self.rounds
        }


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except PipelineStageError:
        raise
    except PRamseyException as e:
        logger.error('Pipeline stage %s failed: %s', name, e)
        raise PipelineStageError(name, e)


def _residual_matrix(simplex, spread_points):
    """Squared distances of the simplex minus those of the spread points"""
    residual = squared_distance_matrix(simplex).as_array() - squared_distance_matrix(spread_points).as_array()
    residual = (residual + residual.T) / 2.0
    np.fill_diagonal(residual, 0.0)
    return residual


def _attempt(trace, delta):
    params = trace.params
    stage = 'spread'
    try:
        spread = spread_approximate(trace.s1, trace.spread_radius, params._replace(delta=delta))
        stage = 'step3'
        residual = _residual_matrix(trace.simplex, spread.points)
        off_diagonal = residual[~np.eye(trace.d + 1, dtype=bool)]
        deviation = float(np.max(np.abs(off_diagonal - trace.shrink_beta)))
        if deviation > trace.epsilon * np.sqrt(trace.shrink_beta):
            raise SearchFailureError('Residual squared distances deviate {0:.3g} from beta'.format(deviation),
                                     deviation)
        s3 = realize_almost_regular(SquaredDistanceMatrix(residual), np.sqrt(trace.shrink_beta), trace.epsilon,
                                    params.tol)
        stage = 'brick'
        brick = brick_embed(s3, params.tol, 'auto')
    except (DegenerateConfigError, InvalidInputError, NotEmbeddableError, SearchFailureError) as e:
        trace.rounds.append({'delta': delta, 'stage': stage, 'error': str(e)})
        logger.info('delta %.3g failed at %s: %s', delta, stage, e)
        return stage, e
    except PRamseyException as e:
        trace.rounds.append({'delta': delta, 'stage': stage, 'error': str(e)})
        logger.error('Pipeline stage %s failed: %s', stage, e)
        raise PipelineStageError(stage, e)

    trace.rounds.append({'delta': delta, 'stage': 'brick', 'error': None})
    trace.delta, trace.spread, trace.s3, trace.step3_deviation, trace.brick = delta, spread, s3, deviation, brick
    return None, None


def run_pipeline(simplex, params=None):
    params = params or PipelineParams()
    trace = PipelineTrace(simplex, params)
    if trace.d < 1:
        raise PipelineStageError('step1', InvalidInputError('A simplex needs at least two points'))

    trace.s1, trace.shrink_beta, trace.slack = _stage('step1', step1_shrink, simplex, params.tol)
    trace.rho = _stage('step1', circumsphere, simplex)[0]
    trace.rho_prime = _stage('step1', circumsphere, trace.s1)[0]
    trace.spread_radius = trace.rho_prime + params.radius_split * (trace.rho - trace.rho_prime)

    d = trace.d
    beta = np.sqrt(trace.shrink_beta)
    trace.epsilon = params.epsilon or beta / (128.0 * d * d)
    delta = params.delta or trace.epsilon * beta / (16.0 * trace.spread_radius + 4.0)

    stage = error = None
    for _ in range(params.delta_rounds):
        stage, error = _attempt(trace, delta)
        if error is None:
            break
        delta /= 2.0
    else:
        raise PipelineStageError(stage, error)

    trace.w = trace.brick.points(simplex.labels)
    trace.f = _stage('assemble', assemble_and_verify, simplex, trace.w, trace.spread.points, trace, params.tol)
    target = squared_distance_matrix(simplex).as_array()
    realized = squared_distance_matrix(trace.f).as_array()
    trace.residuals = {(i, j): float(abs(np.sqrt(realized[i, j]) - np.sqrt(target[i, j])))
                       for i in range(d + 1) for j in range(i + 1, d + 1)}
    logger.info('Pipeline finished: d=%s, spread k=%s on %s coordinates, brick dimension %s', d,
                trace.spread.spec.k, trace.spread.ground, trace.brick.dim)
    return trace
