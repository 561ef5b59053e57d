import itertools
import logging
import numpy as np

from pramsey.exceptions import ConsistencyError, InvalidInputError, NotASimplexError, NotEmbeddableError, \
    PipelineVerificationError, ShrinkLimitError
from pramsey.geometry import SquaredDistanceMatrix, circumsphere, congruent, embed_distance_matrix, \
    join_pointwise, negative_type_slack, squared_distance_matrix

logger = logging.getLogger(__name__)


def step1_shrink(simplex, tol=1e-9):
    """Shrinks every squared side of a strict simplex by beta = slack / (8 d**2)

    :returns: tuple of the shrunk simplex, beta and the negative type slack of the input"""
    d = simplex.size - 1
    if d < 1:
        raise NotASimplexError('A simplex needs at least two points')
    matrix = squared_distance_matrix(simplex)
    slack = negative_type_slack(matrix).slack
    if slack <= tol:
        raise NotASimplexError('Negative type slack {0:.3g} is not strictly positive'.format(slack))

    beta = slack / (8.0 * d * d)
    shrunk = matrix.as_array() - beta * (1.0 - np.eye(d + 1))
    s1 = embed_distance_matrix(SquaredDistanceMatrix(shrunk), tol)
    s1 = s1._replace(labels=simplex.labels)

    shrunk_slack = negative_type_slack(squared_distance_matrix(s1)).slack
    if shrunk_slack <= 0:
        raise ConsistencyError('Shrunk configuration lost strict negative type (slack {0:.3g})'.format(shrunk_slack))
    rho, rho_prime = circumsphere(simplex)[0], circumsphere(s1)[0]
    if not rho_prime < rho:
        # obtuse simplices with the circumcentre far outside the hull: the circumradius grows
        raise ShrinkLimitError('Circumradius does not decrease under uniform shrinking: {0:.6g} -> {1:.6g}'
                               .format(rho, rho_prime), rho, rho_prime)
    logger.info('Step 1: slack %.6g, beta %.6g, circumradius %.6g -> %.6g', slack, beta, rho, rho_prime)
    return s1, beta, slack


def realize_almost_regular(matrix, beta, epsilon, tol=1e-9):
    """Realizes a squared distance matrix whose distances all lie within epsilon of beta"""
    d = matrix.n - 1
    if d < 1:
        raise InvalidInputError('Need at least two points')
    if not 0 < epsilon < beta / (64.0 * d * d):
        raise InvalidInputError('epsilon {0:.3g} must lie in (0, beta / 64d^2 = {1:.3g})'
                                .format(epsilon, beta / (64.0 * d * d)))
    distances = np.sqrt(np.array([float(v) for v in matrix.off_diagonal()]))
    deviation = float(np.max(np.abs(distances - beta)))
    if deviation > epsilon:
        raise InvalidInputError('Distance deviates {0:.3g} from beta, more than epsilon {1:.3g}'
                                .format(deviation, epsilon))

    try:
        config = embed_distance_matrix(matrix, tol)
    except NotEmbeddableError as e:
        raise ConsistencyError('Almost regular matrix is not embeddable: {0}'.format(e))
    slack = negative_type_slack(matrix).slack
    if not slack > beta ** 2 / 4.0:
        raise ConsistencyError('Form value {0:.6g} is not below -beta^2/4'.format(-slack))
    return config


def assemble_and_verify(simplex, brick_points, spread_points, trace=None, tol=1e-9):
    """Concatenates the brick and spread points vertex by vertex and checks the result against `simplex`"""
    assembled = join_pointwise(brick_points, spread_points, labels=simplex.labels)

    target = np.sqrt(squared_distance_matrix(simplex).as_array())
    realized = np.sqrt(squared_distance_matrix(assembled).as_array())
    residuals = {(i, j): float(abs(realized[i, j] - target[i, j]))
                 for i, j in itertools.combinations(range(simplex.size), 2)}
    worst = max(residuals.values()) if residuals else 0.0
    if worst > tol:
        raise PipelineVerificationError('Assembled simplex deviates by {0:.3g}'.format(worst), residuals)
    if congruent(assembled, simplex, tol) is None:
        raise PipelineVerificationError('Assembled simplex is not congruent to the input', residuals)

    if trace is not None:
        rho = circumsphere(assembled)[0]
        if not rho > trace.spread_radius:
            raise PipelineVerificationError('Circumradius {0:.6g} does not exceed the spread radius {1:.6g}'
                                            .format(rho, trace.spread_radius), residuals)
    logger.info('Step 4: assembled simplex matches the input within %.3g', worst)
    return assembled
