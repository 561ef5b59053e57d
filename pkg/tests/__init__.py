import json
import numpy as np

from pramsey.geometry import PointConfig
from pramsey.utils import canonical_json

SQRT3 = float(np.sqrt(3.0))


def unit_equilateral():
    return PointConfig.from_array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2.0]])


def collinear():
    return PointConfig.from_coordinates([[0], [1], [2]])


def right_isosceles():
    return PointConfig.from_coordinates([[0, 0], [1, 0], [0, 1]])


def regular_tetrahedron():
    return PointConfig.from_coordinates([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def unit_square():
    return PointConfig.from_coordinates([[0, 0], [1, 0], [0, 1], [1, 1]])


def unit_segment():
    return PointConfig.from_coordinates([[0], [1]])


def flat_obtuse():
    return PointConfig.from_array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.2]])


def near_regular_simplex(d, seed, noise=0.03):
    """Unit regular simplex with every coordinate moved by up to `noise`, then rotated"""
    rng = np.random.default_rng(seed)
    points = np.eye(d + 1) / np.sqrt(2.0) + rng.uniform(-noise, noise, size=(d + 1, d + 1))
    return PointConfig.from_array(points.dot(random_rotation(d + 1, seed).T))


def random_rotation(dim, seed=0):
    q, r = np.linalg.qr(np.random.default_rng(seed).normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def write_json(path, obj):
    with open(path, 'w') as f:
        f.write(canonical_json(obj))


def read_json(path):
    with open(path) as f:
        return json.load(f)


def equilateral_matrix():
    return {'sq': [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}
