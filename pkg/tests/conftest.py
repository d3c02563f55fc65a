import numpy as np
import pytest

from linestab.geom import Ball, Scene, random_scene_with_transversal
from linestab.sextic import Triple


def collinear_scene() -> Scene:
    return Scene(3, (Ball([0, 0, 0], 1.0), Ball([4, 0, 0], 1.0), Ball([8, 0, 0], 1.0)))


def random_triple(seed: int, radius_range=(0.8, 1.6)) -> Triple:
    scene, _ = random_scene_with_transversal(3, 3, radius_range, seed=seed)
    return Triple.from_scene(scene)


def line_entry_parameters(point, direction, scene):
    """Entry parameter of the line {point + t direction} into each ball.

    Independent order oracle: smaller quadratic root per ball, or None if
    the line misses it.
    """
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    out = []
    for b in scene.balls:
        w = b.center - p
        tm = float(np.dot(w, d))
        h2 = b.squared_radius - (float(np.dot(w, w)) - tm * tm)
        if h2 < 0:
            out.append(None)
        else:
            out.append(tm - np.sqrt(h2))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0)
