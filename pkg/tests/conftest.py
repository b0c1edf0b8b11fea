import numpy as np
import pytest

import periodicgame as pg


@pytest.fixture(scope="session")
def game2x2():
    return pg.experiment_by_name("game2x2").game


@pytest.fixture(scope="session")
def rps():
    return pg.PayoffMatrix([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])


def random_interior_joint(rng, m, n, concentration=1.0):
    return pg.JointState.from_probabilities(
        rng.dirichlet(np.full(m, concentration)),
        rng.dirichlet(np.full(n, concentration)),
    )


def generated_periodic_game(rng, m, n, period, concentration=5.0):
    """A schedule sharing one interior equilibrium, plus that equilibrium."""
    x = pg.Simplex.from_probabilities(rng.dirichlet(np.full(m, concentration)))
    y = pg.Simplex.from_probabilities(rng.dirichlet(np.full(n, concentration)))
    mats = tuple(
        pg.generate_common_equilibrium_game(x, y, pg.PayoffMatrix(rng.normal(size=(m, n))))
        for _ in range(period)
    )
    return pg.PeriodicGame(mats), pg.JointState(x, y)
