import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mrmp.geometry import Workspace, joint_config
from mrmp.scenarios import load_bundled


@pytest.fixture(scope="session")
def square20():
    return Workspace(boundary=((0, 0), (20, 0), (20, 20), (0, 20)), robot_radius=2.0)


@pytest.fixture(scope="session")
def square_with_block():
    return Workspace(
        boundary=((0, 0), (20, 0), (20, 20), (0, 20)),
        obstacles=(((8, 8), (8, 12), (12, 12), (12, 8)),),
        robot_radius=2.0,
    )


@pytest.fixture(scope="session")
def l_workspace():
    L = ((-3, -3), (3, -3), (3, -1), (-1, -1), (-1, 3), (-3, 3))
    return Workspace(
        boundary=((0, 0), (40, 0), (40, 40), (0, 40)),
        obstacles=(((16, 16), (16, 24), (24, 24), (24, 16)),),
        robot_radius=4.25,
        robot_shape=L,
    )


@pytest.fixture(scope="session")
def tunnel():
    return load_bundled("tunnel")


@pytest.fixture(scope="session")
def chambers():
    return load_bundled("chambers")


@pytest.fixture(scope="session")
def puzzle():
    return load_bundled("puzzle")


def random_joint_pair(rng: np.random.Generator, m: int, span: float = 10.0, rotate: bool = False):
    def config():
        rows = []
        for _ in range(m):
            row = [rng.uniform(-span, span), rng.uniform(-span, span)]
            if rotate:
                row.append(rng.uniform(-np.pi, np.pi))
            rows.append(row)
        return joint_config(rows)

    return config(), config()
