from pathlib import Path

import numpy as np
import pytest

from polyfold import box_polytope, build_facet_complex, random_hull, regular_tetrahedron, run_source_unfolding

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def cube():
    return build_facet_complex(*box_polytope([1, 1, 1]))


@pytest.fixture(scope="session")
def brick():
    return build_facet_complex(*box_polytope([3, 1, 1]))


@pytest.fixture(scope="session")
def tetra():
    return build_facet_complex(regular_tetrahedron())


@pytest.fixture(scope="session")
def cube_run(cube):
    return run_source_unfolding(cube, "bot", [0.5, 0.5])


@pytest.fixture(scope="session")
def cube_run_off(cube):
    return run_source_unfolding(cube, "bot", [0.3, 0.4])


@pytest.fixture(scope="session")
def brick_run(brick):
    return run_source_unfolding(brick, "bot", [1.5, 0.5])


@pytest.fixture(scope="session")
def tetra_run(tetra):
    V = tetra.facets[0].vertices
    return run_source_unfolding(tetra, 0, V.mean(axis=0))


@pytest.fixture(scope="session")
def hull_runs():
    out = []
    for seed in range(4):
        cx = build_facet_complex(random_hull(8, seed))
        V = cx.facets[0].vertices
        out.append(run_source_unfolding(cx, 0, V.mean(axis=0)))
    return out


def facet_point(cx, F, rng):
    V = cx.facets[F].vertices
    return rng.dirichlet(np.ones(len(V))) @ V


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
