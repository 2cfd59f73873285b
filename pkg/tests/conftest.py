import numpy as np
import pytest

from anisonorm import (Anisotropy, Grid, GridFunction, build_calderon_pair,
                       build_generator, build_partition)

GEN_GRID = Grid(N=(16384,), L=(13.0,))
LINE = Grid(N=(8192,), L=(13.0,))
LINE_ANISO = Anisotropy((1.0,))


@pytest.fixture(scope="session")
def gen_order1():
    return build_generator(1, GEN_GRID)


@pytest.fixture(scope="session")
def gen_order2():
    return build_generator(2, GEN_GRID)


@pytest.fixture(scope="session")
def fam_minus(gen_order1):
    return build_calderon_pair(gen_order1, LINE_ANISO, LINE, side="-")


@pytest.fixture(scope="session")
def fam_plus(gen_order1):
    return build_calderon_pair(gen_order1, LINE_ANISO, LINE, side="+")


@pytest.fixture(scope="session")
def fam_plus_order2(gen_order2):
    return build_calderon_pair(gen_order2, LINE_ANISO, LINE, side="+")


@pytest.fixture(scope="session")
def line_partition():
    return build_partition(LINE_ANISO, None, LINE)


def random_band_function(grid, part, coronas, seed, weights=None):
    """Deterministic random function with content on the given coronas."""
    rng = np.random.default_rng(seed)
    uhat = np.zeros(grid.shape, dtype=complex)
    for idx, j in enumerate(coronas):
        w = 1.0 if weights is None else weights[idx]
        uhat += w * part.windows[j] * np.exp(2j * np.pi * rng.random(grid.shape))
    vals = np.fft.ifftn(uhat * grid.size)
    peak = np.abs(vals).max()
    return GridFunction(grid, vals / peak if peak > 0 else vals)


def gaussian(grid, centers, widths):
    mesh = np.meshgrid(*[grid.axis_points(i) for i in range(grid.d)],
                       indexing="ij")
    r2 = sum(((m - c) / w) ** 2 for m, c, w in zip(mesh, centers, widths))
    return GridFunction(grid, np.exp(-0.5 * r2))
