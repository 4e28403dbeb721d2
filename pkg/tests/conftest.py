"""Shared session-scoped meshes.

Building a triangulated torus and its integer homology data is the
expensive part of most tests, so every module reuses these fixtures.
"""
import math

import numpy as np
import pytest

from sysgeo.generators import gen_circle, gen_flat_torus, gen_rp2
from sysgeo.simplicial import PLMetric, SimplicialComplex, product_complex


HEX_BASIS = np.array([[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
FCC_BASIS = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


@pytest.fixture(scope="session")
def hex_t2():
    """Hexagonal flat 2-torus, 4 subdivisions per side."""
    X, g, _ = gen_flat_torus(HEX_BASIS, 4)
    return X, g


@pytest.fixture(scope="session")
def grid_t2():
    """Unit square 2-torus, 4 subdivisions per side."""
    X, g, _ = gen_flat_torus(np.eye(2), 4)
    return X, g


@pytest.fixture(scope="session")
def grid_t3():
    """Unit cube 3-torus, 3 subdivisions per side."""
    X, g, _ = gen_flat_torus(np.eye(3), 3)
    return X, g


@pytest.fixture(scope="session")
def fcc_t3():
    """Face-centered-cubic 3-torus, 3 subdivisions per side."""
    X, g, _ = gen_flat_torus(FCC_BASIS, 3)
    return X, g


@pytest.fixture(scope="session")
def rp2_unit_area():
    """Projective plane mesh scaled to unit area."""
    X, g = gen_rp2()
    return X, g


@pytest.fixture(scope="session")
def rp2_unit_edges():
    """Projective plane mesh with every edge of length 1."""
    X, _ = gen_rp2()
    return X, PLMetric({e: 1.0 for e in X.edges})


@pytest.fixture(scope="session")
def circle_times_rp2():
    """Orthogonal product of a circumference-1 circle and a unit-area RP^2."""
    C, gc = gen_circle(4, 1.0)
    R, gr = gen_rp2()
    return product_complex(C, gc, R, gr)


@pytest.fixture(scope="session")
def sphere_s3():
    """Boundary of the 4-simplex with unit edges: a 3-sphere."""
    verts = list(range(5))
    maximal = [tuple(s for s in verts if s != i) for i in verts]
    X = SimplicialComplex(5, maximal)
    return X, PLMetric({e: 1.0 for e in X.edges})
