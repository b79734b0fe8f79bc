import numpy as np
import pytest

from typsat import distribution as dist
from typsat import ledger as lg
from typsat import stationarity as st
from typsat.params import ModelParams

LAM = 3 * 4.506


@pytest.fixture(scope="session")
def params():
    return ModelParams.certification()


@pytest.fixture(scope="session")
def tables(params):
    return dist.build_tables(params)


@pytest.fixture(scope="session")
def consts(tables):
    return tables[2]


@pytest.fixture(scope="session")
def budget(params, consts):
    return lg.build_budget(params, consts)


@pytest.fixture(scope="session")
def box(params):
    return params.a_priori


@pytest.fixture(scope="session")
def eqfs(params, consts, box):
    def eq1f(phi, beta1):
        return st.eq1(st.derive_point(phi, beta1, box), consts, params)

    def eq2f(phi, beta1):
        return st.eq2(st.derive_point(phi, beta1, box), consts, params)

    return eq1f, eq2f


@pytest.fixture(scope="session")
def trace(eqfs, box):
    from typsat.rootbox import spiral_localize
    return spiral_localize(*eqfs, box, width_target=4e-7)


@pytest.fixture(scope="session")
def root(eqfs, trace):
    from typsat.rootbox import solve_reference
    ref = solve_reference(*eqfs, trace.rectangle)
    assert ref["found"]
    return ref


@pytest.fixture(scope="session")
def root_point(root, box):
    return st.derive_point(root["phi"], root["beta1"], box)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
