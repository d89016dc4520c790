import json

import numpy as np
import pytest
from conftest import random_state, random_xstate_matrix
from hypothesis import given
from hypothesis import strategies as st

from qfeedback.errors import InvalidState, NotHermitian, NotPSD, NotUnitTrace, NotXForm
from qfeedback.states import (
    CATALOG_NAMES,
    XState,
    catalog,
    density_from_json,
    density_to_json,
    is_valid,
    purity,
    validate,
    xstate_cast,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_states_are_valid(name):
    validate(catalog(name))


def test_catalog_slots():
    assert catalog("rho1")[0, 0] == 1
    # |1> x |0> sits at index 2 in |00>, |01>, |10>, |11>
    assert catalog("rho2")[2, 2] == 1
    assert catalog("rho3")[1, 1] == 1
    assert catalog("rho4")[3, 3] == 1
    assert np.allclose(catalog("maximally_mixed"), np.eye(4) / 4)


def test_catalog_unknown():
    with pytest.raises(KeyError):
        catalog("rho5")


def test_validate_hermitian():
    rho = np.eye(4) / 4
    rho = rho.astype(complex)
    rho[0, 1] = 0.1
    with pytest.raises(NotHermitian):
        validate(rho)


def test_validate_trace():
    with pytest.raises(NotUnitTrace):
        validate(np.eye(4) / 2)


def test_validate_psd():
    with pytest.raises(NotPSD):
        validate(np.diag([1.2, -0.2, 0, 0]))


def test_validate_collects_all_violations():
    rho = np.diag([2.0, -0.5, 0, 0]).astype(complex)
    rho[0, 1] = 1.0
    with pytest.raises(NotHermitian) as exc:
        validate(rho)
    assert set(exc.value.violations) == {"NotHermitian", "NotUnitTrace", "NotPSD"}
    assert isinstance(exc.value, InvalidState)


def test_validate_shape():
    with pytest.raises(ValueError):
        validate(np.eye(3) / 3)


@given(seeds)
def test_random_states_valid(seed):
    rho = random_state(np.random.default_rng(seed), rank=int(seed % 4) + 1)
    assert is_valid(rho)
    assert 0.25 - 1e-12 <= purity(rho) <= 1 + 1e-12


def test_xstate_round_trip(rng):
    m = random_xstate_matrix(rng)
    xs = xstate_cast(m)
    assert np.allclose(xs.to_matrix(), m)
    assert xs.is_physical()
    assert XState.from_json(json.loads(json.dumps(xs.to_json()))) == xs


def test_xstate_z_is_01_10_coherence():
    xs = XState(0.25, 0.25, 0.25, 0.25, z=0.1j, w=0.05)
    m = xs.to_matrix()
    assert m[1, 2] == 0.1j
    assert m[0, 3] == 0.05


def test_xstate_unphysical():
    assert not XState(0.5, 0.0, 0.0, 0.5, z=0.1).is_physical()


def test_xstate_cast_rejects_off_pattern():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 1] = rho[1, 0] = 1e-6
    with pytest.raises(NotXForm, match=r"\(0, 1\)|\(1, 0\)"):
        xstate_cast(rho)


def test_density_json_round_trip(rng):
    rho = random_state(rng)
    back = density_from_json(json.loads(json.dumps(density_to_json(rho))))
    assert np.array_equal(back, rho)


def test_density_json_wrong_size():
    with pytest.raises(ValueError):
        density_from_json([[0, 0]] * 15)
