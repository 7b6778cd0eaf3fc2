import numpy as np
import pytest
from hypothesis import given, strategies as st

from netpoa.mechanisms import (
    BasisFunction,
    Mechanism,
    MechanismError,
    basis_power,
    basis_set_covering,
    from_values,
    marginal_contribution,
    uniform,
    validate_mechanism,
)
from netpoa.network import partition_into_classes


def test_bases():
    assert basis_set_covering(3).values.tolist() == [0, 1, 1, 1]
    assert np.allclose(basis_power(3, 0.5).values, [0, 1, np.sqrt(2), np.sqrt(3)])
    with pytest.raises(MechanismError):
        BasisFunction(np.array([1.0, 1.0]))
    with pytest.raises(MechanismError):
        BasisFunction(np.array([0.0, 1.0, 0.0]))


def test_marginal_contribution_fig1(fig1):
    part = partition_into_classes(fig1)
    f = marginal_contribution(basis_power(5, 0.5), part)
    assert [t.size for t in f.per_class] == [7, 6, 4, 7]
    assert np.allclose(f.per_class[2], [0, 1, np.sqrt(2) - 1, 0])
    assert validate_mechanism(f, part, basis_power(5, 0.5)).ok


def test_gate_and_length(fig1):
    part = partition_into_classes(fig1)
    w = basis_set_covering(5)
    f = uniform([0, 1, 1, 1, 1], part)
    rep = validate_mechanism(f, part, w)
    assert rep.first_gate_failure == 0 and not rep.ok
    with pytest.raises(MechanismError, match="class 2"):
        validate_mechanism(from_values([[1] * 5, [1] * 3, [1] * 2, [1] * 5]), part, w)
    with pytest.raises(MechanismError):
        validate_mechanism(from_values([[1] * 5]), part, w)


def test_table_needs_boundary_zeros():
    with pytest.raises(MechanismError):
        Mechanism((np.array([0.0, 1.0, 1.0]),))


@given(st.floats(0.01, 100))
def test_scaling(alpha):
    f = from_values([[1.0, 0.5], [2.0]])
    g = f.scaled(alpha)
    assert all(np.allclose(a * alpha, b) for a, b in zip(f.per_class, g.per_class))
