import math

import numpy as np
import pytest

from ejmshare.matcore import DensityMatrix, DimensionError, SIGMA_Z, embed, min_eigenvalue
from ejmshare.measmodel import PointerPair, PointerKind, ejm_basis, concurrence, pointer_pair, projector, triad
from ejmshare.scenario import SourceSpec, make_source
from ejmshare.weakmeas import (STRONG_VALUES, WEAK_VALUES, ejm_project, strong_update,
                               unconditional_weak_channel, weak_update)
from oracles import random_density

PLUS = np.array([1, 1]) / math.sqrt(2)


def _fg(F, G):
    return PointerPair(PointerKind.SQUARE, G, F)


def test_no_information_limit(rng):
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    A = triad(0.4, 0.1, 1.0).observables[0]
    for a in (0, 1):
        out = weak_update(rho, 0, A, a, _fg(1.0, 0.0))
        assert np.allclose(out.mat, rho.mat / 2, atol=1e-15)


def test_strong_limit_lands_on_minus_eigenspace(rng):
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    A = triad(0.4, 0.1, 1.0).observables[2]
    out = weak_update(rho, 1, A, 0, pointer_pair("square", 1.0))
    u1 = embed(projector(A, 1), (2, 2), 1)
    assert np.allclose(out.mat, u1 @ rho.mat @ u1.conj().T, atol=1e-15)
    for a in (0, 1):
        w = weak_update(rho, 1, A, a, pointer_pair("square", 1.0))
        s = strong_update(rho, 1, A, 1 - a)
        assert np.max(np.abs(w.mat - s.mat)) < 1e-15


def test_psd_boundary_determinant():
    rho = DensityMatrix(np.outer(PLUS, PLUS), (2,))
    g = 1 / math.sqrt(2)
    out = weak_update(rho, 0, SIGMA_Z, 0, pointer_pair("optimal", g))
    assert abs(np.linalg.det(out.mat)) < 1e-15
    assert min_eigenvalue(out.mat) > -1e-12


@pytest.mark.parametrize("kind", ["square", "optimal"])
def test_calibration_expectation_at_strong_limit(kind, rng):
    # sum_a v(a) P(a) reproduces tr(rho A) for both weak and strong parties
    rho = DensityMatrix(random_density(rng, 2), (2,))
    A = triad(0.7, -0.3, 0.2).observables[1]
    expected = np.trace(rho.mat @ A).real
    fg = pointer_pair(kind, 1.0)
    weak = sum(WEAK_VALUES[a] * weak_update(rho, 0, A, a, fg).trace.real for a in (0, 1))
    strong = sum(STRONG_VALUES[a] * strong_update(rho, 0, A, a).trace.real for a in (0, 1))
    assert weak == pytest.approx(expected, abs=1e-12)
    assert strong == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kind", ["square", "optimal"])
def test_weak_expectation_is_scaled_by_precision(kind, rng):
    rho = DensityMatrix(random_density(rng, 2), (2,))
    A = triad(0.2, 0.5, 0.1).observables[0]
    for g in (0.0, 0.3, 0.8):
        fg = pointer_pair(kind, g)
        val = sum(WEAK_VALUES[a] * weak_update(rho, 0, A, a, fg).trace.real for a in (0, 1))
        assert val == pytest.approx(g * np.trace(rho.mat @ A).real, abs=1e-12)


def test_unconditional_channel(rng):
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    A = triad(0.3, 0.3, 0.3).observables[0]
    for kind in ("square", "optimal"):
        fg = pointer_pair(kind, 0.37)
        total = sum(weak_update(rho, 0, A, a, fg).mat for a in (0, 1))
        assert np.max(np.abs(total - unconditional_weak_channel(rho, 0, A, fg.F).mat)) < 1e-12


def test_strong_update_properties(rng):
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    A = triad(1.0, 0.2, -0.4).observables[2]
    assert sum(strong_update(rho, 0, A, a).trace for a in (0, 1)) == pytest.approx(1, abs=1e-12)
    eig = DensityMatrix(projector(A, 0), (2,))
    assert np.allclose(strong_update(eig, 0, A, 0).mat, eig.mat, atol=1e-15)
    with pytest.raises(DimensionError):
        strong_update(rho, 2, A, 0)


def test_later_measurement_commutes_with_marginals(rng):
    # a strong measurement on qubit 1 summed over outcomes leaves qubit-0 statistics unchanged
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    A, C = triad(0.1, 0.2, 0.3).observables[0], triad(0.5, 0.1, 0.0).observables[1]
    fg = pointer_pair("optimal", 0.6)
    for a in (0, 1):
        first = weak_update(rho, 0, A, a, fg)
        after = sum(strong_update(first, 1, C, c).trace for c in (0, 1))
        assert abs(after - first.trace) < 1e-12


def _singlets():
    s = make_source(SourceSpec())
    return s.kron(s)


def test_ejm_project_completeness_and_uniform_outcomes():
    rho = _singlets()
    for theta in (0, math.pi / 4, math.pi / 2):
        basis = ejm_basis(theta)
        traces = [ejm_project(rho, basis, b).trace.real for b in (1, 2, 3, 4)]
        assert sum(traces) == pytest.approx(1, abs=1e-12)
        assert np.allclose(traces, 0.25, atol=1e-12)


def test_ejm_project_non_singlet_completeness(rng):
    rho = DensityMatrix(random_density(rng, 16), (2, 2, 2, 2))
    basis = ejm_basis(0.7)
    assert sum(ejm_project(rho, basis, b).trace for b in (1, 2, 3, 4)) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DimensionError):
        ejm_project(DensityMatrix(np.eye(4) / 4, (2, 2)), basis, 1)


@pytest.mark.parametrize("theta", [0, 0.3, math.pi / 4, 1.2, math.pi / 2])
def test_entanglement_swapping_transfers_concurrence(theta):
    basis = ejm_basis(theta)
    for b in (1, 2, 3, 4):
        out = ejm_project(_singlets(), basis, b)
        phi = basis.states[b - 1]
        target = 2 * abs(phi[0] * phi[3] - phi[1] * phi[2])
        assert concurrence(out.mat) == pytest.approx(target, abs=1e-7)
        # the swapped state is pure
        m = out.mat / out.trace
        assert np.trace(m @ m).real == pytest.approx(1, abs=1e-12)
