"""Peripheral spectrum, eigenspaces, spectral projectors, almost periods."""

import numpy as np
import pytest

from periph import channel as ch
from periph import matrixcore as mc
from periph import spectral as sp
from periph.errors import AlmostPeriodError, DefectiveEigenvalueError

from conftest import random_unital_channel


def conj_channel(u, label=""):
    return ch.KrausChannel([np.asarray(u, dtype=complex)], label=label)


def test_identity_channel_spectrum():
    c = ch.KrausChannel([np.eye(2)], label="id2")
    spectrum = sp.peripheral_spectrum(c)
    assert len(spectrum.eigenvalues) == 1
    e = spectrum.eigenvalues[0]
    assert abs(e.value - 1.0) < 1e-12
    assert e.algebraic_multiplicity == 4
    assert e.geometric_multiplicity == 4


def test_diag_unitary_spectrum_frozen():
    # conjugation by diag(1, i): eigenvalues conj(u_a) u_b over index pairs
    c = conj_channel(np.diag([1.0, 1j]))
    spectrum = sp.peripheral_spectrum(c)
    values = sorted(spectrum.values(), key=lambda z: np.angle(z) % (2 * np.pi))
    assert len(values) == 3
    assert abs(values[0] - 1.0) < 1e-12
    assert abs(values[1] - 1j) < 1e-12
    assert abs(values[2] + 1j) < 1e-12
    one = spectrum.find(1.0)
    assert one.algebraic_multiplicity == 2
    assert spectrum.find(1j).algebraic_multiplicity == 1


def test_find_nearest_and_miss():
    c = conj_channel(np.diag([1.0, 1j]))
    spectrum = sp.peripheral_spectrum(c)
    assert spectrum.find(1j + 1e-9) is not None
    assert spectrum.find(np.exp(1j * np.pi / 4)) is None


def test_eigenspace_matrix_units():
    c = conj_channel(np.diag([1.0, 1j]))
    e = sp.eigenspace(c, 1j)
    assert e.dim == 1
    # E_i is spanned by the (0,1) matrix unit
    b = e.basis[0]
    assert abs(abs(b[0, 1]) - 1.0) < 1e-10
    assert e.residual < 1e-10
    fixed = sp.eigenspace(c, 1.0)
    assert fixed.dim == 2
    for b in fixed.basis:
        offdiag = b - np.diag(np.diag(b))
        assert mc.hs_norm(offdiag) < 1e-10


def test_eigenspace_empty_off_spectrum():
    c = ch.KrausChannel([np.eye(2)], label="id2")
    e = sp.eigenspace(c, -1.0)
    assert e.dim == 0


def test_spectral_projection_dephasing(dephasing):
    p = sp.spectral_projection(dephasing, 1.0)
    assert p.in_spectrum
    assert p.idempotency_residual < 1e-12
    x = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    px = mc.unvec(p.matrix @ mc.vec(x))
    assert mc.hs_norm(px - np.diag([1.0, 4.0])) < 1e-12


def test_spectral_projection_off_spectrum_is_zero(dephasing):
    p = sp.spectral_projection(dephasing, -1.0)
    assert not p.in_spectrum
    assert mc.hs_norm(p.matrix) == 0.0


def test_spectral_projections_resolve_identity():
    c = conj_channel(np.diag([1.0, 1j, -1.0]))
    spectrum = sp.peripheral_spectrum(c)
    total = sum(sp.spectral_projection(c, lam).matrix for lam in spectrum.values())
    # unitary conjugation is peripheral-only, so the projectors sum to 1
    assert np.linalg.norm(total - np.eye(9)) < 1e-10


def test_defective_peripheral_eigenvalue_raises():
    # K a Jordan block makes the superoperator defective at eigenvalue 1;
    # no genuinely unital channel does this, so the container is handmade
    k = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
    c = ch.KrausChannel([k], label="jordan")
    with pytest.raises(DefectiveEigenvalueError):
        sp.spectral_projection(c, 1.0)


def test_semisimplicity_report_random_channel():
    c = random_unital_channel(3, 2, seed=21)
    rep = sp.semisimplicity_report(c)
    assert len(rep.entries) >= 1
    for e in rep.entries:
        assert not e.defective
        assert e.algebraic_multiplicity == e.geometric_multiplicity


def test_cluster_merge_across_branch_cut():
    # eigenphases straddling angle 0 within the cluster radius merge
    c = conj_channel(np.diag([1.0, np.exp(5e-9 * 1j)]))
    spectrum = sp.peripheral_spectrum(c)
    assert len(spectrum.eigenvalues) == 1
    assert spectrum.eigenvalues[0].algebraic_multiplicity == 4


def test_almost_period_frozen():
    assert sp.almost_period([], 1e-9) == 1
    assert sp.almost_period([np.exp(2j * np.pi / 3)], 1e-9) == 3
    assert sp.almost_period([1j, -1.0], 1e-9) == 4
    assert sp.almost_period([np.exp(2j * np.pi / 10)], 1e-9) == 10


def test_almost_period_simultaneous():
    lams = [np.exp(2j * np.pi / 4), np.exp(2j * np.pi / 6)]
    n = sp.almost_period(lams, 1e-9)
    assert n == 12
    for lam in lams:
        assert abs(lam ** n - 1.0) < 1e-9


def test_almost_period_irrational_rotation():
    lam = np.exp(2j * np.pi * np.sqrt(2))
    n = sp.almost_period([lam], 1e-3)
    assert n >= 1
    assert abs(np.exp(2j * np.pi * np.sqrt(2) * n) - 1.0) <= 1e-3


def test_almost_period_failure_carries_best():
    lam = np.exp(2j * np.pi * np.sqrt(2))
    with pytest.raises(AlmostPeriodError) as exc_info:
        sp.almost_period([lam], 1e-12, n_max=1000)
    err = exc_info.value
    assert err.best_n is not None and 1 <= err.best_n <= 1000
    assert err.best_error is not None and err.best_error > 1e-12


def test_almost_period_rejects_interior():
    with pytest.raises(ValueError):
        sp.almost_period([0.5], 1e-9)


def test_almost_period_epsilon_zero_exact_period():
    # epsilon = 0 asks for an exact period, matched at machine precision
    assert sp.almost_period([1.0, -1.0], 0.0) == 2
    assert sp.almost_period([1j], 0.0) == 4


def test_almost_period_rejects_negative_epsilon():
    with pytest.raises(ValueError):
        sp.almost_period([1.0], -1e-9)
