"""Peripheral span, the three product routes, and the algebra verifiers."""

import numpy as np
import pytest

from periph import boundary as bd
from periph import channel as ch
from periph import families as fam
from periph import matrixcore as mc
from periph.errors import PeripheralSpanError, ToleranceConflictError

from conftest import crandn, random_unital_channel

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def conj_channel(u, label=""):
    return ch.KrausChannel([np.asarray(u, dtype=complex)], label=label)


@pytest.fixture
def z_boundary():
    return bd.PeripheralBoundary.build(conj_channel(PAULI_Z, "uZ"))


def test_build_unit_first(z_boundary):
    pb = z_boundary
    assert pb.span_dim() == 4
    assert pb.unit_rep() is not None
    unit_space = pb.spaces[pb.unit_rep()]
    # the fixed-space basis is rotated so its first element is I/sqrt(d)
    assert mc.hs_norm(unit_space.basis[0] - np.eye(2) / np.sqrt(2)) < 1e-12


def test_product_frozen_pauli(z_boundary):
    # tau(X) = ZXZ = -X, so X lies at eigenvalue -1 and X o X = P_1(I) = I
    got = z_boundary.product(PAULI_X, -1.0, PAULI_X, -1.0)
    assert mc.op_norm(got - np.eye(2)) < 1e-12


def test_product_rejects_non_member(z_boundary):
    with pytest.raises(ValueError):
        z_boundary.product(PAULI_X, 1.0, PAULI_X, -1.0)


def test_product_outside_spectrum_is_zero():
    w = np.exp(2j * np.pi / 8)
    pb = bd.PeripheralBoundary.build(conj_channel(np.diag([1.0, w])))
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1.0
    # w^2 is not a peripheral eigenvalue of this conjugation
    assert pb.find_rep(w * w) is None
    got = pb.product(e01, w, e01, w)
    assert mc.op_norm(got) == 0.0


def test_find_rep_tolerance_conflict():
    theta = 1.5e-7
    pb = bd.PeripheralBoundary.build(
        conj_channel(np.diag([1.0, np.exp(1j * theta)])))
    assert len(pb.reps) == 3
    with pytest.raises(ToleranceConflictError):
        pb.find_rep(np.exp(1j * theta / 2))


def test_decompose_roundtrip():
    pb = bd.PeripheralBoundary.build(conj_channel(np.diag([1.0, 1j]), "u4"))
    rng = np.random.default_rng(3)
    x = crandn(rng, 2, 2)  # conjugation span is all of M_2
    elem = pb.decompose(x)
    total = sum(elem.components.values())
    assert mc.op_norm(total - x) < 1e-10
    for lam, comp in elem.components.items():
        assert pb.eigen_residual(comp, lam) < 1e-8


def test_decompose_outside_span_raises(dephasing):
    pb = bd.PeripheralBoundary.build(dephasing)
    assert pb.span_dim() == 2
    with pytest.raises(PeripheralSpanError) as exc_info:
        pb.decompose(PAULI_X)
    assert exc_info.value.defect == pytest.approx(1.0, abs=1e-10)


def test_adjoint_moves_components(z_boundary):
    elem = z_boundary.decompose(np.eye(2) + 1j * PAULI_X)
    adj = z_boundary.adjoint(elem)
    assert mc.op_norm(adj.matrix - (np.eye(2) - 1j * PAULI_X)) < 1e-12
    for lam, comp in adj.components.items():
        assert z_boundary.eigen_residual(comp, lam) < 1e-8


def test_product_general_bilinear(z_boundary):
    rng = np.random.default_rng(4)
    x, y = crandn(rng, 2, 2), crandn(rng, 2, 2)
    ex, ey = z_boundary.decompose(x), z_boundary.decompose(y)
    got = z_boundary.product_general(ex, ey).matrix
    # faithful trace state: the boundary product is the ordinary product
    assert mc.op_norm(got - x @ y) < 1e-10


def test_unit_element(z_boundary):
    unit = z_boundary.unit_element()
    assert mc.op_norm(unit.matrix - np.eye(2)) < 1e-12
    rng = np.random.default_rng(5)
    x = z_boundary.decompose(crandn(rng, 2, 2))
    prod = z_boundary.product_general(unit, x).matrix
    assert mc.op_norm(prod - x.matrix) < 1e-10


def test_cesaro_matches_spectral_exact_cases(z_boundary):
    got = z_boundary.cesaro_product(PAULI_X, -1.0, PAULI_X, -1.0,
                                    n_terms=128)
    assert mc.op_norm(got - np.eye(2)) < 1e-12


def test_cesaro_matches_spectral_contracting():
    c = random_unital_channel(3, 3, seed=17)
    pb = bd.PeripheralBoundary.build(c)
    entries = pb.basis_entries()
    x, lam = entries[0][1], entries[0][0]
    y, mu = entries[-1][1], entries[-1][0]
    spectral = pb.product(x, lam, y, mu)
    cesaro = pb.cesaro_product(x, lam, y, mu, n_terms=10 ** 4)
    assert mc.op_norm(spectral - cesaro) <= 1e-2 * mc.op_norm(x) * mc.op_norm(y)


def test_limit_diagnostic_converges():
    c = random_unital_channel(2, 2, seed=19)
    pb = bd.PeripheralBoundary.build(c)
    entries = pb.basis_entries()
    x, lam = entries[0][1], entries[0][0]
    diag = pb.limit_diagnostic(x, lam, x, lam, n_max=32)
    assert diag.distances[-1] < diag.distances[0] or diag.distances[0] < 1e-12
    if diag.rate_estimate is not None:
        assert diag.rate_estimate < 1.0 + 1e-9


def test_table_pauli_structure(z_boundary):
    table = z_boundary.table()
    k = len(table.labels)
    assert k == z_boundary.span_dim() == 4
    assert table.expansion_defect < 1e-10
    # unit column: c[i, unit, j] = delta_ij * unit_scale normalization
    unit = table.unit_index
    for i in range(k):
        col = table.constants[i, unit, :] * table.unit_scale
        expected = np.zeros(k)
        expected[i] = 1.0
        assert np.linalg.norm(col - expected) < 1e-10


def test_fourier_components_frozen():
    c = conj_channel(PAULI_Z, "uZ")
    comps = bd.fourier_components(c, np.eye(2) + PAULI_X, 2)
    assert mc.op_norm(comps[0] - np.eye(2)) < 1e-12
    assert mc.op_norm(comps[1] - PAULI_X) < 1e-12


def test_fourier_components_graded():
    c = conj_channel(np.diag([1.0, 1j]), "u4")
    rng = np.random.default_rng(6)
    x = crandn(rng, 2, 2)
    x = x + ch.apply(c, x) + ch.power_apply(c, x, 2) + ch.power_apply(c, x, 3)
    comps = bd.fourier_components(c, x, 4)
    w = np.exp(2j * np.pi / 4)
    assert mc.op_norm(sum(comps) - x) < 1e-10
    for j, comp in enumerate(comps):
        resid = ch.apply(c, comp) - w ** j * comp
        assert mc.op_norm(resid) < 1e-8 * max(1.0, mc.op_norm(comp))


def test_fourier_rejects_unfixed_input():
    c = conj_channel(np.diag([1.0, 1j]), "u4")
    with pytest.raises(ValueError):
        bd.fourier_components(c, np.array([[0, 1], [0, 0]], dtype=complex), 2)


def test_poly_kernel_frozen():
    c = conj_channel(PAULI_Z, "uZ")
    comps = bd.poly_kernel_decompose(c, np.eye(2) + PAULI_X, [1.0, -1.0])
    assert mc.op_norm(comps[1.0] - np.eye(2)) < 1e-12
    assert mc.op_norm(comps[-1.0] - PAULI_X) < 1e-12


def test_poly_kernel_rejects_close_roots(z_boundary):
    c = conj_channel(PAULI_Z, "uZ")
    with pytest.raises(ValueError):
        bd.poly_kernel_decompose(c, np.eye(2), [1.0, 1.0 + 1e-12])


def test_poly_kernel_rejects_non_kernel_element(dephasing):
    # X is not annihilated by (tau - 1) on the dephasing channel
    with pytest.raises(ValueError):
        bd.poly_kernel_decompose(dephasing, PAULI_X, [1.0])


def test_cstar_verify_on_weyl():
    ex = fam.weyl_channel(2, 2, [0.5, 0.5])
    pb = bd.PeripheralBoundary.build(ex.channel)
    rep = bd.cstar_verify(pb, trials=10, seed=0)
    assert rep.passed


def test_automorphism_check_random_channel():
    c = random_unital_channel(3, 2, seed=23)
    pb = bd.PeripheralBoundary.build(c)
    rep = bd.automorphism_check(pb, trials=10, seed=1)
    assert rep.passed


def test_stability_check_unitary():
    pb = bd.PeripheralBoundary.build(conj_channel(np.diag([1.0, 1j]), "u4"))
    rep = bd.stability_check(pb, 2, n_samples=8, seed=2)
    assert rep.passed
    rep3 = bd.stability_check(pb, 3, n_samples=8, seed=2)
    assert rep3.passed


def test_module_structure_check(z_boundary):
    rep = bd.module_structure_check(z_boundary, -1.0, trials=8, seed=3)
    assert rep.passed


def test_isometry_dim_check_pass_branch():
    ex = fam.weyl_channel(2, 2, [0.5, 0.5])
    pb = bd.PeripheralBoundary.build(ex.channel)
    v = mc.kron(PAULI_Z, PAULI_Z)  # unitary eigenvector at -1
    rep = bd.isometry_dim_check(pb, -1.0, v, v)
    assert rep.passed
    assert not any(c.passed is None for c in rep.checks)


def test_isometry_dim_check_skip_branch():
    pb = bd.PeripheralBoundary.build(conj_channel(np.diag([1.0, 1j]), "u4"))
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1.0
    rep = bd.isometry_dim_check(pb, 1j, e01, e01)
    assert rep.passed  # skipped checks do not fail the report
    assert any(c.passed is None and c.reason for c in rep.checks)


def test_channel_level_entry_points():
    # module-level ops accept the channel directly and share one cached build
    c = conj_channel(PAULI_Z, "uZ")
    assert bd._as_boundary(c) is bd._as_boundary(c)
    got = bd.peripheral_product(c, PAULI_X, -1.0, PAULI_X, -1.0)
    assert mc.op_norm(got - np.eye(2)) < 1e-12
    ces = bd.cesaro_product(c, PAULI_X, -1.0, PAULI_X, -1.0, n_terms=64)
    assert mc.op_norm(ces - got) < 1e-12
    diag = bd.limit_diagnostic(c, PAULI_X, -1.0, PAULI_X, -1.0, n_max=4)
    assert diag.distances[-1] < 1e-12
    elem = bd.decompose_peripheral(c, np.eye(2) + PAULI_X)
    prod = bd.product_general(c, elem, elem)
    expected = (np.eye(2) + PAULI_X) @ (np.eye(2) + PAULI_X)
    assert mc.op_norm(prod.matrix - expected) < 1e-10
    assert len(bd.boundary_table(c).labels) == 4
    assert bd.cstar_verify(c, trials=4, seed=0).passed
    assert bd.automorphism_check(c, trials=4, seed=0).passed


def test_combined_basis_independent(z_boundary):
    basis = z_boundary.combined_basis
    assert len(basis) == z_boundary.span_dim() == 4
    gram = np.array([[mc.hs_inner(a, b) for b in basis] for a in basis])
    assert np.linalg.eigvalsh(gram).min() > 1e-10


def test_boundary_table_identity_channel_is_matrix_product():
    c = ch.KrausChannel([np.eye(2, dtype=complex)], label="id2")
    table = bd.boundary_table(c)
    basis = bd._as_boundary(c).combined_basis
    k = len(basis)
    assert k == 4
    for a in range(k):
        for b in range(k):
            recon = sum(table.constants[a, b, e] * basis[e] for e in range(k))
            assert mc.op_norm(recon - basis[a] @ basis[b]) < 1e-10


def test_abelian_channel_products_commute():
    # all Kraus operators diagonal (a Schur-multiplier channel): diagonal
    # test elements generate a commutative algebra, so o must commute on them
    u1 = np.diag([1.0, 1j, -1.0])
    u2 = np.diag([1.0, -1j, 1.0])
    c = ch.KrausChannel([u1 / np.sqrt(2), u2 / np.sqrt(2)], label="schur")
    pb = bd.PeripheralBoundary.build(c)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        x = pb.decompose(np.diag(crandn(rng, 3)))
        y = pb.decompose(np.diag(crandn(rng, 3)))
        comm = pb.product_general(x, y).matrix - pb.product_general(y, x).matrix
        worst = max(worst, mc.op_norm(comm))
    assert worst <= 1e-9


def test_cesaro_bound_on_rotation_channel():
    # rotation by 2*pi*0.3: Cesaro at N=1e4 tracks the spectral product
    # within 1e-3 * ||x|| * ||y|| on random eigenvector pairs
    w = np.exp(2j * np.pi * 0.3)
    pb = bd.PeripheralBoundary.build(conj_channel(np.diag([1.0, w]), "rot03"))
    rng = np.random.default_rng(11)

    def draw(rep):
        acc = np.zeros((2, 2), dtype=complex)
        for b in pb.spaces[rep].basis:
            acc = acc + (rng.standard_normal()
                         + 1j * rng.standard_normal()) * b
        return acc

    for lam in pb.reps:
        for mu in pb.reps:
            x, y = draw(lam), draw(mu)
            spectral = pb.product(x, lam, y, mu)
            ces = pb.cesaro_product(x, lam, y, mu, n_terms=10 ** 4)
            assert mc.op_norm(ces - spectral) <= (
                1e-3 * mc.op_norm(x) * mc.op_norm(y))


def test_fourier_pauli_singletons():
    c = conj_channel(PAULI_Z, "uZ")
    comps = bd.fourier_components(c, PAULI_X, 2)
    assert mc.op_norm(comps[0]) < 1e-15
    assert mc.op_norm(comps[1] - PAULI_X) < 1e-15
    comps = bd.fourier_components(c, np.eye(2, dtype=complex), 2)
    assert mc.op_norm(comps[0] - np.eye(2)) < 1e-15
    assert mc.op_norm(comps[1]) < 1e-15


def test_fourier_three_root_assignment():
    w3 = np.exp(2j * np.pi / 3)
    c = conj_channel(np.diag([1.0, w3]), "u3")
    e12 = np.zeros((2, 2), dtype=complex)
    e12[0, 1] = 1.0
    e21 = e12.T.copy()
    comps = bd.fourier_components(c, np.eye(2) + e12 + e21, 3)
    assert mc.op_norm(comps[0] - np.eye(2)) < 1e-12
    assert mc.op_norm(comps[1] - e12) < 1e-12
    assert mc.op_norm(comps[2] - e21) < 1e-12


def test_poly_kernel_single_root_identity():
    c = conj_channel(PAULI_Z, "uZ")
    comps = bd.poly_kernel_decompose(c, np.eye(2, dtype=complex), [1.0])
    assert mc.op_norm(comps[1.0] - np.eye(2)) < 1e-15


def test_poly_kernel_matches_fourier_and_projectors():
    # U^4 = I, and every 4th root of unity is an eigenvalue of this conjugation
    c = conj_channel(np.diag([1.0, 1j, -1.0]), "u4d3")
    rng = np.random.default_rng(13)
    y = crandn(rng, 3, 3)
    roots = [1.0, 1j, -1.0, -1j]
    kern = bd.poly_kernel_decompose(c, y, roots)
    four = bd.fourier_components(c, y, 4)
    pb = bd.PeripheralBoundary.build(c)
    for j, r in enumerate(roots):
        assert mc.op_norm(kern[complex(r)] - four[j]) < 1e-7
        proj = mc.unvec(pb.projectors[pb.find_rep(r)] @ mc.vec(y))
        assert mc.op_norm(kern[complex(r)] - proj) < 1e-7


def test_poly_kernel_trivial_root_component_vanishes():
    # -1 is a root of t^4 - 1 but not an eigenvalue of the U=diag(1,i)
    # conjugation; the recovery formula must hand that root a zero component
    c = conj_channel(np.diag([1.0, 1j]), "u4")
    rng = np.random.default_rng(14)
    y = crandn(rng, 2, 2)
    kern = bd.poly_kernel_decompose(c, y, [1.0, 1j, -1.0, -1j])
    assert mc.op_norm(kern[complex(-1.0)]) < 1e-10
    total = sum(kern.values())
    assert mc.op_norm(total - y) < 1e-8
