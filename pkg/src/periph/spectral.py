"""Peripheral point spectrum of a unital channel.

The peripheral spectrum of tau is the set of eigenvalues of its superoperator
on (or numerically near) the unit circle.  For a unital channel the spectral
radius is 1 and lam = 1 always appears (tau(I) = I).  Eigenvalues are reported
as clusters: computed eigenvalues within ``cluster_radius`` of one another are
treated as one spectral point, represented by their normalized mean.

Equality of eigenvalues is always tested as absolute distance in the complex
plane, |lam - mu| <= 1e-7, matching the default clustering radius.
"""

from dataclasses import dataclass

import numpy as np

from . import channel as ch
from . import matrixcore as mc
from .errors import AlmostPeriodError, DefectiveEigenvalueError

TOL_PERIPHERAL = 1e-7
CLUSTER_RADIUS = 1e-7
TOL_NULL = 1e-9
EIGEN_EQ_TOL = 1e-7

__all__ = [
    "Eigenspace", "PeripheralEigenvalue", "PeripheralSpectrum",
    "SpectralProjector", "SemisimplicityReport",
    "peripheral_spectrum", "eigenspace", "spectral_projection",
    "semisimplicity_report", "almost_period",
    "TOL_PERIPHERAL", "CLUSTER_RADIUS", "TOL_NULL", "EIGEN_EQ_TOL",
]


@dataclass(frozen=True)
class Eigenspace:
    """Orthonormal (Frobenius) basis of {x : tau(x) = lam x} at tolerance.

    ``residual`` is the largest Frobenius defect ||tau(b) - lam b|| over the
    basis; an empty basis means lam is not an eigenvalue at tolerance.
    """

    lam: complex
    basis: tuple
    residual: float

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class PeripheralEigenvalue:
    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int


@dataclass(frozen=True)
class PeripheralSpectrum:
    """Clustered unimodular eigenvalues, sorted by argument in [0, 2pi)."""

    eigenvalues: tuple
    tol_peripheral: float
    cluster_radius: float

    def values(self) -> tuple:
        return tuple(e.value for e in self.eigenvalues)

    def find(self, z: complex, tol: float = EIGEN_EQ_TOL):
        """The entry within tol of z, or None.  Nearest wins on overlap."""
        best = None
        for e in self.eigenvalues:
            dist = abs(e.value - z)
            if dist <= tol and (best is None or dist < abs(best.value - z)):
                best = e
        return best


@dataclass(frozen=True)
class SpectralProjector:
    """Projector onto the generalized eigenspace of one peripheral cluster.

    ``in_spectrum`` is False (and the matrix zero) when the requested value
    is not a peripheral eigenvalue at tolerance.
    """

    lam: complex
    matrix: np.ndarray
    idempotency_residual: float
    in_spectrum: bool = True


@dataclass(frozen=True)
class SemisimplicityEntry:
    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    defective: bool


@dataclass(frozen=True)
class SemisimplicityReport:
    entries: tuple
    any_defect: bool


def _sort_angle(z: complex) -> float:
    ang = float(np.angle(z)) % (2 * np.pi)
    if ang > 2 * np.pi - 1e-9:
        ang = 0.0
    return ang


def peripheral_clusters(c: ch.KrausChannel,
                        tol_peripheral: float = TOL_PERIPHERAL,
                        cluster_radius: float = CLUSTER_RADIUS) -> list:
    """Cluster the unimodular superoperator eigenvalues of a channel.

    Returns [(representative, index_list), ...] sorted by argument, where the
    indices refer to columns of the cached Heisenberg eigendecomposition.
    Clustering chains consecutive points (by angle) closer than the radius,
    with wraparound across the branch cut.
    """
    w = ch.superop_eig(c).eigenvalues
    periph = [i for i in range(len(w)) if abs(abs(w[i]) - 1.0) <= tol_peripheral]
    if not periph:
        return []
    periph.sort(key=lambda i: _sort_angle(w[i]))
    groups = [[periph[0]]]
    for i in periph[1:]:
        if abs(w[i] - w[groups[-1][-1]]) <= cluster_radius:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and abs(w[groups[0][0]] - w[groups[-1][-1]]) <= cluster_radius:
        groups[0] = groups.pop() + groups[0]
    out = []
    for g in groups:
        z = np.mean(w[g])
        out.append((complex(z / abs(z)), g))
    out.sort(key=lambda item: _sort_angle(item[0]))
    return out


def peripheral_spectrum(c: ch.KrausChannel,
                        tol_peripheral: float = TOL_PERIPHERAL,
                        cluster_radius: float = CLUSTER_RADIUS,
                        tol_null: float = TOL_NULL) -> PeripheralSpectrum:
    """Peripheral eigenvalues with algebraic and geometric multiplicities."""
    s = ch.superoperator(c).matrix
    entries = []
    for rep, idx in peripheral_clusters(c, tol_peripheral, cluster_radius):
        geo = len(mc.null_space(s - rep * np.eye(s.shape[0]), tol=tol_null))
        entries.append(PeripheralEigenvalue(rep, len(idx), geo))
    return PeripheralSpectrum(tuple(entries), tol_peripheral, cluster_radius)


def eigenspace(c: ch.KrausChannel, lam: complex,
               tol: float = TOL_NULL) -> Eigenspace:
    """Orthonormal basis of the lam-eigenspace of tau, possibly empty."""
    s = ch.superoperator(c).matrix
    vecs = mc.null_space(s - lam * np.eye(s.shape[0]), tol=tol)
    basis = tuple(mc.unvec(v) for v in vecs)
    residual = 0.0
    for b in basis:
        residual = max(residual, mc.hs_norm(ch.apply(c, b) - lam * b))
    return Eigenspace(complex(lam), basis, residual)


def spectral_projection(c: ch.KrausChannel, lam: complex,
                        tol_peripheral: float = TOL_PERIPHERAL,
                        cluster_radius: float = CLUSTER_RADIUS) -> SpectralProjector:
    """Spectral projector of the cluster at lam, from left/right eigenvectors.

    P = R (L^dag R)^-1 L^dag over the cluster's eigenvector columns.  If lam
    is not peripheral at tolerance the zero projector is returned with
    ``in_spectrum=False``.  A singular cluster Gram matrix means the cluster
    is defective and raises :class:`DefectiveEigenvalueError`.
    """
    d2 = c.dim * c.dim
    for rep, idx in peripheral_clusters(c, tol_peripheral, cluster_radius):
        if abs(rep - lam) <= EIGEN_EQ_TOL:
            decomp = ch.superop_eig(c)
            try:
                p = mc.cluster_projector(decomp, idx)
            except np.linalg.LinAlgError as exc:
                raise DefectiveEigenvalueError(
                    f"peripheral eigenvalue {rep:.12g} is defective: {exc}"
                ) from exc
            return SpectralProjector(rep, p, mc.op_norm(p @ p - p), True)
    return SpectralProjector(complex(lam), np.zeros((d2, d2), dtype=complex),
                             0.0, False)


def semisimplicity_report(c: ch.KrausChannel,
                          tol_peripheral: float = TOL_PERIPHERAL,
                          cluster_radius: float = CLUSTER_RADIUS,
                          tol_null: float = TOL_NULL) -> SemisimplicityReport:
    """Compare algebraic and geometric multiplicities on the unit circle."""
    spectrum = peripheral_spectrum(c, tol_peripheral, cluster_radius, tol_null)
    entries = []
    for e in spectrum.eigenvalues:
        defective = e.geometric_multiplicity < e.algebraic_multiplicity
        if not defective:
            try:
                spectral_projection(c, e.value, tol_peripheral, cluster_radius)
            except DefectiveEigenvalueError:
                defective = True
        entries.append(SemisimplicityEntry(
            e.value, e.algebraic_multiplicity, e.geometric_multiplicity,
            defective))
    return SemisimplicityReport(tuple(entries), any(e.defective for e in entries))


def almost_period(lambdas, epsilon: float, n_max: int = 10 ** 6) -> int:
    """Smallest n >= 1 with max_j |lambda_j^n - 1| <= epsilon, by direct scan.

    The inputs must be unimodular within 1e-8; powers are evaluated through
    the phases exp(i n arg(lambda_j)), so a tiny modulus error cannot compound
    over large n.  epsilon = 0 asks for an exact period and is matched at
    machine precision (the comparison is floored at 1e-12, since exp(i n
    theta) for a floating theta cannot land on 1 exactly).  Raises
    :class:`AlmostPeriodError` carrying the best n seen when the scan bound
    is exhausted.
    """
    lams = np.asarray(list(lambdas), dtype=complex)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if lams.size and np.abs(np.abs(lams) - 1.0).max() > 1e-8:
        raise ValueError("almost periods are defined for unimodular values only")
    if lams.size == 0:
        return 1
    angles = np.angle(lams)
    eff = max(float(epsilon), 1e-12)
    best_n, best_err = None, np.inf
    chunk = 8192
    for start in range(1, n_max + 1, chunk):
        ns = np.arange(start, min(start + chunk, n_max + 1))
        errs = np.abs(np.exp(1j * np.outer(ns, angles)) - 1.0).max(axis=1)
        hit = np.flatnonzero(errs <= eff)
        if hit.size:
            local_best = errs[: hit[0] + 1].min()
            if local_best < best_err:
                best_err = local_best
            return int(ns[hit[0]])
        if errs.min() < best_err:
            best_err = float(errs.min())
            best_n = int(ns[int(errs.argmin())])
    raise AlmostPeriodError(
        f"no n <= {n_max} brings all {lams.size} eigenvalue powers within "
        f"{epsilon} of 1 (best: n = {best_n}, error = {best_err:.3e})",
        best_n=best_n, best_error=best_err)
