"""Peripheral eigenspaces of a unital channel and the product that makes
their span a C*-algebra.

For a unital channel tau on M_d with peripheral eigenvalues lam (|lam| = 1),
the span of the peripheral eigenspaces E_lam = {x : tau(x) = lam x} carries
a product

    x o y = P_{lam mu}(x y)        for x in E_lam, y in E_mu,

where P_z is the spectral projector of the cluster at z, and x o y = 0 when
lam mu is not a peripheral eigenvalue.  Three independent realizations of
the same product are kept side by side and never merged:

  * the spectral-projector formula above (:meth:`PeripheralBoundary.product`),
  * the Cesaro average (1/N) sum_n (lam mu)^-n tau^n(x y)
    (:meth:`PeripheralBoundary.cesaro_product`),
  * compression of martingale lifts on a finite dilation tower
    (:func:`periph.dilation.compressed_product`).

Under this product the peripheral span is a unital C*-algebra graded by the
peripheral eigenvalue group (E_lam o E_mu lies in E_{lam mu}), tau acts on it
as a *-automorphism, and when the channel admits a faithful invariant state
the product collapses to the ordinary matrix product.  The verifier functions
at the bottom of this module check exactly these statements on random
elements and report the measured defects.
"""

from dataclasses import dataclass

import numpy as np

from . import channel as ch
from . import matrixcore as mc
from . import spectral as sp
from .errors import (PeriphError, PeripheralSpanError, ToleranceConflictError)
from .reporting import VerificationReport

EIGEN_RESIDUAL_TOL = 1e-6
SPAN_DEFECT_TOL = 1e-6

__all__ = [
    "BoundaryElement", "ProductTable", "LimitDiagnostic", "PeripheralBoundary",
    "peripheral_product", "cesaro_product", "limit_diagnostic",
    "product_general", "decompose_peripheral", "boundary_table",
    "fourier_components", "poly_kernel_decompose", "cstar_verify",
    "automorphism_check", "stability_check", "module_structure_check",
    "isometry_dim_check", "span_projector_from",
]


@dataclass(frozen=True)
class BoundaryElement:
    """A matrix in the peripheral span plus its eigenspace components.

    ``components`` maps each peripheral eigenvalue (the cluster
    representative) to the part of ``matrix`` lying in that eigenspace;
    the components sum back to ``matrix`` within the decomposition defect.
    """

    matrix: np.ndarray
    components: dict

    def norm(self) -> float:
        return mc.op_norm(self.matrix)


@dataclass(frozen=True)
class ProductTable:
    """Structure constants of the boundary product on the combined basis.

    ``constants[a, b, e]`` is the coefficient of basis element e in
    x_a o x_b.  Entries vanish outside the eigenvalue grading by
    construction; ``expansion_defect`` records the worst residual of any
    product against its graded expansion.  The identity matrix is
    ``unit_scale * basis[unit_index]``.
    """

    labels: tuple
    slot_eigenvalues: tuple
    constants: np.ndarray
    unit_index: int
    unit_scale: float
    expansion_defect: float


@dataclass(frozen=True)
class LimitDiagnostic:
    """Distances of the sequence (lam mu)^-n tau^n(x y) to its projected limit."""

    ns: tuple
    distances: tuple
    reference: np.ndarray
    rate_estimate: float


def span_projector_from(matrices, rel_tol: float = 1e-8) -> np.ndarray:
    """Orthogonal projector (on vec space) onto the span of given matrices."""
    vecs = [mc.vec(m) for m in matrices]
    if not vecs:
        dim = 0
        return np.zeros((dim, dim), dtype=complex)
    a = np.stack(vecs, axis=1)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], a.shape[0]), dtype=complex)
    q = u[:, s > rel_tol * s[0]]
    return q @ mc.dagger(q)


class PeripheralBoundary:
    """Peripheral eigenspaces, spectral projectors, and the boundary product.

    Build once per channel with :meth:`build`; all products, decompositions,
    tables and verifiers then run off the same cached eigendecomposition so
    every number in a report refers to one consistent spectral picture.
    """

    def __init__(self, channel: ch.KrausChannel, spectrum: sp.PeripheralSpectrum,
                 spaces: dict, projectors: dict):
        self.channel = channel
        self.spectrum = spectrum
        self.spaces = spaces
        self.projectors = projectors
        self.reps = [e.value for e in spectrum.eigenvalues]
        self._cesaro_cache: dict = {}
        self._span_projector: np.ndarray | None = None

    @classmethod
    def build(cls, channel: ch.KrausChannel,
              tol_peripheral: float = sp.TOL_PERIPHERAL,
              cluster_radius: float = sp.CLUSTER_RADIUS,
              tol_null: float = sp.TOL_NULL) -> "PeripheralBoundary":
        spectrum = sp.peripheral_spectrum(
            channel, tol_peripheral, cluster_radius, tol_null)
        spaces = {}
        projectors = {}
        for entry in spectrum.eigenvalues:
            space = sp.eigenspace(channel, entry.value, tol=tol_null)
            if abs(entry.value - 1.0) <= sp.EIGEN_EQ_TOL:
                space = _identity_first(channel.dim, space)
            spaces[entry.value] = space
            proj = sp.spectral_projection(
                channel, entry.value, tol_peripheral, cluster_radius)
            projectors[entry.value] = proj.matrix
        pb = cls(channel, spectrum, spaces, projectors)
        gram = pb._combined_gram()
        if gram.shape[0] and np.linalg.eigvalsh(gram)[0] <= 1e-10:
            raise PeriphError(
                "combined peripheral eigenbasis is numerically degenerate "
                f"(Gram min eigenvalue {np.linalg.eigvalsh(gram)[0]:.3e})")
        return pb

    # -- basic queries ----------------------------------------------------

    def basis_entries(self) -> list:
        """All (eigenvalue, basis matrix) pairs in spectrum order."""
        out = []
        for rep in self.reps:
            for b in self.spaces[rep].basis:
                out.append((rep, b))
        return out

    def span_dim(self) -> int:
        return sum(self.spaces[rep].dim for rep in self.reps)

    @property
    def combined_basis(self) -> tuple:
        """Concatenated eigenspace bases, a basis of the full peripheral span."""
        return tuple(b for _, b in self.basis_entries())

    def unit_rep(self) -> complex:
        for rep in self.reps:
            if abs(rep - 1.0) <= sp.EIGEN_EQ_TOL:
                return rep
        raise PeriphError("no peripheral eigenvalue at 1; channel not unital?")

    def find_rep(self, z: complex, tol: float = sp.EIGEN_EQ_TOL):
        """Cluster representative within tol of z, or None.

        Raises :class:`ToleranceConflictError` when two distinct clusters
        both match, rather than guessing between them.
        """
        hits = [rep for rep in self.reps if abs(rep - z) <= tol]
        if len(hits) > 1:
            raise ToleranceConflictError(
                f"value {z:.12g} lies within {tol:.1e} of "
                f"{len(hits)} peripheral clusters: "
                + ", ".join(f"{h:.12g}" for h in hits))
        return hits[0] if hits else None

    def eigen_residual(self, x, lam: complex) -> float:
        """Relative defect of tau(x) = lam x in operator norm."""
        norm = mc.op_norm(x)
        if norm == 0.0:
            return 0.0
        return mc.op_norm(ch.apply(self.channel, x) - lam * x) / norm

    def _check_member(self, x, lam: complex, tol: float) -> None:
        res = self.eigen_residual(x, lam)
        if res > tol:
            raise ValueError(
                f"input is not in the lam = {lam:.12g} eigenspace: relative "
                f"residual {res:.3e} exceeds {tol:.0e}")

    def _combined_gram(self) -> np.ndarray:
        vecs = [mc.vec(b) for _, b in self.basis_entries()]
        if not vecs:
            return np.zeros((0, 0), dtype=complex)
        a = np.stack(vecs, axis=1)
        return mc.dagger(a) @ a

    def span_projector(self) -> np.ndarray:
        """Orthogonal projector onto the combined peripheral span."""
        if self._span_projector is None:
            self._span_projector = span_projector_from(
                [b for _, b in self.basis_entries()])
        return self._span_projector

    # -- products ---------------------------------------------------------

    def product(self, x, lam: complex, y, mu: complex,
                residual_tol: float = EIGEN_RESIDUAL_TOL) -> np.ndarray:
        """Boundary product of eigenvectors: P_{lam mu}(x y).

        Inputs must lie in their declared eigenspaces within the residual
        tolerance.  Returns the zero matrix when lam*mu is not a peripheral
        eigenvalue at tolerance.
        """
        xa = np.asarray(x, dtype=complex)
        ya = np.asarray(y, dtype=complex)
        self._check_member(xa, lam, residual_tol)
        self._check_member(ya, mu, residual_tol)
        return self._project_product(xa, lam, ya, mu)

    def _project_product(self, x, lam, y, mu) -> np.ndarray:
        rep = self.find_rep(lam * mu)
        if rep is None:
            return np.zeros((self.channel.dim, self.channel.dim), dtype=complex)
        return mc.unvec(self.projectors[rep] @ mc.vec(x @ y))

    def cesaro_product(self, x, lam: complex, y, mu: complex,
                       n_terms: int = 10 ** 4,
                       residual_tol: float = EIGEN_RESIDUAL_TOL) -> np.ndarray:
        """Cesaro realization (1/N) sum_{n<N} (lam mu)^-n tau^n(x y).

        Computed through a cached doubling scheme for the averaged operator,
        so the cost is logarithmic in ``n_terms``.  Deliberately ignorant of
        the spectral projectors: this is an independent route to the same
        product, kept separate for cross-checking.
        """
        xa = np.asarray(x, dtype=complex)
        ya = np.asarray(y, dtype=complex)
        self._check_member(xa, lam, residual_tol)
        self._check_member(ya, mu, residual_tol)
        op = self._cesaro_operator(complex(lam) * complex(mu), int(n_terms))
        return mc.unvec(op @ mc.vec(xa @ ya))

    def _cesaro_operator(self, z: complex, n_terms: int) -> np.ndarray:
        if n_terms < 1:
            raise ValueError("n_terms must be at least 1")
        key = (z, n_terms)
        if key in self._cesaro_cache:
            return self._cesaro_cache[key]
        a = ch.superoperator(self.channel).matrix / z
        eye = np.eye(a.shape[0], dtype=complex)
        total = np.zeros_like(a)
        prefix = eye.copy()
        block_sum = eye.copy()  # sum over a block of 2^t consecutive powers
        block_pow = a.copy()
        n = n_terms
        while n:
            if n & 1:
                total = total + prefix @ block_sum
                prefix = prefix @ block_pow
            block_sum = block_sum + block_pow @ block_sum
            block_pow = block_pow @ block_pow
            n >>= 1
        op = total / n_terms
        self._cesaro_cache[key] = op
        return op

    def limit_diagnostic(self, x, lam: complex, y, mu: complex,
                         n_max: int = 64) -> LimitDiagnostic:
        """Trace of the sequence (lam mu)^-n tau^n(x y) against its limit.

        The reference is the spectral-projector product.  The rate estimate
        is the slope of a log-linear fit to the distances (0.0 when the
        sequence is already at the limit to rounding).
        """
        xa = np.asarray(x, dtype=complex)
        ya = np.asarray(y, dtype=complex)
        ref = self._project_product(xa, lam, ya, mu)
        z = complex(lam) * complex(mu)
        s = ch.superoperator(self.channel).matrix
        v = mc.vec(xa @ ya)
        phase = 1.0 + 0.0j
        ns, dists = [], []
        for n in range(n_max + 1):
            dists.append(mc.op_norm(mc.unvec(v / phase) - ref))
            ns.append(n)
            v = s @ v
            phase *= z
        rate = 0.0
        pts = [(n, d) for n, d in zip(ns, dists) if d > 1e-13]
        if len(pts) >= 3:
            xs = np.array([p[0] for p in pts], dtype=float)
            ys = np.log(np.array([p[1] for p in pts]))
            slope = np.polyfit(xs, ys, 1)[0]
            rate = float(np.exp(slope))
        return LimitDiagnostic(tuple(ns), tuple(dists), ref, rate)

    # -- elements of the full peripheral span ------------------------------

    def decompose(self, x, defect_tol: float = SPAN_DEFECT_TOL) -> BoundaryElement:
        """Split a matrix into its peripheral eigenspace components.

        Raises :class:`PeripheralSpanError` when the components do not sum
        back to the input within ``defect_tol`` relative to its norm.
        """
        xa = np.asarray(x, dtype=complex)
        if xa.shape != (self.channel.dim,) * 2:
            raise ValueError(
                f"input has shape {xa.shape}, channel dim is {self.channel.dim}")
        v = mc.vec(xa)
        comps = {rep: mc.unvec(self.projectors[rep] @ v) for rep in self.reps}
        recon = sum(comps.values())
        defect = mc.op_norm(recon - xa)
        scale = max(mc.op_norm(xa), 1e-300)
        if defect > defect_tol * scale:
            raise PeripheralSpanError(
                f"matrix is not in the peripheral span: reconstruction "
                f"defect {defect:.3e} exceeds {defect_tol:.0e} * ||x|| = "
                f"{defect_tol * scale:.3e}", defect=defect)
        return BoundaryElement(xa, comps)

    def unit_element(self) -> BoundaryElement:
        eye = np.eye(self.channel.dim, dtype=complex)
        return BoundaryElement(eye, {self.unit_rep(): eye})

    def adjoint(self, x: BoundaryElement) -> BoundaryElement:
        """Conjugate transpose; components move to conjugate eigenvalues."""
        comps = {}
        for rep, comp in x.components.items():
            target = self.find_rep(np.conj(rep))
            if target is None:
                raise PeriphError(
                    f"peripheral spectrum is not closed under conjugation at "
                    f"{rep:.12g}")
            comps[target] = comps.get(target, 0) + mc.dagger(comp)
        return BoundaryElement(mc.dagger(x.matrix), comps)

    def product_general(self, x: BoundaryElement,
                        y: BoundaryElement) -> BoundaryElement:
        """Bilinear extension of the boundary product to full elements."""
        d = self.channel.dim
        bins: dict = {}
        for lam, xc in x.components.items():
            if mc.op_norm(xc) == 0.0:
                continue
            for mu, yc in y.components.items():
                if mc.op_norm(yc) == 0.0:
                    continue
                rep = self.find_rep(lam * mu)
                if rep is None:
                    continue
                term = self.product(xc, lam, yc, mu)
                bins[rep] = bins.get(rep, 0) + term
        total = sum(bins.values()) if bins else np.zeros((d, d), dtype=complex)
        return BoundaryElement(total, bins)

    def apply_channel(self, x: BoundaryElement) -> BoundaryElement:
        """Push an element through tau, applying the channel to each component."""
        comps = {rep: ch.apply(self.channel, comp)
                 for rep, comp in x.components.items()}
        return BoundaryElement(ch.apply(self.channel, x.matrix), comps)

    # -- structure constants ----------------------------------------------

    def table(self, expansion_tol: float = 1e-6) -> ProductTable:
        """Structure constants over the combined orthonormal-per-space basis."""
        entries = self.basis_entries()
        k = len(entries)
        offsets = {}
        pos = 0
        for rep in self.reps:
            offsets[rep] = pos
            pos += self.spaces[rep].dim
        labels = []
        for rep in self.reps:
            for i in range(self.spaces[rep].dim):
                labels.append(f"({rep.real:+.6f}{rep.imag:+.6f}j)[{i}]")
        constants = np.zeros((k, k, k), dtype=complex)
        worst = 0.0
        for a, (lam, xb) in enumerate(entries):
            for b, (mu, yb) in enumerate(entries):
                p = self._project_product(xb, lam, yb, mu)
                rep = self.find_rep(lam * mu)
                if rep is None:
                    worst = max(worst, mc.op_norm(p))
                    continue
                base = offsets[rep]
                space = self.spaces[rep]
                recon = np.zeros_like(p)
                for i, e in enumerate(space.basis):
                    coeff = mc.hs_inner(e, p)
                    constants[a, b, base + i] = coeff
                    recon = recon + coeff * e
                defect = mc.hs_norm(p - recon)
                scale = max(mc.hs_norm(p), 1.0)
                worst = max(worst, defect / scale)
                if defect > expansion_tol * scale:
                    raise PeriphError(
                        f"product of basis elements {a}, {b} does not expand "
                        f"in the lam = {rep:.12g} eigenspace: defect "
                        f"{defect:.3e}")
        unit_rep = self.unit_rep()
        unit_index = offsets[unit_rep]
        return ProductTable(tuple(labels),
                            tuple(lam for lam, _ in entries),
                            constants, unit_index,
                            float(np.sqrt(self.channel.dim)), worst)


def _identity_first(dim: int, space: sp.Eigenspace) -> sp.Eigenspace:
    """Rotate an eigenspace basis so the first element is I/sqrt(d).

    Only meaningful for the fixed space, which always contains the identity.
    The rest of the basis is re-orthonormalized against it, preserving the
    span and orthonormality.
    """
    first = mc.vec(np.eye(dim, dtype=complex))
    first = first / np.linalg.norm(first)
    kept = [first]
    for b in space.basis:
        v = mc.vec(b)
        for u in kept:
            v = v - np.vdot(u, v) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            kept.append(v / norm)
    if len(kept) > space.dim:
        kept = kept[: space.dim]
    basis = tuple(mc.unvec(v) for v in kept)
    return sp.Eigenspace(space.lam, basis, space.residual)


# -- channel-level entry points ----------------------------------------------


def _as_boundary(obj) -> PeripheralBoundary:
    """Coerce a channel or an already-built boundary to a PeripheralBoundary.

    Built boundaries are cached on the channel, so repeated channel-level
    calls share one eigendecomposition.
    """
    if isinstance(obj, PeripheralBoundary):
        return obj
    if isinstance(obj, ch.KrausChannel):
        if "boundary" not in obj._cache:
            obj._cache["boundary"] = PeripheralBoundary.build(obj)
        return obj._cache["boundary"]
    raise TypeError(
        f"expected a KrausChannel or PeripheralBoundary, got {type(obj).__name__}")


def peripheral_product(c, x, lam: complex, y, mu: complex,
                       residual_tol: float = EIGEN_RESIDUAL_TOL) -> np.ndarray:
    """Boundary product P_{lam mu}(x y) for eigenvectors of a channel."""
    return _as_boundary(c).product(x, lam, y, mu, residual_tol)


def cesaro_product(c, x, lam: complex, y, mu: complex,
                   n_terms: int = 10 ** 4,
                   residual_tol: float = EIGEN_RESIDUAL_TOL) -> np.ndarray:
    """Cesaro realization of the boundary product for a channel."""
    return _as_boundary(c).cesaro_product(x, lam, y, mu, n_terms, residual_tol)


def limit_diagnostic(c, x, lam: complex, y, mu: complex,
                     n_max: int = 64) -> LimitDiagnostic:
    """Convergence trace of (lam mu)^-n tau^n(x y) for a channel."""
    return _as_boundary(c).limit_diagnostic(x, lam, y, mu, n_max)


def product_general(c, x: BoundaryElement, y: BoundaryElement) -> BoundaryElement:
    """Bilinear extension of the boundary product for a channel."""
    return _as_boundary(c).product_general(x, y)


def decompose_peripheral(c, x,
                         defect_tol: float = SPAN_DEFECT_TOL) -> BoundaryElement:
    """Split a matrix into peripheral eigenspace components for a channel."""
    return _as_boundary(c).decompose(x, defect_tol)


def boundary_table(c, expansion_tol: float = 1e-6) -> ProductTable:
    """Structure constants of the boundary product for a channel."""
    return _as_boundary(c).table(expansion_tol)


# -- standalone decompositions ---------------------------------------------


def fourier_components(c: ch.KrausChannel, x, k: int,
                       pre_tol: float = 1e-8) -> list[np.ndarray]:
    """Split a fixed point of tau^k into eigenvectors of tau at k-th roots.

    Returns [x_0, ..., x_{k-1}] with x_j = (1/k) sum_l w^{-l j} tau^l(x) for
    w = exp(2 pi i / k); then tau(x_j) = w^j x_j and sum_j x_j = x.  The
    input must satisfy tau^k(x) = x within ``pre_tol`` relative residual.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    xa = np.asarray(x, dtype=complex)
    norm = mc.op_norm(xa)
    iterates = [xa]
    for _ in range(k):
        iterates.append(ch.apply(c, iterates[-1]))
    defect = mc.op_norm(iterates[k] - xa)
    if norm > 0 and defect > pre_tol * norm:
        raise ValueError(
            f"input is not fixed by tau^{k}: relative residual "
            f"{defect / norm:.3e} exceeds {pre_tol:.0e}")
    w = np.exp(2j * np.pi / k)
    out = []
    for j in range(k):
        acc = np.zeros_like(xa)
        for ell in range(k):
            acc = acc + w ** (-ell * j) * iterates[ell]
        out.append(acc / k)
    return out


def poly_kernel_decompose(c: ch.KrausChannel, y, roots,
                          pre_tol: float = 1e-8,
                          gap_tol: float = 1e-8) -> dict:
    """Split y into eigenvectors at the given simple roots of p(t) = prod(t - r).

    Requires p(tau) y = 0 within ``pre_tol`` relative residual and pairwise
    root separation above ``gap_tol``.  Component i is the interpolation
    projector applied to y:

        y_i = [prod_{j != i} (tau - r_j)](y) / prod_{j != i} (r_i - r_j),

    giving tau(y_i) = r_i y_i and sum_i y_i = y.
    """
    rs = [complex(r) for r in roots]
    if not rs:
        raise ValueError("need at least one root")
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            if abs(rs[i] - rs[j]) <= gap_tol:
                raise ValueError(
                    f"roots {rs[i]:.12g} and {rs[j]:.12g} are closer than "
                    f"{gap_tol:.0e}; kernel projectors are ill-conditioned")
    ya = np.asarray(y, dtype=complex)
    norm = mc.op_norm(ya)
    full = ya
    for r in rs:
        full = ch.apply(c, full) - r * full
    if norm > 0 and mc.op_norm(full) > pre_tol * norm:
        raise ValueError(
            f"input is not annihilated by prod(tau - r): relative residual "
            f"{mc.op_norm(full) / norm:.3e} exceeds {pre_tol:.0e}")
    out = {}
    for i, ri in enumerate(rs):
        num = ya
        denom = 1.0 + 0.0j
        for j, rj in enumerate(rs):
            if j == i:
                continue
            num = ch.apply(c, num) - rj * num
            denom *= ri - rj
        out[ri] = num / denom
    return out


# -- verifiers --------------------------------------------------------------


def _random_element(pb: PeripheralBoundary, rng,
                    normalize: bool = True) -> BoundaryElement:
    comps = {}
    for rep in pb.reps:
        space = pb.spaces[rep]
        acc = np.zeros((pb.channel.dim,) * 2, dtype=complex)
        for b in space.basis:
            coeff = rng.standard_normal() + 1j * rng.standard_normal()
            acc = acc + coeff * b
        comps[rep] = acc
    matrix = sum(comps.values())
    if normalize:
        norm = mc.op_norm(matrix)
        if norm < 1e-12:  # pragma: no cover - measure-zero draw
            return _random_element(pb, rng, normalize)
        matrix = matrix / norm
        comps = {rep: c / norm for rep, c in comps.items()}
    return BoundaryElement(matrix, comps)


def cstar_verify(c, trials: int = 50, seed: int = 0) -> VerificationReport:
    """C*-algebra axioms for the boundary product on random unit elements.

    Accepts a channel or a built :class:`PeripheralBoundary`; so do the
    other verifiers below.
    """
    pb = _as_boundary(c)
    rng = np.random.default_rng(seed)
    report = VerificationReport(
        "cstar axioms",
        meta={"seed": seed, "trials": trials, "channel": pb.channel.label,
              "span_dim": pb.span_dim()})
    assoc = invol = unit_law = cstar = 0.0
    one = pb.unit_element()
    for _ in range(trials):
        x = _random_element(pb, rng)
        y = _random_element(pb, rng)
        z = _random_element(pb, rng)
        xy = pb.product_general(x, y)
        yz = pb.product_general(y, z)
        assoc = max(assoc, mc.op_norm(
            pb.product_general(xy, z).matrix - pb.product_general(x, yz).matrix))
        invol = max(invol, mc.op_norm(
            pb.adjoint(xy).matrix
            - pb.product_general(pb.adjoint(y), pb.adjoint(x)).matrix))
        unit_law = max(unit_law, mc.op_norm(
            pb.product_general(one, x).matrix - x.matrix))
        unit_law = max(unit_law, mc.op_norm(
            pb.product_general(x, one).matrix - x.matrix))
        xx = pb.product_general(pb.adjoint(x), x)
        cstar = max(cstar, abs(mc.op_norm(xx.matrix) - 1.0))
    report.add("associativity", "(x o y) o z = x o (y o z)", assoc, 1e-7)
    report.add("involution", "(x o y)* = y* o x*", invol, 1e-8)
    report.add("unit_law", "1 o x = x = x o 1", unit_law, 1e-8)
    report.add("cstar_identity", "||x* o x|| = ||x||^2", cstar, 1e-6)
    return report


def automorphism_check(c, trials: int = 20, seed: int = 0) -> VerificationReport:
    """tau restricted to the peripheral span is a *-automorphism."""
    pb = _as_boundary(c)
    rng = np.random.default_rng(seed)
    report = VerificationReport(
        "channel automorphism",
        meta={"seed": seed, "trials": trials, "channel": pb.channel.label})
    mult = isom = 0.0
    for _ in range(trials):
        x = _random_element(pb, rng)
        y = _random_element(pb, rng)
        tx = pb.apply_channel(x)
        ty = pb.apply_channel(y)
        lhs = pb.product_general(tx, ty).matrix
        rhs = ch.apply(pb.channel, pb.product_general(x, y).matrix)
        mult = max(mult, mc.op_norm(lhs - rhs))
        isom = max(isom, abs(mc.op_norm(tx.matrix) - 1.0))
    report.add("multiplicative", "tau(x) o tau(y) = tau(x o y)", mult, 1e-8)
    report.add("isometric_on_span", "||tau(x)|| = ||x|| on the peripheral span",
               isom, 1e-8)
    scales = 0.0
    for rep in pb.reps:
        for b in pb.spaces[rep].basis:
            scales = max(scales, mc.op_norm(ch.apply(pb.channel, b) - rep * b))
    report.add("eigenspaces_preserved", "tau = lam id on each E_lam",
               scales, 1e-8)
    return report


def stability_check(c, k: int, n_samples: int = 20,
                    seed: int = 0) -> VerificationReport:
    """Peripheral structure of tau^k against that of tau.

    The peripheral span must be unchanged, the fixed space of tau^k must be
    the joint span of the E_{w^j}(tau) over k-th roots of unity w^j, and
    Fourier averaging must split fixed points of tau^k back into those
    eigenspaces exactly.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    pb = _as_boundary(c)
    rng = np.random.default_rng(seed)
    c_k = ch.power(pb.channel, k)
    pb_k = PeripheralBoundary.build(c_k)
    report = VerificationReport(
        "power stability",
        meta={"seed": seed, "k": k, "channel": pb.channel.label,
              "span_dim": pb.span_dim(), "span_dim_power": pb_k.span_dim()})

    gap_full = mc.op_norm(pb_k.span_projector() - pb.span_projector())
    report.add("peripheral_span_stable",
               "span of peripheral eigenspaces of tau^k equals that of tau",
               gap_full, 1e-7)

    fixed_k = pb_k.spaces[pb_k.unit_rep()].basis
    union = []
    for j in range(k):
        root = np.exp(2j * np.pi * j / k)
        rep = pb.find_rep(root)
        if rep is not None:
            union.extend(pb.spaces[rep].basis)
    gap_fixed = mc.op_norm(span_projector_from(fixed_k)
                           - span_projector_from(union))
    report.add("fixed_space_of_power",
               "Fix(tau^k) = span of E_{w^j}(tau) over k-th roots of unity",
               gap_fixed, 1e-7)

    recon = graded = 0.0
    for _ in range(n_samples):
        acc = np.zeros((pb.channel.dim,) * 2, dtype=complex)
        for b in fixed_k:
            coeff = rng.standard_normal() + 1j * rng.standard_normal()
            acc = acc + coeff * b
        norm = mc.op_norm(acc)
        if norm < 1e-12:  # pragma: no cover - measure-zero draw
            continue
        acc = acc / norm
        comps = fourier_components(pb.channel, acc, k)
        recon = max(recon, mc.op_norm(sum(comps) - acc))
        w = np.exp(2j * np.pi / k)
        for j, comp in enumerate(comps):
            graded = max(graded, mc.op_norm(
                ch.apply(pb.channel, comp) - w ** j * comp))
    report.add("fourier_reconstruction", "sum_j x_j = x for Fourier components",
               recon, 1e-10)
    report.add("fourier_components_graded", "tau(x_j) = w^j x_j",
               graded, 1e-8)
    return report


def module_structure_check(c, lam: complex, trials: int = 20,
                           seed: int = 0) -> VerificationReport:
    """E_lam as a Hilbert module over the fixed-point algebra F.

    I_lam = span{x* o y : x, y in E_lam} must be an ideal of F absorbing
    multiplication, inner products x* o x must be positive in F, and the
    adjoint must carry E_lam onto E_{conj(lam)}.
    """
    pb = _as_boundary(c)
    rep = pb.find_rep(lam)
    if rep is None:
        raise ValueError(f"{lam:.12g} is not a peripheral eigenvalue")
    space = pb.spaces[rep]
    if space.dim == 0:
        raise ValueError(f"eigenspace at {lam:.12g} is trivial")
    unit = pb.unit_rep()
    f_basis = pb.spaces[unit].basis
    rng = np.random.default_rng(seed)
    report = VerificationReport(
        "hilbert module structure",
        meta={"seed": seed, "trials": trials, "lam": f"{rep:.12g}",
              "dim_E": space.dim, "dim_F": len(f_basis),
              "channel": pb.channel.label})

    conj_rep = pb.find_rep(np.conj(rep))
    if conj_rep is None:
        raise PeriphError(
            f"peripheral spectrum is not closed under conjugation at {rep:.12g}")
    products = []
    for a in space.basis:
        for b in space.basis:
            products.append(pb.product(mc.dagger(a), conj_rep, b, rep))
    ideal_proj = span_projector_from(products)
    report.meta["dim_ideal"] = int(round(np.trace(ideal_proj).real))

    def ideal_defect(w):
        norm = mc.hs_norm(w)
        if norm < 1e-12:
            return 0.0
        v = mc.vec(w)
        return float(np.linalg.norm(v - ideal_proj @ v) / norm)

    def rand_combo(basis):
        acc = np.zeros((pb.channel.dim,) * 2, dtype=complex)
        for b in basis:
            acc = acc + (rng.standard_normal()
                         + 1j * rng.standard_normal()) * b
        n = mc.op_norm(acc)
        return acc / n if n > 1e-12 else acc

    inner = ideal_absorb = pos = 0.0
    for _ in range(trials):
        x = rand_combo(space.basis)
        y = rand_combo(space.basis)
        w = pb.product(mc.dagger(x), conj_rep, y, rep)
        inner = max(inner, ideal_defect(w))
        if products:
            f = rand_combo(f_basis)
            g = rand_combo(products)
            left = pb.product(f, unit, g, unit)
            right = pb.product(g, unit, f, unit)
            ideal_absorb = max(ideal_absorb, ideal_defect(left),
                               ideal_defect(right))
        xx = pb.product(mc.dagger(x), conj_rep, x, rep)
        herm = (xx + mc.dagger(xx)) / 2
        pos = max(pos, -float(np.linalg.eigvalsh(herm)[0]))
    report.add("inner_products_in_ideal", "x* o y lies in I_lam", inner, 1e-7)
    report.add("ideal_absorbs", "f o g and g o f lie in I_lam for f in F, "
               "g in I_lam", ideal_absorb, 1e-7)
    report.add("inner_product_positive", "x* o x >= 0", pos, 1e-9)

    adjoints = [mc.dagger(b) for b in space.basis]
    conj_space = pb.spaces[conj_rep].basis if conj_rep is not None else []
    gap = mc.op_norm(span_projector_from(adjoints)
                     - span_projector_from(conj_space))
    report.add("adjoint_space", "E_lam* = E_{conj(lam)}", gap, 1e-8)
    return report


def isometry_dim_check(c, lam: complex, v1, v2,
                       tol: float = 1e-7) -> VerificationReport:
    """Consequences of a unitary pair in E_lam: v1* o v2 = 1 (or v1 o v2* = 1).

    When the hypothesis holds, dim E_lam must equal dim F and E_lam must be
    exactly {x o v : x in F}.  When it does not, the assertions are reported
    as skipped, not failed.
    """
    pb = _as_boundary(c)
    rep = pb.find_rep(lam)
    if rep is None:
        raise ValueError(f"{lam:.12g} is not a peripheral eigenvalue")
    v1a = np.asarray(v1, dtype=complex)
    v2a = np.asarray(v2, dtype=complex)
    pb._check_member(v1a, rep, EIGEN_RESIDUAL_TOL)
    pb._check_member(v2a, rep, EIGEN_RESIDUAL_TOL)
    conj_rep = pb.find_rep(np.conj(rep))
    if conj_rep is None:
        raise PeriphError(
            f"peripheral spectrum is not closed under conjugation at {rep:.12g}")
    unit = pb.unit_rep()
    eye = np.eye(pb.channel.dim)
    d1 = mc.op_norm(pb.product(mc.dagger(v1a), conj_rep, v2a, rep) - eye)
    d2 = mc.op_norm(pb.product(v1a, rep, mc.dagger(v2a), conj_rep) - eye)
    report = VerificationReport(
        "isometry pair dimensions",
        meta={"lam": f"{rep:.12g}", "dim_E": pb.spaces[rep].dim,
              "dim_F": pb.spaces[unit].dim, "channel": pb.channel.label,
              "pair_defects": (d1, d2)})
    if min(d1, d2) > tol:
        reason = (f"neither v1* o v2 nor v1 o v2* equals 1 at {tol:.0e} "
                  f"(defects {d1:.3e}, {d2:.3e})")
        report.add_skipped("pair_inverse", "v1* o v2 = 1 or v1 o v2* = 1",
                           reason)
        report.add_skipped("dim_match", "dim E_lam = dim F", reason)
        report.add_skipped("module_span", "E_lam = {x o v : x in F}", reason)
        return report
    report.add("pair_inverse", "v1* o v2 = 1 or v1 o v2* = 1",
               min(d1, d2), tol)
    report.add("dim_match", "dim E_lam = dim F",
               float(abs(pb.spaces[rep].dim - pb.spaces[unit].dim)), 0.0)
    v = v2a if d1 <= d2 else v1a
    shifted = [pb.product(f, unit, v, rep) for f in pb.spaces[unit].basis]
    gap = mc.op_norm(span_projector_from(shifted)
                     - span_projector_from(pb.spaces[rep].basis))
    report.add("module_span", "E_lam = {x o v : x in F}", gap, tol)
    return report
