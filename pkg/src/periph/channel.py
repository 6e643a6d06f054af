"""Unital completely positive maps on d x d complex matrices, in Kraus form.

A channel acts in the Heisenberg picture as

    tau(X) = sum_i K_i^dag X K_i,          with   sum_i K_i^dag K_i = I,

so tau(I) = I.  The predual (Schroedinger) action on states is

    tau_*(rho) = sum_i K_i rho K_i^dag,

the adjoint of tau under the Hilbert-Schmidt pairing:
trace(tau(A)^dag rho) = trace(A^dag tau_*(rho)).

With the column-stacking convention of :mod:`periph.matrixcore`, the two
pictures become d^2 x d^2 matrices

    S           = sum_i K_i^T kron K_i^dag        (Heisenberg)
    S_predual   = sum_i conj(K_i) kron K_i        (predual)

acting on vec(X).  Complete positivity is structural here: channels are
specified by Kraus families, so only unitality is ever re-checked.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import matrixcore as mc
from .errors import ValidationError

UNITALITY_TOL = 1e-10

__all__ = [
    "KrausChannel", "Superoperator", "ValidationReport", "InvariantStateReport",
    "validate", "apply", "superoperator", "power_apply", "invariant_state",
    "tensor", "power", "UNITALITY_TOL",
]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A unital CP map given by a finite family of square Kraus operators.

    Immutable after construction; the Kraus arrays are copied and marked
    read-only.  ``_cache`` memoizes derived objects (superoperator matrices,
    eigendecompositions) keyed by name, which is safe precisely because the
    channel itself can never change.
    """

    kraus: tuple
    label: str = ""
    dim: int = field(init=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex, order="C") for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = None
        for i, k in enumerate(ops):
            if k.ndim != 2 or k.shape[0] != k.shape[1]:
                raise ValidationError(
                    f"Kraus operator {i} has shape {k.shape}, expected square")
            if d is None:
                d = k.shape[0]
            elif k.shape[0] != d:
                raise ValidationError(
                    f"Kraus operator {i} is {k.shape[0]}x{k.shape[0]}, "
                    f"expected {d}x{d}")
            if not np.all(np.isfinite(k.view(float))):
                raise ValidationError(f"Kraus operator {i} has non-finite entries")
            k.flags.writeable = False
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "dim", int(d))

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True)
class Superoperator:
    """Matrix of a channel on vectorized inputs, in a declared picture."""

    dim: int
    matrix: np.ndarray
    picture: str  # "heisenberg" or "predual"


@dataclass(frozen=True)
class ValidationReport:
    dim: int
    n_kraus: int
    unitality_defect: float
    passed: bool


@dataclass(frozen=True)
class InvariantStateReport:
    """A fixed density matrix of the predual, or evidence none was found.

    ``state`` is None only when the fixed space contains no positive
    semidefinite element of unit trace at tolerance, which cannot happen for
    a genuine channel but is reported rather than asserted.  ``faithful``
    means the state found has smallest eigenvalue above the faithfulness
    tolerance; since the state is produced by averaging (spectral projection
    of the maximally mixed state), a non-faithful verdict certifies that no
    faithful invariant state exists at that tolerance.
    """

    state: np.ndarray | None
    min_eigenvalue: float
    faithful: bool
    residual: float


def validate(c: KrausChannel, tol: float = UNITALITY_TOL) -> ValidationReport:
    """Check unitality: defect = ||sum_i K_i^dag K_i - I|| in operator norm."""
    acc = np.zeros((c.dim, c.dim), dtype=complex)
    for k in c.kraus:
        acc += mc.dagger(k) @ k
    defect = mc.op_norm(acc - np.eye(c.dim))
    return ValidationReport(c.dim, c.n_kraus, defect, bool(defect <= tol))


def apply(c: KrausChannel, x) -> np.ndarray:
    """Heisenberg action tau(x) = sum_i K_i^dag x K_i, computed directly.

    Kept independent of :func:`superoperator` so the two routes can be
    cross-checked against each other.
    """
    a = np.asarray(x, dtype=complex)
    if a.shape != (c.dim, c.dim):
        raise ValueError(f"input has shape {a.shape}, channel dim is {c.dim}")
    out = np.zeros_like(a)
    for k in c.kraus:
        out += mc.dagger(k) @ a @ k
    return out


def apply_predual(c: KrausChannel, rho) -> np.ndarray:
    """Predual action tau_*(rho) = sum_i K_i rho K_i^dag."""
    a = np.asarray(rho, dtype=complex)
    if a.shape != (c.dim, c.dim):
        raise ValueError(f"input has shape {a.shape}, channel dim is {c.dim}")
    out = np.zeros_like(a)
    for k in c.kraus:
        out += k @ a @ mc.dagger(k)
    return out


def superoperator(c: KrausChannel, picture: str = "heisenberg") -> Superoperator:
    """The d^2 x d^2 matrix of the channel on column-stacked inputs."""
    if picture not in ("heisenberg", "predual"):
        raise ValueError(f"unknown picture {picture!r}")
    key = ("superop", picture)
    if key not in c._cache:
        d2 = c.dim * c.dim
        s = np.zeros((d2, d2), dtype=complex)
        for k in c.kraus:
            if picture == "heisenberg":
                s += mc.kron(k.T, mc.dagger(k))
            else:
                s += mc.kron(np.conj(k), k)
        c._cache[key] = Superoperator(c.dim, s, picture)
    return c._cache[key]


def superop_eig(c: KrausChannel, picture: str = "heisenberg") -> mc.EigenDecomposition:
    """Cached eigendecomposition of the channel's superoperator matrix."""
    key = ("eig", picture)
    if key not in c._cache:
        c._cache[key] = mc.eig(superoperator(c, picture).matrix)
    return c._cache[key]


def power_apply(c: KrausChannel, x, n: int) -> np.ndarray:
    """tau^n(x) by repeated superoperator application; n = 0 returns x."""
    if n < 0 or int(n) != n:
        raise ValueError(f"power must be a nonnegative integer, got {n}")
    a = np.asarray(x, dtype=complex)
    if a.shape != (c.dim, c.dim):
        raise ValueError(f"input has shape {a.shape}, channel dim is {c.dim}")
    s = superoperator(c).matrix
    v = mc.vec(a)
    for _ in range(int(n)):
        v = s @ v
    return mc.unvec(v)


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Tensor product channel with Kraus family {A_i kron B_j}."""
    ops = tuple(mc.kron(ka, kb) for ka in a.kraus for kb in b.kraus)
    return KrausChannel(ops, label=f"tensor({a.label},{b.label})")


def power(c: KrausChannel, k: int) -> KrausChannel:
    """The k-fold composite tau^k as a channel, via Kraus products.

    tau(tau(X)) = sum_ij (K_j K_i)^dag X (K_j K_i), so each composition step
    multiplies the family size by len(c.kraus).
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"power must be a positive integer, got {k}")
    ops = list(c.kraus)
    for _ in range(int(k) - 1):
        ops = [kj @ ki for kj in c.kraus for ki in ops]
    return KrausChannel(tuple(ops), label=f"({c.label})^{int(k)}")


def _hermitian_span(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of the Hermitian part of a matrix span.

    The input is a list of vec'd matrices.  Hermitian matrices form a real
    vector space, so orthonormalization must happen over R: each candidate
    H is encoded as the real vector (Re vec H, Im vec H) and the basis is
    extracted from a real SVD, keeping coefficient combinations real.
    """
    cands = []
    for v in vectors:
        m = mc.unvec(v)
        for h in (m + mc.dagger(m), 1j * (m - mc.dagger(m))):
            if mc.hs_norm(h) > 1e-12:
                cands.append(h / mc.hs_norm(h))
    if not cands:
        return []
    real_mat = np.stack(
        [np.concatenate([mc.vec(h).real, mc.vec(h).imag]) for h in cands], axis=1)
    u, s, vt = np.linalg.svd(real_mat, full_matrices=False)
    basis = []
    for k in range(len(s)):
        if s[k] <= 1e-10 * s[0]:
            break
        coeff = vt[k] / s[k]
        h = sum(float(cj) * hj for cj, hj in zip(coeff, cands))
        basis.append(h / mc.hs_norm(h))
    return basis


def _psd_in_span(basis: list[np.ndarray]) -> tuple[np.ndarray, float] | None:
    """Best-conditioned PSD unit-trace element of a real Hermitian span.

    Maximizes the smallest eigenvalue of sum_j c_j H_j subject to unit trace,
    a small semidefinite program.  Returns (state, min_eigenvalue) or None
    when the program is infeasible or the optimum is not PSD at tolerance.
    """
    if not basis:
        return None
    traces = np.array([np.trace(h).real for h in basis])
    if np.abs(traces).max(initial=0.0) < 1e-12:
        return None
    import cvxpy as cp

    coeff = cp.Variable(len(basis))
    t = cp.Variable()
    x = sum(coeff[j] * basis[j] for j in range(len(basis)))
    d = basis[0].shape[0]
    prob = cp.Problem(
        cp.Maximize(t),
        [x - t * np.eye(d) >> 0, cp.sum(cp.multiply(coeff, traces)) == 1.0],
    )
    try:
        prob.solve()
    except cp.error.SolverError:  # pragma: no cover - solver availability
        return None
    if coeff.value is None:
        return None
    state = sum(float(cj) * hj for cj, hj in zip(coeff.value, basis))
    state = (state + mc.dagger(state)) / 2
    tr = np.trace(state).real
    if abs(tr - 1.0) > 1e-6:
        return None
    state = state / tr
    w = np.linalg.eigvalsh(state)
    if w[0] < -1e-10:
        return None
    return state, float(w[0])


def invariant_state(c: KrausChannel, faithful_tol: float = 1e-8,
                    residual_tol: float = 1e-8,
                    cluster_radius: float = 1e-7) -> InvariantStateReport:
    """Find an invariant density matrix of the predual and test faithfulness.

    Primary route: spectral projection of the maximally mixed state I/d onto
    the fixed space of tau_*.  Because I/d dominates a multiple of every
    density matrix and the projection is a limit of averages of tau_*^n(I/d),
    the projected state has maximal support among invariant states, so its
    smallest eigenvalue decides whether any faithful invariant state exists.
    If the projection degenerates numerically, falls back to a direct search
    of the fixed space for a PSD unit-trace element.
    """
    d = c.dim
    decomp = superop_eig(c, "predual")
    idx = [i for i, w in enumerate(decomp.eigenvalues) if abs(w - 1.0) <= cluster_radius]
    state = None
    if idx:
        try:
            proj = mc.cluster_projector(decomp, idx)
        except np.linalg.LinAlgError:
            proj = None
        if proj is not None:
            cand = mc.unvec(proj @ mc.vec(np.eye(d) / d))
            cand = (cand + mc.dagger(cand)) / 2
            tr = np.trace(cand).real
            if abs(tr) > 1e-12:
                cand = cand / tr
                if np.linalg.eigvalsh(cand)[0] >= -1e-10:
                    state = cand

    if state is None:
        fixed = mc.null_space(
            superoperator(c, "predual").matrix - np.eye(d * d), tol=1e-9)
        found = _psd_in_span(_hermitian_span(fixed))
        if found is None:
            return InvariantStateReport(None, math.nan, False, math.nan)
        state = found[0]

    residual = mc.op_norm(apply_predual(c, state) - state)
    min_eig = float(np.linalg.eigvalsh(state)[0])
    faithful = bool(min_eig > faithful_tol and residual <= residual_tol)
    return InvariantStateReport(state, min_eig, faithful, residual)
