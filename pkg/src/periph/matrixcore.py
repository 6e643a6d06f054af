"""Dense complex linear algebra substrate used by every other module.

Conventions
-----------
* A "matrix" is a 2-D ``numpy.ndarray`` of dtype complex128.
* Vectorization is column stacking: entry (i, j) of a d x d matrix lands at
  index j*d + i of ``vec(m)``.  Everything downstream leans on the identity

      vec(A X B) = (B^T kron A) vec(X),

  which fixes how maps on matrices become d^2 x d^2 superoperator matrices.
* The operator norm is the largest singular value (computed via SVD, never
  by power iteration, so results are deterministic).
* Eigenvector conventions follow LAPACK geev as exposed by scipy: right
  vectors satisfy A r = w r, left vectors satisfy l^dag A = w l^dag, and
  all vectors come back with unit Euclidean norm.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigensolverError

__all__ = [
    "vec", "unvec", "kron", "op_norm", "eig", "null_space",
    "dagger", "hs_inner", "hs_norm", "EigenDecomposition",
    "cluster_projector",
]


def _as_matrix(m, square: bool = True) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def vec(m) -> np.ndarray:
    """Column-stack a square matrix into a vector of length d^2."""
    a = _as_matrix(m)
    return a.reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    """Inverse of :func:`vec`; the length must be a perfect square."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D array, got shape {a.shape}")
    d = int(round(np.sqrt(a.size)))
    if d * d != a.size:
        raise ValueError(f"length {a.size} is not a perfect square")
    return a.reshape(d, d, order="F")


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first factor on coarse (row-major) blocks."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m, dtype=complex).conj().T


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product trace(a^dag b), conjugate-linear in a."""
    return complex(np.vdot(np.asarray(a, dtype=complex),
                           np.asarray(b, dtype=complex)))


def hs_norm(a) -> float:
    """Frobenius norm, the norm induced by :func:`hs_inner`."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def op_norm(m) -> float:
    """Operator norm (largest singular value) of a matrix."""
    a = _as_matrix(m, square=False)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class EigenDecomposition:
    """Full nonsymmetric eigendecomposition of one square matrix.

    ``right_vectors`` and ``left_vectors`` hold unit-norm eigenvectors as
    columns, ordered to match ``eigenvalues``.  ``reconstruction_residual``
    is max_i ||A r_i - w_i r_i||_2, the worst right-eigenpair residual.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    reconstruction_residual: float


def eig(m) -> EigenDecomposition:
    """Eigenvalues with right and left eigenvectors of a square matrix.

    geev occasionally fails to converge on structured matrices.  A shift by
    z*I leaves both eigenvector sides unchanged and moves every eigenvalue
    by exactly z, so on failure the solve is retried on shifted copies and
    the shift subtracted back out.
    """
    a = _as_matrix(m)
    scale = max(1.0, float(np.linalg.norm(a)) / np.sqrt(a.shape[0]))
    last_exc = None
    for shift in (0.0, 0.03 + 0.017j, 0.11 - 0.07j, -0.05 + 0.13j):
        z = shift * scale
        try:
            w, vl, vr = scipy.linalg.eig(a + z * np.eye(a.shape[0]),
                                         left=True, right=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            last_exc = exc
            continue
        w = w - z
        break
    else:
        raise EigensolverError(
            f"eigensolver failed on a {a.shape[0]}x{a.shape[1]} matrix: "
            f"{last_exc}") from last_exc
    residual = float(np.linalg.norm(a @ vr - vr * w[None, :], axis=0).max(initial=0.0))
    return EigenDecomposition(w, vr, vl, residual)


def null_space(m, tol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal basis of the kernel of ``m`` at a relative tolerance.

    Singular vectors with singular value at most max(tol * s_max, 1e-12)
    count as null directions.  Returns a list of 1-D arrays (possibly empty).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _as_matrix(m, square=False)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    n = a.shape[1]
    smax = float(s[0]) if s.size else 0.0
    cutoff = max(tol * smax, 1e-12)
    full = np.zeros(n)
    full[: s.size] = s
    return [np.conj(vh[k]) for k in range(n) if full[k] <= cutoff]


def cluster_projector(decomp: EigenDecomposition, indices) -> np.ndarray:
    """Spectral projector for one eigenvalue cluster of a diagonalizable matrix.

    Given column indices of a cluster in ``decomp``, forms P = R (L^dag R)^-1
    L^dag from the matching right and left eigenvectors.  The formula is
    invariant under per-vector rescaling, so the LAPACK normalization is fine
    as-is.  Raises ``numpy.linalg.LinAlgError`` if the cluster Gram matrix is
    singular (a defective cluster); callers translate that into their own
    error type.
    """
    idx = list(indices)
    right = decomp.right_vectors[:, idx]
    left = decomp.left_vectors[:, idx]
    gram = dagger(left) @ right
    sv = np.linalg.svd(gram, compute_uv=False)
    # LAPACK returns unit-norm eigenvector columns, so a clean cluster has a
    # Gram with sigma_min of order 1/cond; both a tiny ratio and an outright
    # tiny Gram (coalescing left/right vectors) signal defectiveness.
    if sv.size == 0 or sv[-1] <= 1e-10 * max(sv[0], 1.0):
        raise np.linalg.LinAlgError(
            f"cluster Gram matrix is singular (sigma_min = "
            f"{0.0 if sv.size == 0 else sv[-1]:.3e})"
        )
    return right @ np.linalg.solve(gram, dagger(left))
