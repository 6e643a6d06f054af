"""Channel families with peripheral structure known in closed form.

Each generator returns the channel together with a fixture: the exact
eigenvalues, eigenvectors, or dimension counts its structure predicts.
Tests and the CLI compare the numerical spectral machinery against these
predictions, so the fixtures are computed from first principles here (never
by running the solvers being tested).

Families
--------
* ``unitary_channel``: tau(x) = U^dag x U.  With U-eigenphase clusters mu_a
  of multiplicity m_a, every superoperator eigenvalue is conj(mu_a) mu_b,
  the fixed-point algebra has dimension sum_a m_a^2, and the whole of M_d
  is peripheral.
* ``weyl_channel``: on (C^d)^{kron n}, a p-mixture of conjugations by the
  cyclic shift acting on each tensor factor.  The clock operator satisfies
  U^dag V U = w V with w = exp(2 pi i / d), so V^{kron n} is an eigenvector
  at w exactly, independent of the mixing probabilities.
* ``group_walk_channel``: tau(x) = sum_g mu(g) R(g) x R(g)^dag for the right
  regular representation R of a finite group.  Every character chi that is
  constant (= lam) on the support of mu gives the exact peripheral
  eigenvector diag(chi) at lam.
* ``toeplitz_demo``: finite sections of twisted Toeplitz operators
  T_f V_lam on modes -M..M.  The symbol product law
  (T_f V_lam)(T_g V_mu) = T_{f g(lam .)} V_{lam mu} holds exactly on
  interior modes (truncation overflow lives in a boundary band of width
  equal to the symbol support), and the Hardy-compression norm ratio
  climbs toward 1 as M grows.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import channel as ch
from . import matrixcore as mc
from . import spectral as sp
from .errors import PeriphError, ValidationError

__all__ = [
    "GroupSpec", "SymbolSpec", "UnitaryExample", "WeylExample",
    "GroupWalkExample", "CharPrediction", "CharacterScanReport",
    "ToeplitzRow", "ToeplitzDemoReport", "ToeplitzTerm",
    "unitary_channel", "weyl_channel", "group_walk_channel",
    "characters", "character_scan", "toeplitz_demo",
]


# -- finite groups ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A finite group as a multiplication table.

    ``table[a, b]`` is the index of the product of elements a and b.  The
    group axioms are verified exactly on the integers at construction.
    """

    order: int
    table: np.ndarray
    labels: tuple = ()
    name: str = ""
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        t = np.array(self.table, dtype=int)
        n = self.order
        if t.shape != (n, n):
            raise ValueError(f"table shape {t.shape} does not match order {n}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        if len(self.labels) != n:
            raise ValueError("labels length does not match order")
        if t.min(initial=0) < 0 or t.max(initial=0) >= n:
            raise ValueError("table entries out of range")
        # lhs[a,b,c] = (ab)c, rhs[a,b,c] = a(bc)
        if not np.array_equal(t[t, :], t[:, t]):
            raise ValueError("table is not associative")
        ident = None
        for e in range(n):
            if np.array_equal(t[e, :], np.arange(n)) and \
               np.array_equal(t[:, e], np.arange(n)):
                ident = e
                break
        if ident is None:
            raise ValueError("table has no identity element")
        inv = np.full(n, -1, dtype=int)
        for a in range(n):
            hits = np.flatnonzero(t[a, :] == ident)
            if hits.size != 1 or t[hits[0], a] != ident:
                raise ValueError(f"element {a} has no two-sided inverse")
            inv[a] = hits[0]
        t.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "identity", int(ident))
        object.__setattr__(self, "inverse", inv)

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, a: int) -> int:
        g = a
        k = 1
        while g != self.identity:
            g = int(self.table[g, a])
            k += 1
        return k

    def regular_representation(self, g: int) -> np.ndarray:
        """Permutation matrix of delta_h -> delta_{h g^-1} on C^|G|."""
        n = self.order
        r = np.zeros((n, n), dtype=complex)
        ginv = int(self.inverse[g])
        for h in range(n):
            r[self.table[h, ginv], h] = 1.0
        return r

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        if n < 1:
            raise ValueError("cyclic group order must be positive")
        idx = np.arange(n)
        table = (idx[:, None] + idx[None, :]) % n
        return cls(n, table, tuple(str(i) for i in idx), name=f"Z{n}")

    @classmethod
    def direct_product(cls, a: "GroupSpec", b: "GroupSpec") -> "GroupSpec":
        n, m = a.order, b.order
        table = np.zeros((n * m, n * m), dtype=int)
        labels = []
        for i in range(n):
            for j in range(m):
                labels.append(f"({a.labels[i]},{b.labels[j]})")
        for i1 in range(n):
            for j1 in range(m):
                for i2 in range(n):
                    for j2 in range(m):
                        table[i1 * m + j1, i2 * m + j2] = (
                            a.table[i1, i2] * m + b.table[j1, j2])
        return cls(n * m, table, tuple(labels),
                   name=f"{a.name}x{b.name}" if a.name and b.name else "")


def _subgroup_closure(group: GroupSpec, generators: set) -> set:
    members = set(generators) | {group.identity}
    frontier = list(members)
    while frontier:
        g = frontier.pop()
        for h in list(members):
            for prod in (int(group.table[g, h]), int(group.table[h, g])):
                if prod not in members:
                    members.add(prod)
                    frontier.append(prod)
    return members


def _abelianization(group: GroupSpec):
    """Quotient by the commutator subgroup; returns (quotient, coset_map)."""
    n = group.order
    t = group.table
    commutators = set()
    for a in range(n):
        for b in range(n):
            ab = t[a, b]
            ba = t[b, a]
            commutators.add(int(t[ab, group.inverse[ba]]))
    h = _subgroup_closure(group, commutators)
    coset_of = np.full(n, -1, dtype=int)
    reps = []
    for g in range(n):
        if coset_of[g] >= 0:
            continue
        cid = len(reps)
        reps.append(g)
        for k in h:
            coset_of[t[g, k]] = cid
    q = len(reps)
    qtable = np.zeros((q, q), dtype=int)
    for i, gi in enumerate(reps):
        for j, gj in enumerate(reps):
            qtable[i, j] = coset_of[t[gi, gj]]
    quotient = GroupSpec(q, qtable, tuple(str(i) for i in range(q)),
                         name=f"{group.name}/[,]" if group.name else "")
    return quotient, coset_of


def characters(group: GroupSpec) -> np.ndarray:
    """All one-dimensional characters of a finite group, rows of shape |G|.

    For abelian groups these are the |G| irreducible characters, extracted
    by simultaneously diagonalizing the commuting regular representation
    (via a generic random combination) and then snapping each value to the
    exact root of unity its element order dictates.  Non-abelian groups are
    routed through their abelianization, so only one-dimensional characters
    are produced.
    """
    if not group.is_abelian:
        quotient, coset_of = _abelianization(group)
        qchars = characters(quotient)
        return qchars[:, coset_of]

    n = group.order
    rmats = [group.regular_representation(g) for g in range(n)]
    orders = [group.element_order(g) for g in range(n)]
    for attempt in range(11, 16):
        rng = np.random.default_rng(attempt)
        coeffs = rng.standard_normal(n)
        a = sum(cg * rg for cg, rg in zip(coeffs, rmats))
        _, vecs = np.linalg.eig(a)
        rows = []
        ok = True
        for i in range(n):
            v = vecs[:, i]
            v = v / np.linalg.norm(v)
            phi = np.array([np.vdot(v, rg @ v) for rg in rmats])
            if np.abs(np.abs(phi) - 1.0).max() > 1e-8:
                ok = False
                break
            snapped = np.empty(n, dtype=complex)
            for g in range(n):
                k = int(round(np.angle(phi[g]) * orders[g] / (2 * np.pi)))
                snapped[g] = np.exp(2j * np.pi * k / orders[g])
            t = group.table
            if np.abs(snapped[t] - np.outer(snapped, snapped)).max() > 1e-10:
                ok = False
                break
            rows.append(snapped)
        if not ok:
            continue
        uniq: list = []
        for row in rows:
            if not any(np.abs(row - u).max() < 1e-8 for u in uniq):
                uniq.append(row)
        if len(uniq) == n:
            # sort by phase profile with angles in [0, 2pi): trivial row first
            # (safe:  snapped roots of unity never sit near the 2pi wrap)
            uniq.sort(key=lambda r: tuple(
                np.round(np.angle(r) % (2 * np.pi), 9)))
            return np.array(uniq)
    raise PeriphError(
        f"failed to separate the {n} characters of {group.name or 'group'} "
        "from the regular representation")


# -- unitary conjugation ------------------------------------------------------


@dataclass(frozen=True)
class UnitaryExample:
    """tau(x) = U^dag x U with its exact peripheral dimension counts."""

    channel: ch.KrausChannel
    eigenvalue_clusters: tuple          # ((mu, multiplicity), ...)
    fixed_dim: int                      # sum of multiplicity^2
    peripheral_dims: dict               # lam -> dim E_lam
    span_dim: int                       # always d^2


def unitary_channel(u, label: str = "") -> UnitaryExample:
    ua = np.asarray(u, dtype=complex)
    if ua.ndim != 2 or ua.shape[0] != ua.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {ua.shape}")
    d = ua.shape[0]
    if mc.op_norm(mc.dagger(ua) @ ua - np.eye(d)) > 1e-10:
        raise ValidationError("matrix is not unitary at 1e-10")
    channel = ch.KrausChannel((ua,), label=label or f"unitary(d={d})")

    evals = np.linalg.eigvals(ua)
    order = np.argsort([float(np.angle(z)) % (2 * np.pi) for z in evals])
    evals = evals[order]
    clusters: list = []
    for z in evals:
        if clusters and abs(z - clusters[-1][-1]) <= 1e-8:
            clusters[-1].append(z)
        else:
            clusters.append([z])
    if len(clusters) > 1 and abs(clusters[0][0] - clusters[-1][-1]) <= 1e-8:
        clusters[0] = clusters.pop() + clusters[0]
    reps = []
    for grp in clusters:
        zmean = np.mean(grp)
        reps.append((complex(zmean / abs(zmean)), len(grp)))

    fixed_dim = sum(m * m for _, m in reps)
    peripheral: dict = {}
    for mu_a, m_a in reps:
        for mu_b, m_b in reps:
            lam = np.conj(mu_a) * mu_b
            for known in peripheral:
                if abs(known - lam) <= 1e-8:
                    lam = known
                    break
            peripheral[lam] = peripheral.get(lam, 0) + m_a * m_b
    return UnitaryExample(channel, tuple(reps), fixed_dim, peripheral, d * d)


# -- Weyl shift mixtures ------------------------------------------------------


@dataclass(frozen=True)
class WeylExample:
    channel: ch.KrausChannel
    shift: np.ndarray
    clock: np.ndarray
    eigenvector: np.ndarray             # clock^{kron n}
    eigenvalue: complex                 # exp(2 pi i / d)
    relation_defect: float              # || V U - w U V ||


def weyl_channel(d: int, n: int, probs) -> WeylExample:
    if d < 2:
        raise ValidationError(f"need d >= 2, got {d}")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    p = np.asarray(probs, dtype=float)
    if p.shape != (n,):
        raise ValidationError(f"probs must have length {n}, got shape {p.shape}")
    if p.min() <= 0:
        raise ValidationError("mixture probabilities must be positive")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValidationError(f"probabilities sum to {p.sum():.12g}, not 1")

    w = np.exp(2j * np.pi / d)
    shift = np.zeros((d, d), dtype=complex)
    for j in range(d):
        shift[(j + 1) % d, j] = 1.0
    clock = np.diag(w ** np.arange(d))
    # the pair must satisfy V U = w U V; fall back to swapping if a future
    # convention change ever breaks the construction above
    defect = None
    for cand_u, cand_v in ((shift, clock), (clock, shift)):
        cand = mc.op_norm(cand_v @ cand_u - w * cand_u @ cand_v)
        if cand <= 1e-12:
            shift, clock, defect = cand_u, cand_v, cand
            break
    if defect is None:
        raise PeriphError("could not orient the shift/clock pair")

    kraus = []
    for j in range(n):
        factors = [np.eye(d, dtype=complex)] * n
        factors[j] = shift
        op = factors[0]
        for f in factors[1:]:
            op = mc.kron(op, f)
        kraus.append(np.sqrt(p[j]) * op)
    channel = ch.KrausChannel(tuple(kraus), label=f"weyl(d={d},n={n})")

    eigvec = clock
    for _ in range(n - 1):
        eigvec = mc.kron(eigvec, clock)
    return WeylExample(channel, shift, clock, eigvec, complex(w), defect)


# -- group walks --------------------------------------------------------------


@dataclass(frozen=True)
class CharPrediction:
    """One character, its eigenvalue prediction for a given walk support."""

    values: np.ndarray                  # chi(g) for every group element
    constant_on_support: bool
    eigenvalue: complex | None          # chi(s) on the support, if constant
    eigenvector: np.ndarray | None      # diag(chi), if constant


@dataclass(frozen=True)
class GroupWalkExample:
    channel: ch.KrausChannel
    group: GroupSpec
    mu: np.ndarray
    support: tuple
    predictions: tuple                  # all characters, flagged

    def predicted_eigenvalues(self) -> tuple:
        out = []
        for p in self.predictions:
            if p.constant_on_support and \
               not any(abs(p.eigenvalue - z) <= 1e-12 for z in out):
                out.append(p.eigenvalue)
        return tuple(out)


def group_walk_channel(group: GroupSpec, mu) -> GroupWalkExample:
    m = np.asarray(mu, dtype=float)
    if m.shape != (group.order,):
        raise ValidationError(
            f"mu must assign a probability to each of the {group.order} "
            f"elements, got shape {m.shape}")
    if m.min() < -1e-15:
        raise ValidationError("mu has negative entries")
    if abs(m.sum() - 1.0) > 1e-10:
        raise ValidationError(f"mu sums to {m.sum():.12g}, not 1")
    support = tuple(int(g) for g in np.flatnonzero(m > 1e-15))
    if not support:
        raise ValidationError("mu has empty support")

    kraus = tuple(
        np.sqrt(m[g]) * mc.dagger(group.regular_representation(g))
        for g in support)
    channel = ch.KrausChannel(
        kraus, label=f"walk({group.name or 'G'},|S|={len(support)})")

    preds = []
    for chi in characters(group):
        on_support = chi[list(support)]
        constant = bool(np.abs(on_support - on_support[0]).max() <= 1e-12)
        preds.append(CharPrediction(
            chi, constant,
            complex(on_support[0]) if constant else None,
            np.diag(chi) if constant else None))
    return GroupWalkExample(channel, group, m, support, tuple(preds))


@dataclass(frozen=True)
class CharacterScanReport:
    predicted: tuple
    found: tuple
    matched: tuple                      # (predicted, found) pairs
    missing: tuple                      # predicted but not found
    unexplained: tuple                  # found but not predicted by characters
    all_predicted_found: bool


def character_scan(group: GroupSpec, mu,
                   tol_peripheral: float = sp.TOL_PERIPHERAL,
                   cluster_radius: float = sp.CLUSTER_RADIUS) -> CharacterScanReport:
    """Compare character predictions with the computed peripheral spectrum.

    Characters constant on the walk support predict peripheral eigenvalues;
    the scan reports which predictions were found and which computed
    peripheral eigenvalues the characters do not account for.  Unexplained
    eigenvalues are reported, never asserted away: characters need not
    exhaust the peripheral spectrum in general.
    """
    example = group_walk_channel(group, mu)
    predicted = example.predicted_eigenvalues()
    spectrum = sp.peripheral_spectrum(
        example.channel, tol_peripheral, cluster_radius)
    found = spectrum.values()
    matched, missing = [], []
    for lam in predicted:
        entry = spectrum.find(lam)
        if entry is None:
            missing.append(lam)
        else:
            matched.append((lam, entry.value))
    unexplained = [z for z in found
                   if not any(abs(z - lam) <= sp.EIGEN_EQ_TOL
                              for lam in predicted)]
    return CharacterScanReport(
        predicted, found, tuple(matched), tuple(missing), tuple(unexplained),
        not missing)


# -- twisted Toeplitz finite sections ----------------------------------------


@dataclass(frozen=True)
class SymbolSpec:
    """A Laurent polynomial symbol f(z) = sum_k coeffs[k] z^k."""

    coeffs: dict

    def __post_init__(self):
        clean = {}
        for k, v in self.coeffs.items():
            if int(k) != k:
                raise ValueError(f"mode index {k} is not an integer")
            cv = complex(v)
            if not np.isfinite(cv.real) or not np.isfinite(cv.imag):
                raise ValueError(f"coefficient at mode {k} is not finite")
            if cv != 0:
                clean[int(k)] = cv
        object.__setattr__(self, "coeffs", clean)

    @property
    def support(self) -> int:
        """Largest |k| carrying a coefficient (0 for the zero symbol)."""
        return max((abs(k) for k in self.coeffs), default=0)

    def norm_inf(self, grid: int = 4096) -> float:
        """Sup norm on the circle, sampled on a uniform grid."""
        theta = 2 * np.pi * np.arange(grid) / grid
        vals = np.zeros(grid, dtype=complex)
        for k, v in self.coeffs.items():
            vals += v * np.exp(1j * k * theta)
        return float(np.abs(vals).max(initial=0.0))

    def rotated(self, lam: complex) -> "SymbolSpec":
        """The symbol z -> f(lam z), coefficients scaled by lam^k."""
        return SymbolSpec({k: v * lam ** k for k, v in self.coeffs.items()})

    def convolve(self, other: "SymbolSpec") -> "SymbolSpec":
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return SymbolSpec(out)

    def section(self, size: int) -> np.ndarray:
        """Toeplitz finite section on modes -size..size."""
        n = 2 * size + 1
        col = np.array([self.coeffs.get(k, 0.0) for k in range(n)],
                       dtype=complex)
        row = np.array([self.coeffs.get(-k, 0.0) for k in range(n)],
                       dtype=complex)
        return scipy.linalg.toeplitz(col, row)


@dataclass(frozen=True)
class ToeplitzTerm:
    coeff: complex
    lam: complex
    symbol: SymbolSpec

    def __post_init__(self):
        if abs(abs(complex(self.lam)) - 1.0) > 1e-10:
            raise ValueError(f"twist |lam| = {abs(self.lam):.12g}, "
                             "expected unimodular")


@dataclass(frozen=True)
class ToeplitzRow:
    size: int
    compression_ratio: float
    interior_defect: float


@dataclass(frozen=True)
class ToeplitzDemoReport:
    rows: tuple
    max_support: int


def _twist_diag(lam: complex, size: int) -> np.ndarray:
    return np.diag(np.asarray(lam, dtype=complex) ** np.arange(-size, size + 1))


def toeplitz_demo(sizes, terms) -> ToeplitzDemoReport:
    """Finite-section scaling study for sums of twisted Toeplitz operators.

    For each truncation size M builds A = sum_t c_t T_{f_t} V_{lam_t} on
    modes -M..M and reports the Hardy compression ratio ||P A P|| / ||A||
    (P = projection onto modes 0..M) together with the worst interior defect
    of the pairwise symbol product law.  "Interior" excludes a boundary band
    of width equal to the combined symbol support, where truncation overflow
    is expected; inside it the law holds to rounding.
    """
    term_list = [t if isinstance(t, ToeplitzTerm) else ToeplitzTerm(*t)
                 for t in terms]
    if not term_list:
        raise ValueError("need at least one (coeff, lam, symbol) term")
    smax = max(t.symbol.support for t in term_list)
    rows = []
    for size in sizes:
        size = int(size)
        if size < 4 * max(smax, 1) + 1:
            raise ValueError(
                f"truncation size {size} is too small for symbols of "
                f"support {smax}; need at least {4 * max(smax, 1) + 1}")
        hardy = slice(size, 2 * size + 1)
        a = np.zeros((2 * size + 1, 2 * size + 1), dtype=complex)
        for t in term_list:
            a += t.coeff * (t.symbol.section(size) @ _twist_diag(t.lam, size))
        norm_full = mc.op_norm(a)
        if norm_full == 0.0:
            raise ValueError("the combined operator is zero")
        ratio = mc.op_norm(a[hardy, hardy]) / norm_full

        defect = 0.0
        for s in term_list:
            for t in term_list:
                b1 = (s.symbol.section(size) @ _twist_diag(s.lam, size)
                      @ t.symbol.section(size) @ _twist_diag(t.lam, size))
                product_symbol = s.symbol.convolve(t.symbol.rotated(s.lam))
                b2 = (product_symbol.section(size)
                      @ _twist_diag(s.lam * t.lam, size))
                diff = (b1 - b2)[hardy, hardy]
                w = s.symbol.support + t.symbol.support
                inner = diff[w: size + 1 - w, w: size + 1 - w]
                if inner.size:
                    defect = max(defect, mc.op_norm(inner))
        rows.append(ToeplitzRow(size, float(ratio), float(defect)))
    return ToeplitzDemoReport(tuple(rows), smax)
