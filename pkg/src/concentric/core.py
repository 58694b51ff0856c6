"""Concentric presentations of 2-groups and their polycyclic arithmetic.

A concentric 2-group of order ``2**m`` and commutator-subgroup index ``2**d``
is given by a power-commutator presentation with generators ``a_1 .. a_m``.
All group elements are encoded as *coordinate vectors* over GF(2): an
``int`` whose bit ``i - 1`` holds the exponent of ``a_i``.  That encoding is
used everywhere in the package (``e_i == 1 << (i - 1)``).

The presentation is determined by the triangular table of structural bits
``eps[k][j]`` for ``k = d .. m-1`` and ``j = 0 .. 2d - 2m + k``.  Rows are
stored in that order, so ``eps[0]`` is row ``k = d``.

Multiplication uses the closed formula

    alpha * beta = alpha + beta + sum_l lambda_l(alpha, beta) e_l

with the bilinear corrections ``lambda_l`` for ``l = d' + 1 .. d``.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ConcentricPresentation",
    "ValidationReport",
    "basis",
    "bit",
    "coord_from_bits",
    "coord_to_bits",
    "coord_to_str",
    "lambda_",
    "lambda_em",
    "multiply",
    "multiply_right_many",
    "multiply_left_many",
    "inverse",
    "square",
    "commutator",
    "basis_commutator",
    "group_commutator",
    "shift",
    "shift_inv",
    "is_tightly_concentric",
    "tightness_diagnosis",
    "h7_family",
    "random_tightly_concentric",
    "validate_presentation",
    "load_presentation",
    "dump_presentation",
]


# ---------------------------------------------------------------------------
# coordinate helpers


def basis(i: int) -> int:
    """Coordinate vector of the basis element ``e_i`` (1-based)."""
    if i < 1:
        raise ValueError(f"basis index must be >= 1, got {i}")
    return 1 << (i - 1)


def bit(a: int, i: int) -> int:
    """Return ``alpha_i`` (1-based)."""
    return (a >> (i - 1)) & 1


def coord_from_bits(bits: Sequence[int]) -> int:
    """Build a coordinate from ``(alpha_1, ..., alpha_m)``."""
    out = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"coordinate entries must be 0/1, got {b!r}")
        out |= int(b) << i
    return out


def coord_to_bits(a: int, m: int) -> tuple[int, ...]:
    return tuple((a >> i) & 1 for i in range(m))


def coord_to_str(a: int, m: int) -> str:
    """Render ``alpha_1 alpha_2 ... alpha_m`` as a 0/1 string."""
    return "".join(str(b) for b in coord_to_bits(a, m))


def shift(a: int, m: int) -> int:
    """The cyclic shift ``phi``: ``(a_1..a_m) -> (a_m, a_1, ..., a_{m-1})``."""
    top = (a >> (m - 1)) & 1
    return ((a << 1) & ((1 << m) - 1)) | top


def shift_inv(a: int, m: int) -> int:
    low = a & 1
    return (a >> 1) | (low << (m - 1))


# ---------------------------------------------------------------------------
# presentation


@dataclass(frozen=True)
class ConcentricPresentation:
    """Structural data ``(m, d, eps)`` of a concentric presentation.

    Construction never raises on malformed tables; use
    :func:`validate_presentation` to obtain a report.  Arithmetic functions
    refuse structurally invalid presentations with ``ValueError``.
    """

    m: int
    d: int
    eps: tuple[tuple[int, ...], ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(b) for b in row) for row in self.eps)
        object.__setattr__(self, "eps", rows)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "d", int(self.d))

    # -- shape ------------------------------------------------------------

    @property
    def d_prime(self) -> int:
        return self.m - self.d

    @property
    def order(self) -> int:
        return 1 << self.m

    def row_length(self, k: int) -> int:
        """Expected number of entries of row ``k`` (``d <= k <= m - 1``)."""
        return 2 * self.d - 2 * self.m + k + 1

    def epsilon(self, k: int, j: int) -> int:
        """Structural bit ``eps_{k, j}``.

        Rows outside ``d .. m - 1`` do not exist; they read as 0 so that
        formulas mentioning e.g. ``eps_{d+2, 0}`` for small ``d'`` behave.
        """
        if k < self.d or k > self.m - 1:
            return 0
        row = self.eps[k - self.d]
        if j < 0 or j >= len(row):
            raise IndexError(f"eps[{k}][{j}] outside row of length {len(row)}")
        return row[j]

    def structural_errors(self) -> list[str]:
        errs: list[str] = []
        m, d = self.m, self.d
        if m < 1:
            errs.append(f"m must be >= 1 (got {m})")
            return errs
        if d < 1 or d > m:
            errs.append(f"d must satisfy 1 <= d <= m (got d={d}, m={m})")
            return errs
        if 3 * d < 2 * m:
            errs.append(f"concentric presentations need 3d >= 2m (got d={d}, m={m})")
        expected_rows = m - d
        if len(self.eps) != expected_rows:
            errs.append(f"eps must have {expected_rows} rows (k = {d}..{m - 1}), got {len(self.eps)}")
            return errs
        for r, row in enumerate(self.eps):
            k = d + r
            want = self.row_length(k)
            if want < 1:
                errs.append(f"row k={k} would have non-positive length {want}")
            elif len(row) != want:
                errs.append(f"row k={k} must have {want} entries, got {len(row)}")
            bad = [b for b in row if b not in (0, 1)]
            if bad:
                errs.append(f"row k={k} has non-binary entries {bad}")
        return errs

    def is_structurally_valid(self) -> bool:
        return not self.structural_errors()

    def require_valid(self) -> None:
        errs = self.structural_errors()
        if errs:
            raise ValueError("invalid presentation: " + "; ".join(errs))

    # -- precomputed tables ----------------------------------------------

    @cached_property
    def _tables(self) -> "_Tables":
        self.require_valid()
        return _Tables.build(self)

    # -- serialisation ---------------------------------------------------

    def to_dict(self) -> dict:
        out = {"m": self.m, "d": self.d, "eps": [list(r) for r in self.eps]}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "ConcentricPresentation":
        try:
            m, d, eps = doc["m"], doc["d"], doc.get("eps", [])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"presentation document lacks field {exc}") from None
        if not isinstance(m, int) or not isinstance(d, int):
            raise ValueError("fields m and d must be integers")
        if not isinstance(eps, list) or not all(isinstance(r, list) for r in eps):
            raise ValueError("field eps must be a list of lists")
        return cls(m, d, tuple(tuple(r) for r in eps), name=str(doc.get("name", "")))

    def canonical_json(self) -> str:
        return json.dumps({"m": self.m, "d": self.d, "eps": [list(r) for r in self.eps]},
                          sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """SHA-256 of the canonical ``(m, d, eps)`` encoding."""
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<ConcentricPresentation{tag} m={self.m} d={self.d} eps={[list(r) for r in self.eps]}>"


@dataclass(frozen=True)
class _Tables:
    # comm[i][j] = [e_i, e_j] for i <= d', j >= d + i (zero elsewhere)
    comm: tuple[tuple[int, ...], ...]
    # vm[i] = [e_i, e_m] = sum_l eps_{m-i, l-d'-i} e_l, i = 1..d'
    vm: tuple[int, ...]
    # mask of eps_{i,0} over i = d..m-1 (used by f_0)
    f0_mask: int

    @classmethod
    def build(cls, p: ConcentricPresentation) -> "_Tables":
        m, d, dp = p.m, p.d, p.d_prime
        comm = [[0] * (m + 1) for _ in range(m + 1)]
        for i in range(1, dp + 1):
            for j in range(d + i, m + 1):
                comm[i][j] = _basis_comm_raw(p, i, j)
        vm = [0] * (dp + 1)
        for i in range(1, dp + 1):
            vm[i] = comm[i][m]
        f0 = 0
        for i in range(d, m):
            if p.epsilon(i, 0):
                f0 |= basis(i)
        return cls(tuple(tuple(r) for r in comm), tuple(vm), f0)


def _basis_comm_raw(p: ConcentricPresentation, i: int, j: int) -> int:
    # [e_i, e_j] = sum_{l = d'+i}^{j-d'} eps_{j-i, l-d'-i} e_l
    dp = p.d_prime
    out = 0
    for ell in range(dp + i, j - dp + 1):
        if p.epsilon(j - i, ell - dp - i):
            out |= basis(ell)
    return out


# ---------------------------------------------------------------------------
# arithmetic


def lambda_(p: ConcentricPresentation, ell: int, a: int, b: int) -> int:
    """The bilinear correction ``lambda_ell(alpha, beta)`` for ``d' < ell <= d``.

    Evaluated directly from the triple-index formula (the table-driven
    :func:`multiply` is checked against this in the test-suite).
    """
    p.require_valid()
    m, d, dp = p.m, p.d, p.d_prime
    if not (dp < ell <= d):
        raise ValueError(f"lambda index must lie in {dp + 1}..{d}, got {ell}")
    acc = 0
    for i in range(1, min(dp, ell - dp) + 1):
        if not bit(b, i):
            continue
        for j in range(max(d + i, ell + dp), m + 1):
            if bit(a, j):
                acc ^= p.epsilon(j - i, ell - dp - i)
    return acc


def lambda_em(p: ConcentricPresentation, ell: int, b: int) -> int:
    """``lambda_ell(e_m, beta)``, which only sees ``beta_1 .. beta_{d'}``."""
    p.require_valid()
    dp = p.d_prime
    if not (dp < ell <= p.d):
        raise ValueError(f"lambda index must lie in {dp + 1}..{p.d}, got {ell}")
    acc = 0
    for i in range(1, min(dp, ell - dp) + 1):
        if bit(b, i):
            acc ^= p.epsilon(p.m - i, ell - dp - i)
    return acc


def _correction(t: _Tables, dp: int, d: int, m: int, a: int, b: int) -> int:
    corr = 0
    for i in range(1, dp + 1):
        if (b >> (i - 1)) & 1:
            row = t.comm[i]
            hi = a >> (d + i - 1)
            j = d + i
            while hi:
                if hi & 1:
                    corr ^= row[j]
                hi >>= 1
                j += 1
    return corr


def multiply(p: ConcentricPresentation, a: int, b: int) -> int:
    """Group product ``alpha * beta``."""
    t = p._tables
    return a ^ b ^ _correction(t, p.d_prime, p.d, p.m, a, b)


def multiply_right_many(p: ConcentricPresentation, alphas: np.ndarray, h: int) -> np.ndarray:
    """Vectorised ``alpha * h`` for an array of coordinates ``alpha``."""
    t = p._tables
    a = np.asarray(alphas, dtype=np.int64)
    out = a ^ h
    for i in range(1, p.d_prime + 1):
        if not bit(h, i):
            continue
        for j in range(p.d + i, p.m + 1):
            c = t.comm[i][j]
            if c:
                out ^= ((a >> (j - 1)) & 1) * c
    return out


def multiply_left_many(p: ConcentricPresentation, h: int, betas: np.ndarray) -> np.ndarray:
    """Vectorised ``h * beta`` for an array of coordinates ``beta``."""
    t = p._tables
    b = np.asarray(betas, dtype=np.int64)
    out = b ^ h
    for i in range(1, p.d_prime + 1):
        c = _correction(t, p.d_prime, p.d, p.m, h, basis(i))
        if c:
            out ^= ((b >> (i - 1)) & 1) * c
    return out


def square(p: ConcentricPresentation, a: int) -> int:
    return multiply(p, a, a)


def inverse(p: ConcentricPresentation, a: int) -> int:
    """``alpha^{-1} = alpha * alpha^2`` (exponent 4 forces this)."""
    return multiply(p, a, square(p, a))


def commutator(p: ConcentricPresentation, a: int, b: int) -> int:
    """``[alpha, beta]`` from the lambda formula.

    The bracket convention is ``[a, b] = a^{-1} b^{-1} a b``; in a
    concentric group it equals ``sum_l (lambda_l(a,b) + lambda_l(b,a)) e_l``.
    """
    t = p._tables
    dp, d, m = p.d_prime, p.d, p.m
    return _correction(t, dp, d, m, a, b) ^ _correction(t, dp, d, m, b, a)


def group_commutator(p: ConcentricPresentation, a: int, b: int) -> int:
    """``a^{-1} b^{-1} a b`` computed through :func:`multiply` only."""
    ia, ib = inverse(p, a), inverse(p, b)
    return multiply(p, multiply(p, multiply(p, ia, ib), a), b)


def basis_commutator(p: ConcentricPresentation, i: int, j: int) -> int:
    """``[e_i, e_j]`` for ``1 <= i, j <= m``."""
    p.require_valid()
    if not (1 <= i <= p.m and 1 <= j <= p.m):
        raise ValueError(f"basis indices must lie in 1..{p.m}")
    if i > j:
        i, j = j, i
    if i <= p.d_prime and j >= p.d + i:
        return p._tables.comm[i][j]
    return 0


# ---------------------------------------------------------------------------
# tight concentricity


def tightness_diagnosis(p: ConcentricPresentation) -> list[str]:
    """List every violated clause of the tight-concentricity definition."""
    errs = p.structural_errors()
    if errs:
        return ["structurally invalid: " + e for e in errs]
    m, d, dp = p.m, p.d, p.d_prime
    out: list[str] = []
    if not 3 * d > 2 * m:
        out.append(f"3d > 2m fails (d={d}, m={m})")
    if d == m:
        out.append("C1 fails: there is no relation row k = d (d = m)")
        return out
    if p.epsilon(d, 0) != 1:
        out.append(f"C1 fails: eps_{{{d},0}} = 0")
    for i in range(1, 3 * d - 2 * m + 1):
        if i < p.row_length(d) and p.epsilon(d, i) != 0:
            out.append(f"C1 fails: eps_{{{d},{i}}} = 1")
    for i in range(1, dp + 1):
        k, j = m - i, 2 * d - m - i
        if 0 <= j < p.row_length(k) and p.epsilon(k, j) != 0:
            out.append(f"C2 fails: eps_{{{k},{j}}} = 1")
    return out


def is_tightly_concentric(p: ConcentricPresentation) -> bool:
    return not tightness_diagnosis(p)


def h7_family(m: int) -> ConcentricPresentation:
    """The family with ``d = m - 2`` whose only set bits are
    ``eps_{d,0}`` and ``eps_{d+1,2}``.

    For ``m = 9`` it is tightly concentric; for ``m = 7`` it is concentric
    but violates C2.
    """
    if m < 7:
        raise ValueError("h7_family needs m >= 7")
    d = m - 2
    p0 = ConcentricPresentation(m, d, ((),))
    row_d = [0] * p0.row_length(d)
    row_d1 = [0] * p0.row_length(d + 1)
    row_d[0] = 1
    row_d1[2] = 1
    return ConcentricPresentation(m, d, (tuple(row_d), tuple(row_d1)), name=f"h7m{m}")


def random_tightly_concentric(m: int, d: int, seed: int = 0) -> ConcentricPresentation:
    """Draw a tightly concentric presentation uniformly from the free bits.

    C1 pins all of row ``d``; C2 pins the last entry of every row.  The
    remaining entries are free.
    """
    if not (3 * d > 2 * m and d < m):
        raise ValueError(f"no tightly concentric presentation with m={m}, d={d}")
    rng = random.Random(seed)
    rows = []
    p0 = ConcentricPresentation(m, d)
    for k in range(d, m):
        n = p0.row_length(k)
        row = [0] * n
        if k == d:
            row[0] = 1
        else:
            for j in range(n - 1):
                row[j] = rng.getrandbits(1)
        rows.append(tuple(row))
    p = ConcentricPresentation(m, d, tuple(rows), name=f"rand-m{m}-d{d}-s{seed}")
    assert is_tightly_concentric(p), tightness_diagnosis(p)
    return p


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    structural_ok: bool = False
    group_order_ok: bool = False
    diameter_maximal_ok: bool = False
    shift_isomorphism_ok: bool = False
    tightly_concentric: bool = False
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.structural_ok and self.group_order_ok
                and self.diameter_maximal_ok and self.shift_isomorphism_ok)

    def to_dict(self) -> dict:
        return {
            "structural_ok": self.structural_ok,
            "group_order_ok": self.group_order_ok,
            "diameter_maximal_ok": self.diameter_maximal_ok,
            "shift_isomorphism_ok": self.shift_isomorphism_ok,
            "tightly_concentric": self.tightly_concentric,
            "messages": list(self.messages),
        }


def _multiplication_table(p: ConcentricPresentation) -> np.ndarray:
    n = p.order
    a = np.arange(n, dtype=np.int64)
    table = np.empty((n, n), dtype=np.int64)
    for b in range(n):
        table[:, b] = multiply_right_many(p, a, b)
    return table


def _closure_size(p: ConcentricPresentation) -> int:
    """Size of the closure of ``{e_1 .. e_m}`` under right multiplication."""
    n = p.order
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    gens = [basis(i) for i in range(1, p.m + 1)]
    while frontier.size:
        imgs = np.concatenate([multiply_right_many(p, frontier, g) for g in gens])
        imgs = np.unique(imgs[~seen[imgs]])
        seen[imgs] = True
        frontier = imgs
    return int(seen.sum())


def _check_group_law(p: ConcentricPresentation, msgs: list[str]) -> bool:
    n = p.order
    size = _closure_size(p)
    if size != n:
        msgs.append(f"closure of the generators has {size} elements, expected {n}")
        return False
    if p.m <= 7:
        table = _multiplication_table(p)
        idx = np.arange(n)
        lhs = table[table[:, :, None], idx[None, None, :]]
        rhs = table[idx[:, None, None], table[None, :, :]]
        if not np.array_equal(lhs, rhs):
            msgs.append("multiplication is not associative")
            return False
        # identity and inverses
        if not np.array_equal(table[:, 0], idx):
            msgs.append("0 is not a right identity")
            return False
        if not np.all((table == 0).sum(axis=1) == 1):
            msgs.append("some element lacks an inverse")
            return False
        msgs.append(f"associativity verified on all {n ** 3} triples")
        return True
    # Larger m: the right-regular maps R(e_i) generate a permutation group;
    # multiplication is a group law of order 2^m iff that group is regular
    # of order 2^m and every R(alpha) lies in it.
    from .groups import schreier_sims
    from .perms import right_mul_perm

    gens = [right_mul_perm(p, basis(i)) for i in range(1, p.m + 1)]
    bsgs = schreier_sims(gens, n, seed=0, known_order=None)
    if bsgs.order != n:
        msgs.append(f"<R(e_i)> has order {bsgs.order}, expected {n}")
        return False
    for a in range(n):
        if not bsgs.contains(right_mul_perm(p, a)):
            msgs.append(f"R({coord_to_str(a, p.m)}) is not a product of the R(e_i)")
            return False
    msgs.append(f"regular right action of order {n} verified")
    return True


def _check_diameter(p: ConcentricPresentation, msgs: list[str]) -> bool:
    m, d = p.m, p.d
    ok = True
    saw_far = d == m
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            c = group_commutator(p, basis(i), basis(j))
            if c != commutator(p, basis(i), basis(j)):
                msgs.append(f"lambda commutator disagrees with group commutator at ({i},{j})")
                ok = False
            if j - i < d and c != 0:
                msgs.append(f"[a_{i}, a_{j}] != 1 although |i-j| < d")
                ok = False
            if j - i == d and c != 0:
                saw_far = True
    if not saw_far:
        msgs.append(f"no pair at distance d={d} fails to commute; d is not maximal")
        ok = False
    return ok


def _check_shift_iso(p: ConcentricPresentation, msgs: list[str]) -> bool:
    m = p.m
    n_half = 1 << (m - 1)
    alphas = np.arange(n_half, dtype=np.int64)
    mask = (1 << m) - 1
    shifted = ((alphas << 1) & mask) | ((alphas >> (m - 1)) & 1)
    for b in range(n_half):
        prod = multiply_right_many(p, alphas, b)
        if np.any(prod >> (m - 1)):
            msgs.append("H_{1,m-1} is not closed under multiplication")
            return False
        lhs = ((prod << 1) & mask) | ((prod >> (m - 1)) & 1)
        rhs = multiply_right_many(p, shifted, shift(b, m))
        if not np.array_equal(lhs, rhs):
            msgs.append(f"shift is not a homomorphism H_{{1,m-1}} -> H_{{2,m}} (beta={b})")
            return False
    return True


def validate_presentation(p: ConcentricPresentation) -> ValidationReport:
    """Check a presentation; failures are reported, never raised."""
    rep = ValidationReport()
    errs = p.structural_errors()
    if errs:
        rep.messages.extend(errs)
        rep.messages.append("remaining checks skipped")
        return rep
    rep.structural_ok = True
    try:
        rep.group_order_ok = _check_group_law(p, rep.messages)
        rep.diameter_maximal_ok = _check_diameter(p, rep.messages)
        rep.shift_isomorphism_ok = _check_shift_iso(p, rep.messages)
    except MemoryError:  # pragma: no cover - depends on host
        rep.messages.append("ran out of memory while validating")
    diag = tightness_diagnosis(p)
    rep.tightly_concentric = not diag
    rep.messages.extend(diag)
    return rep


# ---------------------------------------------------------------------------
# I/O


def load_presentation(path: str) -> ConcentricPresentation:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return ConcentricPresentation.from_dict(doc)


def dump_presentation(p: ConcentricPresentation, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(p.to_dict(), fh, indent=2)
        fh.write("\n")


def iter_coords(m: int) -> Iterable[int]:
    return range(1 << m)
