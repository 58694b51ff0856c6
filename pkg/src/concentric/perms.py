"""Dense permutations of ``Delta = {0, ..., 2**m - 1}`` and the generators
``R(h)``, ``x_tau`` and ``y_tau`` of the 4-HAT candidate group.

Points of ``Delta`` are coordinate integers (see :mod:`concentric.core`).
Permutations act on the right: ``(g * h)(a) == h(g(a))``, so ``g * h`` means
"first ``g``, then ``h``".  This matches the exponent notation
``alpha^{gh} = (alpha^g)^h``.
"""

from __future__ import annotations

import hashlib
from typing import Iterator, Sequence

import numpy as np

from .core import (
    ConcentricPresentation,
    basis,
    bit,
    is_tightly_concentric,
    multiply_left_many,
    multiply_right_many,
    shift,
    shift_inv,
    tightness_diagnosis,
)

__all__ = [
    "DensePermutation",
    "identity",
    "compose",
    "invert",
    "power",
    "parity",
    "fixed_points",
    "cycles",
    "dump_cycles",
    "parse_cycles",
    "phi_perm",
    "right_mul_perm",
    "validate_tau",
    "tau_from_bits",
    "x_point",
    "x_inv_point",
    "x_tau",
    "x_tau_definitional",
    "x_tau_inv",
    "y_tau_composed",
    "y_tau_closed",
    "f0_point",
    "f_t_point",
    "f_t_table",
    "conjugate_closed_form",
    "conjugate_composed",
    "verify_shift_conjugation",
]


class DensePermutation:
    """An immutable permutation stored as a numpy image array."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int] | np.ndarray, *, check: bool = True) -> None:
        arr = np.array(images, dtype=np.intp)
        if arr.ndim != 1:
            raise ValueError("permutation images must be one-dimensional")
        if check:
            n = arr.shape[0]
            if n and (arr.min() < 0 or arr.max() >= n):
                raise ValueError("image out of range")
            seen = np.zeros(n, dtype=bool)
            seen[arr] = True
            if not seen.all():
                raise ValueError("images do not form a bijection")
        arr.flags.writeable = False
        self.images = arr

    @property
    def degree(self) -> int:
        return int(self.images.shape[0])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.images
        return self.images.astype(dtype)

    def __len__(self) -> int:
        return self.degree

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    def __mul__(self, other: "DensePermutation") -> "DensePermutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "DensePermutation":
        return power(self, k)

    def __invert__(self) -> "DensePermutation":
        return invert(self)

    def inverse(self) -> "DensePermutation":
        return invert(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensePermutation):
            return NotImplemented
        return np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def is_identity(self) -> bool:
        return bool(np.all(self.images == np.arange(self.degree)))

    def digest(self) -> str:
        """SHA-256 over the little-endian int32 image array."""
        return hashlib.sha256(self.images.astype("<i4").tobytes()).hexdigest()

    def __repr__(self) -> str:
        if self.degree <= 16:
            return f"DensePermutation({self.images.tolist()})"
        return f"<DensePermutation degree={self.degree} sha={self.digest()[:12]}>"


def _arr(g) -> np.ndarray:
    return g.images if isinstance(g, DensePermutation) else np.asarray(g, dtype=np.intp)


def identity(n: int) -> DensePermutation:
    return DensePermutation(np.arange(n), check=False)


def compose(g, h) -> DensePermutation:
    """``g`` then ``h``."""
    a, b = _arr(g), _arr(h)
    if a.shape != b.shape:
        raise ValueError("degree mismatch")
    return DensePermutation(b[a], check=False)


def invert(g) -> DensePermutation:
    a = _arr(g)
    out = np.empty_like(a)
    out[a] = np.arange(a.shape[0], dtype=a.dtype)
    return DensePermutation(out, check=False)


def power(g, k: int) -> DensePermutation:
    """``g**k`` by repeated composition (``k`` may be negative)."""
    base = _arr(g)
    if k < 0:
        base = _arr(invert(base))
        k = -k
    out = np.arange(base.shape[0], dtype=np.intp)
    while k:
        if k & 1:
            out = base[out]
        base = base[base]
        k >>= 1
    return DensePermutation(out, check=False)


def _cycle_labels(a: np.ndarray) -> np.ndarray:
    """Label each point by the minimum point of its cycle (pointer jumping)."""
    n = a.shape[0]
    label = np.minimum(np.arange(n), a)
    jump = a.copy()
    # after r rounds, label[i] = min over the 2^r points following i
    span = 1
    while span < n:
        label = np.minimum(label, label[jump])
        jump = jump[jump]
        span <<= 1
    return label


def parity(g) -> str:
    """``"even"`` or ``"odd"``; computed as ``(n - #cycles) mod 2``."""
    a = _arr(g)
    n = a.shape[0]
    if n == 0:
        return "even"
    labels = _cycle_labels(a)
    ncycles = int(np.count_nonzero(labels == np.arange(n)))
    return "odd" if (n - ncycles) % 2 else "even"


def fixed_points(g) -> tuple[int, Iterator[int]]:
    a = _arr(g)
    pts = np.flatnonzero(a == np.arange(a.shape[0]))
    return int(pts.shape[0]), (int(x) for x in pts)


def cycles(g, *, include_fixed: bool = False) -> list[tuple[int, ...]]:
    a = _arr(g).tolist()
    n = len(a)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        cyc = [s]
        seen[s] = True
        q = a[s]
        while q != s:
            seen[q] = True
            cyc.append(q)
            q = a[q]
        if len(cyc) > 1 or include_fixed:
            out.append(tuple(cyc))
    return out


def dump_cycles(g) -> str:
    """One line per non-trivial cycle, e.g. ``(0 5 3)``; identity dumps ``()``."""
    cyc = cycles(g)
    if not cyc:
        return "()\n"
    return "".join("(" + " ".join(map(str, c)) + ")\n" for c in cyc)


def parse_cycles(text: str, degree: int) -> DensePermutation:
    a = np.arange(degree, dtype=np.intp)
    for line in text.splitlines():
        line = line.strip()
        if not line or line == "()":
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise ValueError(f"bad cycle line {line!r}")
        pts = [int(t) for t in line[1:-1].split()]
        for u, v in zip(pts, pts[1:] + pts[:1]):
            a[u] = v
    return DensePermutation(a)


# ---------------------------------------------------------------------------
# generators


def _points(p: ConcentricPresentation) -> np.ndarray:
    return np.arange(1 << p.m, dtype=np.int64)


def _shift_many(a: np.ndarray, m: int) -> np.ndarray:
    mask = (1 << m) - 1
    return ((a << 1) & mask) | ((a >> (m - 1)) & 1)


def _shift_inv_many(a: np.ndarray, m: int) -> np.ndarray:
    return (a >> 1) | ((a & 1) << (m - 1))


def phi_perm(p: ConcentricPresentation) -> DensePermutation:
    """The coordinate shift ``phi`` as a permutation of ``Delta``."""
    return DensePermutation(_shift_many(_points(p), p.m), check=False)


def right_mul_perm(p: ConcentricPresentation, h: int) -> DensePermutation:
    """``R(h): b -> b * h``."""
    return DensePermutation(multiply_right_many(p, _points(p), h), check=False)


def validate_tau(p: ConcentricPresentation, tau: int, *, restricted: bool = True) -> None:
    """Raise ``ValueError`` unless ``tau`` is admissible.

    Always ``tau_1 = 1``; when ``restricted`` (the regime of the closed
    forms) also ``tau_{d+2} = ... = tau_m = 0``.
    """
    if tau < 0 or tau >> p.m:
        raise ValueError(f"tau out of range for m={p.m}")
    if not bit(tau, 1):
        raise ValueError("tau_1 must equal 1")
    if restricted and tau >> (p.d + 1):
        raise ValueError("tau must vanish beyond position d + 1")


def tau_from_bits(p: ConcentricPresentation, free_bits: Sequence[int]) -> int:
    """Assemble ``tau`` from ``(tau_2, ..., tau_{d+1})``."""
    if len(free_bits) != p.d:
        raise ValueError(f"expected {p.d} free bits, got {len(free_bits)}")
    tau = 1
    for k, b in enumerate(free_bits, start=2):
        if b not in (0, 1):
            raise ValueError("tau bits must be 0/1")
        tau |= int(b) << (k - 1)
    return tau


def _vm_shifted(p: ConcentricPresentation) -> list[int]:
    # sum_{l=d'+2}^{d+1} lambda_{l-1}(e_m, alpha) e_l = sum_i alpha_i W_i,
    # with W_i = [e_i, e_m] moved up one position.
    t = p._tables
    return [0] + [t.vm[i] << 1 for i in range(1, p.d_prime + 1)]


def x_point(p: ConcentricPresentation, tau: int, a: int) -> int:
    """Image of one point under ``x_tau`` (closed form)."""
    m = p.m
    out = shift(a, m)
    if bit(a, m):
        w = _vm_shifted(p)
        corr = basis(1) ^ tau
        for i in range(1, p.d_prime + 1):
            if bit(a, i):
                corr ^= w[i]
        out ^= corr
    return out


def x_tau(p: ConcentricPresentation, tau: int) -> DensePermutation:
    """``x_tau`` from the closed form
    ``alpha^phi + alpha_m (e_1 + tau + sum lambda_{l-1}(e_m, alpha) e_l)``.
    """
    validate_tau(p, tau)
    m = p.m
    a = _points(p)
    out = _shift_many(a, m)
    am = (a >> (m - 1)) & 1
    corr = np.full_like(a, basis(1) ^ tau)
    w = _vm_shifted(p)
    for i in range(1, p.d_prime + 1):
        if w[i]:
            corr ^= ((a >> (i - 1)) & 1) * w[i]
    out ^= am * corr
    return DensePermutation(out, check=False)


def x_tau_definitional(p: ConcentricPresentation, tau: int) -> DensePermutation:
    """``x_tau`` straight from its definition.

    Points with ``alpha_m = 0`` are shifted.  Otherwise write
    ``alpha = e_m * h`` with ``h = e_m * alpha`` (basis elements are
    involutions); ``h`` lies in ``H_{1,m-1}`` and the image is
    ``tau * h^phi``.  Valid for any ``tau`` with ``tau_1 = 1``.
    """
    validate_tau(p, tau, restricted=False)
    m = p.m
    em = basis(m)
    a = _points(p)
    out = _shift_many(a, m)
    top = np.flatnonzero((a >> (m - 1)) & 1)
    hp = multiply_left_many(p, em, a[top])
    if np.any(hp >> (m - 1)):
        raise AssertionError("e_m * alpha left H_{1,m-1}")
    out[top] = multiply_left_many(p, tau, _shift_many(hp, m))
    return DensePermutation(out)


def x_inv_point(p: ConcentricPresentation, tau: int, a: int) -> int:
    """Image of one point under ``x_tau^{-1}`` (closed form)."""
    m = p.m
    out = shift_inv(a, m)
    if a & 1:
        beta = out ^ shift_inv(tau, m)
        corr = shift_inv(tau, m) ^ basis(m)
        vm = p._tables.vm
        for i in range(1, p.d_prime + 1):
            if bit(beta, i):
                corr ^= vm[i]
        out ^= corr
    return out


def x_tau_inv(p: ConcentricPresentation, tau: int) -> DensePermutation:
    """``x_tau^{-1}`` from its closed form."""
    validate_tau(p, tau)
    m = p.m
    a = _points(p)
    base = _shift_inv_many(a, m)
    ti = shift_inv(tau, m)
    beta = base ^ ti
    corr = np.full_like(a, ti ^ basis(m))
    vm = p._tables.vm
    for i in range(1, p.d_prime + 1):
        if vm[i]:
            corr ^= ((beta >> (i - 1)) & 1) * vm[i]
    out = base ^ ((a & 1) * corr)
    return DensePermutation(out, check=False)


def y_tau_composed(p: ConcentricPresentation, tau: int,
                   x: DensePermutation | None = None) -> DensePermutation:
    """``y_tau = (x R(tau) x^{-1} R(a_m))^2`` by composition."""
    if x is None:
        x = x_tau_definitional(p, tau)
    w = x * right_mul_perm(p, tau) * x.inverse() * right_mul_perm(p, basis(p.m))
    return w * w


def _require_tight(p: ConcentricPresentation) -> None:
    if not is_tightly_concentric(p):
        raise ValueError("closed form needs a tightly concentric presentation: "
                         + "; ".join(tightness_diagnosis(p)))


def f0_point(p: ConcentricPresentation, tau: int, a: int) -> int:
    acc = bin(a & p._tables.f0_mask).count("1") & 1
    if bit(a, p.m):
        acc ^= bit(tau, p.d + 1)
    return acc


def f_t_point(p: ConcentricPresentation, tau: int, t: int, a: int) -> int:
    """``f_t(alpha) = f_0(alpha^{x^{-t}})``."""
    for _ in range(abs(t)):
        a = x_inv_point(p, tau, a) if t > 0 else x_point(p, tau, a)
    return f0_point(p, tau, a)


def _f0_many(p: ConcentricPresentation, tau: int, a: np.ndarray) -> np.ndarray:
    acc = np.bitwise_count((a & p._tables.f0_mask).astype(np.uint64)).astype(np.int64) & 1
    acc ^= ((a >> (p.m - 1)) & 1) * bit(tau, p.d + 1)
    return acc


def f_t_table(p: ConcentricPresentation, tau: int, t: int) -> np.ndarray:
    """``f_t`` on all of ``Delta``, via ``|t|`` applications of ``x^{-sign t}``."""
    validate_tau(p, tau)
    g = x_tau_inv(p, tau) if t > 0 else x_tau(p, tau)
    a = _points(p)
    img = g.images
    for _ in range(abs(t)):
        a = img[a]
    return _f0_many(p, tau, a.astype(np.int64))


def y_tau_closed(p: ConcentricPresentation, tau: int) -> DensePermutation:
    """``y_tau: alpha -> alpha + f_0(alpha) e_{2d'}`` (tight presentations)."""
    _require_tight(p)
    validate_tau(p, tau)
    a = _points(p)
    out = a ^ (_f0_many(p, tau, a) * basis(2 * p.d_prime))
    return DensePermutation(out, check=False)


def conjugate_closed_form(p: ConcentricPresentation, tau: int, t: int) -> DensePermutation:
    """Closed form of ``x^{-t} y x^{t}`` for ``-d' + 1 <= t <= d - d' + 1``."""
    _require_tight(p)
    validate_tau(p, tau)
    dp, d = p.d_prime, p.d
    if not (-dp + 1 <= t <= d - dp + 1):
        raise ValueError(f"t must lie in {-dp + 1}..{d - dp + 1}")
    a = _points(p)
    f = f_t_table(p, tau, t)
    if t <= d - dp:
        return DensePermutation(a ^ (f * basis(2 * dp + t)), check=False)
    # t = d - d' + 1: alpha + f(alpha) (tau + sum_{l=d'+2}^{d} lambda_{l-1}(e_m, alpha^{x^-1}) e_l)
    xinv = x_tau_inv(p, tau).images.astype(np.int64)
    b = xinv[a]
    vm = p._tables.vm
    lowmask = (1 << d) - 1  # keep e_l with l <= d
    corr = np.full_like(a, tau)
    for i in range(1, dp + 1):
        w = (vm[i] << 1) & lowmask
        if w:
            corr ^= ((b >> (i - 1)) & 1) * w
    return DensePermutation(a ^ (f * corr), check=False)


def conjugate_composed(p: ConcentricPresentation, tau: int, t: int) -> DensePermutation:
    """``x^{-t} y x^{t}`` built from the definitional ``x`` and composed ``y``."""
    x = x_tau_definitional(p, tau)
    y = y_tau_composed(p, tau, x)
    return power(x, -t) * y * power(x, t)


def verify_shift_conjugation(p: ConcentricPresentation, tau: int,
                             x: DensePermutation | None = None) -> bool:
    """Check ``x^{-1} R(e_i) x = R(e_{i+1})`` for ``i = 1 .. m - 1``."""
    if x is None:
        x = x_tau(p, tau)
    xi = x.inverse()
    for i in range(1, p.m):
        lhs = xi * right_mul_perm(p, basis(i)) * x
        if lhs != right_mul_perm(p, basis(i + 1)):
            return False
    return True

