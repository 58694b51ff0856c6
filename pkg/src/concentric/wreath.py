"""A small laboratory for the wreath product ``Sym(Delta) wr S_k`` in
product action on ``Omega = Delta^k``.

Elements are ``g = (g_1, ..., g_k) pi`` with the action

    (b_1, ..., b_k)^g = (b_{1^pi}^{g_{1^pi}}, ..., b_{k^pi}^{g_{k^pi}})

Everything is 0-based: points of ``Delta`` are ``0 .. |Delta| - 1`` and
coordinates ``0 .. k - 1``; ``top[i]`` is ``i^pi`` and a component tuple
``c`` maps ``b -> c[b]``.  Nothing here touches degree-``2^m`` data.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "WreathElement",
    "wreath_fixed_point_count",
    "brute_fixed_point_count",
    "half_fpr_shape",
    "random_involution",
    "all_involutions",
    "E_of_f_membership",
    "E_of_f",
]

MAX_POINTS = 1 << 12


def _perm_inv(c: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(c)
    for i, v in enumerate(c):
        out[v] = i
    return tuple(out)


def _is_perm(c: Sequence[int], n: int) -> bool:
    return len(c) == n and sorted(c) == list(range(n))


@dataclass(frozen=True)
class WreathElement:
    delta_size: int
    components: tuple[tuple[int, ...], ...]
    top: tuple[int, ...]

    def __post_init__(self) -> None:
        comps = tuple(tuple(int(v) for v in c) for c in self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "top", tuple(int(v) for v in self.top))
        if not _is_perm(self.top, len(comps)):
            raise ValueError("top must be a permutation of the coordinates")
        for c in comps:
            if not _is_perm(c, self.delta_size):
                raise ValueError("components must be permutations of Delta")

    @property
    def k(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, delta_size: int, k: int) -> "WreathElement":
        ident = tuple(range(delta_size))
        return cls(delta_size, (ident,) * k, tuple(range(k)))

    def act(self, point: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.components[self.top[i]][point[self.top[i]]] for i in range(self.k))

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        """``self`` then ``other``."""
        if (self.delta_size, self.k) != (other.delta_size, other.k):
            raise ValueError("wreath elements over different shapes")
        top = tuple(self.top[other.top[i]] for i in range(self.k))
        pinv = _perm_inv(self.top)
        comps = []
        for j in range(self.k):
            g, h = self.components[j], other.components[pinv[j]]
            comps.append(tuple(h[g[b]] for b in range(self.delta_size)))
        return WreathElement(self.delta_size, tuple(comps), top)

    def inverse(self) -> "WreathElement":
        k = self.k
        # g^{-1} = pi^{-1} (g_1^{-1} .. g_k^{-1}); solve by requiring g * g^{-1} = 1
        top = _perm_inv(self.top)
        comps = [None] * k
        for j in range(k):
            # component j of the product is other_{pinv[j]} o g_j = id
            comps[_perm_inv(self.top)[j]] = _perm_inv(self.components[j])
        return WreathElement(self.delta_size, tuple(comps), top)

    def is_identity(self) -> bool:
        ident = tuple(range(self.delta_size))
        return self.top == tuple(range(self.k)) and all(c == ident for c in self.components)

    def is_involution(self) -> bool:
        return (self * self).is_identity()

    def support(self) -> list[int]:
        return [i for i in range(self.k) if self.top[i] != i]

    def points(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.delta_size), repeat=self.k)


def brute_fixed_point_count(g: WreathElement) -> int:
    if g.delta_size ** g.k > MAX_POINTS:
        raise ValueError("domain too large for enumeration")
    return sum(1 for pt in g.points() if g.act(pt) == pt)


def wreath_fixed_point_count(g: WreathElement) -> int:
    """``|Delta|^{|Supp pi| / 2} * prod_{i not in Supp pi} |Fix(g_i)|`` for involutions."""
    if not g.is_involution():
        raise ValueError("closed form applies to involutions only")
    supp = g.support()
    if len(supp) % 2:
        raise AssertionError("involution with odd top support")
    out = g.delta_size ** (len(supp) // 2)
    for i in range(g.k):
        if i not in supp:
            c = g.components[i]
            out *= sum(1 for b in range(g.delta_size) if c[b] == b)
    return out


def half_fpr_shape(g: WreathElement) -> tuple[int, tuple[int, ...]] | None:
    """When an involution fixes exactly half of ``Delta^k`` (``|Delta| = 2^l
    >= 4``) it has a single non-trivial component and trivial top; return
    ``(j, g_j)`` (``j`` 0-based).  Otherwise ``None``.

    Raises ``AssertionError`` if the half-ratio shape claim is contradicted.
    """
    n = g.delta_size
    if n < 4 or n & (n - 1):
        raise ValueError("|Delta| must be a power of two, at least 4")
    if not g.is_involution():
        raise ValueError("g must be an involution")
    total = n ** g.k
    if 2 * wreath_fixed_point_count(g) != total:
        return None
    ident = tuple(range(n))
    nontrivial = [i for i, c in enumerate(g.components) if c != ident]
    if g.support() or len(nontrivial) != 1:
        raise AssertionError("fixed-point ratio 1/2 without the single-component shape")
    j = nontrivial[0]
    comp = g.components[j]
    if 2 * sum(1 for b in range(n) if comp[b] == b) != n:
        raise AssertionError("distinguished component does not fix half of Delta")
    return j, comp


def _involutions_of(n: int) -> list[tuple[int, ...]]:
    return [p for p in itertools.permutations(range(n))
            if all(p[p[b]] == b for b in range(n))]


def random_involution(delta_size: int, k: int, rng: random.Random) -> WreathElement:
    """A random involution: random matching on the coordinates, inverse
    component pairs across matched coordinates, involutions elsewhere."""
    coords = list(range(k))
    rng.shuffle(coords)
    npairs = rng.randint(0, k // 2)
    top = list(range(k))
    comps: list[tuple[int, ...] | None] = [None] * k
    for a, b in zip(coords[: 2 * npairs: 2], coords[1: 2 * npairs: 2]):
        top[a], top[b] = b, a
        c = list(range(delta_size))
        rng.shuffle(c)
        comps[a] = tuple(c)
        comps[b] = _perm_inv(c)
    invs = _involutions_of(delta_size) if delta_size <= 8 else None
    for i in range(k):
        if comps[i] is None:
            if invs is not None:
                comps[i] = rng.choice(invs)
            else:
                pts = list(range(delta_size))
                rng.shuffle(pts)
                c = list(range(delta_size))
                for x, y in zip(pts[::2], pts[1::2]):
                    if rng.random() < 0.5:
                        c[x], c[y] = y, x
                comps[i] = tuple(c)
    return WreathElement(delta_size, tuple(comps), tuple(top))


def all_involutions(delta_size: int, k: int) -> list[WreathElement]:
    """Every involution (identity included) of ``Sym(Delta) wr S_k``."""
    perms = list(itertools.permutations(range(delta_size)))
    out = []
    for top in itertools.permutations(range(k)):
        if any(top[top[i]] != i for i in range(k)):
            continue
        free = [i for i in range(k) if top[i] >= i]
        choices = []
        for i in free:
            choices.append(_involutions_of(delta_size) if top[i] == i else perms)
        for pick in itertools.product(*choices):
            comps: list = [None] * k
            for i, c in zip(free, pick):
                comps[i] = tuple(c)
                if top[i] != i:
                    comps[top[i]] = _perm_inv(c)
            out.append(WreathElement(delta_size, tuple(comps), top))
    return out


def E_of_f_membership(f: np.ndarray, j: int) -> bool:
    """Does coordinate ``j`` (0-based) lie in ``E(f)``?

    ``f`` is a 0/1 array of shape ``(|Delta|,) * k``.  True iff some
    non-empty proper ``Delta_1`` makes ``f`` identically 0 on the slabs
    ``b_j in Delta_1`` and identically 1 on the remaining slabs.
    """
    f = np.asarray(f)
    if f.size > MAX_POINTS:
        raise ValueError("domain too large")
    k = f.ndim
    if not 0 <= j < k:
        raise ValueError("coordinate out of range")
    slabs = np.moveaxis(f, j, 0).reshape(f.shape[j], -1)
    lo, hi = slabs.min(axis=1), slabs.max(axis=1)
    if np.any(lo != hi):
        return False
    # each slab constant; Delta_1 = slabs with value 0 must be proper, non-empty
    return bool(0 < int(np.count_nonzero(lo == 0)) < f.shape[j])


def E_of_f(f: np.ndarray) -> list[int]:
    return [j for j in range(np.asarray(f).ndim) if E_of_f_membership(f, j)]
