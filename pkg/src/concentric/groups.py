"""Permutation-group algorithms on dense numpy permutations.

* :func:`schreier_sims` builds a base and strong generating set.  A seeded
  random phase (product replacement) grows the chain; it stops early only
  when the product of the basic orbit lengths reaches a proven upper bound
  for the group order, otherwise a deterministic Schreier-generator pass
  completes the chain.  Either way the reported order is exact.
* :func:`minimal_block` is Atkinson's union-find algorithm.
* :func:`is_primitive` probes every pair ``{base_point, q}``.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .perms import DensePermutation, parity

log = logging.getLogger(__name__)

__all__ = [
    "ResourceLimitError",
    "BSGS",
    "schreier_sims",
    "orbits",
    "is_transitive",
    "BlockSystem",
    "minimal_block",
    "primitivity_probes",
    "is_primitive",
    "is_alternating",
    "alternating_order",
    "AffineVerdict",
    "affine_exclusion",
]

MEMORY_ENV = "CONCENTRIC_MAX_MEMORY_MB"
DEFAULT_MEMORY_MB = 3500


class ResourceLimitError(RuntimeError):
    """Raised when a computation would exceed the configured memory cap."""


def _as_array(g) -> np.ndarray:
    if isinstance(g, DensePermutation):
        return g.images
    return np.asarray(g, dtype=np.intp)


def alternating_order(n: int) -> int:
    return math.factorial(n) // 2 if n >= 2 else 1


def _memory_cap_bytes() -> int:
    raw = os.environ.get(MEMORY_ENV, "")
    try:
        mb = float(raw) if raw else DEFAULT_MEMORY_MB
    except ValueError:
        mb = DEFAULT_MEMORY_MB
    return int(mb * 1024 * 1024)


class _Level:
    """One level of the stabiliser chain.

    ``uinv[k]`` is the inverse of the coset representative sending the base
    point to ``orbit[k]``; sifting through this level is ``g -> uinv[k][g]``.
    """

    __slots__ = ("base", "gens", "gens_inv", "orbit", "pos", "uinv", "n", "dtype")

    def __init__(self, base: int, n: int, dtype) -> None:
        self.base = base
        self.n = n
        self.dtype = dtype
        self.gens: list[np.ndarray] = []
        self.gens_inv: list[np.ndarray] = []
        self.orbit: list[int] = [base]
        self.pos = np.full(n, -1, dtype=np.int32)
        self.pos[base] = 0
        self.uinv = np.empty((1, n), dtype=dtype)
        self.uinv[0] = np.arange(n, dtype=dtype)

    @property
    def size(self) -> int:
        return len(self.orbit)

    def nbytes(self) -> int:
        return self.uinv.nbytes

    def _grow(self, need: int, cap_max: int, budget: "_Budget") -> None:
        cap = self.uinv.shape[0]
        if need <= cap:
            return
        new_cap = min(max(need, 2 * cap), cap_max)
        budget.charge((new_cap - cap) * self.n * self.uinv.itemsize)
        fresh = np.empty((new_cap, self.n), dtype=self.dtype)
        fresh[:cap] = self.uinv
        self.uinv = fresh

    def add_generator(self, g: np.ndarray, ginv: np.ndarray, depth: int, budget: "_Budget") -> None:
        self.gens.append(g)
        self.gens_inv.append(ginv)
        cap_max = self.n - depth
        if self.size >= cap_max:
            return
        # first the new generator over the whole orbit, then a BFS of the new
        # points under every generator
        frontier = self._apply(len(self.gens) - 1, np.arange(self.size), cap_max, budget)
        while frontier.size and self.size < cap_max:
            fresh: list[np.ndarray] = []
            for gi in range(len(self.gens)):
                out = self._apply(gi, frontier, cap_max, budget)
                if out.size:
                    fresh.append(out)
            frontier = np.concatenate(fresh) if fresh else np.empty(0, dtype=np.intp)

    def _apply(self, gi: int, idx: np.ndarray, cap_max: int, budget: "_Budget") -> np.ndarray:
        g, ginv = self.gens[gi], self.gens_inv[gi]
        orbit_arr = np.fromiter(self.orbit, dtype=np.intp, count=self.size)
        pts = orbit_arr[idx]
        imgs = g[pts]
        mask = self.pos[imgs] < 0
        if not mask.any():
            return np.empty(0, dtype=np.intp)
        src, imgs = idx[mask], imgs[mask]
        # de-duplicate images while keeping the first source
        _, first = np.unique(imgs, return_index=True)
        first.sort()
        src, imgs = src[first], imgs[first]
        start = self.size
        self._grow(start + imgs.size, cap_max, budget)
        # uinv_{g(q)} = g^{-1} then uinv_q
        self.uinv[start:start + imgs.size] = self.uinv[src][:, ginv]
        self.orbit.extend(int(v) for v in imgs)
        self.pos[imgs] = np.arange(start, start + imgs.size, dtype=np.int32)
        return np.arange(start, start + imgs.size, dtype=np.intp)

    def rep(self, k: int) -> np.ndarray:
        """Forward coset representative for ``orbit[k]``."""
        u = np.empty(self.n, dtype=np.intp)
        u[self.uinv[k].astype(np.intp)] = np.arange(self.n, dtype=np.intp)
        return u


@dataclass
class _Budget:
    cap: int
    used: int = 0

    def charge(self, nbytes: int) -> None:
        self.used += nbytes
        if self.used > self.cap:
            raise ResourceLimitError(
                f"stabiliser chain needs more than {self.cap // (1024 * 1024)} MiB "
                f"(set {MEMORY_ENV} to raise the cap)")


@dataclass
class BSGS:
    """Base and strong generating set with explicit transversals."""

    degree: int
    generators: list[np.ndarray]
    levels: list[_Level] = field(default_factory=list, repr=False)
    method: str = ""

    @property
    def base(self) -> list[int]:
        return [lv.base for lv in self.levels]

    @property
    def orbit_sizes(self) -> list[int]:
        return [lv.size for lv in self.levels]

    @property
    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= lv.size
        return out

    @property
    def strong_generators(self) -> list[np.ndarray]:
        return list(self.levels[0].gens) if self.levels else []

    def sift(self, g, start: int = 0) -> tuple[np.ndarray, int]:
        """Return ``(residue, level)``; ``level == len(levels)`` when the
        element passed every level."""
        g = _as_array(g)
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            k = lv.pos[g[lv.base]]
            if k < 0:
                return g, i
            g = lv.uinv[k][g]
        return np.asarray(g, dtype=np.intp), len(self.levels)

    def contains(self, g) -> bool:
        g = _as_array(g)
        if g.shape[0] != self.degree:
            return False
        res, lvl = self.sift(g)
        return lvl == len(self.levels) and bool(np.array_equal(res, np.arange(self.degree)))

    def point_stabilizer(self, point: int, *, seed: int = 0) -> list[np.ndarray]:
        """Generators of the stabiliser of ``point``.

        The chain is rebuilt with ``point`` as first base point; the strong
        generators of the second level then generate the stabiliser.
        """
        return self.stabilizer_chain(point, seed=seed).strong_generators

    def stabilizer_chain(self, point: int, *, seed: int = 0) -> "BSGS":
        gens = self.strong_generators
        if not gens:
            return BSGS(self.degree, [], [], "trivial")
        full = schreier_sims(gens, self.degree, seed=seed, known_order=self.order,
                             base_prefix=[point])
        rest = full.levels[1:]
        return BSGS(self.degree, list(rest[0].gens) if rest else [], rest, "stabiliser")

    def memory_bytes(self) -> int:
        return sum(lv.nbytes() for lv in self.levels)

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "base_length": len(self.levels),
            "order_decimal": str(self.order),
            "method": self.method,
        }


def _normalise_gens(gens: Iterable, degree: int) -> list[np.ndarray]:
    ident = np.arange(degree, dtype=np.intp)
    out: list[np.ndarray] = []
    seen: set[bytes] = set()
    for g in gens:
        a = np.ascontiguousarray(_as_array(g), dtype=np.intp)
        if a.shape != (degree,):
            raise ValueError(f"generator of degree {a.shape} does not match {degree}")
        if np.array_equal(a, ident):
            continue
        key = a.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(a)
    return out


def _inv(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[a] = np.arange(a.shape[0], dtype=a.dtype)
    return out


class _Builder:
    def __init__(self, degree: int, base_prefix: Sequence[int]) -> None:
        self.n = degree
        self.dtype = np.int16 if degree <= np.iinfo(np.int16).max else np.int32
        self.levels: list[_Level] = []
        self.prefix = list(base_prefix)
        self.budget = _Budget(_memory_cap_bytes())
        self.ident = np.arange(degree, dtype=np.intp)
        # requested base points come first, even while their orbits are trivial
        for b in dict.fromkeys(self.prefix):
            self.budget.charge(degree * np.dtype(self.dtype).itemsize)
            self.levels.append(_Level(int(b), degree, self.dtype))

    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= lv.size
        return out

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            k = lv.pos[g[lv.base]]
            if k < 0:
                return g, i
            g = lv.uinv[k].take(g).astype(np.intp)
        return g, len(self.levels)

    def _new_base_point(self, g: np.ndarray) -> int:
        used = {lv.base for lv in self.levels}
        for b in self.prefix:
            if b not in used and g[b] != b:
                return b
        moved = np.flatnonzero(g != self.ident)
        for b in moved:
            if int(b) not in used:
                return int(b)
        raise AssertionError("non-identity residue fixes every base point")

    def add_strong(self, g: np.ndarray, level: int) -> None:
        """``g`` fixes the first ``level`` base points; install it on
        levels ``0 .. level`` (creating level ``level`` if needed)."""
        if level == len(self.levels):
            b = self._new_base_point(g)
            self.budget.charge(self.n * np.dtype(self.dtype).itemsize)
            self.levels.append(_Level(b, self.n, self.dtype))
        ginv = _inv(g)
        for i in range(level, -1, -1):
            self.levels[i].add_generator(g, ginv, i, self.budget)

    def absorb(self, g: np.ndarray) -> bool:
        res, lvl = self.sift(g)
        if lvl == len(self.levels) and np.array_equal(res, self.ident):
            return False
        self.add_strong(res, lvl)
        return True


def _product_replacement(gens: list[np.ndarray], rng: np.random.Generator):
    state = [g.copy() for g in gens]
    while len(state) < 10:
        state.append(gens[len(state) % len(gens)].copy())
    acc = np.arange(gens[0].shape[0], dtype=np.intp)
    r = len(state)

    def step() -> np.ndarray:
        nonlocal acc
        i, j = rng.choice(r, size=2, replace=False)
        other = state[j] if rng.random() < 0.5 else _inv(state[j])
        if rng.random() < 0.5:
            state[i] = other[state[i]]  # state[i] then other
        else:
            state[i] = state[i][other]  # other then state[i]
        acc = state[i][acc]
        return acc

    for _ in range(50):
        step()
    return step


def schreier_sims(gens: Iterable, degree: int, *, seed: int = 0,
                  known_order: int | None = None,
                  base_prefix: Sequence[int] = (),
                  idle_limit: int = 30) -> BSGS:
    """Compute a BSGS of ``<gens>`` on ``{0 .. degree-1}``.

    ``known_order`` is an upper bound the caller vouches for (for example
    the order of a group this one is a subgroup of).  Without it the bound
    is ``degree!/2`` when every generator is even and ``degree!`` otherwise.
    When the chain reaches the bound the result is exact and the
    deterministic pass is skipped.
    """
    gl = _normalise_gens(gens, degree)
    b = _Builder(degree, base_prefix)
    if not gl:
        return BSGS(degree, [], [], "trivial")
    if known_order is not None:
        bound = known_order
    elif all(parity(g) == "even" for g in gl):
        bound = alternating_order(degree)
    else:
        bound = math.factorial(degree)

    for g in gl:
        b.absorb(g)
    rng = np.random.default_rng(seed)
    step = _product_replacement(gl, rng)
    idle = 0
    method = "random+verify"
    while idle < idle_limit:
        if b.order() >= bound:
            method = "random+bound"
            break
        if b.absorb(step()):
            idle = 0
        else:
            idle += 1
    if b.order() < bound:
        _verify(b)
    if b.order() > bound:
        raise AssertionError("group order exceeds the supplied upper bound")
    if b.order() == bound:
        method = "random+bound" if method == "random+bound" else "verified"
    log.debug("schreier_sims degree=%d base_len=%d order=%s (%s)",
              degree, len(b.levels), b.order(), method)
    return BSGS(degree, gl, b.levels, method)


def _verify(b: _Builder) -> None:
    """Deterministic completion: every Schreier generator must sift."""
    checked: list[set[tuple[int, int]]] = []
    i = len(b.levels) - 1
    while i >= 0:
        while len(checked) < len(b.levels):
            checked.append(set())
        lv = b.levels[i]
        restart: int | None = None
        k = 0
        while k < lv.size and restart is None:
            q = lv.orbit[k]
            u = None
            for gi in range(len(lv.gens)):
                if (k, gi) in checked[i]:
                    continue
                if u is None:
                    u = lv.rep(k)
                s = lv.gens[gi]
                img = s[q]
                t = lv.uinv[lv.pos[img]].astype(np.intp)
                sg = t[s[u]]  # u then s then uinv_{s(q)}
                res, lvl = b.sift(sg, i + 1)
                checked[i].add((k, gi))
                if lvl < len(b.levels) or not np.array_equal(res, b.ident):
                    b.add_strong(res, lvl)
                    restart = lvl
                    break
            k += 1
        if restart is not None:
            i = restart
        else:
            i -= 1


# ---------------------------------------------------------------------------
# orbits and blocks


def orbits(gens: Iterable, degree: int) -> list[list[int]]:
    """Orbits of ``<gens>``, each sorted, ordered by smallest point."""
    arrs = [_as_array(g) for g in gens]
    if not arrs:
        return [[i] for i in range(degree)]
    rows = np.concatenate([np.arange(degree)] * len(arrs))
    cols = np.concatenate(arrs)
    graph = coo_matrix((np.ones(rows.shape[0], dtype=np.int8), (rows, cols)),
                       shape=(degree, degree))
    _, labels = connected_components(graph, directed=True, connection="weak")
    groups: dict[int, list[int]] = {}
    for pt, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(pt)
    return sorted(groups.values(), key=lambda o: o[0])


def is_transitive(gens: Iterable, degree: int) -> bool:
    return len(orbits(gens, degree)) == 1


@dataclass(frozen=True)
class BlockSystem:
    """Partition of the points into blocks; ``block_of[i]`` is a block id."""

    block_of: tuple[int, ...]
    seed_pair: tuple[int, int]

    @property
    def degree(self) -> int:
        return len(self.block_of)

    @property
    def num_blocks(self) -> int:
        return len(set(self.block_of))

    @property
    def block_size(self) -> int:
        return self.degree // self.num_blocks

    @property
    def is_trivial(self) -> bool:
        return self.num_blocks in (1, self.degree)

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for pt, b in enumerate(self.block_of):
            out.setdefault(b, []).append(pt)
        return list(out.values())


def _minimal_block_lists(gl: list[list[int]], n: int, a: int, b: int) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue: list[tuple[int, int]] = []
    ra, rb = find(a), find(b)
    if ra != rb:
        parent[rb] = ra
        queue.append((rb, ra))
    while queue:
        u, v = queue.pop()
        for g in gl:
            x, y = find(g[u]), find(g[v])
            if x != y:
                parent[y] = x
                queue.append((y, x))
    return [find(i) for i in range(n)]


def minimal_block(gens: Iterable, degree: int, pair: tuple[int, int]) -> BlockSystem:
    """The finest block system in which ``pair`` lies in one block."""
    gl = [_as_array(g).tolist() for g in gens]
    roots = _minimal_block_lists(gl, degree, pair[0], pair[1])
    relabel: dict[int, int] = {}
    out = tuple(relabel.setdefault(r, len(relabel)) for r in roots)
    return BlockSystem(out, (int(pair[0]), int(pair[1])))


def primitivity_probes(gens: Iterable, degree: int, *, base_point: int = 0,
                       points: Iterable[int] | None = None) -> tuple[int, BlockSystem | None]:
    """Run :func:`minimal_block` on ``{base_point, q}`` for each ``q``.

    Returns ``(number_of_probes, first_nontrivial_system_or_None)``.  The
    probe stops at the first non-trivial block system.
    """
    gl = [_as_array(g).tolist() for g in gens]
    if points is None:
        points = (q for q in range(degree) if q != base_point)
    count = 0
    for q in points:
        count += 1
        roots = _minimal_block_lists(gl, degree, base_point, q)
        nblocks = len(set(roots))
        if nblocks != 1:
            relabel: dict[int, int] = {}
            bo = tuple(relabel.setdefault(r, len(relabel)) for r in roots)
            return count, BlockSystem(bo, (base_point, int(q)))
    return count, None


def is_primitive(gens: Iterable, degree: int, *,
                 stabilizer_gens: Iterable | None = None) -> tuple[bool, BlockSystem | None]:
    """Primitivity test.

    A transitive group is primitive iff every pair ``{0, q}`` generates the
    block system with a single block.  If ``stabilizer_gens`` (elements
    fixing 0) are supplied, only one ``q`` per orbit of theirs is probed.
    """
    gens = [_as_array(g) for g in gens]
    if degree <= 2:
        return True, None
    if not is_transitive(gens, degree):
        orbs = orbits(gens, degree)
        lab = [0] * degree
        for idx, o in enumerate(orbs):
            for pt in o:
                lab[pt] = idx
        return False, BlockSystem(tuple(lab), (orbs[0][0], orbs[1][0]))
    points = None
    if stabilizer_gens is not None:
        sg = [_as_array(g) for g in stabilizer_gens]
        for g in sg:
            if g[0] != 0:
                raise ValueError("stabilizer generators must fix point 0")
        points = [o[0] for o in orbits(sg, degree) if o[0] != 0]
    _, witness = primitivity_probes(gens, degree, points=points)
    return witness is None, witness


def is_alternating(bsgs: BSGS) -> bool:
    """True iff the group has order ``n!/2`` and consists of even permutations."""
    n = bsgs.degree
    if bsgs.order != alternating_order(n):
        return False
    return all(parity(g) == "even" for g in bsgs.generators)


# ---------------------------------------------------------------------------
# affine exclusion


@dataclass(frozen=True)
class AffineVerdict:
    """An element of an affine group on ``2^m`` points fixes an affine
    subspace, hence ``0`` or ``2^k`` points.  An odd count above 1 rules
    every affine overgroup out."""

    excluded: bool
    fixed_points: int
    element: str

    def to_dict(self) -> dict:
        return {"excluded": self.excluded, "fixed_points": self.fixed_points,
                "element": self.element}


def affine_exclusion(p, tau: int) -> AffineVerdict:
    from .perms import fixed_points, x_tau

    x = x_tau(p, tau)
    nfix, _ = fixed_points(x * x)
    return AffineVerdict(nfix % 2 == 1 and nfix > 1, nfix, "x_tau^2")
