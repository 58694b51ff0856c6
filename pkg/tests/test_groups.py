from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from concentric.core import basis
from concentric.groups import (
    ResourceLimitError,
    affine_exclusion,
    alternating_order,
    is_alternating,
    is_primitive,
    is_transitive,
    minimal_block,
    orbits,
    primitivity_probes,
    schreier_sims,
)
from concentric.perms import right_mul_perm, x_tau
from concentric.tau import all_taus


def cyc(n: int) -> np.ndarray:
    return np.roll(np.arange(n), -1)


def transposition(n: int, a: int = 0, b: int = 1) -> np.ndarray:
    g = np.arange(n)
    g[a], g[b] = b, a
    return g


def three_cycle(n: int) -> np.ndarray:
    g = np.arange(n)
    g[0], g[1], g[2] = 1, 2, 0
    return g


@pytest.mark.parametrize("n", [3, 5, 8, 11])
def test_symmetric_group_orders(n):
    assert schreier_sims([cyc(n), transposition(n)], n).order == math.factorial(n)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_alternating_group_orders(n):
    # for odd n the n-cycle is even; together with a 3-cycle it generates Alt(n)
    bsgs = schreier_sims([cyc(n), three_cycle(n)], n)
    assert bsgs.order == alternating_order(n)
    assert is_alternating(bsgs)


def test_dihedral_group_needs_verification():
    n = 12
    refl = (-np.arange(n)) % n
    bsgs = schreier_sims([cyc(n), refl], n, seed=3)
    assert bsgs.order == 2 * n
    assert bsgs.method in ("random+verify", "verified")


def test_membership():
    n = 6
    bsgs = schreier_sims([cyc(n), three_cycle(n)], n)  # cyc(6) is odd: Sym(6)
    assert bsgs.order == 720
    small = schreier_sims([three_cycle(n)], n)
    assert small.order == 3
    assert small.contains(three_cycle(n))
    assert not small.contains(transposition(n))


def test_order_is_seed_independent():
    gens = [cyc(10), three_cycle(10)]
    assert {schreier_sims(gens, 10, seed=s).order for s in range(4)} == {math.factorial(10)}


def test_regular_group_of_a_presentation(tc7_p):
    gens = [right_mul_perm(tc7_p, basis(i)) for i in range(1, 8)]
    bsgs = schreier_sims(gens, 128)
    assert bsgs.order == 128
    for a in (0, 1, 77, 127):
        assert bsgs.contains(right_mul_perm(tc7_p, a))


def test_point_stabilizer_fixes_the_point():
    gens = [cyc(7), transposition(7)]
    bsgs = schreier_sims(gens, 7)
    stab = bsgs.point_stabilizer(3)
    assert stab and all(g[3] == 3 for g in stab)
    assert schreier_sims(stab, 7).order == math.factorial(6)


def test_memory_cap(monkeypatch):
    monkeypatch.setenv("CONCENTRIC_MAX_MEMORY_MB", "1")
    n = 2049
    with pytest.raises(ResourceLimitError):
        schreier_sims([cyc(n), three_cycle(n)], n)


def test_orbits_and_transitivity():
    g = np.array([1, 0, 3, 2, 4])
    assert sorted(map(sorted, orbits([g], 5))) == [[0, 1], [2, 3], [4]]
    assert not is_transitive([g], 5)
    assert is_transitive([cyc(5)], 5)


def test_cyclic_group_of_composite_order_is_imprimitive():
    prim, witness = is_primitive([cyc(6)], 6)
    assert not prim and witness is not None and not witness.is_trivial
    assert is_primitive([cyc(7)], 7)[0]


def test_minimal_block_of_a_cycle():
    bs = minimal_block([cyc(8)], 8, (0, 4))
    assert bs.num_blocks == 4 and bs.block_size == 2
    assert sorted(map(sorted, bs.blocks()))[0] == [0, 4]


def test_probes_restricted_by_a_stabilizer():
    gens = [cyc(7), transposition(7)]
    stab = [g for g in schreier_sims(gens, 7).point_stabilizer(0)]
    assert is_primitive(gens, 7, stabilizer_gens=stab)[0]
    count, witness = primitivity_probes(gens, 7)
    assert count == 6 and witness is None


def test_affine_exclusion_on_m7(tc7_p):
    verdicts = [affine_exclusion(tc7_p, t) for t in all_taus(tc7_p)]
    assert any(v.excluded for v in verdicts)
    for v in verdicts:
        assert v.excluded == (v.fixed_points % 2 == 1 and v.fixed_points > 1)


def test_tc7_generates_alt128(tc7_p):
    tau = 0b0000011
    gens = [right_mul_perm(tc7_p, basis(i)) for i in range(1, 8)] + [x_tau(tc7_p, tau)]
    bsgs = schreier_sims(gens, 128)
    assert bsgs.order == alternating_order(128)


def test_small_alternating_orders():
    for n in range(2, 8):
        elems = {p for p in itertools.permutations(range(n))
                 if sum(1 for i in range(n) for j in range(i) if p[j] > p[i]) % 2 == 0}
        assert len(elems) == alternating_order(n)
