from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concentric.core import basis, h7_family
from concentric.instances import tc7
from concentric.lemmas import closed_form_mismatches
from concentric.perms import (
    DensePermutation,
    compose,
    conjugate_closed_form,
    cycles,
    dump_cycles,
    fixed_points,
    identity,
    invert,
    parity,
    parse_cycles,
    phi_perm,
    power,
    right_mul_perm,
    tau_from_bits,
    validate_tau,
    verify_shift_conjugation,
    x_point,
    x_tau,
    x_tau_definitional,
    y_tau_closed,
)
from concentric.tau import all_taus

perm_arrays = st.integers(1, 12).flatmap(lambda n: st.permutations(list(range(n))))


def test_composition_acts_on_the_right():
    g = DensePermutation([1, 2, 0])  # 0->1->2->0
    h = DensePermutation([0, 2, 1])  # swap 1, 2
    # g then h: 0 -> 1 -> 2
    assert (g * h)(0) == 2
    assert compose(g, h) == g * h


@given(perm_arrays)
def test_inverse_and_powers(arr):
    g = DensePermutation(arr)
    assert (g * invert(g)).is_identity()
    assert power(g, 3) == g * g * g
    assert power(g, -2) == invert(g * g)
    assert power(g, 0) == identity(len(arr))


@given(perm_arrays)
def test_cycle_dump_round_trip(arr):
    g = DensePermutation(arr)
    assert parse_cycles(dump_cycles(g), len(arr)) == g


@given(perm_arrays)
def test_parity_matches_cycle_count(arr):
    g = DensePermutation(arr)
    transpositions = sum(len(c) - 1 for c in cycles(g))
    assert parity(g) == ("odd" if transpositions % 2 else "even")


def test_bijection_is_checked():
    with pytest.raises(ValueError):
        DensePermutation([0, 0, 1])


def test_digest_is_stable():
    g = DensePermutation([2, 0, 1])
    assert g.digest() == DensePermutation(np.array([2, 0, 1])).digest()
    assert g.digest() != identity(3).digest()


def test_tau_admissibility(tc7_p):
    validate_tau(tc7_p, 1)
    with pytest.raises(ValueError):
        validate_tau(tc7_p, 2)  # tau_1 = 0
    with pytest.raises(ValueError):
        validate_tau(tc7_p, 1 | basis(7))  # beyond d + 1
    assert tau_from_bits(tc7_p, [1, 0, 0, 0, 0]) == 0b11
    assert len(all_taus(tc7_p)) == 32


def test_x_fixes_the_identity(tc7_p):
    for tau in all_taus(tc7_p):
        assert x_point(tc7_p, tau, 0) == 0


def test_closed_forms_match_definitions_m7(tc7_p):
    for tau in all_taus(tc7_p):
        assert sum(closed_form_mismatches(tc7_p, tau).values()) == 0


def test_closed_forms_match_definitions_m9_sample(h7m9):
    rng = np.random.default_rng(5)
    taus = all_taus(h7m9)
    for tau in rng.choice(taus, 6, replace=False).tolist():
        assert sum(closed_form_mismatches(h7m9, tau).values()) == 0


def test_x_on_low_half_is_the_shift(tc7_p):
    x = x_tau(tc7_p, 0b11)
    phi = phi_perm(tc7_p)
    low = np.arange(64)
    assert np.array_equal(x.images[low], phi.images[low])
    assert x == x_tau_definitional(tc7_p, 0b11)


def test_shift_conjugation(h7m9):
    for tau in all_taus(h7m9)[:4]:
        assert verify_shift_conjugation(h7m9, tau)


def test_right_multiplications_are_even_and_fixed_point_free(tc7_p):
    for i in range(1, 8):
        r = right_mul_perm(tc7_p, basis(i))
        assert parity(r) == "even"
        assert fixed_points(r)[0] == 0


@pytest.mark.parametrize("m", [7, 9, 10])
def test_y_fixes_half_the_points(m):
    p = tc7() if m == 7 else h7_family(m)
    for tau in all_taus(p)[:8]:
        assert 2 * fixed_points(y_tau_closed(p, tau))[0] == p.order


def test_conjugate_range_is_enforced(tc7_p):
    with pytest.raises(ValueError):
        conjugate_closed_form(tc7_p, 1, 5)
    with pytest.raises(ValueError):
        conjugate_closed_form(tc7_p, 1, -2)
