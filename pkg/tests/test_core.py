from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concentric.core import (
    ConcentricPresentation,
    basis,
    coord_from_bits,
    coord_to_bits,
    coord_to_str,
    commutator,
    group_commutator,
    h7_family,
    inverse,
    is_tightly_concentric,
    load_presentation,
    dump_presentation,
    multiply,
    multiply_left_many,
    multiply_right_many,
    random_tightly_concentric,
    shift,
    shift_inv,
    square,
    tightness_diagnosis,
    validate_presentation,
)
from concentric.instances import BUILTINS, builtin, c2m, d8, tc7


def test_coordinate_round_trip():
    bits = (1, 0, 1, 1, 0, 0, 1)
    a = coord_from_bits(bits)
    assert coord_to_bits(a, 7) == bits
    assert coord_to_str(a, 7) == "1011001"
    assert basis(1) == 1 and basis(3) == 4


@given(st.integers(0, 127))
def test_shift_is_inverted_by_shift_inv(a):
    assert shift_inv(shift(a, 7), 7) == a


def test_abelian_instance_multiplies_by_xor():
    p = c2m(5)
    for a in range(32):
        for b in range(32):
            assert multiply(p, a, b) == a ^ b


def test_identity_inverse_and_squares(h7m9):
    p = h7m9
    rng = np.random.default_rng(0)
    for a in rng.integers(0, p.order, 50).tolist():
        assert multiply(p, a, 0) == a == multiply(p, 0, a)
        assert multiply(p, a, inverse(p, a)) == 0
        assert square(p, a) == multiply(p, a, a)


def test_basis_elements_are_involutions(tc7_p):
    for i in range(1, 8):
        assert multiply(tc7_p, basis(i), basis(i)) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 511), st.integers(0, 511), st.integers(0, 511))
def test_associativity_m9(a, b, c):
    p = h7_family(9)
    assert multiply(p, multiply(p, a, b), c) == multiply(p, a, multiply(p, b, c))


def test_vectorised_products_agree(tc7_p):
    a = np.arange(128)
    for h in (0, 5, 77, 127):
        assert multiply_right_many(tc7_p, a, h).tolist() == [multiply(tc7_p, x, h) for x in range(128)]
        assert multiply_left_many(tc7_p, h, a).tolist() == [multiply(tc7_p, h, x) for x in range(128)]


def test_lambda_commutator_matches_group_commutator(h7m9):
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, 512, (40, 2)).tolist():
        assert commutator(h7m9, a, b) == group_commutator(h7m9, a, b)


def test_tightness():
    assert is_tightly_concentric(tc7())
    assert is_tightly_concentric(h7_family(9))
    assert is_tightly_concentric(h7_family(10))
    assert not is_tightly_concentric(c2m())
    # h7_family(7) is concentric but breaks the right-boundary condition
    diag = tightness_diagnosis(h7_family(7))
    assert diag and all(msg.startswith("C2") for msg in diag)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_validate(name):
    rep = validate_presentation(builtin(name))
    assert rep.ok, rep.messages
    assert rep.tightly_concentric == (name not in ("c2m",))


def test_validate_reports_structural_errors():
    rep = validate_presentation(ConcentricPresentation(7, 7, ((1,),)))
    assert not rep.structural_ok and not rep.ok
    assert any("rows" in m for m in rep.messages)


def test_validate_detects_non_maximal_diameter():
    # all-zero relations with d < m: the group is abelian, so d is not maximal
    p = ConcentricPresentation(7, 5, ((0, 0), (0, 0, 0)))
    rep = validate_presentation(p)
    assert rep.structural_ok and not rep.diameter_maximal_ok


def test_random_tightly_concentric_is_deterministic():
    a = random_tightly_concentric(10, 8, seed=7)
    b = random_tightly_concentric(10, 8, seed=7)
    assert a == b and is_tightly_concentric(a)
    with pytest.raises(ValueError):
        random_tightly_concentric(7, 4)


def test_json_round_trip(tmp_path):
    p = h7_family(9)
    path = tmp_path / "p.json"
    dump_presentation(p, str(path))
    q = load_presentation(str(path))
    assert q == p and q.digest() == p.digest()
    assert json.loads(path.read_text())["m"] == 9


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"m\": 7}")
    with pytest.raises(ValueError):
        load_presentation(str(path))
    path.write_text("not json")
    with pytest.raises(ValueError):
        load_presentation(str(path))


def test_d8_has_small_codiameter():
    p = d8()
    assert p.d_prime == 1 and is_tightly_concentric(p)
