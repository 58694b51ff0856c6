from __future__ import annotations

import random

import numpy as np
import pytest

from concentric.wreath import (
    E_of_f,
    E_of_f_membership,
    WreathElement,
    all_involutions,
    brute_fixed_point_count,
    half_fpr_shape,
    random_involution,
    wreath_fixed_point_count,
)

ID4 = (0, 1, 2, 3)
SWAP01 = (1, 0, 2, 3)


def test_action_rule():
    g = WreathElement(4, (SWAP01, ID4), (1, 0))
    # position i receives the image of coordinate top[i] under its component
    assert g.act((0, 2)) == (2, 1)


def test_product_is_composition():
    rng = random.Random(0)
    for _ in range(50):
        g = random_involution(4, 3, rng)
        h = random_involution(4, 3, rng)
        pt = tuple(rng.randrange(4) for _ in range(3))
        assert (g * h).act(pt) == h.act(g.act(pt))


def test_inverse():
    g = WreathElement(4, ((1, 2, 3, 0), SWAP01, ID4), (2, 0, 1))
    assert (g * g.inverse()).is_identity()
    assert (g.inverse() * g).is_identity()


def test_worked_example():
    # top swaps the two coordinates: |Delta|^1 fixed points on the swapped pair,
    # times |Fix(g_3)| = 2 on the remaining coordinate
    g = WreathElement(4, ((1, 2, 3, 0), (3, 0, 1, 2), SWAP01), (1, 0, 2))
    assert g.is_involution()
    assert wreath_fixed_point_count(g) == brute_fixed_point_count(g) == 8


def test_closed_form_on_random_involutions():
    rng = random.Random(1)
    for _ in range(150):
        g = random_involution(4, 3, rng)
        assert g.is_involution()
        assert wreath_fixed_point_count(g) == brute_fixed_point_count(g)


def test_closed_form_requires_an_involution():
    g = WreathElement(4, ((1, 2, 3, 0), ID4), (0, 1))
    with pytest.raises(ValueError):
        wreath_fixed_point_count(g)


def test_involution_census():
    invs = all_involutions(4, 2)
    assert len(invs) == 124
    assert len(set(invs)) == 124
    half = [g for g in invs if half_fpr_shape(g) is not None]
    assert len(half) == 12
    for g in half:
        j, comp = half_fpr_shape(g)
        assert not g.support() and g.components[j] == comp


def test_half_fpr_needs_power_of_two():
    with pytest.raises(ValueError):
        half_fpr_shape(WreathElement.identity(3, 2))


def test_E_of_f():
    f = np.zeros((4, 4), dtype=int)
    f[2:, :] = 1  # constant on slabs of coordinate 0
    assert E_of_f(f) == [0]
    assert not E_of_f_membership(np.ones((4, 4)), 1)  # Delta_1 would be empty
    g = np.zeros((4, 4), dtype=int)
    g[0, 0] = 1
    assert E_of_f(g) == []
