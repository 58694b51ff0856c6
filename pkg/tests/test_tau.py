from __future__ import annotations

import numpy as np
import pytest

from concentric.core import h7_family, random_tightly_concentric
from concentric.instances import c2m, d8
from concentric.lemmas import random_tight_presentations
from concentric.perms import f_t_point
from concentric.tau import (
    LinearFormF2,
    PreconditionError,
    all_taus,
    build_E1,
    build_E2,
    build_E3,
    certify,
    count_common_solutions,
    f_t_dependency_check,
    find_gamma,
    pipeline,
    select_tau_d_minus_1_d,
    solution_count_table,
    solve_E_system,
    sum_condition,
    tau_from_str,
    tau_to_str,
    verify_certificate,
    wreath_feasible_decompositions,
)


def test_linear_form_arithmetic():
    f = LinearFormF2(5, mask=0b1100, constant=1)  # t3 + t4 + 1
    assert str(f) == "t3 + t4 + 1"
    assert f.variables == [3, 4]
    assert f.evaluate(0b0001) == 1 and f.holds(0b0101)
    assert (f + f) == LinearFormF2(5)
    assert str(LinearFormF2(5)) == "0"


def test_tau_strings_round_trip():
    assert tau_to_str(0b1101, 7) == "1011000"
    assert tau_from_str("1011000") == 0b1101
    with pytest.raises(ValueError):
        tau_from_str("10x")


def test_forms_of_h7_family_at_m7():
    p = h7_family(7)
    assert str(build_E1(p)) == "t3 + t4 + t5 + t6 + 1"
    assert str(sum_condition(p)) == "t2"


def test_forms_of_tc7(tc7_p):
    assert str(build_E1(tc7_p)) == "t3 + t4 + t5 + t6"
    assert str(sum_condition(tc7_p)) == "t2 + 1"


@pytest.mark.parametrize("p", random_tight_presentations(18, seed=11), ids=lambda p: p.name)
def test_three_forms_sum_to_the_sum_condition(p):
    assert build_E1(p) + build_E2(p) + build_E3(p) == sum_condition(p)


def test_sum_condition_needs_c1():
    with pytest.raises(PreconditionError):
        sum_condition(c2m())


def test_E_system_has_a_unique_solution(h7m9):
    for tau in all_taus(h7m9)[:16]:
        a, b = solve_E_system(h7m9, tau)
        d = h7m9.d
        t = (tau & ~((1 << (d - 4)) | (1 << (d - 3)))) | (a << (d - 4)) | (b << (d - 3))
        assert build_E2(h7m9).holds(t) and build_E3(h7m9).holds(t)


def test_gamma_step_flips_f0_and_f_minus_1(h7m9):
    tau = 0b1
    gamma = find_gamma(h7m9, tau)
    assert gamma & 1 == 0 and not gamma >> (h7m9.m - 1)
    t_dm1, t_d = select_tau_d_minus_1_d(h7m9, tau, gamma)
    assert {t_dm1, t_d} <= {0, 1}
    # gamma witnesses f_{d-d'+1} = 1
    assert f_t_point(h7m9, tau, h7m9.d - h7m9.d_prime + 1, gamma) == 1


def test_solution_counts_partition_the_points(tc7_p):
    for tau in all_taus(tc7_p)[:8]:
        table = solution_count_table(tc7_p, tau)
        assert table.sum() == 128
        assert table.max() <= 1 << tc7_p.d_prime
        code = int(np.argmax(table))
        targets = [(code >> i) & 1 for i in range(tc7_p.d)]
        assert count_common_solutions(tc7_p, tau, targets) == table.max()


def test_f_t_dependency(tc7_p):
    for tau in all_taus(tc7_p)[::5]:
        for t in range(-tc7_p.d_prime + 1, tc7_p.d - tc7_p.d_prime + 2):
            assert f_t_dependency_check(tc7_p, tau, t)


def test_wreath_decompositions():
    assert wreath_feasible_decompositions(9) == [(3, 8)]
    assert wreath_feasible_decompositions(10) == [(2, 32)]
    assert wreath_feasible_decompositions(7) == []


def test_pipeline_rejects_non_tight_and_small_codiameter():
    with pytest.raises(PreconditionError):
        pipeline(c2m())
    with pytest.raises(PreconditionError):
        pipeline(d8())


def test_certify_records_every_check(tc7_p):
    checks = certify(tc7_p, tau_from_str("1100000"))
    assert checks["primitive"]["value"] and checks["primitive"]["probes"] == 127
    assert checks["order_is_alt"]["value"]
    assert checks["affine_excluded"]["value"]
    assert set(checks["conditions"]) == {"E1", "E2", "E3"}


def test_h7m9_certificate_shape(h7m9_certificate):
    doc = h7m9_certificate
    assert doc["status"] == "certified" and doc["search_path"] == "constructive"
    assert doc["regime"] == "standard"
    assert len(doc["tau"]) == 9 and doc["tau"][0] == "1"
    assert [s["step"] for s in doc["steps"]] == [
        "tau_d_plus_1", "prefix", "gamma", "tau_d_minus_1_d", "E_system"]


def test_verify_detects_a_flipped_tau_bit(h7m9_certificate):
    doc = dict(h7m9_certificate)
    t = doc["tau"]
    doc["tau"] = t[:4] + ("0" if t[4] == "1" else "1") + t[5:]
    assert not verify_certificate(doc).ok


def test_verify_rejects_unknown_format():
    assert not verify_certificate({"format": "other"}).ok


def test_random_presentation_search_m9():
    p = random_tightly_concentric(9, 7, seed=4)
    cert = pipeline(p, seed=1)
    assert cert.certified
