"""Property suites over every module, run by ``concentric lemma-suite``.

Each check is a small, self-contained computation returning a
:class:`LemmaResult`.  A check carries an ``expected`` verdict: most are
expected to pass, while ``tau.solution_count_quarter_bound`` encodes a
bound that is known not to hold and is kept so the table shows it
failing.  Suites are keyed by module name; a selector is either ``all``,
a module name, or a full check name.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import graphs, wreath
from .core import (
    basis,
    h7_family,
    random_tightly_concentric,
    validate_presentation,
)
from .groups import alternating_order, is_primitive, schreier_sims
from .instances import tc7
from .perms import (
    conjugate_closed_form,
    fixed_points,
    power,
    right_mul_perm,
    x_tau,
    x_tau_definitional,
    x_tau_inv,
    y_tau_closed,
    y_tau_composed,
)
from .tau import (
    all_taus,
    build_E1,
    build_E2,
    build_E3,
    f_t_dependency_check,
    solution_count_table,
    sum_condition,
)

__all__ = [
    "LemmaResult",
    "LemmaCheck",
    "REGISTRY",
    "select",
    "run_suite",
    "closed_form_mismatches",
    "fixed_point_survey",
    "random_tight_presentations",
]


@dataclass
class LemmaResult:
    ok: bool
    detail: str
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    func: Callable[[], LemmaResult]
    expected: bool = True
    summary: str = ""

    @property
    def module(self) -> str:
        return self.name.split(".", 1)[0]


# ---------------------------------------------------------------------------
# reusable computations


def closed_form_mismatches(p, tau: int, points: np.ndarray | None = None) -> dict[str, int]:
    """Compare every closed form against its compose-from-definition
    counterpart on ``points`` (all points by default)."""
    if points is None:
        points = np.arange(p.order)
    x_def = x_tau_definitional(p, tau)
    y_def = y_tau_composed(p, tau, x_def)
    out = {
        "x_tau": int(np.count_nonzero(x_tau(p, tau).images[points] != x_def.images[points])),
        "x_tau_inv": int(np.count_nonzero(
            x_tau_inv(p, tau).images[points] != x_def.inverse().images[points])),
        "y_tau": int(np.count_nonzero(y_tau_closed(p, tau).images[points] != y_def.images[points])),
    }
    for t in range(-p.d_prime + 1, p.d - p.d_prime + 2):
        composed = power(x_def, -t) * y_def * power(x_def, t)
        closed = conjugate_closed_form(p, tau, t)
        out[f"conj_t={t}"] = int(np.count_nonzero(closed.images[points] != composed.images[points]))
    return out


def fixed_point_survey(p) -> list[dict]:
    """Per ``tau``: the three conditions and the fixed-point counts of
    ``x_tau`` and ``x_tau^2``."""
    e1, e2, e3 = build_E1(p), build_E2(p), build_E3(p)
    rows = []
    for tau in all_taus(p):
        x = x_tau(p, tau)
        rows.append({
            "tau": tau,
            "E1": e1.holds(tau),
            "E2": e2.holds(tau),
            "E3": e3.holds(tau),
            "fix_x": fixed_points(x)[0],
            "fix_x2": fixed_points(x * x)[0],
        })
    return rows


def random_tight_presentations(count: int, ms=range(7, 13), seed: int = 0) -> list:
    """``count`` random tightly concentric presentations with ``d' >= 2``,
    cycling through ``ms``."""
    rng = random.Random(seed)
    ms = list(ms)
    out = []
    for i in range(count):
        m = ms[i % len(ms)]
        ds = [d for d in range(m) if 3 * d > 2 * m and m - d >= 2]
        out.append(random_tightly_concentric(m, rng.choice(ds), seed=rng.getrandbits(32)))
    return out


# ---------------------------------------------------------------------------
# core


def _core_validation() -> LemmaResult:
    ps = [tc7(), h7_family(9)] + random_tight_presentations(3, ms=(7, 8), seed=1)
    bad = [p.name for p in ps if not validate_presentation(p).ok]
    return LemmaResult(not bad, f"{len(ps)} presentations validated" if not bad else f"failed: {bad}")


def _core_h7_forms() -> LemmaResult:
    p = h7_family(7)
    got = (str(build_E1(p)), str(sum_condition(p)))
    want = ("t3 + t4 + t5 + t6 + 1", "t2")
    return LemmaResult(got == want, f"E1 = {got[0]}; sum = {got[1]}")


# ---------------------------------------------------------------------------
# perms


def _perms_closed_forms() -> LemmaResult:
    p = tc7()
    total = 0
    for tau in all_taus(p):
        total += sum(closed_form_mismatches(p, tau).values())
    return LemmaResult(total == 0, f"{total} mismatches over 32 tau at m=7")


def _perms_y_half() -> LemmaResult:
    counts = []
    for p in (tc7(), h7_family(9)):
        tau = all_taus(p)[0]
        counts.append(fixed_points(y_tau_closed(p, tau))[0] * 2 == p.order)
    return LemmaResult(all(counts), "fpr(y_tau) = 1/2 at m = 7, 9")


def _perms_E1() -> LemmaResult:
    rows = fixed_point_survey(tc7())
    bad = [r for r in rows if r["E1"] and r["fix_x"] != 1]
    return LemmaResult(not bad, f"{sum(r['E1'] for r in rows)} tau satisfy E1; {len(bad)} violations")


def _perms_E2E3() -> LemmaResult:
    rows = fixed_point_survey(tc7())
    hits = [r for r in rows if r["E2"] and r["E3"]]
    bad = [r for r in hits if r["fix_x2"] < 3]
    return LemmaResult(not bad, f"{len(hits)} tau satisfy E2 and E3; min |Fix(x^2)| = "
                       f"{min((r['fix_x2'] for r in hits), default=None)}")


def _perms_parity() -> LemmaResult:
    rows = fixed_point_survey(tc7())
    bad = [r for r in rows if (r["fix_x"] - r["fix_x2"]) % 2]
    return LemmaResult(not bad, f"|Fix(x^2)| = |Fix(x)| mod 2 on {len(rows)} tau")


# ---------------------------------------------------------------------------
# groups


def _groups_orders() -> LemmaResult:
    s5 = [np.array([1, 2, 3, 4, 0]), np.array([1, 0, 2, 3, 4])]
    a8 = [np.array([1, 2, 0, 3, 4, 5, 6, 7]), np.array([0, 2, 3, 4, 5, 6, 7, 1])]
    got = (schreier_sims(s5, 5).order, schreier_sims(a8, 8).order)
    return LemmaResult(got == (120, alternating_order(8)), f"|S5| = {got[0]}, |A8| = {got[1]}")


def _groups_regular_imprimitive() -> LemmaResult:
    p = tc7()
    gens = [right_mul_perm(p, basis(i)) for i in range(1, p.m + 1)]
    prim, witness = is_primitive(gens, p.order)
    return LemmaResult(not prim and witness is not None,
                       f"R(H) alone is imprimitive ({witness.num_blocks if witness else 0} blocks)")


# ---------------------------------------------------------------------------
# tau


def _tau_form_identity() -> LemmaResult:
    ps = random_tight_presentations(12, seed=2)
    bad = [p.name for p in ps if (build_E1(p) + build_E2(p) + build_E3(p)) != sum_condition(p)]
    return LemmaResult(not bad, f"E1 + E2 + E3 = sum condition on {len(ps)} presentations")


def _tau_dependency() -> LemmaResult:
    p = h7_family(9)
    tau = all_taus(p)[5]
    ts = range(-p.d_prime + 1, p.d - p.d_prime + 2)
    bad = [t for t in ts if not f_t_dependency_check(p, tau, t)]
    return LemmaResult(not bad, f"leading-variable structure of f_t for t in {list(ts)}")


def _solution_counts(p) -> np.ndarray:
    return np.stack([solution_count_table(p, tau) for tau in all_taus(p)])


def _tau_quarter_bound() -> LemmaResult:
    p = tc7()
    counts = _solution_counts(p)
    bound = 1 << (p.d_prime - 2)
    worst = int(counts.max())
    return LemmaResult(worst <= bound,
                       f"max common solutions {worst} vs bound 2^(d'-2) = {bound}",
                       {"max": worst})


def _tau_corrected_bound() -> LemmaResult:
    p = tc7()
    counts = _solution_counts(p)
    bound = 1 << p.d_prime
    ok = int(counts.max()) <= bound and bool(np.all(counts.sum(axis=1) == p.order))
    return LemmaResult(ok, f"max {int(counts.max())} <= 2^d' = {bound}; each tau sums to {p.order}")


# ---------------------------------------------------------------------------
# wreath


def _wreath_formula() -> LemmaResult:
    rng = random.Random(3)
    els = [wreath.random_involution(4, 3, rng) for _ in range(100)]
    els += wreath.all_involutions(4, 2)
    bad = sum(wreath.wreath_fixed_point_count(g) != wreath.brute_fixed_point_count(g) for g in els)
    return LemmaResult(bad == 0, f"{len(els)} involutions, {bad} mismatches")


def _wreath_half() -> LemmaResult:
    els = wreath.all_involutions(4, 2)
    n_half = 0
    for g in els:
        shape = wreath.half_fpr_shape(g)
        brute_half = 2 * wreath.brute_fixed_point_count(g) == 16
        if (shape is not None) != brute_half:
            return LemmaResult(False, "classification disagrees with enumeration")
        n_half += brute_half
    return LemmaResult(True, f"{n_half} of {len(els)} involutions have fpr 1/2")


# ---------------------------------------------------------------------------
# graphs


def _graphs_holt() -> LemmaResult:
    demo = graphs.holt_demo()
    ok = demo.info["aut_order"] == 54 and demo.verdict.is_hat and demo.info["valency"] == 4
    return LemmaResult(ok, f"|Aut| = {demo.info['aut_order']}, {demo.verdict.label}")


def _graphs_controls() -> LemmaResult:
    labels = [graphs.hat_verdict(g).label for g in
              (graphs.complete_graph(5), graphs.cycle_graph(7))]
    return LemmaResult(labels == ["not-HAT", "not-HAT"], f"K5, C7: {labels}")


def _graphs_orbital_valency() -> LemmaResult:
    gens = graphs.tiny_automorphism_group(graphs.holt_graph())
    bsgs = schreier_sims(gens, 27)
    bad = []
    for orb in graphs.suborbits(bsgs, 0):
        if orb == [0]:
            continue
        seed = (0, orb[0])
        dg = graphs.orbital_digraph(gens, 27, seed)
        closed = all((int(g[a]), int(g[b])) in dg.arcs for g in gens for a, b in dg.arcs)
        mult = 1 if graphs.is_self_paired(gens, 27, seed) else 2
        if not closed or graphs.underlying_graph(dg).degree(0) != len(orb) * mult:
            bad.append(seed)
    return LemmaResult(not bad, "orbital arc sets closed; valency = suborbit length x pairing")


REGISTRY: dict[str, LemmaCheck] = {c.name: c for c in [
    LemmaCheck("core.validation", _core_validation, summary="group law, diameter, shift isomorphism"),
    LemmaCheck("core.h7_forms", _core_h7_forms, summary="E1 and sum condition of h7_family(7)"),
    LemmaCheck("perms.closed_forms", _perms_closed_forms, summary="closed forms vs definitions"),
    LemmaCheck("perms.y_half_fpr", _perms_y_half, summary="y_tau fixes half the points"),
    LemmaCheck("perms.E1_single_fixed_point", _perms_E1, summary="E1 gives one fixed point"),
    LemmaCheck("perms.E2E3_fixed_points", _perms_E2E3, summary="E2 and E3 give >= 3 fixed points of x^2"),
    LemmaCheck("perms.fixed_point_parity", _perms_parity, summary="Fix(x) and Fix(x^2) agree mod 2"),
    LemmaCheck("groups.orders", _groups_orders, summary="Schreier-Sims on small groups"),
    LemmaCheck("groups.regular_imprimitive", _groups_regular_imprimitive, summary="control"),
    LemmaCheck("tau.form_identity", _tau_form_identity, summary="E1 + E2 + E3 = sum condition"),
    LemmaCheck("tau.f_t_dependency", _tau_dependency, summary="leading variables of f_t"),
    LemmaCheck("tau.solution_count_quarter_bound", _tau_quarter_bound, expected=False,
               summary="at most 2^(d'-2) common solutions (does not hold)"),
    LemmaCheck("tau.solution_count_bound", _tau_corrected_bound, summary="at most 2^d' common solutions"),
    LemmaCheck("wreath.fixed_point_formula", _wreath_formula, summary="closed form vs enumeration"),
    LemmaCheck("wreath.half_fpr_shape", _wreath_half, summary="fpr 1/2 classification"),
    LemmaCheck("graphs.holt", _graphs_holt, summary="Holt graph is HAT"),
    LemmaCheck("graphs.controls", _graphs_controls, summary="K5 and C7 are not HAT"),
    LemmaCheck("graphs.orbital_valency", _graphs_orbital_valency, summary="orbital invariants"),
]}


def select(selector: str = "all") -> list[LemmaCheck]:
    if selector in ("", "all"):
        return list(REGISTRY.values())
    if selector in REGISTRY:
        return [REGISTRY[selector]]
    picked = [c for c in REGISTRY.values() if c.module == selector]
    if not picked:
        modules = sorted({c.module for c in REGISTRY.values()})
        raise ValueError(f"unknown selector {selector!r}; use 'all', one of {modules}, or a check name")
    return picked


def run_suite(selector: str = "all") -> list[dict]:
    """Run the selected checks; each row records ``ok`` against ``expected``."""
    rows = []
    for check in select(selector):
        t0 = time.perf_counter()
        try:
            res = check.func()
        except Exception as exc:  # a crashing check is reported, not raised
            res = LemmaResult(False, f"{type(exc).__name__}: {exc}")
        rows.append({
            "name": check.name,
            "ok": res.ok,
            "expected": check.expected,
            "as_expected": res.ok == check.expected,
            "detail": res.detail,
            "seconds": round(time.perf_counter() - t0, 3),
        })
    return rows
