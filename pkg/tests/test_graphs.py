from __future__ import annotations

import numpy as np
import pytest

from concentric.graphs import (
    DEMOS,
    Graph,
    automorphism_group_order,
    complete_graph,
    cycle_graph,
    export_graph,
    hat_verdict,
    holt_graph,
    import_graph,
    is_self_paired,
    orbital_digraph,
    suborbits,
    tiny_automorphism_group,
    transitivity_report,
    underlying_graph,
)
from concentric.groups import schreier_sims


@pytest.fixture(scope="module")
def holt_aut():
    return tiny_automorphism_group(holt_graph())


def test_holt_graph_shape():
    g = holt_graph()
    assert g.n == 27 and g.valency() == 4 and g.is_connected()
    assert len(g.edges()) == 54


def test_holt_automorphisms(holt_aut):
    g = holt_graph()
    assert all(g.is_automorphism(a) for a in holt_aut)
    assert schreier_sims(holt_aut, 27).order == 54


def test_holt_is_half_arc_transitive(holt_aut):
    v = hat_verdict(holt_graph())
    assert v.is_hat and v.label == "HAT"
    rep = v.report
    assert (rep.vertex_transitive, rep.edge_transitive, rep.arc_transitive) == (True, True, False)


@pytest.mark.parametrize("graph,order", [
    (complete_graph(4), 24), (complete_graph(5), 120), (cycle_graph(5), 10), (cycle_graph(7), 14)])
def test_controls_are_arc_transitive(graph, order):
    assert automorphism_group_order(graph) == order
    v = hat_verdict(graph)
    assert not v.is_hat and v.report.arc_transitive


def test_non_vertex_transitive_graph():
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    v = hat_verdict(path)
    assert not v.is_hat and not v.report.vertex_transitive


def test_suborbits_of_holt(holt_aut):
    bsgs = schreier_sims(holt_aut, 27)
    lengths = sorted(len(o) for o in suborbits(bsgs, 0))
    assert lengths == [1, 1, 1] + [2] * 12


def test_orbital_invariants(holt_aut):
    bsgs = schreier_sims(holt_aut, 27)
    for orb in suborbits(bsgs, 0):
        if orb == [0]:
            continue
        dg = orbital_digraph(holt_aut, 27, (0, orb[0]))
        assert all((int(g[a]), int(g[b])) in dg.arcs for g in holt_aut for a, b in dg.arcs)
        mult = 1 if is_self_paired(holt_aut, 27, (0, orb[0])) else 2
        assert underlying_graph(dg).degree(0) == len(orb) * mult


def test_transitivity_report_rejects_non_automorphisms():
    with pytest.raises(ValueError):
        transitivity_report([np.array([1, 0, 2])], Graph.from_edges(3, [(0, 1), (1, 2)]))


@pytest.mark.parametrize("fmt", ["dot", "graphml"])
def test_export_round_trip(fmt):
    for g in (Graph(0, ()), complete_graph(4), holt_graph()):
        assert import_graph(export_graph(g, fmt), fmt) == g


def test_export_rejects_unknown_format():
    with pytest.raises(ValueError):
        export_graph(complete_graph(3), "gml")


def test_automorphism_search_size_limit():
    with pytest.raises(ValueError):
        tiny_automorphism_group(cycle_graph(65))


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demos_are_hat(name):
    demo = DEMOS[name]()
    assert demo.verdict.is_hat
    assert demo.graph.valency() == 4 and demo.graph.is_connected()
