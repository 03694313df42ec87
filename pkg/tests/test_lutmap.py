import random

import pytest

from revamp.circuits import full_adder, ripple_adder
from revamp.lutmap import (Lut, LutGraph, assign_levels, cover_klut, feasible,
                           lut_graph_truth_tables, lut_truth_table, min_dev,
                           transient_nodes)
from revamp.netlist import (AND, Edge, LogicNetwork, parse_aiger, random_aig,
                            truth_table_ints)


def test_trivial_cover_one_lut_per_and():
    net = random_aig(num_pis=4, num_ands=10, seed=1)
    graph = cover_klut(net, 2)
    # only the output cone is covered, one LUT per reachable AND
    reach = set()
    stack = [e.target for e in net.outputs]
    while stack:
        nid = stack.pop()
        if nid in reach or net.nodes[nid].kind != AND:
            continue
        reach.add(nid)
        stack.extend(e.target for e in net.nodes[nid].fanins)
    assert len(graph.luts) == len(reach)
    assert all(len(l.inputs) <= 2 for l in graph.luts)
    assert lut_graph_truth_tables(graph) == truth_table_ints(net)


def test_cover_partitions_two_luts():
    # two disjoint cones of three ANDs each fit in two 4-input LUTs
    net = LogicNetwork(kind="aig")
    pis = [net.add_pi() for _ in range(8)]
    g = []
    for base in (0, 4):
        a = net.add_node(AND, (Edge(pis[base]), Edge(pis[base + 1], True)))
        b = net.add_node(AND, (Edge(pis[base + 2]), Edge(pis[base + 3])))
        g.append(net.add_node(AND, (Edge(a), Edge(b, True))))
    net.add_output(Edge(g[0]))
    net.add_output(Edge(g[1]))
    graph = cover_klut(net, 4)
    assert len(graph.luts) == 2
    assert all(len(l.inputs) == 4 for l in graph.luts)
    assert lut_graph_truth_tables(graph) == truth_table_ints(net)


@pytest.mark.parametrize("k", [2, 3, 4, 6, 8])
def test_cover_equivalence_random(k):
    for seed in range(12):
        net = random_aig(num_pis=8, num_ands=20 + seed, seed=seed,
                         num_outputs=2)
        graph = cover_klut(net, k)
        assert all(len(l.inputs) <= k for l in graph.luts)
        assert lut_graph_truth_tables(graph) == truth_table_ints(net)


def test_cover_handles_constants_and_wires():
    net = parse_aiger("aag 1 1 0 3 0\n2\n2\n3\n0\n")
    graph = cover_klut(net, 4)
    assert lut_graph_truth_tables(graph) == truth_table_ints(net)


def test_cover_known_circuits():
    for builder in (full_adder, lambda: ripple_adder(3)):
        net = builder()
        for k in (2, 4, 6):
            graph = cover_klut(net, k)
            assert lut_graph_truth_tables(graph) == truth_table_ints(net)


def test_lut_truth_table_bits():
    lut = Lut(0, (("pi", 0), ("pi", 1)), 0b1000)
    assert lut_truth_table(lut) == [0, 0, 0, 1]


def _chain_graph(n):
    graph = LutGraph(k=2, num_pis=1)
    prev = None
    for i in range(n):
        inputs = (("pi", 0),) if prev is None else (("lut", prev),)
        graph.luts.append(Lut(i, inputs, 0b10))
        prev = i
    graph.outputs = [n - 1]
    graph.output_names = ["o0"]
    assign_levels(graph)
    return graph


def test_chain_has_no_transients():
    graph = _chain_graph(6)
    for l in range(7):
        assert transient_nodes(graph, l) == set()


def test_transient_detection():
    # lut1 at level 1 feeds lut3 at level 3, skipping level 2
    graph = LutGraph(k=2, num_pis=2)
    graph.luts = [
        Lut(0, (("pi", 0), ("pi", 1)), 0b1000),
        Lut(1, (("pi", 0),), 0b10),
        Lut(2, (("lut", 0),), 0b10),
        Lut(3, (("lut", 2), ("lut", 1)), 0b1000),
    ]
    graph.outputs = [3]
    graph.output_names = ["o0"]
    assign_levels(graph)
    assert graph.luts[3].level == 3
    assert transient_nodes(graph, 2) == {1}
    assert transient_nodes(graph, 1) == set()


def _brute_transients(graph, level):
    out = set()
    for lut in graph.luts:
        for kind, ref in lut.inputs:
            if kind == "lut" and graph.luts[ref].level < level < lut.level:
                out.add(ref)
    return out


def test_transients_match_brute_force():
    rng = random.Random(0)
    for trial in range(50):
        num = rng.randrange(3, 12)
        graph = LutGraph(k=3, num_pis=3)
        for i in range(num):
            pool = [("pi", rng.randrange(3))] + [("lut", j)
                                                 for j in range(i)]
            picks = rng.sample(pool, k=min(len(pool),
                                           rng.randrange(1, 4)))
            graph.luts.append(Lut(i, tuple(picks),
                                  rng.getrandbits(1 << len(picks))))
        graph.outputs = [num - 1]
        graph.output_names = ["o0"]
        assign_levels(graph)
        top = max(l.level for l in graph.luts)
        for l in range(top + 2):
            assert transient_nodes(graph, l) == _brute_transients(graph, l)


def test_min_dev_single_level():
    graph = LutGraph(k=4, num_pis=4)
    for i in range(5):
        graph.luts.append(Lut(i, (("pi", 0), ("pi", 1)), 0b1000))
    graph.outputs = list(range(5))
    graph.output_names = ["o%d" % i for i in range(5)]
    assign_levels(graph)
    assert min_dev(graph) == 5


def test_min_dev_two_levels():
    graph = LutGraph(k=4, num_pis=4)
    for i in range(3):
        graph.luts.append(Lut(i, (("pi", 0), ("pi", 1)), 0b1000))
    for i in range(3, 7):
        graph.luts.append(Lut(i, (("lut", 0), ("lut", 1), ("lut", 2)),
                              0b10101010))
    graph.outputs = [3, 4, 5, 6]
    graph.output_names = ["o%d" % i for i in range(4)]
    assign_levels(graph)
    assert min_dev(graph) == 7


def test_min_dev_counts_transients():
    graph = LutGraph(k=2, num_pis=2)
    graph.luts = [
        Lut(0, (("pi", 0), ("pi", 1)), 0b1000),
        Lut(1, (("pi", 0),), 0b10),
        Lut(2, (("lut", 0),), 0b01),
        Lut(3, (("lut", 2), ("lut", 1)), 0b1000),
    ]
    graph.outputs = [3]
    graph.output_names = ["o0"]
    assign_levels(graph)
    # populations: L1 = {0,1}, L2 = {2, transient 1}, L3 = {3}
    assert min_dev(graph) == 4


def test_min_dev_brute_census():
    # independent census: per adjacent level pair, enumerate everything that
    # must be live (both populations with transients, plus finished outputs
    # that the final state still has to hold)
    rng = random.Random(5)
    for trial in range(40):
        num = rng.randrange(2, 14)
        graph = LutGraph(k=3, num_pis=3)
        for i in range(num):
            pool = [("pi", rng.randrange(3))] + [("lut", j)
                                                 for j in range(i)]
            picks = rng.sample(pool, k=min(len(pool), rng.randrange(1, 4)))
            graph.luts.append(Lut(i, tuple(picks),
                                  rng.getrandbits(1 << len(picks))))
        graph.outputs = sorted(rng.sample(range(num),
                                          rng.randrange(1, min(4, num + 1))))
        if num - 1 not in graph.outputs:
            graph.outputs.append(num - 1)
        graph.output_names = ["o%d" % i for i in range(len(graph.outputs))]
        assign_levels(graph)
        top = max(l.level for l in graph.luts)
        expect = 0
        for l in range(top):
            # the demand formula sums the two level populations (a value
            # transient across both windows budgets one device per window)
            def population(lv):
                if lv == 0:
                    return 0
                return (sum(1 for x in graph.luts if x.level == lv)
                        + len(_brute_transients(graph, lv)))

            held = {o for o in graph.outputs if graph.luts[o].level < l}
            held -= _brute_transients(graph, l)
            expect = max(expect, population(l) + population(l + 1)
                         + len(held))
        assert min_dev(graph) == expect


def test_feasibility_gate_boundary():
    graph = _chain_graph(2)
    # demand is 2 (two adjacent single-node levels)
    assert min_dev(graph) == 2
    assert feasible(graph, 4, 2)        # capacity (4-3)*2 = 2: equality holds
    assert not feasible(graph, 4, 1)    # capacity 1
    assert not feasible(graph, 3, 8)    # no storage rows at all
