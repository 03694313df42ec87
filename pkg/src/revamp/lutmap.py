"""Covering an AIG with k-input LUTs and sizing the result.

The cover is a deterministic greedy cut growth: starting from the node's
fanins, single-fanout internal leaves are absorbed into the cone while the
leaf count stays within k, preferring absorptions that shrink the cut.
Multi-fanout nodes become LUT roots of their own, so shared logic is never
duplicated.  Optimality is a non-goal; correctness is proved functionally
against the source network.

Device sizing follows the scheduling argument for level-ordered computation:
a level's population includes nodes of lower levels that feed past it
(transient nodes), and the device demand is the worst sum of two adjacent
level populations.  Primary inputs are streamed from the input register and
do not count toward the device budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .netlist import AND, CONST0, PI, LogicNetwork, NetlistError

# LUT inputs are tagged references: ("pi", pi_index) or ("lut", lut_id).
PI_REF = "pi"
LUT_REF = "lut"


@dataclass
class Lut:
    id: int
    inputs: tuple[tuple[str, int], ...]
    tt: int  # packed truth table over the inputs, 2^len(inputs) bits
    level: int = 0

    def num_inputs(self) -> int:
        return len(self.inputs)


@dataclass
class LutGraph:
    k: int
    num_pis: int
    luts: list[Lut] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)  # lut ids
    output_names: list[str] = field(default_factory=list)


def lut_truth_table(lut: Lut) -> list[int]:
    return [(lut.tt >> v) & 1 for v in range(1 << len(lut.inputs))]


# -- covering -------------------------------------------------------------------

def _cone_tt(network: LogicNetwork, root: int, leaves: list[int]) -> int:
    """Packed truth table of the cone under ``root`` over the given leaves."""
    n_leaves = len(leaves)
    full = (1 << (1 << n_leaves)) - 1
    masks = {}
    for i, leaf in enumerate(leaves):
        block = (1 << (1 << i)) - 1
        pat = 0
        for start in range(1 << i, 1 << n_leaves, 1 << (i + 1)):
            pat |= block << start
        masks[leaf] = pat

    def value(nid: int) -> int:
        if nid in masks:
            return masks[nid]
        node = network.nodes[nid]
        if node.kind == CONST0:
            v = 0
        elif node.kind == PI:
            raise NetlistError("cone leaked past a primary input")
        else:
            ops = [value(e.target) ^ (full if e.inverted else 0)
                   for e in node.fanins]
            if node.kind == AND:
                v = ops[0] & ops[1]
            else:
                v = (ops[0] & ops[1]) | (ops[0] & ops[2]) | (ops[1] & ops[2])
        masks[nid] = v
        return v

    return value(root)


def _grow_cut(network: LogicNetwork, root: int, k: int,
              fanout: list[int]) -> list[int]:
    node = network.nodes[root]
    cut = []
    for e in node.fanins:
        if e.target not in cut:
            cut.append(e.target)
    while True:
        best = None
        for leaf in cut:
            ln = network.nodes[leaf]
            if ln.kind == PI:
                continue
            if ln.kind != CONST0 and fanout[leaf] > 1:
                continue  # cut the cone at multi-fanout frontiers
            expansion = [e.target for e in ln.fanins]
            new = [x for x in cut if x != leaf]
            for x in expansion:
                if x not in new:
                    new.append(x)
            if len(new) > k:
                continue
            delta = len(new) - len(cut)
            if best is None or (delta, leaf) < (best[0], best[1]):
                best = (delta, leaf, new)
        if best is None:
            break
        cut = best[2]
    return sorted(cut)


def cover_klut(network: LogicNetwork, k: int) -> LutGraph:
    """Partition an AIG into single-output functions of at most k inputs."""
    if network.kind != "aig":
        raise NetlistError("cover_klut expects an AIG")
    if not 2 <= k <= 16:
        raise NetlistError("k must be in 2..16")
    fanout = network.fanout_counts()
    pi_of = {nid: i for i, nid in enumerate(network.pis)}

    graph = LutGraph(k=k, num_pis=network.num_pis)
    lut_of: dict[int, int] = {}  # and-node id -> lut id

    def ensure_lut(root: int) -> int:
        if root in lut_of:
            return lut_of[root]
        cut = _grow_cut(network, root, k, fanout)
        tt = _cone_tt(network, root, cut)
        refs = []
        for leaf in cut:
            if network.nodes[leaf].kind == PI:
                refs.append((PI_REF, pi_of[leaf]))
            else:
                refs.append((LUT_REF, ensure_lut(leaf)))
        lid = len(graph.luts)
        graph.luts.append(Lut(lid, tuple(refs), tt))
        lut_of[root] = lid
        return lid

    # one LUT per output edge; a complemented edge folds into the root LUT
    # itself when the root only feeds that output, otherwise it gets an
    # inverter LUT; PI and constant outputs get buffer/constant LUTs
    out_lut: dict[tuple[int, bool], int] = {}
    for e, name in zip(network.outputs, network.output_names):
        key = (e.target, e.inverted)
        if key not in out_lut:
            tnode = network.nodes[e.target]
            if tnode.kind == AND and not e.inverted:
                out_lut[key] = ensure_lut(e.target)
            elif tnode.kind == AND and fanout[e.target] == 1:
                cut = _grow_cut(network, e.target, k, fanout)
                tt = _cone_tt(network, e.target, cut)
                tt ^= (1 << (1 << len(cut))) - 1
                refs = tuple((PI_REF, pi_of[l])
                             if network.nodes[l].kind == PI
                             else (LUT_REF, ensure_lut(l)) for l in cut)
                lid = len(graph.luts)
                graph.luts.append(Lut(lid, refs, tt))
                out_lut[key] = lid
            elif tnode.kind == AND:
                src = ensure_lut(e.target)
                lid = len(graph.luts)
                graph.luts.append(Lut(lid, ((LUT_REF, src),), 0b01))
                out_lut[key] = lid
            elif tnode.kind == PI:
                lid = len(graph.luts)
                tt = 0b01 if e.inverted else 0b10
                graph.luts.append(Lut(lid, ((PI_REF, pi_of[e.target]),), tt))
                out_lut[key] = lid
            else:  # constant output
                lid = len(graph.luts)
                graph.luts.append(Lut(lid, (), 1 if e.inverted else 0))
                out_lut[key] = lid
        graph.outputs.append(out_lut[key])
        graph.output_names.append(name)

    assign_levels(graph)
    return graph


def assign_levels(graph: LutGraph):
    """Longest-path levels over the LUT graph; PIs sit at level zero."""
    for lut in graph.luts:
        depths = [0]
        for kind, ref in lut.inputs:
            if kind == LUT_REF:
                depths.append(graph.luts[ref].level)
        lut.level = 1 + max(depths)


# -- functional oracle -----------------------------------------------------------

def evaluate_lut_graph_masks(graph: LutGraph, pi_masks: list[int],
                             full: int) -> list[int]:
    vals = [0] * len(graph.luts)
    for lut in graph.luts:
        ins = []
        for kind, ref in lut.inputs:
            ins.append(pi_masks[ref] if kind == PI_REF else vals[ref])
        acc = 0
        for k in range(1 << len(ins)):
            if not (lut.tt >> k) & 1:
                continue
            term = full
            for i, mv in enumerate(ins):
                term &= mv if (k >> i) & 1 else full & ~mv
            acc |= term
        vals[lut.id] = acc
    return [vals[o] for o in graph.outputs]


def lut_graph_truth_tables(graph: LutGraph) -> list[int]:
    n = graph.num_pis
    full = (1 << (1 << n)) - 1
    pats = []
    for i in range(n):
        block = (1 << (1 << i)) - 1
        pat = 0
        for start in range(1 << i, 1 << n, 1 << (i + 1)):
            pat |= block << start
        pats.append(pat)
    return evaluate_lut_graph_masks(graph, pats, full)


# -- sizing -----------------------------------------------------------------------

def transient_nodes(graph: LutGraph, level: int) -> set[int]:
    """LUTs below ``level`` with an edge to a LUT above it.

    Such a value must stay live while the whole level computes, so it counts
    toward the level's population.
    """
    out = set()
    for lut in graph.luts:
        for kind, ref in lut.inputs:
            if kind != LUT_REF:
                continue
            src = graph.luts[ref]
            if src.level < level < lut.level:
                out.add(ref)
    return out


def level_population(graph: LutGraph, level: int) -> int:
    at_level = sum(1 for l in graph.luts if l.level == level)
    return at_level + len(transient_nodes(graph, level))


def min_dev(graph: LutGraph) -> int:
    """Device demand: worst sum of two adjacent level populations.

    Level-ordered scheduling only keeps the previous level's population (with
    transients) live while the current one computes, so adjacent-level sums
    bound the storage demand.  Level 0 holds only streamed primary inputs and
    counts as zero.  Output values are read from the final state, so an
    output below the pair of levels stays live as well unless it is already
    counted as a transient.
    """
    if not graph.luts:
        return 0
    l_max = max(l.level for l in graph.luts)
    pops = [level_population(graph, l) for l in range(l_max + 1)]
    pops[0] = 0
    if l_max == 0:
        return 0
    outputs = set(graph.outputs)
    best = 0
    for l in range(l_max):
        held = sum(1 for o in outputs
                   if graph.luts[o].level < l
                   and o not in transient_nodes(graph, l))
        best = max(best, pops[l] + pops[l + 1] + held)
    return best


def storage_capacity(s_d: int, w_d: int) -> int:
    """Devices available for stored results: three rows are kept for compute."""
    return max(0, s_d - 3) * w_d


def feasible(graph: LutGraph, s_d: int, w_d: int) -> bool:
    return min_dev(graph) <= storage_capacity(s_d, w_d)


# -- serialization ------------------------------------------------------------------

def lut_graph_to_dict(graph: LutGraph) -> dict:
    return {
        "k": graph.k,
        "num_pis": graph.num_pis,
        "luts": [{
            "id": l.id,
            "inputs": ["%s%d" % ("p" if k == PI_REF else "L", r)
                       for k, r in l.inputs],
            "tt": format(l.tt, "0%dx" % max(1, (1 << len(l.inputs)) // 4)),
            "level": l.level,
        } for l in graph.luts],
        "outputs": graph.outputs,
        "output_names": graph.output_names,
        "min_dev": min_dev(graph),
        "levels": max((l.level for l in graph.luts), default=0),
    }
