"""Combinational logic networks: and-inverter and majority-inverter graphs.

A network is a DAG of nodes in topological order (every fanin id is smaller
than the node's own id).  Edges carry a complement flag.  The same container
holds both AIGs (2-input AND nodes) and MIGs (3-input majority nodes); the
``kind`` field says which flavour the network is.

This module also provides the brute-force functional oracle (``evaluate`` /
``truth_table``) used by every other part of the mapper to prove equivalence.
Truth tables are bit-parallel: all assignments are evaluated at once on
Python integers, bit k of a table is the value under assignment k, and bit i
of k is the value of primary input i.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

PI = "pi"
CONST0 = "const0"
AND = "and"
MAJ = "maj"

_ARITY = {PI: 0, CONST0: 0, AND: 2, MAJ: 3}


class NetlistError(ValueError):
    pass


class ParseError(NetlistError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Edge:
    """Reference to a node, optionally complemented."""

    target: int
    inverted: bool = False

    def flip(self):
        return Edge(self.target, not self.inverted)


@dataclass
class Node:
    kind: str
    fanins: tuple[Edge, ...] = ()
    name: str | None = None


@dataclass
class LogicNetwork:
    """DAG of PI/CONST0/AND/MAJ nodes with complemented edges and outputs."""

    kind: str  # "aig" or "mig"
    nodes: list[Node] = field(default_factory=list)
    outputs: list[Edge] = field(default_factory=list)
    output_names: list[str] = field(default_factory=list)

    # -- construction -----------------------------------------------------

    def add_node(self, kind, fanins=(), name=None) -> int:
        fanins = tuple(fanins)
        if len(fanins) != _ARITY[kind]:
            raise NetlistError("%s node takes %d fanins, got %d"
                               % (kind, _ARITY[kind], len(fanins)))
        nid = len(self.nodes)
        for e in fanins:
            if not 0 <= e.target < nid:
                raise NetlistError("fanin %d of node %d is not topological"
                                   % (e.target, nid))
        if self.kind == "aig" and kind == MAJ:
            raise NetlistError("MAJ node in an AIG")
        if self.kind == "mig" and kind == AND:
            raise NetlistError("AND node in a MIG")
        self.nodes.append(Node(kind, fanins, name))
        return nid

    def add_pi(self, name=None) -> int:
        return self.add_node(PI, name=name)

    def add_const0(self) -> int:
        return self.add_node(CONST0)

    def add_output(self, edge: Edge, name=None):
        if not 0 <= edge.target < len(self.nodes):
            raise NetlistError("output references unknown node %d" % edge.target)
        self.outputs.append(edge)
        self.output_names.append(name if name is not None
                                 else "o%d" % (len(self.outputs) - 1))

    # -- queries -----------------------------------------------------------

    @property
    def pis(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind == PI]

    @property
    def num_pis(self) -> int:
        return len(self.pis)

    def pi_index(self, nid) -> int:
        """Position of a PI node in the PI ordering (PIR line number)."""
        return self.pis.index(nid)

    def internal_nodes(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind in (AND, MAJ)]

    def fanout_counts(self) -> list[int]:
        counts = [0] * len(self.nodes)
        for n in self.nodes:
            for e in n.fanins:
                counts[e.target] += 1
        for e in self.outputs:
            counts[e.target] += 1
        return counts

    def validate(self):
        if not self.outputs:
            raise NetlistError("network has no outputs")
        for i, n in enumerate(self.nodes):
            if len(n.fanins) != _ARITY[n.kind]:
                raise NetlistError("node %d has wrong arity" % i)
            for e in n.fanins:
                if not 0 <= e.target < i:
                    raise NetlistError("node %d has non-topological fanin" % i)


# -- levels ----------------------------------------------------------------

def levels(network: LogicNetwork) -> list[int]:
    """Level of every node: longest path from any PI (PIs and constants = 0)."""
    out = [0] * len(network.nodes)
    for i, n in enumerate(network.nodes):
        if n.fanins:
            out[i] = 1 + max(out[e.target] for e in n.fanins)
    return out


def level(network: LogicNetwork, node: int) -> int:
    if not 0 <= node < len(network.nodes):
        raise NetlistError("no node %d in network" % node)
    return levels(network)[node]


def depth(network: LogicNetwork) -> int:
    lv = levels(network)
    return max((lv[e.target] for e in network.outputs), default=0)


# -- evaluation ------------------------------------------------------------

def _maj3(a, b, c):
    return (a & b) | (a & c) | (b & c)


def evaluate_masks(network: LogicNetwork, pi_masks: list[int], full: int) -> list[int]:
    """Bit-parallel evaluation: each mask packs one bit per test vector.

    ``full`` is the all-ones mask for the vector width.  Returns one mask per
    output.
    """
    vals = [0] * len(network.nodes)
    it = iter(pi_masks)
    for i, n in enumerate(network.nodes):
        if n.kind == PI:
            vals[i] = next(it) & full
        elif n.kind == CONST0:
            vals[i] = 0
        else:
            ops = [vals[e.target] ^ (full if e.inverted else 0) for e in n.fanins]
            if n.kind == AND:
                vals[i] = ops[0] & ops[1]
            else:
                vals[i] = _maj3(ops[0], ops[1], ops[2])
    return [(vals[e.target] ^ (full if e.inverted else 0)) & full
            for e in network.outputs]


def evaluate(network: LogicNetwork, assignment) -> list[int]:
    """Evaluate all outputs for one PI assignment (sequence of 0/1 bits)."""
    assignment = list(assignment)
    if len(assignment) != network.num_pis:
        raise NetlistError("assignment has %d bits, network has %d PIs"
                           % (len(assignment), network.num_pis))
    return evaluate_masks(network, assignment, 1)


def pi_patterns(num_pis: int) -> list[int]:
    """Standard exhaustive input masks: bit k of pattern i is bit i of k."""
    n_vec = 1 << num_pis
    pats = []
    for i in range(num_pis):
        block = (1 << (1 << i)) - 1
        pat = 0
        period = 1 << (i + 1)
        for start in range(1 << i, n_vec, period):
            pat |= block << start
        pats.append(pat)
    return pats


def truth_table(network: LogicNetwork, max_pis: int = 16) -> list[list[int]]:
    """Exhaustive truth table, one bit list of length 2^num_pis per output."""
    k = network.num_pis
    if k > max_pis:
        raise NetlistError(
            "truth_table refused: %d PIs exceeds the %d-PI bound; "
            "use randomized checking (verifier.check_equivalence random mode)"
            % (k, max_pis))
    n_vec = 1 << k
    full = (1 << n_vec) - 1
    masks = evaluate_masks(network, pi_patterns(k), full)
    return [[(m >> v) & 1 for v in range(n_vec)] for m in masks]


def truth_table_ints(network: LogicNetwork, max_pis: int = 16) -> list[int]:
    """Truth tables as packed integers (bit k = value under assignment k)."""
    k = network.num_pis
    if k > max_pis:
        raise NetlistError("too many PIs for exhaustive table: %d" % k)
    full = (1 << (1 << k)) - 1
    return evaluate_masks(network, pi_patterns(k), full)


# -- AIG <-> MIG -----------------------------------------------------------

def aig_to_mig(network: LogicNetwork) -> LogicNetwork:
    """Rewrite every AND(a, b) as MAJ(a, b, 0); functions are unchanged."""
    if network.kind != "aig":
        raise NetlistError("aig_to_mig expects an AIG")
    mig = LogicNetwork(kind="mig")
    remap: dict[int, int] = {}
    const_id = None
    for i, n in enumerate(network.nodes):
        if n.kind == PI:
            remap[i] = mig.add_pi(n.name)
        elif n.kind == CONST0:
            if const_id is None:
                const_id = mig.add_const0()
            remap[i] = const_id
    if const_id is None and any(n.kind == AND for n in network.nodes):
        const_id = mig.add_const0()
    for i, n in enumerate(network.nodes):
        if n.kind == AND:
            a, b = n.fanins
            remap[i] = mig.add_node(MAJ, (
                Edge(remap[a.target], a.inverted),
                Edge(remap[b.target], b.inverted),
                Edge(const_id, False),
            ), name=n.name)
    for e, name in zip(network.outputs, network.output_names):
        mig.add_output(Edge(remap[e.target], e.inverted), name)
    return mig


# -- MIG normalization -------------------------------------------------------

def normalize_mig(network: LogicNetwork) -> LogicNetwork:
    """Reshape a MIG into per-output trees with canonical fanin polarity.

    Two rewrites are applied, both function-preserving:

    * every internal node is replicated until it has a single reference
      (primary inputs and constants are shared freely);
    * complements are pushed with the majority self-duality
      ``not M(a,b,c) == M(not a, not b, not c)`` so that each node carries
      exactly one complemented fanin edge whenever the identity permits it.

    Exactly-one is not always reachable: a node whose fanins are all plain
    primary inputs (``M(a,b,c)``) has no internal edge to flip and no node
    can emit the complement of a raw PI.  Such nodes keep zero (or, with
    several complemented PI fanins, more than one) marked edges; the
    guarantee that always holds is *at most one complemented edge to an
    internal node*, which is what the depth-bounded mapper relies on.
    """
    if network.kind != "mig":
        raise NetlistError("normalize_mig expects a MIG")
    out = LogicNetwork(kind="mig")
    pi_map: dict[int, int] = {}
    const_id = None
    for i, n in enumerate(network.nodes):
        if n.kind == PI:
            pi_map[i] = out.add_pi(n.name)

    def leaf(nid):
        nonlocal const_id
        if network.nodes[nid].kind == PI:
            return pi_map[nid]
        if const_id is None:
            const_id = out.add_const0()
        return const_id

    def build(nid: int, flipped: bool) -> int:
        """Emit a fresh tree computing node ``nid`` (complemented if asked)."""
        node = network.nodes[nid]
        fanins = [Edge(e.target, e.inverted ^ flipped) for e in node.fanins]
        internal = [j for j, e in enumerate(fanins)
                    if network.nodes[e.target].kind == MAJ]
        n_pi_inv = sum(1 for j, e in enumerate(fanins)
                       if j not in internal and e.inverted)
        # Choose edge polarities: internal edges are free (the child absorbs
        # a flip), PI/const edges are fixed.  Target exactly one inverted.
        want_inv = set()
        if n_pi_inv == 0 and internal:
            want_inv.add(min(internal, key=lambda j: fanins[j].target))
        new_fanins = []
        for j, e in enumerate(fanins):
            if j in internal:
                inv = j in want_inv
                child = build(e.target, e.inverted ^ inv)
                new_fanins.append(Edge(child, inv))
            else:
                new_fanins.append(Edge(leaf(e.target), e.inverted))
        return out.add_node(MAJ, new_fanins, name=node.name)

    for e, name in zip(network.outputs, network.output_names):
        if network.nodes[e.target].kind == MAJ:
            root = build(e.target, e.inverted)
            out.add_output(Edge(root, False), name)
        else:
            out.add_output(Edge(leaf(e.target), e.inverted), name)
    return out


def structurally_equal(a: LogicNetwork, b: LogicNetwork) -> bool:
    """Same shape up to node names: kinds, fanin edges and outputs match."""
    if a.kind != b.kind or len(a.nodes) != len(b.nodes):
        return False
    for na, nb in zip(a.nodes, b.nodes):
        if na.kind != nb.kind or na.fanins != nb.fanins:
            return False
    return a.outputs == b.outputs


# -- ASCII AIGER -------------------------------------------------------------

def parse_aiger(text: str) -> LogicNetwork:
    """Read a combinational ASCII AIGER ("aag") document.

    Latches are rejected; constant literals 0/1 are supported.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty document")
    header = lines[0].split()
    if not header or header[0] != "aag":
        raise ParseError("expected 'aag' header", line=1)
    try:
        counts = [int(t) for t in header[1:]]
    except ValueError:
        raise ParseError("malformed header %r" % lines[0], line=1)
    if len(counts) < 5:
        raise ParseError("header needs M I L O A", line=1)
    m, n_in, n_latch, n_out, n_and = counts[:5]
    if n_latch > 0:
        raise ParseError("latches are not supported (combinational only)", line=1)
    if len(counts) > 5 and any(c != 0 for c in counts[5:]):
        raise ParseError("bad-state/constraint/justice/fairness sections "
                         "are not supported", line=1)

    net = LogicNetwork(kind="aig")
    var_node: dict[int, int] = {}
    for i in range(n_in):
        var_node[i + 1] = net.add_pi("i%d" % i)
    const_id = None

    def lit_edge(lit: int, lineno: int) -> Edge:
        nonlocal const_id
        var, inv = lit >> 1, bool(lit & 1)
        if var == 0:
            if const_id is None:
                const_id = net.add_const0()
            return Edge(const_id, inv)
        if var not in var_node:
            raise ParseError("dangling literal %d" % lit, line=lineno)
        return Edge(var_node[var], inv)

    idx = 1

    def next_line(what):
        nonlocal idx
        if idx >= len(lines):
            raise ParseError("unexpected end of file, expected %s" % what,
                             line=len(lines))
        s = lines[idx]
        idx += 1
        return s, idx

    input_lits = []
    for _ in range(n_in):
        s, ln = next_line("input literal")
        try:
            lit = int(s.split()[0])
        except (ValueError, IndexError):
            raise ParseError("malformed input line %r" % s, line=ln)
        if lit & 1 or lit == 0:
            raise ParseError("input literal %d is not a positive even literal"
                             % lit, line=ln)
        input_lits.append(lit)
    if sorted(l >> 1 for l in input_lits) != list(range(1, n_in + 1)):
        raise ParseError("input variables must be 1..%d" % n_in, line=idx)

    output_lits = []
    for _ in range(n_out):
        s, ln = next_line("output literal")
        try:
            output_lits.append((int(s.split()[0]), ln))
        except (ValueError, IndexError):
            raise ParseError("malformed output line %r" % s, line=ln)

    and_rows = []
    for _ in range(n_and):
        s, ln = next_line("and gate")
        parts = s.split()
        if len(parts) != 3:
            raise ParseError("and line needs three literals: %r" % s, line=ln)
        try:
            lhs, r0, r1 = (int(p) for p in parts)
        except ValueError:
            raise ParseError("malformed and line %r" % s, line=ln)
        if lhs & 1 or lhs >> 1 <= n_in:
            raise ParseError("bad and lhs literal %d" % lhs, line=ln)
        and_rows.append((lhs, r0, r1, ln))

    # AIGER allows ands in any order as long as definitions are acyclic;
    # resolve by repeated passes so forward references within the section work.
    pending = list(and_rows)
    while pending:
        progressed = False
        remaining = []
        for lhs, r0, r1, ln in pending:
            if (r0 >> 1) in var_node or (r0 >> 1) == 0:
                if (r1 >> 1) in var_node or (r1 >> 1) == 0:
                    e0 = lit_edge(r0, ln)
                    e1 = lit_edge(r1, ln)
                    var_node[lhs >> 1] = net.add_node(AND, (e0, e1))
                    progressed = True
                    continue
            remaining.append((lhs, r0, r1, ln))
        if not progressed:
            raise ParseError("dangling literal %d" % remaining[0][1],
                             line=remaining[0][3])
        pending = remaining

    out_names = {}
    for s in lines[idx:]:
        if s.startswith("c"):
            break
        parts = s.split(None, 1)
        if len(parts) == 2 and parts[0][:1] in ("i", "o") and parts[0][1:].isdigit():
            pos = int(parts[0][1:])
            if parts[0][0] == "i" and pos < n_in:
                net.nodes[net.pis[pos]].name = parts[1]
            elif parts[0][0] == "o":
                out_names[pos] = parts[1]

    for pos, (lit, ln) in enumerate(output_lits):
        net.add_output(lit_edge(lit, ln), out_names.get(pos, "o%d" % pos))
    net.validate()
    return net


def serialize_aig(network: LogicNetwork) -> str:
    """Write an AIG back to ASCII AIGER."""
    if network.kind != "aig":
        raise NetlistError("serialize_aig expects an AIG")
    pis = network.pis
    var_of: dict[int, int] = {nid: i + 1 for i, nid in enumerate(pis)}
    ands = [i for i, n in enumerate(network.nodes) if n.kind == AND]
    for j, nid in enumerate(ands):
        var_of[nid] = len(pis) + 1 + j

    def lit(e: Edge) -> int:
        node = network.nodes[e.target]
        if node.kind == CONST0:
            return 1 if e.inverted else 0
        return var_of[e.target] * 2 + (1 if e.inverted else 0)

    m = len(pis) + len(ands)
    out = ["aag %d %d 0 %d %d" % (m, len(pis), len(network.outputs), len(ands))]
    for nid in pis:
        out.append(str(var_of[nid] * 2))
    for e in network.outputs:
        out.append(str(lit(e)))
    for nid in ands:
        f = network.nodes[nid].fanins
        out.append("%d %d %d" % (var_of[nid] * 2, lit(f[0]), lit(f[1])))
    for i, nid in enumerate(pis):
        if network.nodes[nid].name:
            out.append("i%d %s" % (i, network.nodes[nid].name))
    for i, name in enumerate(network.output_names):
        if name:
            out.append("o%d %s" % (i, name))
    return "\n".join(out) + "\n"


# -- textual MIG format ------------------------------------------------------
#
# One node per line:
#   pi <id> <name>
#   const0 <id>
#   node <id> = MAJ(<lit>,<lit>,<lit>)     with <lit> = <id> or !<id>
#   po <lit> [<name>]
# '#' starts a comment.  Ids must be declared before use (forward references
# are rejected) and arity is exactly three.

def parse_mig(text: str) -> LogicNetwork:
    net = LogicNetwork(kind="mig")
    id_map: dict[int, int] = {}

    def parse_lit(tok: str, ln: int) -> Edge:
        tok = tok.strip()
        inv = tok.startswith("!")
        if inv:
            tok = tok[1:]
        if not tok.isdigit():
            raise ParseError("bad literal %r" % tok, line=ln)
        ext = int(tok)
        if ext not in id_map:
            raise ParseError("forward or unknown reference to id %d" % ext,
                             line=ln)
        return Edge(id_map[ext], inv)

    for ln, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        parts = s.split()
        if parts[0] == "pi":
            if len(parts) < 2 or not parts[1].isdigit():
                raise ParseError("pi line needs an id", line=ln)
            ext = int(parts[1])
            if ext in id_map:
                raise ParseError("duplicate id %d" % ext, line=ln)
            name = parts[2] if len(parts) > 2 else None
            id_map[ext] = net.add_pi(name)
        elif parts[0] == "const0":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("const0 line needs an id", line=ln)
            ext = int(parts[1])
            if ext in id_map:
                raise ParseError("duplicate id %d" % ext, line=ln)
            id_map[ext] = net.add_const0()
        elif parts[0] == "node":
            body = s[len("node"):].strip()
            if "=" not in body:
                raise ParseError("node line needs '='", line=ln)
            left, right = body.split("=", 1)
            if not left.strip().isdigit():
                raise ParseError("bad node id %r" % left.strip(), line=ln)
            ext = int(left.strip())
            if ext in id_map:
                raise ParseError("duplicate id %d" % ext, line=ln)
            right = right.strip()
            if not (right.startswith("MAJ(") and right.endswith(")")):
                raise ParseError("expected MAJ(...)", line=ln)
            lits = right[4:-1].split(",")
            if len(lits) != 3:
                raise ParseError("MAJ takes exactly three fanins, got %d"
                                 % len(lits), line=ln)
            fanins = tuple(parse_lit(t, ln) for t in lits)
            id_map[ext] = net.add_node(MAJ, fanins)
        elif parts[0] == "po":
            if len(parts) < 2:
                raise ParseError("po line needs a literal", line=ln)
            edge = parse_lit(parts[1], ln)
            name = parts[2] if len(parts) > 2 else None
            net.add_output(edge, name)
        else:
            raise ParseError("unknown directive %r" % parts[0], line=ln)
    net.validate()
    return net


def serialize_mig(network: LogicNetwork) -> str:
    if network.kind != "mig":
        raise NetlistError("serialize_mig expects a MIG")
    out = []

    def lit(e: Edge) -> str:
        return ("!" if e.inverted else "") + str(e.target)

    for i, n in enumerate(network.nodes):
        if n.kind == PI:
            out.append("pi %d %s" % (i, n.name or "x%d" % i))
        elif n.kind == CONST0:
            out.append("const0 %d" % i)
        else:
            out.append("node %d = MAJ(%s,%s,%s)" % (
                i, lit(n.fanins[0]), lit(n.fanins[1]), lit(n.fanins[2])))
    for e, name in zip(network.outputs, network.output_names):
        out.append("po %s %s" % (lit(e), name))
    return "\n".join(out) + "\n"


# -- random networks (used by tests and the bench corpus) --------------------

def random_aig(num_pis: int, num_ands: int, seed: int = 0,
               num_outputs: int = 1) -> LogicNetwork:
    rng = random.Random(seed)
    net = LogicNetwork(kind="aig")
    for i in range(num_pis):
        net.add_pi("i%d" % i)
    for _ in range(num_ands):
        hi = len(net.nodes)
        a = rng.randrange(hi)
        b = rng.randrange(hi)
        net.add_node(AND, (Edge(a, rng.random() < 0.5),
                           Edge(b, rng.random() < 0.5)))
    for i in range(num_outputs):
        net.add_output(Edge(len(net.nodes) - 1 - i % max(1, num_ands),
                            rng.random() < 0.5), "o%d" % i)
    return net


def random_mig(num_pis: int, num_nodes: int, seed: int = 0,
               num_outputs: int = 1) -> LogicNetwork:
    rng = random.Random(seed)
    net = LogicNetwork(kind="mig")
    for i in range(num_pis):
        net.add_pi("x%d" % i)
    for _ in range(num_nodes):
        hi = len(net.nodes)
        picks = [rng.randrange(hi) for _ in range(3)]
        net.add_node(MAJ, tuple(Edge(p, rng.random() < 0.5) for p in picks))
    for i in range(num_outputs):
        net.add_output(Edge(len(net.nodes) - 1 - i % max(1, num_nodes),
                            rng.random() < 0.5), "o%d" % i)
    return net
