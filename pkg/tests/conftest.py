"""Shared golden fixtures: the hand-assembled two-bit XOR program and the
five-input reference MIG used across the mapping tests."""

from revamp.circuits import two_bit_xor_program  # noqa: F401  (re-export)
from revamp.netlist import MAJ, Edge, LogicNetwork


def example_mig() -> LogicNetwork:
    """Five-input reference MIG with four majority nodes and output s4.

    s1 = M(a, b, !c); s2 = M(a, b, c); s3 = M(s1, c, !s2);
    s4 = M(s3, d, e).
    """
    net = LogicNetwork(kind="mig")
    a = net.add_pi("a")
    b = net.add_pi("b")
    c = net.add_pi("c")
    d = net.add_pi("d")
    e = net.add_pi("e")
    s1 = net.add_node(MAJ, (Edge(a), Edge(b), Edge(c, True)), name="s1")
    s2 = net.add_node(MAJ, (Edge(a), Edge(b), Edge(c)), name="s2")
    s3 = net.add_node(MAJ, (Edge(s1), Edge(c), Edge(s2, True)), name="s3")
    s4 = net.add_node(MAJ, (Edge(s3), Edge(d), Edge(e)), name="s4")
    net.add_output(Edge(s4), "s4")
    return net
