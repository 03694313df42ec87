"""Depth-bounded mapping: a k-level majority tree on 2(k+1) devices.

Normalization first reshapes the graph into per-output trees and pushes
complements with the majority self-duality so that (wherever the leaf
pattern allows) each node carries exactly one complemented fanin.  The
mapper then evaluates the tree on a two-bitline crossbar: one operand row
per level, the device at (0,0) doubling as the input inverter, and the
output accumulating at (0,1).
"""

import random

from revamp.areamap import map_minimal
from revamp.netlist import MAJ, Edge, LogicNetwork, normalize_mig
from revamp.verifier import check_equivalence


def random_tree(depth, num_pis, seed):
    rng = random.Random(seed)
    net = LogicNetwork(kind="mig")
    pis = [net.add_pi("x%d" % i) for i in range(num_pis)]

    def build(d):
        if d == 0:
            return Edge(rng.choice(pis), rng.random() < 0.5)
        kids = tuple(build(d - 1) for _ in range(3))
        return Edge(net.add_node(MAJ, kids), rng.random() < 0.3)

    net.add_output(build(depth), "f")
    return net


print("depth  devices  bound  instructions  cycles  equivalent")
for depth in range(1, 7):
    mig = normalize_mig(random_tree(depth, num_pis=4, seed=depth))
    program, report = map_minimal(mig)
    ok = check_equivalence(mig, program).ok
    print("%5d  %7d  %5d  %12d  %6d  %s"
          % (depth, report.devices_used, report.device_bound,
             report.i_total, report.cycles, ok))

print()
print("the crossbar for a depth-k tree has k+1 rows and two bitlines;")
print("every mapping above stays within the 2(k+1) device bound.")
