"""Area-constrained mapping flow.

The crossbar is split into a working area of three wordlines (rows 0..2,
called e0/e1/e2 below) and storage rows for intermediate LUT results.  Each
LUT of the cover is scheduled onto a storage device, its function is
expanded to an ESOP and computed cube-by-cube on e2, the cube results are
folded with an XOR reduction tree, and the value is written back to the
scheduled device.

Machine idioms used throughout (device update is M3(Z, wl, not bl)):

    load complement   Z=0, wl=1, bitline x   ->  not x
    AND a literal     wl=0, bitline x        ->  Z and not x
    OR a literal      wl=1, bitline x        ->  Z or not x
    reset             wl=0, bitline 1        ->  0

so the bitline always carries the *complement* of the value contributed to
the majority.  Whenever a wire of the wrong polarity is needed it is staged
through a spare device on e0 first.  All bitline wires of one Apply must
come from a single source (the input register or one read-out word); wires
from different words force separate instructions.

Storage convention: a finished LUT value is written back in complemented
form (one instruction, and positive literals of it can then be applied
directly), except for LUTs that drive primary outputs, which are stored
positively so the declared result locations hold the output values as-is.

The same working-area machinery implements the depth-bounded mapper
(``map_minimal``): a single-output fanout-free MIG of depth k is evaluated
with at most 2(k+1) devices on a two-bitline crossbar, one operand row per
tree level plus an inverter/host row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .esop import Cube, EsopCover, extract_esop
from .isa import (SLOT_CONST0, SLOT_CONST1, SRC_DMR, SRC_PIR, ApplyInstr,
                  BitlinePair, CrossbarConfig, Program, ReadInstr,
                  WordlineSelect, WsMode)
from .lutmap import (LUT_REF, PI_REF, LutGraph, cover_klut, min_dev,
                     storage_capacity)
from .netlist import CONST0, MAJ, LogicNetwork, NetlistError, levels
from .reports import MappingReport

E0, E1, E2 = 0, 1, 2  # working rows: staging, xor scratch, accumulators


class InfeasibleMapping(RuntimeError):
    def __init__(self, needed, capacity):
        super().__init__("needs %d storage devices but the crossbar offers %d"
                         % (needed, capacity))
        self.needed = needed
        self.capacity = capacity


# -- instruction emission -------------------------------------------------------

class ProgramBuilder:
    """Accumulates instructions, PIR slot schedules and result locations.

    Tracks which word the data register currently mirrors so redundant
    readouts are skipped; a write to the mirrored word forces a re-read.
    """

    def __init__(self, config: CrossbarConfig, num_pis: int):
        self.config = config
        self.num_pis = num_pis
        self.instructions = []
        self.pir_schedule = {}
        self.result_locations = {}
        self.touched = set()
        self.maj_applies = 0
        self._dmr_word = None  # word a Read would be redundant for
        self._dmr_loaded = False

    @property
    def i_read(self):
        return sum(1 for i in self.instructions if isinstance(i, ReadInstr))

    @property
    def i_apply(self):
        return len(self.instructions) - self.i_read

    def read(self, w: int):
        if self._dmr_word == w:
            return
        self.instructions.append(ReadInstr(w))
        self._dmr_word = w
        self._dmr_loaded = True

    def _pairs(self, wires: dict[int, int]) -> tuple[BitlinePair, ...]:
        return tuple(BitlinePair(True, wires[j]) if j in wires
                     else BitlinePair(False, 0)
                     for j in range(self.config.w_d))

    def apply_from_dmr(self, w: int, mode: WsMode, wires: dict[int, int],
                       wb: int = 0):
        if not self._dmr_loaded:
            raise RuntimeError("apply from DMR before any readout")
        instr = ApplyInstr(w, SRC_DMR, WordlineSelect(mode, wb),
                           self._pairs(wires))
        self.instructions.append(instr)
        self.touched.update((w, j) for j in wires)
        if w == self._dmr_word:
            self._dmr_word = None

    def apply_from_pir(self, w: int, mode: WsMode, wires: dict[int, int]):
        """Apply with PIR wires given as slot codes (PI index or constant)."""
        slots = [SLOT_CONST0] * self.config.w_d
        position = {}
        wire_vals = {}
        for j in sorted(wires):
            code = wires[j]
            if code not in position:
                if len(position) >= self.config.w_d:
                    raise RuntimeError("more distinct PIR wires than lines")
                position[code] = len(position)
                slots[position[code]] = code
            wire_vals[j] = position[code]
        idx = len(self.instructions)
        instr = ApplyInstr(w, SRC_PIR, WordlineSelect(mode, 0),
                           self._pairs(wire_vals))
        self.instructions.append(instr)
        self.pir_schedule[idx] = tuple(slots)
        self.touched.update((w, j) for j in wires)
        if w == self._dmr_word:
            self._dmr_word = None

    def reset_bits(self, w: int, bits):
        bits = [b for b in bits]
        if bits:
            self.apply_from_pir(w, WsMode.ZERO, {b: SLOT_CONST1 for b in bits})

    def finish(self) -> Program:
        prog = Program(self.config, self.instructions, self.pir_schedule,
                       self.result_locations, self.num_pis)
        prog.validate()
        return prog


# -- operand sources ---------------------------------------------------------------

@dataclass(frozen=True)
class PirVar:
    """Variable streamed on the input register (positive value)."""
    pi: int


@dataclass(frozen=True)
class StoredVar:
    """Variable held in the crossbar, possibly in complemented form."""
    word: int
    bit: int
    inverted: bool = False


VarSource = PirVar | StoredVar


# -- cube computation ----------------------------------------------------------------

def _emit_wire_group(builder, bit_row, targets, fresh):
    """Apply one wire to a set of e2 bitlines, splitting first-literal loads
    (wordline 1) from AND accumulation (wordline 0)."""
    loads = {j: v for j, v in targets.items() if j in fresh}
    ands = {j: v for j, v in targets.items() if j not in fresh}
    if loads:
        builder.apply_from_dmr(bit_row, WsMode.ONE, loads)
        fresh -= set(loads)
    if ands:
        builder.apply_from_dmr(bit_row, WsMode.ZERO, ands)


def compute_cube_batch(builder: ProgramBuilder, cubes: list[Cube],
                       bits: list[int], sources: list[VarSource]):
    """Compute each cube on its e2 bitline; devices must start at zero.

    Variables are handled one at a time, most frequent first.  For each
    variable the wire carrying its complemented contribution is fetched
    either directly (from the PIR for a complemented literal of a streamed
    input, or from the word storing it) or staged through e0.
    """
    fresh = set(bits)
    e2 = E2
    empties = [bits[i] for i, c in enumerate(cubes) if c.num_literals() == 0]
    if empties:
        builder.apply_from_pir(e2, WsMode.ONE,
                               {j: SLOT_CONST0 for j in empties})
        fresh -= set(empties)

    occurrence = {}
    for c in cubes:
        for lit in c.literals():
            occurrence[lit.var] = occurrence.get(lit.var, 0) + 1
    order = sorted(occurrence, key=lambda v: (-occurrence[v], v))

    for var in order:
        src = sources[var]
        # wire value per target bitline: literal v wants the wire to carry
        # not v (the device complements the bitline), literal not-v wants v
        want_comp = {}   # targets whose wire must carry the complement of var
        want_plain = {}  # targets whose wire must carry var itself
        for c, bit in zip(cubes, bits):
            m = 1 << var
            if c.pos & m:
                want_comp[bit] = True
            elif c.neg & m:
                want_plain[bit] = True

        if isinstance(src, PirVar):
            direct, staged = want_plain, want_comp
            if direct:
                loads = {j: src.pi for j in direct if j in fresh}
                ands = {j: src.pi for j in direct if j not in fresh}
                if loads:
                    builder.apply_from_pir(e2, WsMode.ONE, loads)
                    fresh -= set(loads)
                if ands:
                    builder.apply_from_pir(e2, WsMode.ZERO, ands)
            if staged:
                builder.apply_from_pir(E0, WsMode.ONE, {0: src.pi})
                builder.read(E0)
                _emit_wire_group(builder, e2, {j: 0 for j in staged}, fresh)
                builder.reset_bits(E0, [0])
        else:
            stored_is_comp = src.inverted
            direct = want_comp if stored_is_comp else want_plain
            staged = want_plain if stored_is_comp else want_comp
            if direct or staged:
                builder.read(src.word)
            if direct:
                _emit_wire_group(builder, e2, {j: src.bit for j in direct},
                                 fresh)
            if staged:
                builder.read(src.word)
                builder.apply_from_dmr(E0, WsMode.ONE, {0: src.bit})
                builder.read(E0)
                _emit_wire_group(builder, e2, {j: 0 for j in staged}, fresh)
                builder.reset_bits(E0, [0])


def xor_reduction_round(builder: ProgramBuilder, pairs: list[tuple[int, int]]):
    """Fold pairs of e2 values in parallel: (lo, hi) -> lo xor hi at lo.

    Uses x1 xor x2 = x1.not(x2) + not(x1 + not(x2)) with the AND formed in
    place on e2 and the OR on a scratch device of e1; pairs of the same
    round share every instruction.
    """
    if not pairs:
        return
    los = [lo for lo, _ in pairs]
    builder.read(E2)
    builder.apply_from_dmr(E0, WsMode.ONE, {lo: lo for lo in los})
    builder.read(E0)
    builder.apply_from_dmr(E1, WsMode.ONE, {lo: lo for lo in los})
    builder.read(E2)
    builder.apply_from_dmr(E2, WsMode.ZERO, {lo: hi for lo, hi in pairs})
    builder.apply_from_dmr(E1, WsMode.ONE, {lo: hi for lo, hi in pairs})
    builder.read(E1)
    builder.apply_from_dmr(E2, WsMode.ONE, {lo: lo for lo in los})
    builder.reset_bits(E0, los)
    builder.reset_bits(E1, los)
    builder.reset_bits(E2, [hi for _, hi in pairs])


def xor_reduce(builder: ProgramBuilder, bits: list[int]) -> int:
    """XOR-reduction tree over e2 bit positions; returns the surviving bit."""
    live = sorted(bits)
    while len(live) > 1:
        pairs = [(live[i], live[i + 1]) for i in range(0, len(live) - 1, 2)]
        xor_reduction_round(builder, pairs)
        survivors = [lo for lo, _ in pairs]
        if len(live) % 2:
            survivors.append(live[-1])
        live = sorted(survivors)
    return live[0]


def compute_esop(builder: ProgramBuilder, cover: EsopCover,
                 sources: list[VarSource]) -> int:
    """Compute a whole cover on the working area, batching cubes when the
    cover is wider than the bitlines; returns the e2 bit holding the value.

    The running XOR of finished batches stays parked on its device while the
    next batch of cubes is computed on the remaining bitlines.
    """
    w_d = builder.config.w_d
    if not cover.cubes:
        return 0  # constant 0: a reset device already holds it
    result_bit = None
    pos = 0
    while pos < len(cover.cubes):
        avail = [b for b in range(w_d) if b != result_bit]
        batch = cover.cubes[pos:pos + len(avail)]
        bits = avail[:len(batch)]
        compute_cube_batch(builder, batch, bits, sources)
        batch_bit = xor_reduce(builder, bits)
        if result_bit is None:
            result_bit = batch_bit
        else:
            lo, hi = sorted((result_bit, batch_bit))
            xor_reduction_round(builder, [(lo, hi)])
            result_bit = lo
        pos += len(batch)
    return result_bit


def write_back(builder: ProgramBuilder, result_bit: int, word: int, bit: int,
               store_inverted: bool):
    """Move the e2 result into a (reset) storage device and clear e2.

    A single bitline write stores the complement; a positive store goes
    through one extra staging device on e0.
    """
    builder.read(E2)
    if store_inverted:
        builder.apply_from_dmr(word, WsMode.ONE, {bit: result_bit})
    else:
        builder.apply_from_dmr(E0, WsMode.ONE, {0: result_bit})
        builder.read(E0)
        builder.apply_from_dmr(word, WsMode.ONE, {bit: 0})
        builder.reset_bits(E0, [0])
    builder.reset_bits(E2, [result_bit])


# -- standalone entry points used by tests and the verifier ---------------------

def gen_cube_program(cover: EsopCover, sources: list[VarSource],
                     config: CrossbarConfig):
    """Instructions computing the cover's cubes on e2 (no reduction)."""
    if len(cover.cubes) > config.w_d:
        raise ValueError("batch wider than the bitline count; use "
                         "gen_esop_program for iterated covers")
    builder = ProgramBuilder(config, _num_pir_vars(sources))
    compute_cube_batch(builder, cover.cubes, list(range(len(cover.cubes))),
                       sources)
    return builder


def gen_xor_reduction(bits: list[int], config: CrossbarConfig,
                      num_pis: int = 0):
    builder = ProgramBuilder(config, num_pis)
    result = xor_reduce(builder, bits)
    return builder, result


def gen_esop_program(cover: EsopCover, config: CrossbarConfig,
                     sources: list[VarSource] | None = None
                     ) -> tuple[Program, int]:
    """Whole-cover program on a crossbar with three working rows.

    Works for any geometry with at least three wordlines and two bitlines.
    Default sources stream every variable from the input register.
    """
    if config.s_d < 3:
        raise ValueError("the working area needs three wordlines")
    if sources is None:
        sources = [PirVar(v) for v in range(cover.arity)]
    builder = ProgramBuilder(config, _num_pir_vars(sources))
    bit = compute_esop(builder, cover, sources)
    builder.result_locations["f"] = (E2, bit)
    return builder.finish(), bit


def _num_pir_vars(sources) -> int:
    return 1 + max((s.pi for s in sources if isinstance(s, PirVar)),
                   default=-1)


# -- LUT scheduling ---------------------------------------------------------------

@dataclass
class LutSchedule:
    placements: dict[int, tuple[int, int]] = field(default_factory=dict)
    # ordered events: ("reset", word, [(bit, lut_id), ...]) and
    # ("place", lut_id, word, bit)
    events: list = field(default_factory=list)


def schedule_luts(graph: LutGraph, s_d: int, w_d: int) -> LutSchedule:
    """Assign every LUT a storage device in level order.

    Allocation is best-fit: the fullest wordline that still fits the level's
    remaining nodes wins, otherwise the emptiest wordlines are filled one
    after another.  When nothing is free, the wordline with the most dirty
    devices (values whose consumers are all scheduled) is recycled.  Output
    values are never recycled.
    """
    capacity = storage_capacity(s_d, w_d)
    need = min_dev(graph)
    if need > capacity:
        raise InfeasibleMapping(need, capacity)

    storage_rows = list(range(3, s_d))
    free = {w: set(range(w_d)) for w in storage_rows}
    occupant: dict[tuple[int, int], int] = {}
    dirty: set[tuple[int, int]] = set()

    succs: dict[int, set[int]] = {l.id: set() for l in graph.luts}
    for lut in graph.luts:
        for kind, ref in lut.inputs:
            if kind == LUT_REF:
                succs[ref].add(lut.id)
    pinned = set(graph.outputs)  # result devices stay live forever

    sched = LutSchedule()
    scheduled: set[int] = set()

    def place(lut_id: int, w: int):
        b = min(free[w])
        free[w].remove(b)
        occupant[(w, b)] = lut_id
        sched.placements[lut_id] = (w, b)
        sched.events.append(("place", lut_id, w, b))
        scheduled.add(lut_id)
        # inputs whose consumers are now all scheduled become recyclable
        lut = graph.luts[lut_id]
        for kind, ref in lut.inputs:
            if kind == LUT_REF and ref not in pinned:
                if succs[ref] <= scheduled and ref in sched.placements:
                    dirty.add(sched.placements[ref])

    def recycle():
        counts = {w: sum(1 for (rw, _) in dirty if rw == w)
                  for w in storage_rows}
        w = max(storage_rows, key=lambda r: (counts[r], r))
        if counts[w] == 0:
            raise InfeasibleMapping(need, capacity)
        victims = sorted(b for (rw, b) in dirty if rw == w)
        sched.events.append(("reset", w,
                             [(b, occupant[(w, b)]) for b in victims]))
        for b in victims:
            dirty.discard((w, b))
            del occupant[(w, b)]
            free[w].add(b)

    if not graph.luts:
        return sched
    l_max = max(l.level for l in graph.luts)
    for lv in range(1, l_max + 1):
        todo = sorted(l.id for l in graph.luts if l.level == lv)
        while todo:
            fits = [w for w in storage_rows if len(free[w]) >= len(todo)]
            if fits:
                w = min(fits, key=lambda r: (len(free[r]), -r))
                for lut_id in todo:
                    place(lut_id, w)
                todo = []
                continue
            w = max(storage_rows, key=lambda r: (len(free[r]), r))
            if not free[w]:
                recycle()
                continue
            room = len(free[w])
            for lut_id in todo[:room]:
                place(lut_id, w)
            todo = todo[room:]
    return sched


# -- area flow ----------------------------------------------------------------------

def map_area(network: LogicNetwork, k: int, s_d: int, w_d: int
             ) -> tuple[Program, MappingReport]:
    """Full area-constrained pipeline: cover, schedule, compute, verify-ready.

    Raises :class:`InfeasibleMapping` when the cover's device demand exceeds
    the storage capacity of the requested crossbar.
    """
    graph = cover_klut(network, k)
    return map_lut_graph(graph, s_d, w_d)


def map_lut_graph(graph: LutGraph, s_d: int, w_d: int
                  ) -> tuple[Program, MappingReport]:
    sched = schedule_luts(graph, s_d, w_d)
    config = CrossbarConfig(s_d, w_d)
    builder = ProgramBuilder(config, graph.num_pis)
    is_output = set(graph.outputs)

    for event in sched.events:
        if event[0] == "reset":
            _, w, victims = event
            builder.reset_bits(w, [b for b, _ in victims])
            continue
        _, lut_id, w, b = event
        lut = graph.luts[lut_id]
        sources = []
        for kind, ref in lut.inputs:
            if kind == PI_REF:
                sources.append(PirVar(ref))
            else:
                rw, rb = sched.placements[ref]
                sources.append(StoredVar(rw, rb,
                                         inverted=ref not in is_output))
        cover = extract_esop(lut.tt, len(lut.inputs))
        bit = compute_esop(builder, cover, sources)
        write_back(builder, bit, w, b, store_inverted=lut_id not in is_output)

    for lut_id, name in zip(graph.outputs, graph.output_names):
        builder.result_locations[name] = sched.placements[lut_id]
    program = builder.finish()
    report = MappingReport(
        flow="area",
        num_pis=graph.num_pis,
        n_lut=len(graph.luts),
        levels=max((l.level for l in graph.luts), default=0),
        min_dev=min_dev(graph),
        s_d=s_d, w_d=w_d,
        i_apply=builder.i_apply, i_read=builder.i_read,
        i_total=len(program.instructions),
        cycles=len(program.instructions) + 2,
    )
    return program, report


# -- depth-bounded minimal-device mapper ----------------------------------------------

def map_minimal(mig: LogicNetwork) -> tuple[Program, MappingReport]:
    """Map a normalized single-output MIG with at most 2(depth+1) devices.

    The network must be a fanout-free tree (see ``normalize_mig``) with a
    single output.  Row 0 holds the inverter device at bitline 0 and the
    final host at bitline 1; each tree level gets one operand row where its
    wordline/bitline inputs wait to be read out and applied to the host.
    """
    if mig.kind != "mig":
        raise NetlistError("map_minimal expects a MIG")
    if len(mig.outputs) != 1:
        raise NetlistError("map_minimal maps single-output networks")
    refs = [0] * len(mig.nodes)
    for n in mig.nodes:
        for e in n.fanins:
            refs[e.target] += 1
    for e in mig.outputs:
        refs[e.target] += 1
    for i, n in enumerate(mig.nodes):
        if n.kind == MAJ and refs[i] > 1:
            raise NetlistError("map_minimal needs a fanout-free MIG; "
                               "run normalize_mig first")

    lv = levels(mig)
    out_edge = mig.outputs[0]
    k = lv[out_edge.target]
    config = CrossbarConfig(max(1, k + 1), 2)
    builder = ProgramBuilder(config, mig.num_pis)
    pi_line = {nid: i for i, nid in enumerate(mig.pis)}
    INVERTER = (0, 0)

    def load_leaf(nid: int, negated: bool, word: int, bit: int):
        """Store a PI or constant (possibly complemented) into a reset device."""
        node = mig.nodes[nid]
        if node.kind == CONST0:
            if negated:
                builder.apply_from_pir(word, WsMode.ONE, {bit: SLOT_CONST0})
            return
        line = pi_line[nid]
        if negated:
            builder.apply_from_pir(word, WsMode.ONE, {bit: line})
        else:
            builder.apply_from_pir(INVERTER[0], WsMode.ONE,
                                   {INVERTER[1]: line})
            builder.read(INVERTER[0])
            builder.apply_from_dmr(word, WsMode.ONE, {bit: INVERTER[1]})
            builder.reset_bits(INVERTER[0], [INVERTER[1]])

    def pick_roles(node):
        """Split the three fanins into bitline / wordline / host roles.

        The bitline role stores the complement of its effective value (the
        device update re-complements it).  A complemented edge to an
        internal node must take the bitline so the stored value is the
        child's plain result; otherwise any PI or constant fanin works since
        leaves load in either polarity.
        """
        fanins = list(node.fanins)
        internal = [e for e in fanins
                    if mig.nodes[e.target].kind == MAJ]
        inv_internal = [e for e in internal if e.inverted]
        if len(inv_internal) > 1:
            raise NetlistError("more than one complemented internal fanin; "
                               "run normalize_mig first")
        if inv_internal:
            bl = inv_internal[0]
        else:
            leaves = [e for e in fanins if mig.nodes[e.target].kind != MAJ]
            if not leaves:
                raise NetlistError("all-internal node without a complemented "
                                   "fanin; run normalize_mig first")
            plain = [e for e in leaves if not e.inverted]
            bl = min(plain or leaves, key=lambda e: e.target)
        rest = list(fanins)
        rest.remove(bl)
        rest.sort(key=lambda e: (lv[e.target], e.target))
        wl, host = rest[0], rest[1]
        return bl, wl, host

    def store_operand(edge, negate_store: bool, word: int, bit: int):
        """Place ``edge``'s effective value (or its complement) at a device."""
        node = mig.nodes[edge.target]
        if node.kind != MAJ:
            load_leaf(edge.target, edge.inverted ^ negate_store, word, bit)
            return
        if edge.inverted ^ negate_store:
            raise NetlistError("internal operand needed in complemented form")
        compute(edge.target, word, bit)

    def compute(nid: int, word: int, bit: int):
        """Evaluate the subtree under ``nid`` leaving its value at a device."""
        node = mig.nodes[nid]
        bl, wl, host = pick_roles(node)
        row = lv[nid]  # operand row for this level
        store_operand(wl, False, row, 1)
        store_operand(bl, True, row, 0)   # bitline stores the complement
        store_operand(host, False, word, bit)
        builder.read(row)
        builder.apply_from_dmr(word, WsMode.FROM_SOURCE, {bit: 0}, wb=1)
        builder.maj_applies += 1
        builder.reset_bits(row, [0, 1])

    out_name = mig.output_names[0]
    target = (0, 1)
    root = mig.nodes[out_edge.target]
    if root.kind != MAJ:
        load_leaf(out_edge.target, out_edge.inverted, *target)
        builder.result_locations[out_name] = target
    else:
        compute(out_edge.target, *target)
        if out_edge.inverted:
            builder.read(0)
            builder.apply_from_dmr(INVERTER[0], WsMode.ONE, {INVERTER[1]: 1})
            builder.result_locations[out_name] = INVERTER
        else:
            builder.result_locations[out_name] = target

    program = builder.finish()
    n_maj = sum(1 for n in mig.nodes if n.kind == MAJ)
    report = MappingReport(
        flow="minimal",
        num_pis=mig.num_pis,
        n_maj=n_maj,
        levels=k,
        s_d=config.s_d, w_d=2,
        i_apply=builder.i_apply, i_read=builder.i_read,
        i_total=len(program.instructions),
        cycles=len(program.instructions) + 2,
        devices_used=len(builder.touched),
        device_bound=2 * (k + 1),
    )
    return program, report
