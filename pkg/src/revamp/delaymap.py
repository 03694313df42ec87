"""Delay-focused mapping flow for majority graphs.

The crossbar width is fixed, the word count is an output.  Four phases:

1. *Role assignment.*  Each internal node picks which parent's device hosts
   its computation and which parents feed the wordline and bitline.  The
   device update is ``M3(Z, wl, not bl)``, so the bitline operand is stored
   as the complement of the value it contributes: a complemented fanin
   stores the parent's plain value, a plain fanin needs a negated copy.
   A parent feeding several nodes of one level becomes their shared
   wordline so the nodes can compute in a single instruction; constant
   fanins take the wordline whenever possible since the instruction can
   drive a literal 0/1 there for free.

2. *Block formation.*  Only one word can be read per cycle, so a node's
   wordline and bitline operands must sit in the same word.  Operand pairs
   open blocks; blocks merge when they share an input value (keeping one
   copy) or when their hosts compute together under a shared wordline
   (keeping both host copies), never beyond the word width.  Negated copies
   of internal values get a single plain instance to be copied from.

3. *Packing.*  Blocks are first-fit packed into words (a classic 2-factor
   approximation of the bin-packing optimum, checked in tests against an
   exact branch-and-bound).

4. *Generation.*  Primary inputs load first: complemented copies write in
   one cycle through the bitlines, plain copies stage through one scratch
   wordline that is reset after each use.  Then levels compute in order,
   nodes sharing a host word, source word and wordline fold into one
   instruction, and negated copies are written at the end of the producing
   level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .areamap import ProgramBuilder
from .isa import SLOT_CONST0, CrossbarConfig, Program, WsMode
from .netlist import CONST0, MAJ, PI, Edge, LogicNetwork, NetlistError, levels
from .reports import MappingReport


@dataclass(frozen=True)
class ValueRef:
    """A node's value, possibly complemented."""
    node: int
    negated: bool = False


@dataclass
class NodeRoles:
    host: Edge
    wl_input: Edge
    bl_input: Edge


def assign_roles(mig: LogicNetwork) -> dict[int, NodeRoles]:
    """Partition every internal node's fanins into host/wordline/bitline.

    Priority: shared or constant parents take the wordline, a complemented
    fanin takes the bitline, the deepest remaining parent hosts (its device
    is overwritten in place).  Ties break toward the lowest node id.
    """
    if mig.kind != "mig":
        raise NetlistError("assign_roles expects a MIG")
    lv = levels(mig)
    # wordline sharing only works when every grouped node sees the parent
    # with the same polarity, so the count is per (parent, level, polarity)
    share_count: dict[tuple[int, int, bool], int] = {}
    for i, n in enumerate(mig.nodes):
        if n.kind != MAJ:
            continue
        for e in n.fanins:
            key = (e.target, lv[i], e.inverted)
            share_count[key] = share_count.get(key, 0) + 1

    roles = {}
    for i, n in enumerate(mig.nodes):
        if n.kind != MAJ:
            continue
        edges = list(n.fanins)

        def take(pred, keyfn):
            picks = [e for e in edges if pred(e)]
            if not picks:
                return None
            e = min(picks, key=keyfn)
            edges.remove(e)
            return e

        # constants take the wordline (the instruction drives a literal 0/1
        # there, costing no device), then parents shared within the level
        wl = take(lambda e: mig.nodes[e.target].kind == CONST0,
                  lambda e: e.target)
        if wl is None:
            wl = take(lambda e: share_count[(e.target, lv[i],
                                             e.inverted)] >= 2,
                      lambda e: -e.target)
        bl = take(lambda e: e.inverted
                  and mig.nodes[e.target].kind != CONST0,
                  lambda e: e.target)
        host = take(lambda e: True, lambda e: (-lv[e.target], e.target))
        if wl is None:
            wl = take(lambda e: True, lambda e: e.target)
        if bl is None:
            bl = edges.pop()
        roles[i] = NodeRoles(host=host, wl_input=wl, bl_input=bl)
    return roles


def wl_value(r: NodeRoles) -> ValueRef:
    return ValueRef(r.wl_input.target, r.wl_input.inverted)


def bl_stored_value(r: NodeRoles) -> ValueRef:
    # the device re-complements the bitline, so store the complement
    return ValueRef(r.bl_input.target, not r.bl_input.inverted)


def host_value(r: NodeRoles) -> ValueRef:
    return ValueRef(r.host.target, r.host.inverted)


# -- blocks --------------------------------------------------------------------

class BlockElement:
    """One device slot: the value loaded into it and the nodes computed there.

    ``chain`` lists, outermost first, the nodes that successively overwrite
    this device; the device's initial content is ``value`` after the full
    descent.  Input elements dropped by a merge point at their survivor via
    ``merged_into``.
    """

    __slots__ = ("value", "tag", "chain", "merged_into")

    def __init__(self, value: ValueRef, tag: str):
        self.value = value
        self.tag = tag
        self.chain: list[int] = []
        self.merged_into = None

    def resolve(self):
        el = self
        while el.merged_into is not None:
            el = el.merged_into
        return el

    def __repr__(self):
        return "<%s%s %s>" % ("!" if self.value.negated else "",
                              self.value.node, self.tag)


@dataclass
class Block:
    id: int
    elements: list[BlockElement] = field(default_factory=list)

    def __len__(self):
        return len(self.elements)


@dataclass
class Site:
    """One scheduled computation of a node: its host device and operands."""
    node: int
    host_el: BlockElement
    wl: BlockElement | tuple[str, int]  # element or ("const", 0/1)
    bl_el: BlockElement


@dataclass
class BlockFormation:
    blocks: list[Block]
    sites: dict[int, list[Site]]
    negated_elements: dict[int, list[BlockElement]]
    output_elements: list[BlockElement]


def form_blocks(mig: LogicNetwork, roles: dict[int, NodeRoles],
                w_d: int) -> BlockFormation:
    """Output-first descent by level, merging as described in the module doc."""
    lv = levels(mig)
    l_max = max((lv[e.target] for e in mig.outputs), default=0)
    blocks: list[Block] = []
    sites: dict[int, list[Site]] = {}
    positive_seen: set[int] = set()
    next_id = [1]

    def is_internal(nid):
        return mig.nodes[nid].kind == MAJ

    def register(ref: ValueRef):
        if is_internal(ref.node) and not ref.negated:
            positive_seen.add(ref.node)

    def new_block(elements) -> Block:
        b = Block(next_id[0], list(elements))
        next_id[0] += 1
        blocks.append(b)
        return b

    def make_el(ref: ValueRef, tag: str) -> BlockElement:
        register(ref)
        return BlockElement(ref, tag)

    def add_inversion(ref: ValueRef):
        # a negated internal value is produced by copying from a plain
        # instance; make sure exactly one such instance exists
        if ref.negated and is_internal(ref.node) \
                and ref.node not in positive_seen:
            new_block([make_el(ValueRef(ref.node, False), "i")])

    def descend(el: BlockElement):
        nid = el.value.node
        r = roles[nid]
        el.chain.append(nid)
        el.tag = "h"  # the device now hosts this node's computation
        el.value = host_value(r)
        register(el.value)
        add_inversion(el.value)
        wl_ref = wl_value(r)
        bl_ref = bl_stored_value(r)
        spawned = []
        if mig.nodes[wl_ref.node].kind == CONST0:
            wl_item = ("const", 1 if wl_ref.negated else 0)
        else:
            wl_el = make_el(wl_ref, "i")
            spawned.append(wl_el)
            wl_item = wl_el
            add_inversion(wl_ref)
        if spawned and bl_ref == wl_ref:
            bl_el = spawned[0]
        else:
            bl_el = make_el(bl_ref, "i")
            spawned.append(bl_el)
            add_inversion(bl_ref)
        new_block(spawned)
        sites.setdefault(nid, []).append(Site(nid, el, wl_item, bl_el))

    def i_keys(block):
        return {el.value for el in block.elements if el.tag == "i"}

    def try_input_merge(a: Block, b: Block) -> bool:
        shared = i_keys(a) & i_keys(b)
        if not shared:
            return False
        moved = [el for el in b.elements
                 if not (el.tag == "i" and el.value in shared)]
        if len(a.elements) + len(moved) > w_d:
            return False
        survivors = {el.value: el for el in a.elements if el.tag == "i"}
        for el in b.elements:
            if el.tag == "i" and el.value in shared:
                el.merged_into = survivors[el.value]
        a.elements.extend(moved)
        blocks.remove(b)
        return True

    def wl_key(site: Site):
        w = site.wl
        return w if isinstance(w, tuple) else id(w.resolve())

    def try_host_merge(a: Block, b: Block, lvl: int) -> bool:
        def level_tops(block):
            return [el.chain[-1] for el in block.elements
                    if el.chain and lv[el.chain[-1]] == lvl]

        ta, tb = level_tops(a), level_tops(b)
        if not ta or not tb:
            return False
        keys_a = {wl_key(s) for n in ta for s in sites.get(n, [])
                  if s.host_el in a.elements}
        keys_b = {wl_key(s) for n in tb for s in sites.get(n, [])
                  if s.host_el in b.elements}
        if not (keys_a & keys_b):
            return False
        shared = i_keys(a) & i_keys(b)
        moved = [el for el in b.elements
                 if not (el.tag == "i" and el.value in shared)]
        if len(a.elements) + len(moved) > w_d:
            return False
        survivors = {el.value: el for el in a.elements if el.tag == "i"}
        for el in b.elements:
            if el.tag == "i" and el.value in shared:
                el.merged_into = survivors[el.value]
        a.elements.extend(moved)
        blocks.remove(b)
        return True

    def merge(lvl: int | None = None):
        # newest pairs first: freshly spawned same-level operand blocks fold
        # together before being pushed into older storage blocks
        changed = True
        while changed:
            changed = False
            order = sorted(((i, j) for i in range(len(blocks))
                            for j in range(i + 1, len(blocks))),
                           key=lambda p: (-blocks[p[1]].id, -blocks[p[0]].id))
            for i, j in order:
                if try_input_merge(blocks[i], blocks[j]):
                    changed = True
                    break
            if changed or lvl is None:
                continue
            for i, j in order:
                if try_host_merge(blocks[i], blocks[j], lvl):
                    changed = True
                    break

    output_elements = []
    for e, _name in zip(mig.outputs, mig.output_names):
        ref = ValueRef(e.target, e.inverted)
        el = make_el(ref, "h")
        new_block([el])
        output_elements.append(el)
        add_inversion(ref)
    merge()

    for l in range(l_max, 0, -1):
        for block in list(blocks):
            for el in list(block.elements):
                if el.merged_into is None and not el.value.negated \
                        and is_internal(el.value.node) \
                        and lv[el.value.node] == l:
                    descend(el)
        merge(lvl=l)

    negated: dict[int, list[BlockElement]] = {}
    for b in blocks:
        for el in b.elements:
            ref = el.value
            if ref.negated and is_internal(ref.node):
                negated.setdefault(ref.node, []).append(el)
    return BlockFormation(blocks, sites, negated, output_elements)


# -- packing -------------------------------------------------------------------

@dataclass
class Packing:
    """First-fit assignment of blocks to words.

    Bins fill in block-list order; bin b becomes word ``n_words - 1 - b`` so
    the last-opened word carries the first (deepest) operand group.
    """

    w_d: int
    n_words: int
    word_blocks: dict[int, list[Block]]
    word_of_block: dict[int, int]

    @property
    def occupancy(self) -> dict[int, int]:
        return {w: sum(len(b) for b in bs)
                for w, bs in self.word_blocks.items()}


def pack_blocks(blocks: list[Block], w_d: int) -> Packing:
    for b in blocks:
        if len(b) > w_d:
            raise NetlistError("block %d wider (%d) than the word (%d)"
                               % (b.id, len(b), w_d))
    bins: list[list[Block]] = []
    used: list[int] = []
    for b in blocks:
        for i in range(len(bins)):
            if used[i] + len(b) <= w_d:
                bins[i].append(b)
                used[i] += len(b)
                break
        else:
            bins.append([b])
            used.append(len(b))
    n = len(bins)
    word_blocks = {n - 1 - i: bs for i, bs in enumerate(bins)}
    word_of_block = {b.id: w for w, bs in word_blocks.items() for b in bs}
    return Packing(w_d, n, word_blocks, word_of_block)


def place_elements(packing: Packing) -> dict[int, tuple[int, int]]:
    """Bit position of every canonical element, keyed by element identity."""
    spots = {}
    for w in sorted(packing.word_blocks):
        bit = 0
        for block in packing.word_blocks[w]:
            for el in block.elements:
                spots[id(el)] = (w, bit)
                bit += 1
    return spots


# -- instruction generation -------------------------------------------------------

def gen_pi_load(builder: ProgramBuilder, elements, spots,
                mig: LogicNetwork, scratch_word: int | None):
    """Load every PI/constant-valued device.

    Complemented PI copies (and constant 1s) write directly through the
    bitlines.  Plain PI copies stage through the scratch wordline: the
    complement is written there, read out and re-complemented into place,
    then the scratch devices reset.
    """
    pi_line = {nid: i for i, nid in enumerate(mig.pis)}
    direct: dict[int, dict[int, int]] = {}
    positives: list[tuple[int, int, int]] = []  # (word, bit, pi line)
    for el in elements:
        kind = mig.nodes[el.value.node].kind
        w, b = spots[id(el)]
        if kind == PI:
            if el.value.negated:
                direct.setdefault(w, {})[b] = pi_line[el.value.node]
            else:
                positives.append((w, b, pi_line[el.value.node]))
        elif kind == CONST0 and el.value.negated:
            direct.setdefault(w, {})[b] = SLOT_CONST0
    for w in sorted(direct):
        builder.apply_from_pir(w, WsMode.ONE, direct[w])

    w_d = builder.config.w_d
    todo = sorted(positives)
    while todo:
        lines = []
        for _, _, line in todo:
            if line not in lines and len(lines) < w_d:
                lines.append(line)
        round_items = [t for t in todo if t[2] in lines]
        todo = [t for t in todo if t[2] not in lines]
        scratch_bit = {line: k for k, line in enumerate(lines)}
        builder.apply_from_pir(scratch_word, WsMode.ONE,
                               {scratch_bit[l]: l for l in lines})
        builder.read(scratch_word)
        by_word: dict[int, dict[int, int]] = {}
        for w, b, line in round_items:
            by_word.setdefault(w, {})[b] = scratch_bit[line]
        for w in sorted(by_word):
            builder.apply_from_dmr(w, WsMode.ONE, by_word[w])
        builder.reset_bits(scratch_word, range(len(lines)))


def gen_program_delay(mig: LogicNetwork, roles, formation: BlockFormation,
                      packing: Packing) -> tuple[Program, MappingReport]:
    """Level-synchronous instruction generation over placed blocks."""
    lv = levels(mig)
    spots = place_elements(packing)
    elements = [el for b in formation.blocks for el in b.elements]
    has_positive_pi = any(
        mig.nodes[el.value.node].kind == PI and not el.value.negated
        for el in elements)
    scratch = packing.n_words if has_positive_pi else None
    s_d = packing.n_words + (1 if scratch is not None else 0)
    config = CrossbarConfig(max(1, s_d), packing.w_d)
    builder = ProgramBuilder(config, mig.num_pis)

    gen_pi_load(builder, elements, spots, mig, scratch)

    site_list = sorted(
        ((n, s) for n, ss in formation.sites.items() for s in ss),
        key=lambda t: (lv[t[0]], t[0]))
    by_level: dict[int, list[Site]] = {}
    for n, s in site_list:
        by_level.setdefault(lv[n], []).append(s)

    for l in sorted(by_level):
        groups: dict[tuple, list[Site]] = {}
        for site in by_level[l]:
            host_w, _ = spots[id(site.host_el.resolve())]
            bl_w, _ = spots[id(site.bl_el.resolve())]
            if isinstance(site.wl, tuple):
                key = (bl_w, host_w, site.wl[1], None)
            else:
                wl_w, wl_b = spots[id(site.wl.resolve())]
                if wl_w != bl_w:
                    raise NetlistError(
                        "operands of node %d split across words" % site.node)
                key = (bl_w, host_w, None, wl_b)
            groups.setdefault(key, []).append(site)
        for key in sorted(groups, key=lambda k: tuple(-1 if x is None else x
                                                      for x in k)):
            src_w, host_w, const_wl, wl_b = key
            wires = {}
            for site in groups[key]:
                _, hb = spots[id(site.host_el.resolve())]
                _, bb = spots[id(site.bl_el.resolve())]
                wires[hb] = bb
            builder.read(src_w)
            if const_wl is not None:
                mode = WsMode.ONE if const_wl else WsMode.ZERO
                builder.apply_from_dmr(host_w, mode, wires)
            else:
                builder.apply_from_dmr(host_w, WsMode.FROM_SOURCE, wires,
                                       wb=wl_b)
            builder.maj_applies += 1

        # negated copies of this level's values, written through the bitline
        copies = []
        for n in sorted(set(s.node for s in by_level[l])):
            for el in formation.negated_elements.get(n, []):
                src_site = formation.sites[n][0]
                src = spots[id(src_site.host_el.resolve())]
                dst = spots[id(el.resolve())]
                copies.append((src, dst))
        by_pair: dict[tuple[int, int], dict[int, int]] = {}
        for (sw, sb), (dw, db) in copies:
            by_pair.setdefault((sw, dw), {})[db] = sb
        for (sw, dw) in sorted(by_pair):
            builder.read(sw)
            builder.apply_from_dmr(dw, WsMode.ONE, by_pair[(sw, dw)])

    for el, name in zip(formation.output_elements, mig.output_names):
        builder.result_locations[name] = spots[id(el.resolve())]

    program = builder.finish()
    report = report_delay_stats(builder, mig, formation, packing)
    return program, report


def report_delay_stats(builder: ProgramBuilder, mig: LogicNetwork,
                       formation: BlockFormation,
                       packing: Packing) -> MappingReport:
    n_maj = sum(1 for n in mig.nodes if n.kind == MAJ)
    w_d = packing.w_d
    occupied = sum(len(b) for b in formation.blocks)
    total = packing.n_words * w_d
    i_total = len(builder.instructions)
    cycles = i_total + 2
    d_p_star = 9 * n_maj
    return MappingReport(
        flow="delay",
        num_pis=mig.num_pis,
        n_maj=n_maj,
        levels=max((levels(mig)[e.target] for e in mig.outputs), default=0),
        s_d=packing.n_words, w_d=w_d,
        i_apply=builder.i_apply, i_read=builder.i_read, i_total=i_total,
        cycles=cycles,
        n_blocks=len(formation.blocks),
        w_util=100.0 * occupied / total if total else 100.0,
        d_p_star=d_p_star,
        speedup=d_p_star / cycles if cycles else None,
    )


def map_delay(mig: LogicNetwork, w_d: int) -> tuple[Program, MappingReport]:
    """Whole delay-constrained pipeline: roles, blocks, packing, generation."""
    if mig.kind != "mig":
        raise NetlistError("map_delay expects a MIG (use aig_to_mig)")
    if w_d < 2:
        raise NetlistError("w_D must be at least 2")
    roles = assign_roles(mig)
    formation = form_blocks(mig, roles, w_d)
    packing = pack_blocks(formation.blocks, w_d)
    return gen_program_delay(mig, roles, formation, packing)
