"""Instruction set of the two-instruction crossbar machine.

The machine executes ``Read`` (copy one stored word into the data register)
and ``Apply`` (update selected devices of one word in parallel).  This module
defines the structured instruction records, the crossbar geometry, the
bit-exact binary encoding, a one-line-per-instruction assembly syntax and a
binary program container.

Encoding layout (fields concatenated most-significant first, zero padded on
the right up to the instruction-memory word width):

    Read:   opcode(1)=0 | w
    Apply:  opcode(1)=1 | w | s(1) | ws(2) | wb | (v val) * w_D

``w`` takes ceil(log2(S_D)) bits, ``wb`` and every ``val`` take
ceil(log2(w_D)) bits.  ``ws`` selects the wordline input: 00 drives logic 0,
01 drives logic 1, 11 drives bit ``wb`` of the selected source; 10 is
invalid.  A pair with v=0 leaves its bitline's device untouched.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

MAGIC = b"RVMP"

# PIR slot codes used in a program's input schedule: a slot is either a
# primary-input index (>= 0) or one of these constants.
SLOT_CONST0 = -1
SLOT_CONST1 = -2

SRC_PIR = 0
SRC_DMR = 1


class IsaError(ValueError):
    pass


class DecodeError(IsaError):
    pass


def _clog2(n: int) -> int:
    return max(1, (n - 1).bit_length()) if n > 1 else 0


class WsMode(IntEnum):
    ZERO = 0b00
    ONE = 0b01
    FROM_SOURCE = 0b11


@dataclass(frozen=True)
class WordlineSelect:
    mode: WsMode
    wb: int = 0


@dataclass(frozen=True)
class BitlinePair:
    valid: bool
    val: int = 0


NOP_PAIR = BitlinePair(False, 0)


@dataclass(frozen=True)
class ReadInstr:
    w: int


@dataclass(frozen=True)
class ApplyInstr:
    w: int
    source: int  # SRC_PIR or SRC_DMR
    ws: WordlineSelect
    pairs: tuple[BitlinePair, ...]


Instruction = ReadInstr | ApplyInstr


@dataclass(frozen=True)
class CrossbarConfig:
    """Geometry of the data/compute memory and instruction memory."""

    s_d: int  # words in the data memory
    w_d: int  # bits per data word == primary-input lines
    s_i: int = 1  # words in the instruction memory
    w_i: int | None = None  # bits per instruction word

    def __post_init__(self):
        if self.s_d < 1:
            raise IsaError("S_D must be >= 1")
        if self.w_d < 2:
            raise IsaError("w_D must be >= 2")
        if self.s_i < 1:
            raise IsaError("S_I must be >= 1")
        if self.w_i is None:
            object.__setattr__(self, "w_i", max(instruction_lengths(self)))
        elif self.w_i < max(instruction_lengths(self)):
            raise IsaError("w_I=%d is below the longest instruction (%d)"
                           % (self.w_i, max(instruction_lengths(self))))

    @property
    def word_bits(self) -> int:
        return _clog2(self.s_d)

    @property
    def bit_bits(self) -> int:
        return _clog2(self.w_d)


def instruction_lengths(config) -> tuple[int, int]:
    """Bit lengths (read, apply) of the two instructions for a geometry."""
    sw = _clog2(config.s_d)
    bw = _clog2(config.w_d)
    il_read = 1 + sw
    il_apply = 3 + sw + (1 + config.w_d) * (1 + bw)
    return il_read, il_apply


def validate_instruction(instr: Instruction, config: CrossbarConfig):
    if isinstance(instr, ReadInstr):
        if not 0 <= instr.w < config.s_d:
            raise IsaError("read address %d out of range" % instr.w)
        return
    if not 0 <= instr.w < config.s_d:
        raise IsaError("apply address %d out of range" % instr.w)
    if instr.source not in (SRC_PIR, SRC_DMR):
        raise IsaError("bad source flag %r" % (instr.source,))
    if instr.ws.mode not in (WsMode.ZERO, WsMode.ONE, WsMode.FROM_SOURCE):
        raise IsaError("bad wordline select %r" % (instr.ws.mode,))
    if not 0 <= instr.ws.wb < config.w_d:
        raise IsaError("wb %d out of range" % instr.ws.wb)
    if len(instr.pairs) != config.w_d:
        raise IsaError("apply needs exactly %d (v val) pairs, got %d"
                       % (config.w_d, len(instr.pairs)))
    for p in instr.pairs:
        if not 0 <= p.val < config.w_d:
            raise IsaError("val %d out of range" % p.val)


# -- binary codec ------------------------------------------------------------

def encode(instr: Instruction, config: CrossbarConfig) -> int:
    """Pack an instruction into a w_I-bit word (returned as an int)."""
    validate_instruction(instr, config)
    sw, bw = config.word_bits, config.bit_bits
    bits = 0
    used = 0

    def put(value, width):
        nonlocal bits, used
        bits = (bits << width) | (value & ((1 << width) - 1))
        used += width

    if isinstance(instr, ReadInstr):
        put(0, 1)
        put(instr.w, sw)
    else:
        put(1, 1)
        put(instr.w, sw)
        put(instr.source, 1)
        put(int(instr.ws.mode), 2)
        put(instr.ws.wb, bw)
        for p in instr.pairs:
            put(1 if p.valid else 0, 1)
            put(p.val, bw)
    if used > config.w_i:
        raise IsaError("instruction longer than w_I")
    return bits << (config.w_i - used)


def decode(word: int, config: CrossbarConfig) -> Instruction:
    """Inverse of :func:`encode`; rejects bad ws codes and dirty padding."""
    if word < 0 or word >> config.w_i:
        raise DecodeError("word wider than w_I")
    sw, bw = config.word_bits, config.bit_bits
    pos = config.w_i

    def take(width):
        nonlocal pos
        pos -= width
        if pos < 0:
            raise DecodeError("truncated instruction")
        return (word >> pos) & ((1 << width) - 1)

    opcode = take(1)
    w = take(sw)
    if w >= config.s_d:
        raise DecodeError("address %d out of range" % w)
    if opcode == 0:
        if word & ((1 << pos) - 1):
            raise DecodeError("nonzero padding after read")
        return ReadInstr(w)
    source = take(1)
    ws_code = take(2)
    if ws_code == 0b10:
        raise DecodeError("wordline select code 10 is invalid")
    wb = take(bw)
    if wb >= config.w_d:
        raise DecodeError("wb %d out of range" % wb)
    pairs = []
    for _ in range(config.w_d):
        v = take(1)
        val = take(bw)
        if val >= config.w_d:
            raise DecodeError("val %d out of range" % val)
        pairs.append(BitlinePair(bool(v), val))
    if pos and word & ((1 << pos) - 1):
        raise DecodeError("nonzero padding after apply")
    return ApplyInstr(w, source, WordlineSelect(WsMode(ws_code), wb),
                      tuple(pairs))


# -- assembly ----------------------------------------------------------------

def format_asm(instr: Instruction) -> str:
    """One-line assembly: ``Read <w>`` / ``Apply <w> <s> <ws> <wb> <v val>...``."""
    if isinstance(instr, ReadInstr):
        return "Read %d" % instr.w
    parts = ["Apply", str(instr.w), str(instr.source),
             format(int(instr.ws.mode), "02b"), str(instr.ws.wb)]
    for p in instr.pairs:
        parts.append("%d %d" % (1 if p.valid else 0, p.val))
    return " ".join(parts)


def parse_asm_line(line: str, config: CrossbarConfig) -> Instruction:
    parts = line.split("#", 1)[0].split()
    if not parts:
        raise IsaError("empty instruction line")
    if parts[0] == "Read":
        if len(parts) != 2:
            raise IsaError("Read takes one operand")
        instr = ReadInstr(int(parts[1]))
    elif parts[0] == "Apply":
        expect = 4 + 2 * config.w_d
        if len(parts) - 1 != expect:
            raise IsaError("Apply takes %d operands for w_D=%d, got %d"
                           % (expect, config.w_d, len(parts) - 1))
        w = int(parts[1])
        source = int(parts[2])
        ws_code = int(parts[3], 2)
        if ws_code == 0b10:
            raise IsaError("wordline select code 10 is invalid")
        wb = int(parts[4])
        pairs = tuple(BitlinePair(bool(int(parts[5 + 2 * j])),
                                  int(parts[6 + 2 * j]))
                      for j in range(config.w_d))
        instr = ApplyInstr(w, source, WordlineSelect(WsMode(ws_code), wb), pairs)
    else:
        raise IsaError("unknown opcode %r" % parts[0])
    validate_instruction(instr, config)
    return instr


def parse_asm(text: str, config: CrossbarConfig) -> list[Instruction]:
    out = []
    for raw in text.splitlines():
        if raw.split("#", 1)[0].strip():
            out.append(parse_asm_line(raw, config))
    return out


# -- programs ------------------------------------------------------------------

@dataclass
class Program:
    """Instruction stream plus the input schedule and result map.

    ``pir_schedule`` maps an instruction index to the w_D PIR slots live
    during that instruction.  Slots are symbolic so one program can be run
    under every input assignment: a slot is a PI index, ``SLOT_CONST0`` or
    ``SLOT_CONST1``.  Every ``Apply`` sourcing the PIR must have an entry.
    """

    config: CrossbarConfig
    instructions: list[Instruction] = field(default_factory=list)
    pir_schedule: dict[int, tuple[int, ...]] = field(default_factory=dict)
    result_locations: dict[str, tuple[int, int]] = field(default_factory=dict)
    num_pis: int = 0

    def validate(self):
        for i, instr in enumerate(self.instructions):
            try:
                validate_instruction(instr, self.config)
            except IsaError as exc:
                raise IsaError("instruction %d: %s" % (i, exc)) from None
            if isinstance(instr, ApplyInstr) and instr.source == SRC_PIR:
                if i not in self.pir_schedule:
                    raise IsaError("instruction %d sources the PIR but has "
                                   "no schedule entry" % i)
        for i, slots in self.pir_schedule.items():
            if len(slots) != self.config.w_d:
                raise IsaError("schedule entry %d has %d slots, want %d"
                               % (i, len(slots), self.config.w_d))
            for s in slots:
                if s >= self.num_pis or s < SLOT_CONST1:
                    raise IsaError("schedule entry %d references bad slot %d"
                                   % (i, s))
        for name, (w, b) in self.result_locations.items():
            if not (0 <= w < self.config.s_d and 0 <= b < self.config.w_d):
                raise IsaError("result %r at (%d,%d) is out of range"
                               % (name, w, b))

    def to_asm(self) -> str:
        return "\n".join(format_asm(i) for i in self.instructions) + "\n"


# -- binary container ----------------------------------------------------------
#
# magic "RVMP", u32 LE: S_D w_D S_I w_I num_pis, u32 instruction count,
# instructions as big-endian byte strings of ceil(w_I/8) bytes each, u32
# schedule entry count, entries as (u32 index, w_D * i32 slots), u32 result
# count, results as (u16 name length, utf-8 name, u32 word, u32 bit).

def write_program(program: Program) -> bytes:
    program.validate()
    cfg = program.config
    nbytes = (cfg.w_i + 7) // 8
    out = [MAGIC,
           struct.pack("<5I", cfg.s_d, cfg.w_d, cfg.s_i, cfg.w_i,
                       program.num_pis),
           struct.pack("<I", len(program.instructions))]
    for instr in program.instructions:
        out.append(encode(instr, cfg).to_bytes(nbytes, "big"))
    sched = sorted(program.pir_schedule.items())
    out.append(struct.pack("<I", len(sched)))
    for idx, slots in sched:
        out.append(struct.pack("<I", idx))
        out.append(struct.pack("<%di" % cfg.w_d, *slots))
    out.append(struct.pack("<I", len(program.result_locations)))
    for name, (w, b) in sorted(program.result_locations.items()):
        raw = name.encode("utf-8")
        out.append(struct.pack("<H", len(raw)) + raw + struct.pack("<2I", w, b))
    return b"".join(out)


def read_program(data: bytes) -> Program:
    try:
        return _read_program(data)
    except (struct.error, IndexError):
        raise IsaError("truncated or corrupt program container") from None


def _read_program(data: bytes) -> Program:
    if data[:4] != MAGIC:
        raise IsaError("bad magic, not a program container")
    off = 4
    s_d, w_d, s_i, w_i, num_pis = struct.unpack_from("<5I", data, off)
    off += 20
    cfg = CrossbarConfig(s_d, w_d, s_i, w_i)
    (count,) = struct.unpack_from("<I", data, off)
    off += 4
    nbytes = (w_i + 7) // 8
    instrs = []
    for _ in range(count):
        word = int.from_bytes(data[off:off + nbytes], "big")
        off += nbytes
        instrs.append(decode(word, cfg))
    (n_sched,) = struct.unpack_from("<I", data, off)
    off += 4
    sched = {}
    for _ in range(n_sched):
        (idx,) = struct.unpack_from("<I", data, off)
        off += 4
        slots = struct.unpack_from("<%di" % w_d, data, off)
        off += 4 * w_d
        sched[idx] = tuple(slots)
    (n_res,) = struct.unpack_from("<I", data, off)
    off += 4
    results = {}
    for _ in range(n_res):
        (nlen,) = struct.unpack_from("<H", data, off)
        off += 2
        name = data[off:off + nlen].decode("utf-8")
        off += nlen
        w, b = struct.unpack_from("<2I", data, off)
        off += 8
        results[name] = (w, b)
    prog = Program(cfg, instrs, sched, results, num_pis)
    prog.validate()
    return prog
