"""A walk through the machine primitives.

Every crossbar device is a one-bit state machine: its next state is the
majority of the stored bit, the wordline input and the *complement* of the
bitline input.  That single update rule gives set, reset, hold, inversion,
AND and OR, which is everything the mapper builds on.  The second half of
the script assembles the classic two-bit XOR program by hand, runs it for
every input assignment and prints the word states after each step.
"""

import itertools

from revamp.circuits import two_bit_xor_program
from revamp.isa import CrossbarConfig, encode, format_asm, instruction_lengths
from revamp.simulator import device_step, grid_dump, run


def show_device_table():
    print("device update Z' = M3(Z, wl, not bl):")
    print("  Z wl bl -> Z'")
    for z, wl, bl in itertools.product((0, 1), repeat=3):
        note = ""
        if (wl, bl) == (1, 0):
            note = "  (set)"
        elif (wl, bl) == (0, 1):
            note = "  (reset)"
        print("  %d  %d  %d ->  %d%s" % (z, wl, bl, device_step(z, wl, bl),
                                         note))
    print()
    print("inversion: a reset device with wl=1 stores the complement of")
    print("whatever arrives on its bitline:",
          [device_step(0, 1, v) for v in (0, 1)])
    print()


def show_instruction_lengths():
    for s_d, w_d in ((2, 2), (8, 4), (64, 64)):
        il_read, il_apply = instruction_lengths(CrossbarConfig(s_d, w_d))
        print("geometry %3d x %-3d -> read %2d bits, apply %3d bits"
              % (s_d, w_d, il_read, il_apply))
    print()


def run_xor_program():
    prog = two_bit_xor_program()
    print("two-bit XOR on a 3x2 crossbar, %d instructions:"
          % len(prog.instructions))
    cfg = prog.config
    for i, instr in enumerate(prog.instructions):
        print("  I%d: %-28s encoded 0x%0*x"
              % (i + 1, format_asm(instr), (cfg.w_i + 3) // 4,
                 encode(instr, cfg)))
    print()
    for p1, p0, q1, q0 in [(1, 0, 0, 1), (1, 1, 0, 1)]:
        state, trace = run(prog, [p1, p0, q1, q0], record_trace=True)
        print("inputs p=%d%d q=%d%d:" % (p1, p0, q1, q0))
        for step in trace.steps:
            print("  after %-26s word %d = %s"
                  % (format_asm(step.instruction), step.word, step.post))
        print("final grid (top row is the highest wordline):")
        print("  " + grid_dump(state).replace("\n", "\n  "))
        print("cycles: %d (instruction count + 2 pipeline fill)"
              % state.cycles)
        print()


if __name__ == "__main__":
    show_device_table()
    show_instruction_lengths()
    run_xor_program()
