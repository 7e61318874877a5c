"""
The accelerator's 24-bit instruction set.

Word layout: [23:20] opcode, [19:10] off_a, [9:0] off_b. Offsets address
64-bit words of the 8KB data memory unless an opcode gives them another
meaning (see accel_model for the semantics of each opcode).

Assembly text holds one instruction per line, `MNEMONIC off_a off_b`, with
decimal or 0x-hex offsets. Missing offsets are 0; `#` starts a comment.
"""
import saberutils

OPCODE_BITS = 4
OFFSET_BITS = 10
WORD_BITS = OPCODE_BITS + 2 * OFFSET_BITS
MAX_OFFSET = (1 << OFFSET_BITS) - 1
INSTRUCTION_BYTES = WORD_BITS // 8

LOAD_OPERAND = 0
STORE_RESULT = 1
GEN_MATRIX_STEP = 2
SAMPLE_SECRET = 3
EVAL = 4
POINT_MUL = 5
INTERPOLATE = 6
RECOMBINE_ROUND = 7
HASH_STEP = 8
PACK = 9
HALT = 10

MNEMONICS = [
    'LOAD_OPERAND', 'STORE_RESULT', 'GEN_MATRIX_STEP', 'SAMPLE_SECRET',
    'EVAL', 'POINT_MUL', 'INTERPOLATE', 'RECOMBINE_ROUND', 'HASH_STEP',
    'PACK', 'HALT',
    ]
NUM_OPCODES = len(MNEMONICS)
OPCODES = { name : code for code, name in enumerate(MNEMONICS) }


class Instruction(object):

    def __init__(self, opcode, off_a=0, off_b=0):
        if not(0 <= opcode < NUM_OPCODES):
            raise saberutils.InvalidInstruction('opcode {0}'.format(opcode))
        for offset in (off_a, off_b):
            if not(0 <= offset <= MAX_OFFSET):
                raise saberutils.InvalidInstruction('offset {0} does not fit in {1} bits'.format(offset, OFFSET_BITS))
        self.opcode = opcode
        self.off_a = off_a
        self.off_b = off_b

    @property
    def mnemonic(self):
        return MNEMONICS[self.opcode]

    def __eq__(self, other):
        return (
            isinstance(other, Instruction)
            and (self.opcode, self.off_a, self.off_b) == (other.opcode, other.off_a, other.off_b)
            )

    def __ne__(self, other):
        return not(self == other)

    def __hash__(self):
        return hash((self.opcode, self.off_a, self.off_b))

    def __str__(self):
        return '{0} {1} {2}'.format(self.mnemonic, self.off_a, self.off_b)

    def __repr__(self):
        return '<Instruction {0}>'.format(self)


def encode_instr(instr):
    return (instr.opcode << (2 * OFFSET_BITS)) | (instr.off_a << OFFSET_BITS) | instr.off_b


def decode_instr(word):
    if not(0 <= word < (1 << WORD_BITS)):
        raise saberutils.InvalidInstruction('word 0x{0:x} wider than {1} bits'.format(word, WORD_BITS))
    return Instruction(
        word >> (2 * OFFSET_BITS),
        (word >> OFFSET_BITS) & MAX_OFFSET,
        word & MAX_OFFSET
        )


def _parse_offset(token, lineno):
    try:
        return int(token, 0)
    except ValueError:
        raise saberutils.InvalidInstruction('line {0}: cannot parse offset "{1}"'.format(lineno, token))


def assemble(text):
    """Parses assembly text into a list of Instructions"""
    program = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line: continue
        tokens = line.replace(',', ' ').split()
        if len(tokens) > 3:
            raise saberutils.InvalidInstruction('line {0}: too many fields in "{1}"'.format(lineno, line))
        mnemonic = tokens[0].upper()
        if mnemonic not in OPCODES:
            raise saberutils.InvalidInstruction('line {0}: unknown mnemonic {1}'.format(lineno, tokens[0]))
        offsets = [ _parse_offset(t, lineno) for t in tokens[1:] ]
        offsets += [0] * (2 - len(offsets))
        try:
            program.append(Instruction(OPCODES[mnemonic], *offsets))
        except saberutils.InvalidInstruction as e:
            raise saberutils.InvalidInstruction('line {0}: {1}'.format(lineno, e))
    return program


def disassemble(program):
    return ''.join(str(instr) + '\n' for instr in program)


def program_bytes(program):
    """Instruction memory taken by a program"""
    return INSTRUCTION_BYTES * len(program)
