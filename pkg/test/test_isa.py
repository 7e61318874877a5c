import saberutils, pytest
import numpy as np
from saberutils import isa
from saberutils.isa import Instruction

def test_encode():
    assert isa.encode_instr(Instruction(0, 0, 0)) == 0x000000
    assert isa.encode_instr(Instruction(3, 0x155, 0x2AA)) == 0x3556AA
    assert isa.encode_instr(Instruction(isa.HALT, 1023, 1023)) == 0xAFFFFF

def test_codec_identity(trials):
    rng = np.random.default_rng(30)
    for opcode in range(isa.NUM_OPCODES):
        for off_a, off_b in rng.integers(0, 1024, size=(trials(1000, quick=50), 2)):
            instr = Instruction(opcode, int(off_a), int(off_b))
            word = isa.encode_instr(instr)
            assert 0 <= word < 1 << 24
            assert isa.decode_instr(word) == instr

def test_invalid_instructions():
    for opcode in range(isa.NUM_OPCODES, 16):
        with pytest.raises(saberutils.InvalidInstruction):
            isa.decode_instr(opcode << 20)
    with pytest.raises(saberutils.InvalidInstruction):
        isa.decode_instr(1 << 24)
    with pytest.raises(saberutils.InvalidInstruction):
        Instruction(isa.EVAL, 1024, 0)
    with pytest.raises(saberutils.InvalidInstruction):
        Instruction(-1)

def test_assemble():
    text = (
        '# one inner product term\n'
        'LOAD_OPERAND 0x10, 0\n'
        'load_operand 80 1   # secret side\n'
        '\n'
        'EVAL 3 0\n'
        'POINT_MUL\n'
        'HALT\n'
        )
    program = isa.assemble(text)
    assert program == [
        Instruction(isa.LOAD_OPERAND, 16, 0),
        Instruction(isa.LOAD_OPERAND, 80, 1),
        Instruction(isa.EVAL, 3, 0),
        Instruction(isa.POINT_MUL, 0, 0),
        Instruction(isa.HALT, 0, 0),
        ]
    assert isa.assemble(isa.disassemble(program)) == program
    assert isa.program_bytes(program) == 15

def test_assemble_errors():
    with pytest.raises(saberutils.InvalidInstruction) as e:
        isa.assemble('HALT\nJUMP 4 2\n')
    assert 'line 2' in str(e.value)
    with pytest.raises(saberutils.InvalidInstruction) as e:
        isa.assemble('EVAL 3 x\n')
    assert 'line 1' in str(e.value)
    with pytest.raises(saberutils.InvalidInstruction) as e:
        isa.assemble('\n\nPACK 2000 13\n')
    assert 'line 3' in str(e.value)
    with pytest.raises(saberutils.InvalidInstruction):
        isa.assemble('EVAL 1 2 3\n')

def test_str():
    assert str(Instruction(isa.PACK, 52, 13)) == 'PACK 52 13'
    assert Instruction(isa.PACK, 52, 13).mnemonic == 'PACK'
