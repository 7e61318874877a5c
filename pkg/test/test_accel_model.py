import saberutils, pytest, json
import numpy as np
from saberutils import accel_model as am, isa, kem, params, poly, sampler, toomcook
from saberutils.isa import Instruction
from saberutils.poly import Poly

def seeds(i):
    return [ sampler.xof_expand(bytes([i]) * 32, label) for label in (b'A', b's', b'z', b'c') ]

@pytest.fixture
def operands():
    rng = np.random.default_rng(40)
    a = [ Poly.random(rng=rng) for _ in range(3) ]
    s = sampler.gen_secret(rng.bytes(32), params.Saber)
    mem = am.DataMemory()
    for j in range(3):
        mem.load_poly(j * am.POLY_WORDS, a[j])
        mem.load_poly(192 + j * am.POLY_WORDS, s[j])
    return a, s, mem


# ________________________________________________________
# Data memory

def test_dual_port():
    mem = am.DataMemory()
    mem.write(0, 0x0001000200030004)
    assert mem.read(0) == 0x0001000200030004
    with pytest.raises(saberutils.DualPortViolation):
        mem.read(1)
    mem.tick()
    mem.read(1)
    mem.read(2)

def test_bulk_access_uses_both_ports():
    mem = am.DataMemory()
    _, cycles = mem.read_words(0, am.POLY_WORDS)
    assert cycles == 32
    assert mem.write_words(100, np.arange(12)) == 2
    assert mem.dump_poly(100).coeffs[:12].tolist() == list(range(12))

def test_address_range():
    mem = am.DataMemory()
    with pytest.raises(saberutils.AddressOutOfRange):
        mem.read(1024)
    with pytest.raises(saberutils.AddressOutOfRange):
        mem.read_words(1000, am.POLY_WORDS)
    with pytest.raises(saberutils.AddressOutOfRange):
        mem.load_bytes(1023, bytes(16))

def test_byte_layout():
    mem = am.DataMemory()
    data = bytes(range(32))
    mem.load_bytes(4, data)
    assert mem.dump_bytes(4, 32) == data
    assert mem.read(4) == int.from_bytes(data[:8], 'little')
    with pytest.raises(saberutils.BufferLengthError):
        mem.load_bytes(0, bytes(7))


# ________________________________________________________
# Configuration and cost model

def test_multiplier_config():
    cfg = am.MultiplierConfig()
    assert cfg.local_mem_bytes_per_unit == 320
    assert cfg.point_mul_cycles == 1024
    assert am.MultiplierConfig(num_point_units=1).point_mul_cycles == 7 * 1024
    assert am.MultiplierConfig(num_point_units=4).point_mul_cycles == 2 * 1024
    assert am.MultiplierConfig(macs_per_unit=1).point_mul_cycles == 4096
    for kwargs in (dict(num_point_units=0), dict(num_point_units=8), dict(macs_per_unit=0)):
        with pytest.raises(saberutils.InvalidConfig):
            am.MultiplierConfig(**kwargs)

def test_xof_permutations():
    assert am.xof_permutations(0, 416, 168) == 4
    assert am.xof_permutations(416, 416, 168) == 3
    assert am.xof_permutations(168, 168, 168) == 1


# ________________________________________________________
# Executor

def test_empty_program():
    mem = am.DataMemory()
    mem.load_bytes(0, bytes(range(64)))
    final, report = am.run_program([], mem)
    assert final == mem
    assert report.total_cycles == 0

def test_inner_product_program(operands):
    a, s, mem = operands
    prog = am.inner_product_program(3, 0, 192, am.RESULT)
    final, report = am.run_program(prog, mem)
    assert final.dump_poly(am.RESULT, 13) == toomcook.inner_product(a, s)
    assert report.phases['point_mul'] == 3 * 1024
    assert report.phases['interpolate'] == 34 * 16
    # The input memory is left alone
    assert mem.dump_poly(am.RESULT) == Poly.zero(width=16)

def test_encoded_program(operands):
    a, s, mem = operands
    prog = am.inner_product_program(3, 0, 192, am.RESULT)
    final, report = am.run_program([ isa.encode_instr(i) for i in prog ], mem)
    assert final.dump_poly(am.RESULT, 13) == toomcook.inner_product(a, s)
    assert report == am.run_program(prog, mem)[1]

def test_assembled_program(operands):
    a, s, mem = operands
    prog = isa.assemble(
        'LOAD_OPERAND 0 0\n'
        'LOAD_OPERAND 192 1\n'
        'EVAL 3 0\n'
        'POINT_MUL 0 0\n'
        'INTERPOLATE\n'
        'RECOMBINE_ROUND 208 0   # 13 << 4\n'
        'STORE_RESULT 880 0\n'
        'HALT\n'
        'STORE_RESULT 0 0\n'
        )
    final, report = am.run_program(prog, mem)
    assert final.dump_poly(880, 13) == toomcook.multiply(a[0], s[0])
    # Execution stops at HALT
    assert report.instructions == 7
    assert final.dump_poly(0, 13) == a[0]

def test_cycles_are_additive(operands):
    _, _, mem = operands
    p1 = am.inner_product_program(3, 0, 192, am.RESULT)
    p2 = am.inner_product_program(2, 64, 256, am.RESULT)
    mem1, r1 = am.run_program(p1, mem)
    _, r2 = am.run_program(p2, mem1)
    _, r12 = am.run_program(p1 + p2, mem)
    assert r12.phases == (r1 + r2).phases
    assert r12.total_cycles == r1.total_cycles + r2.total_cycles

def test_invalid_instructions():
    acc = am.Accelerator()
    with pytest.raises(saberutils.InvalidInstruction):
        acc.step(Instruction(isa.EVAL, am.EVAL_A | am.EVAL_CACHED_B, 0))
    with pytest.raises(saberutils.InvalidInstruction):
        acc.step(Instruction(isa.GEN_MATRIX_STEP, am.MATRIX, 9))
    with pytest.raises(saberutils.InvalidInstruction):
        acc.step(Instruction(isa.PACK, 0, 7))
    with pytest.raises(saberutils.AddressOutOfRange):
        acc.step(Instruction(isa.LOAD_OPERAND, 1000, am.BUF_A))


# ________________________________________________________
# Full KEM on the model

@pytest.mark.parametrize('p', params.ALL_PARAMS, ids=lambda p: p.name)
@pytest.mark.parametrize('cache', [False, True])
def test_kem_on_model_matches_library(p, cache):
    cfg = am.MultiplierConfig(cache_secret_evals=cache)
    seed_A, seed_s, z, coins = seeds(p.l)
    pair, _ = am.simulate_keygen(seed_A, seed_s, z, p, cfg)
    pk, sk = kem.kem_keygen(seed_A, seed_s, z, p)
    assert pair.public_key == pk and pair.secret_key == sk
    ct, ss, _ = am.simulate_encaps(pk, coins, p, cfg)
    assert (ct, ss) == kem.kem_encaps(pk, coins, p)
    ss_model, _ = am.simulate_decaps(sk, ct, p, cfg)
    assert ss_model == ss

def test_model_implicit_rejection():
    seed_A, seed_s, z, coins = seeds(7)
    pk, sk = kem.kem_keygen(seed_A, seed_s, z)
    ct, ss = kem.kem_encaps(pk, coins)
    tampered = bytearray(ct)
    tampered[-1] ^= 0x10
    tampered = bytes(tampered)
    ss_model, _ = am.simulate_decaps(sk, tampered)
    assert ss_model != ss
    assert ss_model == kem.kem_decaps(sk, tampered)

def test_latency_ordering():
    reports = [ am.model_kem(op) for op in am.KEM_OPS ]
    cycles = [ r.total_cycles for r in reports ]
    assert cycles[0] < cycles[1] < cycles[2]
    for report in reports:
        assert report.peak_data_mem_bytes <= am.DATA_MEMORY_BYTES
        assert report.total_storage_bytes <= am.STORAGE_BUDGET_BYTES

@pytest.mark.parametrize('op', am.KEM_OPS)
def test_parallel_unit_scaling(op):
    one = am.model_kem(op, cfg=am.MultiplierConfig(num_point_units=1))
    seven = am.model_kem(op, cfg=am.MultiplierConfig(num_point_units=7))
    assert one.phases['point_mul'] == 7 * seven.phases['point_mul']
    four = am.model_kem(op, cfg=am.MultiplierConfig(num_point_units=4))
    assert four.phases['point_mul'] == 2 * seven.phases['point_mul']

def test_cache_saves_evaluations():
    plain = am.model_kem('encaps')
    cached = am.model_kem('encaps', cfg=am.MultiplierConfig(cache_secret_evals=True))
    assert cached.phases['evaluate'] < plain.phases['evaluate']
    assert cached.phases['point_mul'] == plain.phases['point_mul']
    assert cached.cache_bytes == 3 * am.CACHE_SLOT_BYTES
    assert plain.cache_bytes == 0

def test_cycle_report():
    report = am.model_kem('keygen', clock_mhz=100)
    assert report.op == 'keygen' and report.params == 'Saber'
    assert report.microseconds() == report.total_cycles / 100.
    assert report.microseconds(200) == report.total_cycles / 200.
    assert am.CycleReport.from_json(report.to_json()) == report
    d = json.loads(report.to_json())
    assert d['total_cycles'] == report.total_cycles
    text = report.to_text()
    assert 'point_mul_cycles = {0}'.format(report.phases['point_mul']) in text
    assert 'time_us = ' in text
    with pytest.raises(ValueError):
        am.CycleReport(phases=dict(fetch=1))

def test_model_kem_unknown_op():
    with pytest.raises(ValueError):
        am.model_kem('sign')


# ________________________________________________________
# Storage

@pytest.mark.parametrize('p', params.ALL_PARAMS, ids=lambda p: p.name)
def test_footprint(p):
    report = am.footprint_report(p)
    assert report['local_memory_per_unit'] == 320
    assert report['local_memory'] == 7 * 320
    assert report['data_memory_used'] <= am.DATA_MEMORY_BYTES
    assert report['eval_cache'] == 0
    assert report.point_product_coeffs == 64
    assert report.classical_point_product_coeffs == 127
    assert report.half_size
    assert report.total <= 10240
    assert report.within_budget
    assert 'total_bytes = {0}'.format(report.total) in report.to_text()

def test_footprint_items():
    report = am.footprint_report('Saber', am.MultiplierConfig(cache_secret_evals=True))
    assert report['eval_cache'] == 3 * 448
    assert report['point_products'] == 7 * 64 * 2
    assert report['classical_point_products'] == 7 * 127 * 2
    assert report.total == (
        report['data_memory_used'] + report['local_memory'] + report['program_memory'] + report['eval_cache']
        )
    with pytest.raises(KeyError):
        report['register_file']

def test_memory_map_regions_do_not_overlap():
    for p in params.ALL_PARAMS:
        regions = sorted(am.memory_map(p).values())
        for (addr, nwords), (next_addr, _) in zip(regions, regions[1:]):
            assert addr + nwords <= next_addr
        last_addr, last_words = regions[-1]
        assert last_addr + last_words <= am.RESULT
