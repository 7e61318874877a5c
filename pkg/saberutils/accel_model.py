"""
Instruction-level model of the Saber co-processor.

Data memory is 1024 words of 64 bits (8KB) with two ports: at most two word
accesses per cycle. A word holds four 16-bit coefficients, coefficient 0 in
the low bits, so a polynomial occupies 64 consecutive words and a byte string
is stored little-endian. The host reaches memory through the serial
interface, modeled as direct loads and dumps without cycle cost.

Registers: operand A (public side) and operand B (secret side), the A and B
evaluations held in the local memories of the point units, the point-product
accumulator, the interpolated coefficients, the result polynomial, the hash
digest and an optional cache of secret evaluations.

Opcode semantics (off_a, off_b):

    LOAD_OPERAND     addr, buf          64 words into operand A (buf 0) or B (buf 1)
    STORE_RESULT     addr, src          result poly (0), digest[:32] (1), digest[32:] (2)
    GEN_MATRIX_STEP  addr, k            matrix entry k (row-major) from seed_A at PK
    SAMPLE_SECRET    addr, i            secret polynomial i from the seed at SEED_S
    EVAL             mask, slot         1: evaluate A; 2: evaluate B (and cache it in
                                        slot); 4: take B's evaluation from slot
    POINT_MUL        accumulate, -      7 point products, added to the accumulator if 1
    INTERPOLATE      -, -               Toom-4 interpolation of the accumulator
    RECOMBINE_ROUND  from<<4|to, flags  recombine; subtract operand A aligned to the top
                                        of `from` bits if flags & 0x200; add flags & 0x1ff;
                                        round to `to` bits, or keep `from` bits if to == 0
    HASH_STEP        addr, flags        absorb flags & 0x7f words; 0x80 selects SHA3-512,
                                        0x100 finalizes into the digest
    PACK             addr, flags        pack the result (or operand B if flags & 0x40) at
                                        flags & 0x1f bits; with 0x20 unpack from memory
                                        into operand A (or sign-extended into B)
    HALT             -, -               stop

Every cycle constant lives in COST_TABLE.
"""
import json, math
import numpy as np
import saberutils
from . import ring
from . import poly
from . import toomcook
from . import sampler
from . import isa
from . import kem
from .params import get_params, SEED_BYTES, KEY_BYTES
logger = saberutils.logger

NUM_WORDS = 1 << isa.OFFSET_BITS
WORD_BYTES = 8
COEFFS_PER_WORD = 4
DATA_MEMORY_BYTES = NUM_WORDS * WORD_BYTES
MEMORY_PORTS = 2
POLY_WORDS = poly.N // COEFFS_PER_WORD
SEED_WORDS = SEED_BYTES // WORD_BYTES
STORAGE_BUDGET_BYTES = 10240

COST_TABLE = dict(
    mac_cycles = 1,
    keccak_permutation_cycles = 24,
    vector_op_cycles = toomcook.N_STRIDED // COEFFS_PER_WORD,
    eval_vector_ops = toomcook.EVAL_VECTOR_OPS,
    interp_vector_ops = toomcook.INTERP_VECTOR_OPS,
    recombine_vector_ops = toomcook.RECOMBINE_VECTOR_OPS,
    round_vector_ops = 8,
    correction_vector_ops = 8,
    shake128_rate = 168,
    sha3_256_rate = 136,
    sha3_512_rate = 72,
    )

PHASES = ('sample', 'matrix_gen', 'evaluate', 'point_mul', 'interpolate', 'recombine', 'hash', 'pack')

PHASE_OF_OPCODE = {
    isa.LOAD_OPERAND : 'evaluate',
    isa.STORE_RESULT : 'recombine',
    isa.GEN_MATRIX_STEP : 'matrix_gen',
    isa.SAMPLE_SECRET : 'sample',
    isa.EVAL : 'evaluate',
    isa.POINT_MUL : 'point_mul',
    isa.INTERPOLATE : 'interpolate',
    isa.RECOMBINE_ROUND : 'recombine',
    isa.HASH_STEP : 'hash',
    isa.PACK : 'pack',
    }

# Memory map, in word addresses
SEED_S = 0
MSG = 4
HPK = 8
KHAT = 12
Z = 16
SS = 20
SS_REJECT = 24
PK = 28
CT = 192
CT_PRIME = 376
SECRET = 560
MATRIX = 816
RESULT = 880

# Instruction flags
BUF_A = 0
BUF_B = 1
STORE_POLY = 0
STORE_DIGEST_LOW = 1
STORE_DIGEST_HIGH = 2
EVAL_A = 1
EVAL_B = 2
EVAL_CACHED_B = 4
MAX_CACHE_SLOTS = 4
ROUND_ADDEND_MASK = 0x1ff
ROUND_SUBTRACT = 0x200
HASH_WORDS_MASK = 0x7f
HASH_WIDE = 0x80
HASH_FINAL = 0x100
PACK_BITS_MASK = 0x1f
PACK_UNPACK = 0x20
PACK_SECRET = 0x40

# Local memory of one point unit: A and C at 64 x 16 bits, B at 64 x 8 bits
LOCAL_A_BYTES = toomcook.N_STRIDED * 2
LOCAL_C_BYTES = toomcook.N_STRIDED * 2
LOCAL_B_BYTES = toomcook.N_STRIDED * 1
CACHE_SLOT_BYTES = toomcook.NUM_POINTS * LOCAL_B_BYTES


def bytes_to_coeffs(data):
    if len(data) % WORD_BYTES:
        raise saberutils.BufferLengthError('{0} bytes is not a whole number of words'.format(len(data)))
    return np.frombuffer(bytes(data), dtype='<u2').astype(np.int64)


def coeffs_to_bytes(coeffs):
    return np.asarray(coeffs).astype('<u2').tobytes()


def packed_words(params, bits):
    return params.poly_bytes(bits) // WORD_BYTES


def memory_map(params):
    """Region name -> (word address, word count) for the KEM programs"""
    params = get_params(params)
    ct_words = params.l * packed_words(params, params.ep) + packed_words(params, params.eT)
    return dict(
        seed_s = (SEED_S, SEED_WORDS),
        message = (MSG, SEED_WORDS),
        pk_hash = (HPK, SEED_WORDS),
        k_hat = (KHAT, SEED_WORDS),
        z = (Z, SEED_WORDS),
        ss = (SS, SEED_WORDS),
        ss_reject = (SS_REJECT, SEED_WORDS),
        pk = (PK, SEED_WORDS + params.l * packed_words(params, params.ep)),
        ct = (CT, ct_words),
        ct_prime = (CT_PRIME, ct_words),
        secret = (SECRET, params.l * POLY_WORDS),
        matrix = (MATRIX, POLY_WORDS),
        )


class DataMemory(object):
    """
    1024 x 64-bit dual-port memory. `read` and `write` model single port
    accesses within the current cycle; `tick` advances the cycle. The bulk
    accessors schedule two accesses per cycle. Host loads and dumps bypass
    the ports.
    """

    def __init__(self):
        self.coeffs = np.zeros(NUM_WORDS * COEFFS_PER_WORD, dtype=np.int64)
        self.touched = np.zeros(NUM_WORDS, dtype=bool)
        self.cycle = 0
        self._port_uses = 0

    def copy(self):
        other = DataMemory()
        other.coeffs = self.coeffs.copy()
        other.touched = self.touched.copy()
        other.cycle = self.cycle
        return other

    @property
    def peak_bytes(self):
        """Bytes of every word ever touched"""
        return int(self.touched.sum()) * WORD_BYTES

    def _check_range(self, addr, nwords):
        if addr < 0 or nwords < 0 or addr + nwords > NUM_WORDS:
            raise saberutils.AddressOutOfRange('words {0}..{1}'.format(addr, addr + nwords - 1))

    def _access(self, addr):
        self._check_range(addr, 1)
        if self._port_uses >= MEMORY_PORTS:
            raise saberutils.DualPortViolation('cycle {0}, word {1}'.format(self.cycle, addr))
        self._port_uses += 1
        self.touched[addr] = True

    def tick(self):
        self.cycle += 1
        self._port_uses = 0

    def read(self, addr):
        self._access(addr)
        return sum(
            int(c) << (16 * k)
            for k, c in enumerate(self.coeffs[addr*COEFFS_PER_WORD:(addr+1)*COEFFS_PER_WORD])
            )

    def write(self, addr, value):
        self._access(addr)
        self.coeffs[addr*COEFFS_PER_WORD:(addr+1)*COEFFS_PER_WORD] = [
            (value >> (16 * k)) & 0xffff for k in range(COEFFS_PER_WORD)
            ]

    def _schedule(self, addr, nwords):
        self._check_range(addr, nwords)
        start = self.cycle
        for a in range(addr, addr + nwords):
            if self._port_uses == MEMORY_PORTS: self.tick()
            self._access(a)
        if self._port_uses: self.tick()
        return self.cycle - start

    def read_words(self, addr, nwords):
        """Returns (coefficients, cycles)"""
        cycles = self._schedule(addr, nwords)
        return self.coeffs[addr*COEFFS_PER_WORD:(addr+nwords)*COEFFS_PER_WORD].copy(), cycles

    def write_words(self, addr, coeffs):
        """Returns the cycles spent"""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        nwords = len(coeffs) // COEFFS_PER_WORD
        cycles = self._schedule(addr, nwords)
        self.coeffs[addr*COEFFS_PER_WORD:(addr+nwords)*COEFFS_PER_WORD] = coeffs & 0xffff
        return cycles

    def load_bytes(self, addr, data):
        coeffs = bytes_to_coeffs(data)
        nwords = len(coeffs) // COEFFS_PER_WORD
        self._check_range(addr, nwords)
        self.coeffs[addr*COEFFS_PER_WORD:(addr+nwords)*COEFFS_PER_WORD] = coeffs
        self.touched[addr:addr+nwords] = True

    def dump_bytes(self, addr, nbytes):
        if nbytes % WORD_BYTES:
            raise saberutils.BufferLengthError('{0} bytes is not a whole number of words'.format(nbytes))
        nwords = nbytes // WORD_BYTES
        self._check_range(addr, nwords)
        return coeffs_to_bytes(self.coeffs[addr*COEFFS_PER_WORD:(addr+nwords)*COEFFS_PER_WORD])

    def load_poly(self, addr, a):
        self.load_bytes(addr, coeffs_to_bytes(a.coeffs))

    def dump_poly(self, addr, width=ring.WORKING_WIDTH):
        self._check_range(addr, POLY_WORDS)
        return poly.Poly(self.coeffs[addr*COEFFS_PER_WORD:(addr+POLY_WORDS)*COEFFS_PER_WORD], width)

    def __eq__(self, other):
        return isinstance(other, DataMemory) and bool(np.array_equal(self.coeffs, other.coeffs))

    def __ne__(self, other):
        return not(self == other)


class MultiplierConfig(object):

    def __init__(self, num_point_units=toomcook.NUM_POINTS, macs_per_unit=4, cache_secret_evals=False):
        if not(1 <= num_point_units <= toomcook.NUM_POINTS):
            raise saberutils.InvalidConfig('num_point_units must be in 1..{0}, got {1}'.format(toomcook.NUM_POINTS, num_point_units))
        if macs_per_unit < 1:
            raise saberutils.InvalidConfig('macs_per_unit must be at least 1, got {0}'.format(macs_per_unit))
        self.num_point_units = num_point_units
        self.macs_per_unit = macs_per_unit
        self.cache_secret_evals = cache_secret_evals

    @property
    def local_mem_bytes_per_unit(self):
        return LOCAL_A_BYTES + LOCAL_C_BYTES + LOCAL_B_BYTES

    @property
    def point_sets_per_unit(self):
        """Point products each unit handles in sequence"""
        return int(math.ceil(toomcook.NUM_POINTS / float(self.num_point_units)))

    @property
    def local_mem_bytes(self):
        return self.num_point_units * self.point_sets_per_unit * self.local_mem_bytes_per_unit

    @property
    def point_mul_cycles(self):
        macs = toomcook.N_STRIDED * toomcook.N_STRIDED
        per_product = int(math.ceil(macs / float(self.macs_per_unit))) * COST_TABLE['mac_cycles']
        return self.point_sets_per_unit * per_product

    def cache_bytes(self, l):
        return l * CACHE_SLOT_BYTES if self.cache_secret_evals else 0

    def __repr__(self):
        return '<MultiplierConfig units={0} macs={1} cache={2}>'.format(
            self.num_point_units, self.macs_per_unit, self.cache_secret_evals
            )


class CycleReport(object):
    """Per-phase cycle counts and storage figures of one modeled run"""

    def __init__(
        self, phases=None, instructions=0,
        peak_data_mem_bytes=0, peak_local_mem_bytes=0, program_bytes=0, cache_bytes=0,
        clock_mhz=None, op=None, params=None,
        ):
        self.phases = { phase : 0 for phase in PHASES }
        if phases:
            unknown = set(phases) - set(PHASES)
            if unknown: raise ValueError('Unknown phases: {0}'.format(', '.join(sorted(unknown))))
            self.phases.update(phases)
        self.instructions = instructions
        self.peak_data_mem_bytes = peak_data_mem_bytes
        self.peak_local_mem_bytes = peak_local_mem_bytes
        self.program_bytes = program_bytes
        self.cache_bytes = cache_bytes
        self.clock_mhz = saberutils.DEFAULT_CLOCK_MHZ if clock_mhz is None else clock_mhz
        self.op = op
        self.params = params

    @property
    def total_cycles(self):
        return sum(self.phases.values())

    @property
    def total_storage_bytes(self):
        return self.peak_data_mem_bytes + self.peak_local_mem_bytes + self.program_bytes + self.cache_bytes

    def microseconds(self, clock_mhz=None):
        if clock_mhz is None: clock_mhz = self.clock_mhz
        return self.total_cycles / float(clock_mhz)

    def __add__(self, other):
        return CycleReport(
            phases = { phase : self.phases[phase] + other.phases[phase] for phase in PHASES },
            instructions = self.instructions + other.instructions,
            peak_data_mem_bytes = max(self.peak_data_mem_bytes, other.peak_data_mem_bytes),
            peak_local_mem_bytes = max(self.peak_local_mem_bytes, other.peak_local_mem_bytes),
            program_bytes = self.program_bytes + other.program_bytes,
            cache_bytes = max(self.cache_bytes, other.cache_bytes),
            clock_mhz = self.clock_mhz,
            op = self.op if self.op == other.op else None,
            params = self.params if self.params == other.params else None,
            )

    def to_dict(self):
        return dict(
            op = self.op,
            params = self.params,
            phases = dict(self.phases),
            total_cycles = self.total_cycles,
            instructions = self.instructions,
            memory = dict(
                peak_data_mem_bytes = self.peak_data_mem_bytes,
                peak_local_mem_bytes = self.peak_local_mem_bytes,
                program_bytes = self.program_bytes,
                cache_bytes = self.cache_bytes,
                total_storage_bytes = self.total_storage_bytes,
                ),
            clock_mhz = self.clock_mhz,
            time_us = self.microseconds(),
            )

    @classmethod
    def from_dict(cls, d):
        memory = d.get('memory', {})
        return cls(
            phases = d['phases'],
            instructions = d.get('instructions', 0),
            peak_data_mem_bytes = memory.get('peak_data_mem_bytes', 0),
            peak_local_mem_bytes = memory.get('peak_local_mem_bytes', 0),
            program_bytes = memory.get('program_bytes', 0),
            cache_bytes = memory.get('cache_bytes', 0),
            clock_mhz = d.get('clock_mhz'),
            op = d.get('op'),
            params = d.get('params'),
            )

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_text(self):
        lines = []
        if self.op: lines.append('op = {0}'.format(self.op))
        if self.params: lines.append('params = {0}'.format(self.params))
        for phase in PHASES:
            lines.append('{0}_cycles = {1}'.format(phase, self.phases[phase]))
        lines.extend([
            'total_cycles = {0}'.format(self.total_cycles),
            'instructions = {0}'.format(self.instructions),
            'peak_data_mem_bytes = {0}'.format(self.peak_data_mem_bytes),
            'peak_local_mem_bytes = {0}'.format(self.peak_local_mem_bytes),
            'program_bytes = {0}'.format(self.program_bytes),
            'cache_bytes = {0}'.format(self.cache_bytes),
            'total_storage_bytes = {0}'.format(self.total_storage_bytes),
            'clock_mhz = {0}'.format(self.clock_mhz),
            'time_us = {0:.3f}'.format(self.microseconds()),
            ])
        return '\n'.join(lines) + '\n'

    def __eq__(self, other):
        return isinstance(other, CycleReport) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not(self == other)

    def __repr__(self):
        return '<CycleReport {0} {1} cycles>'.format(self.op or '', self.total_cycles)


def xof_permutations(offset, nbytes, rate):
    """
    Keccak permutations charged for squeezing bytes [offset, offset+nbytes)
    of an XOF stream: every output block overlapping the slice, plus the
    absorbing permutation for the slice that starts the stream
    """
    blocks = -(-(offset + nbytes) // rate) - offset // rate
    return blocks + (1 if offset == 0 else 0)


class Accelerator(object):
    """
    Executes programs instruction by instruction against a DataMemory.
    Arithmetic is delegated to the toomcook, sampler, ring and poly modules,
    so results are bit-identical to the library path.
    """

    def __init__(self, params=None, cfg=None, memory=None):
        self.params = get_params(params)
        self.cfg = MultiplierConfig() if cfg is None else cfg
        self.memory = DataMemory() if memory is None else memory
        self.operands = [ poly.Poly.zero(poly.N, ring.WORKING_WIDTH) for _ in range(2) ]
        self.eval_a = toomcook.EvalVec7.zero()
        self.eval_b = toomcook.EvalVec7.zero()
        self.acc = toomcook.EvalVec7.zero()
        self.interpolated = toomcook.EvalVec7.zero().points
        self.result = poly.Poly.zero(poly.N, ring.WORKING_WIDTH)
        self.digest = b''
        self.cache = {}
        self._hash_buffer = None
        self._hash_wide = False
        self._handlers = {
            isa.LOAD_OPERAND : self._load_operand,
            isa.STORE_RESULT : self._store_result,
            isa.GEN_MATRIX_STEP : self._gen_matrix_step,
            isa.SAMPLE_SECRET : self._sample_secret,
            isa.EVAL : self._eval,
            isa.POINT_MUL : self._point_mul,
            isa.INTERPOLATE : self._interpolate,
            isa.RECOMBINE_ROUND : self._recombine_round,
            isa.HASH_STEP : self._hash_step,
            isa.PACK : self._pack,
            }

    def _vector_cycles(self, key):
        return COST_TABLE[key] * COST_TABLE['vector_op_cycles']

    def _read_bytes(self, addr, nwords):
        coeffs, cycles = self.memory.read_words(addr, nwords)
        return coeffs_to_bytes(coeffs), cycles

    def _load_operand(self, addr, buf):
        if buf not in (BUF_A, BUF_B):
            raise saberutils.InvalidInstruction('LOAD_OPERAND buffer {0}'.format(buf))
        coeffs, cycles = self.memory.read_words(addr, POLY_WORDS)
        self.operands[buf] = poly.Poly(coeffs, ring.WORKING_WIDTH)
        return cycles

    def _store_result(self, addr, source):
        if source == STORE_POLY:
            return self.memory.write_words(addr, self.result.coeffs)
        if source == STORE_DIGEST_LOW:
            half = self.digest[:KEY_BYTES]
        elif source == STORE_DIGEST_HIGH:
            half = self.digest[KEY_BYTES:2*KEY_BYTES]
        else:
            raise saberutils.InvalidInstruction('STORE_RESULT source {0}'.format(source))
        if len(half) != KEY_BYTES:
            raise saberutils.InvalidInstruction('STORE_RESULT source {0}: no such digest half'.format(source))
        return self.memory.write_words(addr, bytes_to_coeffs(half))

    def _gen_matrix_step(self, addr, k):
        p = self.params
        if k >= p.l * p.l:
            raise saberutils.InvalidInstruction('matrix entry {0} for rank {1}'.format(k, p.l))
        seed, cycles = self._read_bytes(PK, SEED_WORDS)
        size = p.poly_bytes(p.eq)
        entry = sampler.gen_matrix_entry(seed, p, k)
        cycles += xof_permutations(k * size, size, COST_TABLE['shake128_rate']) * COST_TABLE['keccak_permutation_cycles']
        return cycles + self.memory.write_words(addr, entry.coeffs)

    def _sample_secret(self, addr, i):
        p = self.params
        if i >= p.l:
            raise saberutils.InvalidInstruction('secret polynomial {0} for rank {1}'.format(i, p.l))
        seed, cycles = self._read_bytes(SEED_S, SEED_WORDS)
        size = p.poly_bytes(p.mu)
        buf = sampler.xof_expand(seed, b'', (i + 1) * size)[i*size:]
        s = sampler.cbd_sample(buf, p.mu)
        cycles += xof_permutations(i * size, size, COST_TABLE['shake128_rate']) * COST_TABLE['keccak_permutation_cycles']
        return cycles + self.memory.write_words(addr, s.coeffs)

    def _eval(self, mask, slot):
        if not(0 < mask < 8) or (mask & EVAL_B and mask & EVAL_CACHED_B):
            raise saberutils.InvalidInstruction('EVAL mask {0}'.format(mask))
        cycles = 0
        if mask & EVAL_A:
            self.eval_a = toomcook.evaluate_poly(self.operands[BUF_A])
            cycles += self._vector_cycles('eval_vector_ops')
        if mask & EVAL_B:
            self.eval_b = toomcook.evaluate_poly(self.operands[BUF_B])
            cycles += self._vector_cycles('eval_vector_ops')
            if self.cfg.cache_secret_evals:
                if slot >= MAX_CACHE_SLOTS:
                    raise saberutils.InvalidInstruction('cache slot {0}'.format(slot))
                self.cache[slot] = self.eval_b
        if mask & EVAL_CACHED_B:
            if not self.cfg.cache_secret_evals:
                raise saberutils.InvalidInstruction('the evaluation cache is disabled')
            if slot not in self.cache:
                raise saberutils.InvalidInstruction('cache slot {0} is empty'.format(slot))
            self.eval_b = self.cache[slot]
        return cycles

    def _point_mul(self, accumulate, _):
        if accumulate not in (0, 1):
            raise saberutils.InvalidInstruction('POINT_MUL accumulate flag {0}'.format(accumulate))
        products = toomcook.point_mul_all(self.eval_a, self.eval_b)
        self.acc = self.acc + products if accumulate else products
        return self.cfg.point_mul_cycles

    def _interpolate(self, *_):
        self.interpolated = toomcook.tc4_interpolate(self.acc)
        return self._vector_cycles('interp_vector_ops')

    def _recombine_round(self, widths, flags):
        from_bits, to_bits = widths >> 4, widths & 0xf
        if not(1 <= from_bits <= toomcook.EXACT_WIDTH) or to_bits >= from_bits:
            raise saberutils.InvalidInstruction('RECOMBINE_ROUND from {0} to {1} bits'.format(from_bits, to_bits))
        x = toomcook.strided_recombine(self.interpolated, ring.WORKING_WIDTH).coeffs
        cycles = self._vector_cycles('recombine_vector_ops')
        if flags & ROUND_SUBTRACT:
            correction = self.operands[BUF_A]
            if correction.width > from_bits:
                raise saberutils.InvalidInstruction(
                    'correction operand of {0} bits exceeds {1} bits'.format(correction.width, from_bits)
                    )
            x = x - (correction.coeffs << (from_bits - correction.width))
            cycles += self._vector_cycles('correction_vector_ops')
        addend = flags & ROUND_ADDEND_MASK
        if to_bits:
            self.result = poly.Poly(ring.round_shift(x, from_bits, to_bits, addend), to_bits)
            cycles += self._vector_cycles('round_vector_ops')
        else:
            self.result = poly.Poly(x + addend, from_bits)
        return cycles

    def _hash_step(self, addr, flags):
        if flags & ~(HASH_WORDS_MASK | HASH_WIDE | HASH_FINAL):
            raise saberutils.InvalidInstruction('HASH_STEP flags 0x{0:x}'.format(flags))
        nwords = flags & HASH_WORDS_MASK
        wide = bool(flags & HASH_WIDE)
        if self._hash_buffer is None:
            self._hash_buffer = b''
            self._hash_wide = wide
        elif wide != self._hash_wide:
            raise saberutils.InvalidInstruction('hash width changed within one message')
        data, cycles = self._read_bytes(addr, nwords)
        rate = COST_TABLE['sha3_512_rate' if wide else 'sha3_256_rate']
        before = len(self._hash_buffer)
        self._hash_buffer += data
        permutations = len(self._hash_buffer) // rate - before // rate
        if flags & HASH_FINAL:
            hash_fn = sampler.hash_g if wide else sampler.hash_h
            self.digest = hash_fn(self._hash_buffer)
            self._hash_buffer = None
            permutations += 1
        return cycles + permutations * COST_TABLE['keccak_permutation_cycles']

    def _pack(self, addr, flags):
        if flags & ~(PACK_BITS_MASK | PACK_UNPACK | PACK_SECRET):
            raise saberutils.InvalidInstruction('PACK flags 0x{0:x}'.format(flags))
        bits = flags & PACK_BITS_MASK
        if bits not in poly.SUPPORTED_PACK_WIDTHS:
            raise saberutils.InvalidInstruction('PACK width {0}'.format(bits))
        nwords = poly.N * bits // 8 // WORD_BYTES
        if flags & PACK_UNPACK:
            data, cycles = self._read_bytes(addr, nwords)
            unpacked = poly.unpack(data, bits)
            if flags & PACK_SECRET:
                self.operands[BUF_B] = unpacked.sign_extend()
            else:
                self.operands[BUF_A] = unpacked
            return cycles
        source = self.operands[BUF_B] if flags & PACK_SECRET else self.result
        return self.memory.write_words(addr, bytes_to_coeffs(poly.pack(source, bits)))

    def step(self, instr):
        """Executes one instruction; returns (phase, cycles)"""
        if not isinstance(instr, isa.Instruction):
            instr = isa.decode_instr(instr)
        cycles = self._handlers[instr.opcode](instr.off_a, instr.off_b)
        return PHASE_OF_OPCODE[instr.opcode], cycles

    def run(self, program):
        """
        Runs until HALT or the end of the program; accepts Instructions or
        encoded words
        """
        report = CycleReport(params=self.params.name)
        executed = 0
        for instr in program:
            if not isinstance(instr, isa.Instruction):
                instr = isa.decode_instr(instr)
            executed += 1
            if instr.opcode == isa.HALT: break
            phase, cycles = self.step(instr)
            report.phases[phase] += cycles
            report.instructions += 1
        report.program_bytes = executed * isa.INSTRUCTION_BYTES
        report.peak_data_mem_bytes = self.memory.peak_bytes
        report.peak_local_mem_bytes = self.cfg.local_mem_bytes
        report.cache_bytes = len(self.cache) * CACHE_SLOT_BYTES
        logger.debug('Executed %s instructions in %s cycles', report.instructions, report.total_cycles)
        return report


def run_program(prog, mem, cfg=None, params=None):
    """Runs `prog` on a copy of `mem`; returns (final memory, CycleReport)"""
    accelerator = Accelerator(params, cfg, mem.copy())
    report = accelerator.run(prog)
    return accelerator.memory, report


# _______________________________________________________
# Micro-program generators

def inner_product_program(l, a_addr, b_addr, out_addr, out_width=toomcook.EXACT_WIDTH):
    """
    sum_i a_i * b_i for a_i at a_addr + 64 i and secret-side b_i at
    b_addr + 64 i, stored as a polynomial at out_addr
    """
    I = isa.Instruction
    prog = []
    for j in range(l):
        prog.append(I(isa.LOAD_OPERAND, a_addr + j * POLY_WORDS, BUF_A))
        prog.append(I(isa.LOAD_OPERAND, b_addr + j * POLY_WORDS, BUF_B))
        prog.append(I(isa.EVAL, EVAL_A | EVAL_B, j))
        prog.append(I(isa.POINT_MUL, int(j > 0), 0))
    prog.append(I(isa.INTERPOLATE))
    prog.append(I(isa.RECOMBINE_ROUND, out_width << 4, 0))
    prog.append(I(isa.STORE_RESULT, out_addr, STORE_POLY))
    return prog


def _secret_term(params, cfg, j, secret_addr, packed=False, reuse=False):
    """Brings secret polynomial j into the B evaluation, then evaluates A"""
    I = isa.Instruction
    if reuse and cfg.cache_secret_evals:
        return [ I(isa.EVAL, EVAL_A | EVAL_CACHED_B, j) ]
    if packed:
        load = I(isa.PACK, secret_addr + j * packed_words(params, params.eq), params.eq | PACK_UNPACK | PACK_SECRET)
    else:
        load = I(isa.LOAD_OPERAND, secret_addr + j * POLY_WORDS, BUF_B)
    return [ load, I(isa.EVAL, EVAL_A | EVAL_B, j) ]


def hash_program(regions, wide=False):
    """Absorbs (addr, nwords) regions in order and finalizes"""
    I = isa.Instruction
    chunks = []
    for addr, nwords in regions:
        for offset in range(0, nwords, HASH_WORDS_MASK):
            chunks.append((addr + offset, min(HASH_WORDS_MASK, nwords - offset)))
    prog = []
    for i, (addr, nwords) in enumerate(chunks):
        flags = nwords | (HASH_WIDE if wide else 0) | (HASH_FINAL if i == len(chunks) - 1 else 0)
        prog.append(I(isa.HASH_STEP, addr, flags))
    return prog


def matrix_vector_program(params, cfg, transpose, secret_addr, dst_addr):
    """
    round(A s) (or A^T s) from eq to ep bits, packed row by row at dst_addr.
    Matrix entries are generated into a single buffer as they are consumed.
    """
    I = isa.Instruction
    l = params.l
    prog = []
    for i in range(l):
        for j in range(l):
            k = j * l + i if transpose else i * l + j
            prog.append(I(isa.GEN_MATRIX_STEP, MATRIX, k))
            prog.append(I(isa.LOAD_OPERAND, MATRIX, BUF_A))
            prog.extend(_secret_term(params, cfg, j, secret_addr, reuse=(i > 0)))
            prog.append(I(isa.POINT_MUL, int(j > 0), 0))
        prog.append(I(isa.INTERPOLATE))
        prog.append(I(isa.RECOMBINE_ROUND, (params.eq << 4) | params.ep, params.h1))
        prog.append(I(isa.PACK, dst_addr + i * packed_words(params, params.ep), params.ep))
    return prog


def _pk_words(params):
    return memory_map(params)['pk'][1]


def _ct_words(params):
    return memory_map(params)['ct'][1]


def keygen_program(params, cfg):
    """
    Host loads seed_A at PK, seed_s at SEED_S and z at Z. Leaves pk at PK,
    the packed secret at SECRET and hash_h(pk) at HPK.
    """
    I = isa.Instruction
    l = params.l
    prog = [ I(isa.SAMPLE_SECRET, SECRET + i * POLY_WORDS, i) for i in range(l) ]
    prog += matrix_vector_program(params, cfg, True, SECRET, PK + SEED_WORDS)
    # Compacts the secret in place; every destination is at or below its source
    for i in range(l):
        prog.append(I(isa.LOAD_OPERAND, SECRET + i * POLY_WORDS, BUF_B))
        prog.append(I(isa.PACK, SECRET + i * packed_words(params, params.eq), params.eq | PACK_SECRET))
    prog += hash_program([(PK, _pk_words(params))])
    prog.append(I(isa.STORE_RESULT, HPK, STORE_DIGEST_LOW))
    prog.append(I(isa.HALT))
    return prog


def encrypt_program(params, cfg, ct_addr):
    """Encrypts the message at MSG under pk at PK with the seed at SEED_S"""
    I = isa.Instruction
    l = params.l
    ep_words = packed_words(params, params.ep)
    prog = [ I(isa.SAMPLE_SECRET, SECRET + i * POLY_WORDS, i) for i in range(l) ]
    prog += matrix_vector_program(params, cfg, False, SECRET, ct_addr)
    for j in range(l):
        prog.append(I(isa.PACK, PK + SEED_WORDS + j * ep_words, params.ep | PACK_UNPACK))
        prog.extend(_secret_term(params, cfg, j, SECRET, reuse=True))
        prog.append(I(isa.POINT_MUL, int(j > 0), 0))
    prog.append(I(isa.PACK, MSG, 1 | PACK_UNPACK))
    prog.append(I(isa.INTERPOLATE))
    prog.append(I(isa.RECOMBINE_ROUND, (params.ep << 4) | params.eT, params.h1 | ROUND_SUBTRACT))
    prog.append(I(isa.PACK, ct_addr + l * ep_words, params.eT))
    return prog


def encaps_program(params, cfg):
    """Host loads pk at PK and the encapsulation seed at MSG; leaves ct at CT and ss at SS"""
    I = isa.Instruction
    prog = hash_program([(MSG, SEED_WORDS)])
    prog.append(I(isa.STORE_RESULT, MSG, STORE_DIGEST_LOW))
    prog += hash_program([(PK, _pk_words(params))])
    prog.append(I(isa.STORE_RESULT, HPK, STORE_DIGEST_LOW))
    prog += hash_program([(HPK, SEED_WORDS), (MSG, SEED_WORDS)], wide=True)
    prog.append(I(isa.STORE_RESULT, KHAT, STORE_DIGEST_LOW))
    prog.append(I(isa.STORE_RESULT, SEED_S, STORE_DIGEST_HIGH))
    prog += encrypt_program(params, cfg, CT)
    prog += hash_program([(KHAT, SEED_WORDS), (CT, _ct_words(params))])
    prog.append(I(isa.STORE_RESULT, SS, STORE_DIGEST_LOW))
    prog.append(I(isa.HALT))
    return prog


def decaps_program(params, cfg):
    """
    Host loads the secret key regions (packed s at SECRET, pk at PK,
    hash_h(pk) at HPK, z at Z) and ct at CT. Leaves the re-encryption at
    CT_PRIME and both candidate secrets at SS and SS_REJECT; the host picks
    one by comparing CT with CT_PRIME.
    """
    I = isa.Instruction
    l = params.l
    ep_words = packed_words(params, params.ep)
    prog = []
    for j in range(l):
        prog.append(I(isa.PACK, CT + j * ep_words, params.ep | PACK_UNPACK))
        prog.extend(_secret_term(params, cfg, j, SECRET, packed=True))
        prog.append(I(isa.POINT_MUL, int(j > 0), 0))
    prog.append(I(isa.PACK, CT + l * ep_words, params.eT | PACK_UNPACK))
    prog.append(I(isa.INTERPOLATE))
    prog.append(I(isa.RECOMBINE_ROUND, (params.ep << 4) | 1, params.h2 | ROUND_SUBTRACT))
    prog.append(I(isa.PACK, MSG, 1))
    prog += hash_program([(HPK, SEED_WORDS), (MSG, SEED_WORDS)], wide=True)
    prog.append(I(isa.STORE_RESULT, KHAT, STORE_DIGEST_LOW))
    prog.append(I(isa.STORE_RESULT, SEED_S, STORE_DIGEST_HIGH))
    prog += encrypt_program(params, cfg, CT_PRIME)
    prog += hash_program([(KHAT, SEED_WORDS), (CT, _ct_words(params))])
    prog.append(I(isa.STORE_RESULT, SS, STORE_DIGEST_LOW))
    prog += hash_program([(Z, SEED_WORDS), (CT, _ct_words(params))])
    prog.append(I(isa.STORE_RESULT, SS_REJECT, STORE_DIGEST_LOW))
    prog.append(I(isa.HALT))
    return prog


PROGRAMS = dict(keygen=keygen_program, encaps=encaps_program, decaps=decaps_program)
KEM_OPS = ('keygen', 'encaps', 'decaps')


# _______________________________________________________
# Full KEM operations on the model

def simulate_keygen(seed_A, seed_s, z, params=None, cfg=None):
    """Returns (KeyPair, CycleReport)"""
    params = get_params(params)
    for seed in (seed_A, seed_s, z): sampler.check_seed(seed)
    accelerator = Accelerator(params, cfg)
    mem = accelerator.memory
    mem.load_bytes(PK, seed_A)
    mem.load_bytes(SEED_S, seed_s)
    mem.load_bytes(Z, z)
    report = accelerator.run(keygen_program(params, accelerator.cfg))
    report.op = 'keygen'
    pk = mem.dump_bytes(PK, params.pk_bytes)
    sk = mem.dump_bytes(SECRET, params.pke_sk_bytes) + pk + mem.dump_bytes(HPK, KEY_BYTES) + mem.dump_bytes(Z, KEY_BYTES)
    return kem.KeyPair(pk, sk), report


def simulate_encaps(pk, seed, params=None, cfg=None):
    """Returns (ct, ss, CycleReport)"""
    params = get_params(params)
    if len(pk) != params.pk_bytes:
        raise saberutils.BufferLengthError('public key must be {0} bytes, got {1}'.format(params.pk_bytes, len(pk)))
    sampler.check_seed(seed)
    accelerator = Accelerator(params, cfg)
    mem = accelerator.memory
    mem.load_bytes(PK, pk)
    mem.load_bytes(MSG, seed)
    report = accelerator.run(encaps_program(params, accelerator.cfg))
    report.op = 'encaps'
    return mem.dump_bytes(CT, params.ct_bytes), mem.dump_bytes(SS, KEY_BYTES), report


def simulate_decaps(sk, ct, params=None, cfg=None):
    """Returns (ss, CycleReport)"""
    params = get_params(params)
    if len(sk) != params.sk_bytes:
        raise saberutils.BufferLengthError('secret key must be {0} bytes, got {1}'.format(params.sk_bytes, len(sk)))
    if len(ct) != params.ct_bytes:
        raise saberutils.BufferLengthError('ciphertext must be {0} bytes, got {1}'.format(params.ct_bytes, len(ct)))
    accelerator = Accelerator(params, cfg)
    mem = accelerator.memory
    offset = params.pke_sk_bytes
    mem.load_bytes(SECRET, sk[:offset])
    mem.load_bytes(PK, sk[offset:offset+params.pk_bytes])
    offset += params.pk_bytes
    mem.load_bytes(HPK, sk[offset:offset+KEY_BYTES])
    mem.load_bytes(Z, sk[offset+KEY_BYTES:])
    mem.load_bytes(CT, ct)
    report = accelerator.run(decaps_program(params, accelerator.cfg))
    report.op = 'decaps'
    rejected = kem.bytes_differ(bytes(ct), mem.dump_bytes(CT_PRIME, params.ct_bytes))
    ss = kem.select_bytes(rejected, mem.dump_bytes(SS, KEY_BYTES), mem.dump_bytes(SS_REJECT, KEY_BYTES))
    return ss, report


MODEL_SEED = bytes(SEED_BYTES)

def _model_seed(name):
    return sampler.xof_expand(MODEL_SEED, name.encode(), SEED_BYTES)


def model_kem(op, params=None, cfg=None, clock_mhz=None):
    """
    Runs the canned program of a KEM operation on fixed seeds and returns
    its CycleReport
    """
    if op not in KEM_OPS:
        raise ValueError('Unknown KEM operation {0} (choices: {1})'.format(op, ', '.join(KEM_OPS)))
    params = get_params(params)
    seed_A, seed_s, z, coins = [ _model_seed(name) for name in ('seed_A', 'seed_s', 'z', 'coins') ]
    if op == 'keygen':
        _, report = simulate_keygen(seed_A, seed_s, z, params, cfg)
    else:
        pk, sk = kem.kem_keygen(seed_A, seed_s, z, params)
        if op == 'encaps':
            _, _, report = simulate_encaps(pk, coins, params, cfg)
        else:
            ct, _ = kem.kem_encaps(pk, coins, params)
            _, report = simulate_decaps(sk, ct, params, cfg)
    if clock_mhz is not None: report.clock_mhz = clock_mhz
    logger.info(
        'Modeled %s for %s: %s cycles, %.3f us at %s MHz',
        op, params.name, report.total_cycles, report.microseconds(), report.clock_mhz
        )
    return report


# _______________________________________________________
# Storage accounting

class FootprintReport(object):
    """
    Itemized storage. `rows` are (item, bytes, counted) triples; `total`
    sums the counted ones.
    """

    def __init__(self, params, cfg, rows):
        self.params = params
        self.cfg = cfg
        self.rows = rows
        self.point_product_coeffs = toomcook.N_STRIDED
        self.classical_point_product_coeffs = toomcook.classical_point_product_length()

    @property
    def total(self):
        return sum(nbytes for _, nbytes, counted in self.rows if counted)

    def __getitem__(self, item):
        for name, nbytes, _ in self.rows:
            if name == item: return nbytes
        raise KeyError(item)

    @property
    def half_size(self):
        """Strided point products take half the coefficients of classical ones"""
        return self.point_product_coeffs == (self.classical_point_product_coeffs + 1) // 2

    @property
    def within_budget(self):
        return self.total <= STORAGE_BUDGET_BYTES

    def to_text(self):
        lines = ['params = {0}'.format(self.params.name)]
        for name, nbytes, counted in self.rows:
            lines.append('{0} = {1}{2}'.format(name, nbytes, '' if counted else ' (not in total)'))
        lines.extend([
            'point_product_coeffs = {0}'.format(self.point_product_coeffs),
            'classical_point_product_coeffs = {0}'.format(self.classical_point_product_coeffs),
            'total_bytes = {0}'.format(self.total),
            'budget_bytes = {0}'.format(STORAGE_BUDGET_BYTES),
            ])
        return '\n'.join(lines) + '\n'

    def __repr__(self):
        return '<FootprintReport {0} total={1}B>'.format(self.params.name, self.total)


def footprint_report(params=None, cfg=None):
    params = get_params(params)
    if cfg is None: cfg = MultiplierConfig()
    data_used = sum(nwords for _, nwords in memory_map(params).values()) * WORD_BYTES
    program_bytes = max(isa.program_bytes(PROGRAMS[op](params, cfg)) for op in KEM_OPS)
    point_product_bytes = toomcook.NUM_POINTS * toomcook.N_STRIDED * 2
    classical_bytes = toomcook.NUM_POINTS * toomcook.classical_point_product_length() * 2
    rows = [
        ('data_memory_capacity', DATA_MEMORY_BYTES, False),
        ('data_memory_used', data_used, True),
        ('local_memory_per_unit', cfg.local_mem_bytes_per_unit, False),
        ('local_memory', cfg.local_mem_bytes, True),
        ('program_memory', program_bytes, True),
        ('eval_cache', cfg.cache_bytes(params.l), True),
        ('point_products', point_product_bytes, False),
        ('classical_point_products', classical_bytes, False),
        ]
    return FootprintReport(params, cfg, rows)
