"""
Polynomial containers, the negacyclic schoolbook reference product,
coefficient-wise operations and bit-exact byte (de)serialization.
"""
import numpy as np
import saberutils
from . import ring

N = 256
SUPPORTED_PACK_WIDTHS = (1, 3, 4, 6, 10, 13, 16)


class Poly(object):
    """
    Fixed-length polynomial with coefficients in [0, 2**width).
    A Poly256 has 256 coefficients and lives in Z_{2^width}[x]/(x^256+1);
    a Poly64 has 64 coefficients at width 16 and lives in R64.
    Coefficient arrays are int64 and read-only.
    """

    @classmethod
    def zero(cls, n=N, width=13):
        return cls(np.zeros(n, dtype=np.int64), width)

    @classmethod
    def one(cls, n=N, width=13):
        return cls.monomial(0, n, width)

    @classmethod
    def monomial(cls, k, n=N, width=13, value=1):
        coeffs = np.zeros(n, dtype=np.int64)
        coeffs[k] = value
        return cls(coeffs, width)

    @classmethod
    def random(cls, n=N, width=13, rng=None):
        if rng is None: rng = np.random.default_rng()
        return cls(rng.integers(0, 1 << width, n, dtype=np.int64), width)

    @classmethod
    def from_signed(cls, values, width=16):
        """Stores small signed values two's-complement within the width"""
        return cls(np.asarray(values, dtype=np.int64), width)

    def __init__(self, coeffs, width=13):
        ring.check_width(width)
        self.width = width
        self.coeffs = np.asarray(coeffs, dtype=np.int64) & ring.mask(width)
        self.coeffs.flags.writeable = False

    @property
    def n(self):
        return len(self.coeffs)

    def signed(self):
        return ring.to_signed(self.coeffs, self.width)

    def sign_extend(self, width=ring.WORKING_WIDTH):
        return Poly(ring.sign_extend(self.coeffs, self.width, width), width)

    def tolist(self):
        return [ int(c) for c in self.coeffs ]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return int(self.coeffs[i])

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_sub(self, other)

    def __neg__(self):
        return Poly(ring.neg_mod(self.coeffs, self.width), self.width)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.width == other.width
            and self.n == other.n
            and bool(np.array_equal(self.coeffs, other.coeffs))
            )

    def __ne__(self, other):
        return not(self == other)

    def __repr__(self):
        if self.n > 8:
            shortcoeffs = ' '.join(str(c) for c in self.coeffs[:4]) + ' ... ' + ' '.join(str(c) for c in self.coeffs[-2:])
        else:
            shortcoeffs = ' '.join(str(c) for c in self.coeffs)
        return '<Poly n={0} w={1} [{2}]>'.format(self.n, self.width, shortcoeffs)


def _check_same_shape(a, b):
    if a.width != b.width or a.n != b.n:
        raise saberutils.WidthMismatch(
            'n={0}/w={1} vs. n={2}/w={3}'.format(a.n, a.width, b.n, b.width)
            )


def poly_add(a, b):
    _check_same_shape(a, b)
    return Poly(ring.add_mod(a.coeffs, b.coeffs, a.width), a.width)


def poly_sub(a, b):
    _check_same_shape(a, b)
    return Poly(ring.sub_mod(a.coeffs, b.coeffs, a.width), a.width)


def schoolbook_negacyclic(a, b, n=None, width=None):
    """
    Reference product in Z_{2^width}[x]/(x^n+1).

    Plain quadratic convolution: row i adds a_i * x^i * b, where multiplying
    by x^i rotates b and negates the coefficients that wrap past x^n.
    This is the semantics every fast multiplier in this package is checked
    against, so it is kept as simple as possible.
    """
    if n is None: n = a.n
    if width is None: width = a.width
    if a.n != n or b.n != n:
        raise saberutils.WidthMismatch('expected {0} coefficients, got {1} and {2}'.format(n, a.n, b.n))
    bc = b.coeffs
    acc = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if a.coeffs[i] == 0: continue
        acc += a.coeffs[i] * np.concatenate((-bc[n-i:], bc[:n-i]))
    return Poly(acc, width)


def poly_round(a, from_bits, to_bits, addend):
    return Poly(ring.round_shift(a.coeffs, from_bits, to_bits, addend), to_bits)


def _check_pack_width(bits):
    if bits not in SUPPORTED_PACK_WIDTHS:
        raise saberutils.InvalidWidth(
            '{0} bits per coefficient (choices: {1})'.format(bits, SUPPORTED_PACK_WIDTHS)
            )


def pack(a, bits):
    """
    Little-endian bit packing: coefficient 0 occupies the lowest-order bits of
    byte 0. Coefficients are truncated to `bits` bits first, so signed values
    stored at a wider width pack as their two's complement.
    """
    _check_pack_width(bits)
    bit_matrix = (a.coeffs[:, None] >> np.arange(bits)) & 1
    return np.packbits(bit_matrix.astype(np.uint8).ravel(), bitorder='little').tobytes()


def unpack(data, bits, n=N, width=None):
    """Inverse of `pack`; the result has width `bits` unless `width` is given"""
    _check_pack_width(bits)
    expected = n * bits // 8
    if len(data) != expected:
        raise saberutils.BufferLengthError('expected {0} bytes, got {1}'.format(expected, len(data)))
    bitstream = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8), bitorder='little')
    coeffs = (bitstream.reshape(n, bits).astype(np.int64) << np.arange(bits)).sum(axis=1)
    return Poly(coeffs, bits if width is None else width)


def pack_vec(vec, bits):
    return b''.join(pack(a, bits) for a in vec)


def unpack_vec(data, bits, l, n=N, width=None):
    size = n * bits // 8
    if len(data) != l * size:
        raise saberutils.BufferLengthError('expected {0} bytes, got {1}'.format(l*size, len(data)))
    return [ unpack(data[i*size:(i+1)*size], bits, n, width) for i in range(l) ]


def check_vec(vec, l):
    """Raises RankMismatch unless `vec` is a PolyVec of rank `l`"""
    if len(vec) != l:
        raise saberutils.RankMismatch('expected rank {0}, got {1}'.format(l, len(vec)))


def check_matrix(m, l):
    if len(m) != l or any(len(row) != l for row in m):
        raise saberutils.RankMismatch('expected a {0}x{0} matrix'.format(l))
