"""
Striding Toom-Cook-4 multiplication for Z_{2^13}[x]/(x^256+1).

A 256-coefficient polynomial is split with a stride of 4,

    a(x) = A_0(y) + A_1(y) x + A_2(y) x^2 + A_3(y) x^3,    y = x^4,

with A_i(y) = a_i + a_{i+4} y + ... + a_{i+252} y^63. Since x^256 + 1 equals
y^64 + 1, every product of parts is a negacyclic product in
R64 = Z_{2^16}[y]/(y^64+1) and is stored in 64 coefficients, never 127.

The degree-3 polynomial in x is evaluated at 7 points, in this order:

    inf, 2, 1, -1, 1/2, -1/2, 0

The two half points are stored weighted, as 8*A(1/2) and 8*A(-1/2), so every
evaluation stays integral. The 7 point products are multiplied with the
negacyclic MAC kernel and then interpolated by a fixed sequence of 16-bit
vector operations. Odd divisors (3, 9, 15) become multiplications by their
inverses mod 2^16; the remaining divisions are right shifts by at most 3 bits,
which leaves the lower 13 bits of every interpolated coefficient exact.
Results are therefore exact mod 2^13, which is all Saber needs.

Inner products are interpolated lazily: point products of all terms are
accumulated mod 2^16 in the evaluated domain and interpolated once.
"""
import numpy as np
import saberutils
from . import ring
from . import poly
logger = saberutils.logger

NUM_POINTS = 7
NUM_PARTS = 4
N_STRIDED = 64
POINT_NAMES = ('inf', '2', '1', '-1', '1/2', '-1/2', '0')

WIDTH = ring.WORKING_WIDTH
MASK = ring.mask(WIDTH)
EXACT_WIDTH = 13

INV3 = 43691   # 3 * INV3 == 1 mod 2^16
INV9 = 36409
INV15 = 61167

# Vector-operation counts of the sequences below, one op per 64-coefficient
# add, subtract, shift or scalar multiply
EVAL_VECTOR_OPS = 17
INTERP_VECTOR_OPS = 34
RECOMBINE_VECTOR_OPS = 3

# Negacyclic addressing of the 64x64 point multiplier: output address k takes
# a_i * b_j with j = (k - i) mod 64, and bit 6 of i + j selects the complement
_I = np.arange(N_STRIDED)[:, None]
_CONV_INDEX = (np.arange(N_STRIDED)[None, :] - _I) & (N_STRIDED - 1)
_CONV_SIGN = np.where(((_I + _CONV_INDEX) >> 6) & 1, -1, 1)


def classical_point_product_length(n=N_STRIDED):
    """Coefficients of a point product without reduction by y^n + 1"""
    return 2 * n - 1


class EvalVec7(object):
    """
    Seven Poly64 values: an operand evaluated at the 7 points, or the
    (accumulated) point products awaiting interpolation. Stored as one
    (7, 64) int64 array.
    """

    @classmethod
    def zero(cls):
        return cls(np.zeros((NUM_POINTS, N_STRIDED), dtype=np.int64))

    def __init__(self, points):
        if isinstance(points, EvalVec7):
            points = points.array
        elif len(points) and isinstance(points[0], poly.Poly):
            points = [ p.coeffs for p in points ]
        array = np.asarray(points, dtype=np.int64) & MASK
        if array.shape != (NUM_POINTS, N_STRIDED):
            raise saberutils.WidthMismatch(
                'EvalVec7 needs shape {0}, got {1}'.format((NUM_POINTS, N_STRIDED), array.shape)
                )
        self.array = array

    @property
    def points(self):
        return [ poly.Poly(row, WIDTH) for row in self.array ]

    def __len__(self):
        return NUM_POINTS

    def __getitem__(self, i):
        return poly.Poly(self.array[i], WIDTH)

    def __add__(self, other):
        return EvalVec7(self.array + other.array)

    def __eq__(self, other):
        return isinstance(other, EvalVec7) and bool(np.array_equal(self.array, other.array))

    def __ne__(self, other):
        return not(self == other)

    def __repr__(self):
        return '<EvalVec7 {0}>'.format(
            ' '.join('{0}:{1}'.format(name, row[0]) for name, row in zip(POINT_NAMES, self.array))
            )


# _______________________________________________________
# Array kernels; all inputs and outputs are int64 arrays masked to 16 bits

def _split(coeffs):
    return np.asarray(coeffs, dtype=np.int64).reshape(N_STRIDED, NUM_PARTS).T & MASK


def _evaluate(parts):
    r0, r1, r2, r3 = parts
    r4 = r0 + r2
    r5 = r1 + r3
    at_p1 = r4 + r5
    at_m1 = r4 - r5
    r4 = ((r0 << 2) + r2) << 1
    r5 = (r1 << 2) + r3
    at_ph = r4 + r5
    at_mh = r4 - r5
    at_p2 = (r3 << 3) + (r2 << 2) + (r1 << 1) + r0
    return np.stack([r3, at_p2, at_p1, at_m1, at_ph, at_mh, r0]) & MASK


def _point_mul(a, b):
    """Negacyclic products of the last axis; leading axes are batched"""
    b_rows = b[..., _CONV_INDEX] * _CONV_SIGN
    return np.einsum('...i,...ik->...k', a, b_rows) & MASK


def _interpolate(w):
    M = MASK
    r0, r1, r2, r3, r4, r5, r6 = [ row.copy() for row in w ]
    r1 = (r1 + r4) & M
    r5 = (r5 - r4) & M
    r3 = ((r3 - r2) & M) >> 1
    r4 = (r4 - r0) & M
    r4 = (r4 - (r6 << 6)) & M
    r4 = ((r4 << 1) + r5) & M
    r2 = (r2 + r3) & M
    r1 = (r1 - (r2 << 6) - r2) & M
    r2 = (r2 - r6) & M
    r2 = (r2 - r0) & M
    r1 = (r1 + 45 * r2) & M
    # r4 is 24 * C_2 here, r1 is 18 * C_5 after the next two steps
    r4 = ((((r4 - (r2 << 3)) & M) * INV3) & M) >> 3
    r5 = (r5 + r1) & M
    r1 = ((((r1 + (r3 << 4)) & M) * INV9) & M) >> 1
    r3 = (-(r3 + r1)) & M
    r5 = ((((30 * r1 - r5) & M) * INV15) & M) >> 2
    r2 = (r2 - r4) & M
    r1 = (r1 - r5) & M
    return np.stack([r6, r5, r4, r3, r2, r1, r0])


def _times_y(c):
    """Multiplication by y in R64: rotate up one slot, negate the wrapped one"""
    return np.concatenate((-c[..., N_STRIDED-1:], c[..., :N_STRIDED-1]), axis=-1)


def _recombine(c):
    d = np.stack([
        c[0] + _times_y(c[4]),
        c[1] + _times_y(c[5]),
        c[2] + _times_y(c[6]),
        c[3],
        ])
    return d.T.ravel() & MASK


def _check_out_width(out_width):
    ring.check_width(out_width)
    if out_width > EXACT_WIDTH:
        raise saberutils.InvalidWidth(
            'Toom-Cook results are exact up to {0} bits, requested {1}'.format(EXACT_WIDTH, out_width)
            )


# _______________________________________________________
# Public operations

def strided_split(a, signed=False):
    """
    Returns [A_0, A_1, A_2, A_3] with A_i.coeffs[j] = a.coeffs[4j + i], widened
    to 16 bits. With `signed` the coefficients of `a` are sign-extended from
    a.width first.
    """
    if a.n != poly.N:
        raise saberutils.WidthMismatch('strided_split needs {0} coefficients, got {1}'.format(poly.N, a.n))
    coeffs = ring.sign_extend(a.coeffs, a.width) if signed else a.coeffs
    return [ poly.Poly(part, WIDTH) for part in _split(coeffs) ]


def tc4_evaluate(parts):
    if len(parts) != NUM_PARTS:
        raise saberutils.RankMismatch('expected {0} parts, got {1}'.format(NUM_PARTS, len(parts)))
    return EvalVec7(_evaluate(np.stack([ p.coeffs for p in parts ])))


def point_mul(a, b):
    """
    Product in R64. Conceptually the MAC array walks i + j over 0..126; the
    low 6 bits of i + j are the store address and bit 6 decides whether the
    product is stored complemented.
    """
    if a.n != N_STRIDED or b.n != N_STRIDED:
        raise saberutils.WidthMismatch('point_mul needs two Poly64 operands')
    return poly.Poly(_point_mul(a.coeffs, b.coeffs), WIDTH)


def point_mul_all(ea, eb):
    """
    The 7 independent point products as one batch; identical to 7 sequential
    point_mul calls
    """
    return EvalVec7(_point_mul(ea.array, eb.array))


def tc4_interpolate(acc):
    """Returns C_0..C_6 of the degree-6 product in x as Poly64 values"""
    return [ poly.Poly(row, WIDTH) for row in _interpolate(acc.array) ]


def strided_recombine(c, out_width=EXACT_WIDTH):
    """
    Rebuilds C(x) = sum_k C_k(y) x^k mod x^256 + 1. Since x^4 = y, C_4..C_6
    land on positions 4j + (k - 4) after multiplication by y.
    """
    if len(c) != NUM_POINTS:
        raise saberutils.RankMismatch('expected {0} coefficients, got {1}'.format(NUM_POINTS, len(c)))
    return poly.Poly(_recombine(np.stack([ ck.coeffs for ck in c ])), out_width)


def evaluate_poly(a, signed=False):
    """strided_split followed by tc4_evaluate"""
    return tc4_evaluate(strided_split(a, signed))


def multiply(a, b, out_width=EXACT_WIDTH):
    """a * b mod (x^256 + 1, 2^out_width) through a single strided Toom-Cook-4 pass"""
    _check_out_width(out_width)
    acc = point_mul_all(evaluate_poly(a), evaluate_poly(b))
    return strided_recombine(tc4_interpolate(acc), out_width)


def _lazy_inner_product(evals_a, evals_b, out_width):
    acc = np.zeros((NUM_POINTS, N_STRIDED), dtype=np.int64)
    for ea, eb in zip(evals_a, evals_b):
        acc = (acc + _point_mul(ea, eb)) & MASK
    return poly.Poly(_recombine(_interpolate(acc)), out_width)


def _evaluate_vec(vec):
    return [ _evaluate(_split(a.coeffs)) for a in vec ]


def inner_product(a, b, out_width=EXACT_WIDTH):
    """
    sum_i a_i * b_i with lazy interpolation: the point products of all l
    terms are accumulated in the evaluated domain, then interpolated and
    recombined exactly once.
    """
    _check_out_width(out_width)
    poly.check_vec(b, len(a))
    return _lazy_inner_product(_evaluate_vec(a), _evaluate_vec(b), out_width)


def inner_product_eager(a, b, out_width=EXACT_WIDTH):
    """Same sum with one interpolation per term"""
    _check_out_width(out_width)
    poly.check_vec(b, len(a))
    result = poly.Poly.zero(poly.N, out_width)
    for ai, bi in zip(a, b):
        result = poly.poly_add(result, multiply(ai, bi, out_width))
    return result


def matrix_vector_mul(m, s, transpose=False, out_width=EXACT_WIDTH):
    """
    Row i of the result is inner_product(row i of m, s), or column i if
    `transpose`. The evaluations of `s` are computed once per call and
    reused for every row.
    """
    _check_out_width(out_width)
    l = len(s)
    poly.check_matrix(m, l)
    evals_s = _evaluate_vec(s)
    result = []
    for i in range(l):
        row = [ m[j][i] for j in range(l) ] if transpose else m[i]
        result.append(_lazy_inner_product(_evaluate_vec(row), evals_s, out_width))
    logger.debug('Strided Toom-Cook matrix-vector product, l=%s, transpose=%s', l, transpose)
    return result
