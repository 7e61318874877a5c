"""
Fixed-width modular integer arithmetic.

A ModWord is a non-negative integer below 2**width, with width in 1..16.
Every function below accepts either plain ints or numpy integer arrays (the
arithmetic is elementwise), and every output stays below 2**width.
Signed values are stored two's-complement within the width.
"""
import saberutils

MAX_WIDTH = 16
WORKING_WIDTH = 16


def mask(width):
    """Returns 2**width - 1"""
    check_width(width)
    return (1 << width) - 1


def check_width(width):
    if not (1 <= width <= MAX_WIDTH):
        raise saberutils.InvalidWidth(width)


def add_mod(a, b, width):
    return (a + b) & mask(width)


def sub_mod(a, b, width):
    return (a - b) & mask(width)


def neg_mod(a, width):
    """Two's complement negation within the width"""
    return (-a) & mask(width)


def mul_mod(a, b, width):
    return (a * b) & mask(width)


def round_shift(x, from_bits, to_bits, addend):
    """
    Rounds a `from_bits` value down to `to_bits` bits by adding `addend`
    (canonically 2**(from_bits-to_bits-1)) and dropping the low bits.
    The addition wraps mod 2**from_bits before the shift.
    """
    if from_bits <= to_bits:
        raise saberutils.InvalidWidth(
            'round_shift from {0} to {1} bits'.format(from_bits, to_bits)
            )
    return ((x + addend) & mask(from_bits)) >> (from_bits - to_bits)


def sign_extend(x, from_bits, to_bits=WORKING_WIDTH):
    """
    Reinterprets a two's complement `from_bits` value as a `to_bits` value
    """
    sign = 1 << (from_bits - 1)
    return (((x & mask(from_bits)) ^ sign) - sign) & mask(to_bits)


def to_signed(x, width):
    """Maps [0, 2**width) onto [-2**(width-1), 2**(width-1))"""
    sign = 1 << (width - 1)
    return ((x & mask(width)) ^ sign) - sign
