"""
Seed expansion: the public matrix, centered-binomial secrets and the
FO-transform hashes. Everything here is a pure function of its inputs.

XOF is SHAKE-128; hash_h is SHA3-256 and hash_g is SHA3-512.
"""
import hashlib
import numpy as np
import saberutils
from . import poly
from .params import SEED_BYTES
logger = saberutils.logger


def check_seed(seed):
    if len(seed) != SEED_BYTES:
        raise saberutils.BufferLengthError('seed must be {0} bytes, got {1}'.format(SEED_BYTES, len(seed)))


def xof_expand(seed, domain_sep=b'', out_len=SEED_BYTES):
    """SHAKE-128 of seed || domain_sep, truncated to out_len bytes"""
    if out_len <= 0:
        raise ValueError('out_len must be positive, got {0}'.format(out_len))
    return hashlib.shake_128(bytes(seed) + bytes(domain_sep)).digest(out_len)


def hash_h(data):
    return hashlib.sha3_256(bytes(data)).digest()


def hash_g(data):
    return hashlib.sha3_512(bytes(data)).digest()


def gen_matrix(seed, params):
    """
    Expands seed into l*l polynomials of eq bits each, row-major. The XOF
    stream is consumed exactly: l * l * 256 * eq / 8 bytes.
    """
    check_seed(seed)
    stream = xof_expand(seed, b'', params.matrix_bytes)
    size = params.poly_bytes(params.eq)
    entries = [
        poly.unpack(stream[k*size:(k+1)*size], params.eq)
        for k in range(params.l * params.l)
        ]
    return [ entries[i*params.l:(i+1)*params.l] for i in range(params.l) ]


def gen_matrix_entry(seed, params, k):
    """Entry k (row-major) of gen_matrix(seed, params) on its own"""
    check_seed(seed)
    size = params.poly_bytes(params.eq)
    return poly.unpack(xof_expand(seed, b'', (k+1) * size)[k*size:], params.eq)


def cbd_sample(buf, mu):
    """
    Centered binomial sampling. Coefficient i reads bits [i*mu, (i+1)*mu) of
    the little-endian bit stream of buf; its value is the popcount of the
    first mu/2 bits minus the popcount of the last mu/2 bits. Output is
    stored two's-complement at 16 bits.
    """
    if mu <= 0 or mu % 2:
        raise ValueError('mu must be a positive even number, got {0}'.format(mu))
    expected = poly.N * mu // 8
    if len(buf) != expected:
        raise saberutils.BufferLengthError('expected {0} bytes for mu={1}, got {2}'.format(expected, mu, len(buf)))
    bits = np.unpackbits(np.frombuffer(bytes(buf), dtype=np.uint8), bitorder='little')
    bits = bits.reshape(poly.N, mu).astype(np.int64)
    half = mu // 2
    return poly.Poly.from_signed(bits[:, :half].sum(axis=1) - bits[:, half:].sum(axis=1), 16)


def gen_secret(seed, params):
    """Secret vector of l CBD polynomials; polynomial 0 uses the first bytes of the stream"""
    check_seed(seed)
    stream = xof_expand(seed, b'', params.secret_bytes)
    size = params.poly_bytes(params.mu)
    return [ cbd_sample(stream[i*size:(i+1)*size], params.mu) for i in range(params.l) ]
