"""
Saber public-key encryption and the IND-CCA KEM built on it.

All randomness comes in as explicit 32-byte seeds. Byte layouts:

    pk = seed_A || pack(b, ep)
    sk = pack(s, eq) || pk || hash_h(pk) || z
    ct = pack(b', ep) || pack(c_m, eT)

Every operation takes `params` (a SaberParams or its name, default
saberutils.DEFAULT_PARAMS) and `backend` (a multiplier backend or its
name, default saberutils.best_backend()).
"""
import numpy as np
import saberutils
from . import ring
from . import poly
from . import sampler
from .params import get_params, SEED_BYTES, KEY_BYTES
logger = saberutils.logger


class KeyPair(object):

    def __init__(self, public_key, secret_key):
        self.public_key = public_key
        self.secret_key = secret_key

    def __iter__(self):
        return iter((self.public_key, self.secret_key))

    def __repr__(self):
        # Never prints key material
        return '<KeyPair pk={0}B sk={1}B>'.format(len(self.public_key), len(self.secret_key))


def _get_backend(backend):
    backend = saberutils.get_backend(backend)
    return saberutils.best_backend() if backend is None else backend


def _check_length(data, expected, what):
    if len(data) != expected:
        raise saberutils.BufferLengthError(
            '{0} must be {1} bytes, got {2}'.format(what, expected, len(data))
            )


def _round_vec(vec, params):
    return [ poly.poly_round(x, params.eq, params.ep, params.h1) for x in vec ]


def unpack_secret(data, params):
    """Secret vector from its 13-bit two's-complement encoding, back at 16 bits"""
    _check_length(data, params.pke_sk_bytes, 'packed secret vector')
    return [ p.sign_extend() for p in poly.unpack_vec(data, params.eq, params.l) ]


def pke_keygen(seed_A, seed_s, params=None, backend=None):
    """Returns (seed_A || pack(b, ep), s) with b = round(A^T s)"""
    params = get_params(params)
    backend = _get_backend(backend)
    sampler.check_seed(seed_A)
    A = sampler.gen_matrix(seed_A, params)
    s = sampler.gen_secret(seed_s, params)
    b = _round_vec(backend.matrix_vector_mul(A, s, transpose=True, out_width=params.eq), params)
    return bytes(seed_A) + poly.pack_vec(b, params.ep), s


def pke_encrypt(pk, message, seed_r, params=None, backend=None):
    params = get_params(params)
    backend = _get_backend(backend)
    _check_length(pk, params.pk_bytes, 'public key')
    _check_length(message, KEY_BYTES, 'message')
    seed_A = pk[:SEED_BYTES]
    b = poly.unpack_vec(pk[SEED_BYTES:], params.ep, params.l)
    A = sampler.gen_matrix(seed_A, params)
    s_prime = sampler.gen_secret(seed_r, params)
    b_prime = _round_vec(backend.matrix_vector_mul(A, s_prime, transpose=False, out_width=params.eq), params)
    v_prime = backend.inner_product(b, s_prime, out_width=params.ep)
    m = poly.unpack(message, 1)
    c_m = ring.round_shift(
        ring.sub_mod(v_prime.coeffs, m.coeffs << (params.ep - 1), params.ep),
        params.ep, params.eT, params.h1
        )
    return poly.pack_vec(b_prime, params.ep) + poly.pack(poly.Poly(c_m, params.eT), params.eT)


def pke_decrypt(s, ct, params=None, backend=None):
    params = get_params(params)
    backend = _get_backend(backend)
    _check_length(ct, params.ct_bytes, 'ciphertext')
    poly.check_vec(s, params.l)
    split = params.l * params.poly_bytes(params.ep)
    b_prime = poly.unpack_vec(ct[:split], params.ep, params.l)
    c_m = poly.unpack(ct[split:], params.eT)
    v = backend.inner_product(b_prime, s, out_width=params.ep)
    m = ring.round_shift(
        ring.sub_mod(v.coeffs, c_m.coeffs << (params.ep - params.eT), params.ep),
        params.ep, 1, params.h2
        )
    return poly.pack(poly.Poly(m, 1), 1)


def kem_keygen(seed_A, seed_s, z, params=None, backend=None):
    params = get_params(params)
    sampler.check_seed(z)
    logger.debug('Generating %s key pair', params.name)
    pk, s = pke_keygen(seed_A, seed_s, params, backend)
    sk = poly.pack_vec(s, params.eq) + pk + sampler.hash_h(pk) + bytes(z)
    return KeyPair(pk, sk)


def _split_kr(digest):
    return digest[:KEY_BYTES], digest[KEY_BYTES:]


def kem_encaps(pk, seed, params=None, backend=None):
    """Returns (ct, ss)"""
    params = get_params(params)
    _check_length(pk, params.pk_bytes, 'public key')
    sampler.check_seed(seed)
    m = sampler.hash_h(seed)
    k_hat, r = _split_kr(sampler.hash_g(sampler.hash_h(pk) + m))
    ct = pke_encrypt(pk, m, r, params, backend)
    return ct, sampler.hash_h(k_hat + ct)


def bytes_differ(a, b):
    """1 if the equal-length byte strings differ, 0 otherwise, without branching on content"""
    diff = int(np.bitwise_or.reduce(
        np.frombuffer(a, dtype=np.uint8) ^ np.frombuffer(b, dtype=np.uint8)
        ))
    return ((-diff) >> 63) & 1


def select_bytes(flag, if_zero, if_one):
    """Byte-wise constant-pattern select"""
    x = np.frombuffer(if_zero, dtype=np.uint8)
    y = np.frombuffer(if_one, dtype=np.uint8)
    byte_mask = np.uint8((-flag) & 0xFF)
    return (x ^ (byte_mask & (x ^ y))).tobytes()


def kem_decaps(sk, ct, params=None, backend=None):
    """
    Recovers the shared secret. A ciphertext that does not re-encrypt to
    itself yields hash_h(z || ct) instead (implicit rejection); tampering is
    never reported as an error.
    """
    params = get_params(params)
    _check_length(sk, params.sk_bytes, 'secret key')
    _check_length(ct, params.ct_bytes, 'ciphertext')
    offset = params.pke_sk_bytes
    s = unpack_secret(sk[:offset], params)
    pk = sk[offset:offset+params.pk_bytes]
    offset += params.pk_bytes
    pk_hash = sk[offset:offset+KEY_BYTES]
    z = sk[offset+KEY_BYTES:]

    m = pke_decrypt(s, ct, params, backend)
    k_hat, r = _split_kr(sampler.hash_g(pk_hash + m))
    ct_prime = pke_encrypt(pk, m, r, params, backend)
    rejected = bytes_differ(bytes(ct), ct_prime)
    return sampler.hash_h(select_bytes(rejected, k_hat, bytes(z)) + bytes(ct))
