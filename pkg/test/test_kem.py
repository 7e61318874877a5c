import saberutils, pytest
from saberutils import kem, params, sampler

def seeds(i, n=4):
    return [ sampler.xof_expand(i.to_bytes(4, 'little'), label) for label in (b'A', b's', b'z', b'c')[:n] ]

def test_parameter_sets():
    assert [ (p.l, p.eT, p.mu) for p in params.ALL_PARAMS ] == [(2, 3, 10), (3, 4, 8), (4, 6, 6)]
    assert [ p.h2 for p in params.ALL_PARAMS ] == [196, 228, 252]
    assert all(p.h1 == 4 for p in params.ALL_PARAMS)
    assert params.Saber.lengths() == dict(pk=992, sk=2304, ct=1088, ss=32, pke_sk=1248)
    assert params.LightSaber.lengths()['ct'] == 736
    assert params.FireSaber.lengths()['pk'] == 1312

def test_get_params():
    assert params.get_params() is params.Saber
    assert params.get_params('firesaber') is params.FireSaber
    assert params.get_params(params.LightSaber) is params.LightSaber
    with pytest.raises(ValueError):
        params.get_params('MegaSaber')
    with pytest.raises(saberutils.InvalidConfig):
        params.SaberParams('Saber', 3, 4, 10)

def test_keypair_repr_hides_keys():
    pair = kem.kem_keygen(*seeds(0, 3))
    assert repr(pair) == '<KeyPair pk=992B sk=2304B>'

def test_pke_keygen_deterministic():
    seed_A, seed_s = seeds(1, 2)
    pk, s = kem.pke_keygen(seed_A, seed_s)
    assert pk == kem.pke_keygen(seed_A, seed_s)[0]
    assert pk[:32] == seed_A and len(pk) == 992
    assert s == sampler.gen_secret(seed_s, params.Saber)

@pytest.mark.parametrize('message', [bytes(32), bytes(range(32)), b'\xff' * 32])
def test_pke_roundtrip(message):
    seed_A, seed_s, seed_r = seeds(2, 3)
    pk, s = kem.pke_keygen(seed_A, seed_s)
    ct = kem.pke_encrypt(pk, message, seed_r)
    assert len(ct) == 1088
    assert kem.pke_decrypt(s, ct) == message

def test_pke_bitflip_corrupts():
    seed_A, seed_s, seed_r = seeds(3, 3)
    pk, s = kem.pke_keygen(seed_A, seed_s)
    message = bytes(range(32))
    ct = bytearray(kem.pke_encrypt(pk, message, seed_r))
    # Flipping the top bit of every c_m coefficient moves each message bit by half the range
    for i in range(960, 1088):
        ct[i] ^= 0x88
    assert kem.pke_decrypt(s, bytes(ct)) != message

@pytest.mark.parametrize('p', params.ALL_PARAMS, ids=lambda p: p.name)
def test_kem_roundtrip(p, trials):
    for i in range(trials(1000, quick=5)):
        seed_A, seed_s, z, coins = seeds(i)
        pk, sk = kem.kem_keygen(seed_A, seed_s, z, p)
        assert len(pk) == p.pk_bytes and len(sk) == p.sk_bytes
        ct, ss = kem.kem_encaps(pk, coins, p)
        assert len(ct) == p.ct_bytes and len(ss) == 32
        assert kem.kem_decaps(sk, ct, p) == ss

def test_kem_deterministic():
    seed_A, seed_s, z, coins = seeds(4)
    pk, sk = kem.kem_keygen(seed_A, seed_s, z)
    assert (pk, sk) == tuple(kem.kem_keygen(seed_A, seed_s, z))
    assert kem.kem_encaps(pk, coins) == kem.kem_encaps(pk, coins)
    assert kem.kem_encaps(pk, coins)[0] != kem.kem_encaps(pk, seeds(5)[3])[0]

def test_implicit_rejection():
    seed_A, seed_s, z, coins = seeds(6)
    pk, sk = kem.kem_keygen(seed_A, seed_s, z)
    ct, ss = kem.kem_encaps(pk, coins)
    tampered = bytearray(ct)
    tampered[0] ^= 0x01
    tampered = bytes(tampered)
    rejected = kem.kem_decaps(sk, tampered)
    assert rejected != ss
    assert rejected == sampler.hash_h(z + tampered)

def test_bytes_differ_and_select():
    assert kem.bytes_differ(b'abc', b'abc') == 0
    assert kem.bytes_differ(b'abc', b'abd') == 1
    assert kem.select_bytes(0, b'\x01\x02', b'\x03\x04') == b'\x01\x02'
    assert kem.select_bytes(1, b'\x01\x02', b'\x03\x04') == b'\x03\x04'

def test_length_errors():
    seed_A, seed_s, z, coins = seeds(7)
    pk, sk = kem.kem_keygen(seed_A, seed_s, z)
    ct, _ = kem.kem_encaps(pk, coins)
    with pytest.raises(saberutils.BufferLengthError):
        kem.kem_encaps(pk[:-1], coins)
    with pytest.raises(saberutils.BufferLengthError):
        kem.kem_decaps(sk, ct + b'\x00')
    with pytest.raises(saberutils.BufferLengthError):
        kem.kem_decaps(sk[:-1], ct)
    with pytest.raises(saberutils.BufferLengthError):
        kem.kem_keygen(seed_A, seed_s, z[:16])
    with pytest.raises(saberutils.BufferLengthError):
        kem.kem_encaps(pk, ct, params.LightSaber)

def test_backends_are_plug_compatible(trials):
    for i in range(trials(100, quick=3)):
        seed_A, seed_s, z, coins = seeds(100 + i)
        outputs = []
        for backend in ('schoolbook', 'toomcook'):
            pk, sk = kem.kem_keygen(seed_A, seed_s, z, backend=backend)
            ct, ss = kem.kem_encaps(pk, coins, backend=backend)
            outputs.append((pk, sk, ct, ss, kem.kem_decaps(sk, ct, backend=backend)))
        assert outputs[0] == outputs[1]
        assert outputs[0][3] == outputs[0][4]
