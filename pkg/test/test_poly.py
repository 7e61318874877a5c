import saberutils, pytest
import numpy as np
from saberutils import ring, poly
from saberutils.poly import Poly

def test_poly_add():
    a = Poly.random(rng=np.random.default_rng(1))
    assert poly.poly_add(a, Poly.zero()) == a
    assert poly.poly_add(Poly([8191]*256), Poly([1]*256)) == Poly.zero()
    b = Poly.random(rng=np.random.default_rng(2))
    assert (a + b).tolist() == [ (x + y) % 8192 for x, y in zip(a.tolist(), b.tolist()) ]
    assert (a + b) - b == a

def test_width_mismatch():
    with pytest.raises(saberutils.WidthMismatch):
        poly.poly_add(Poly.zero(width=13), Poly.zero(width=10))
    with pytest.raises(saberutils.WidthMismatch):
        poly.poly_sub(Poly.zero(n=64), Poly.zero(n=256))

def test_coeffs_are_masked_and_readonly():
    a = Poly([-1, 8192, 8193] + [0]*253, 13)
    assert a[0] == 8191 and a[1] == 0 and a[2] == 1
    with pytest.raises(ValueError):
        a.coeffs[0] = 5

def test_schoolbook_negacyclic():
    a = Poly.random(rng=np.random.default_rng(3))
    assert poly.schoolbook_negacyclic(a, Poly.one()) == a
    y32 = Poly.monomial(32, n=64, width=16)
    assert poly.schoolbook_negacyclic(y32, y32) == Poly.monomial(0, n=64, width=16, value=0xffff)
    product = poly.schoolbook_negacyclic(Poly.monomial(255), Poly.monomial(1))
    assert product == Poly.monomial(0, value=8191)

def test_schoolbook_against_scalar_loop():
    rng = np.random.default_rng(4)
    a = Poly.random(n=16, width=13, rng=rng)
    b = Poly.random(n=16, width=13, rng=rng)
    expected = [0] * 16
    for i in range(16):
        for j in range(16):
            k = i + j
            term = a[i] * b[j]
            if k >= 16:
                expected[k - 16] -= term
            else:
                expected[k] += term
    assert poly.schoolbook_negacyclic(a, b).tolist() == [ x % 8192 for x in expected ]

def test_poly_round():
    assert poly.poly_round(Poly.zero(), 13, 10, 4) == Poly.zero(width=10)
    assert poly.poly_round(Poly([1000]*256), 13, 10, 4) == Poly([125]*256, 10)
    a = Poly.random(rng=np.random.default_rng(5))
    assert poly.poly_round(a, 13, 10, 4).tolist() == [ ring.round_shift(c, 13, 10, 4) for c in a.tolist() ]

def test_pack_layout():
    assert poly.pack(Poly.zero(), 13) == bytes(416)
    packed = poly.pack(Poly.monomial(0), 13)
    assert packed[0] == 1 and packed[1:] == bytes(415)
    # Coefficient 1 starts at bit 13: bit 5 of byte 1
    assert poly.pack(Poly.monomial(1), 13)[1] == 0x20
    # 1-bit packing: bit j of byte i is coefficient 8i + j
    message = poly.pack(Poly.monomial(9, width=1), 1)
    assert message[1] == 0x02

def test_pack_unpack_roundtrip(trials):
    rng = np.random.default_rng(6)
    for bits in poly.SUPPORTED_PACK_WIDTHS:
        for _ in range(trials(1000)):
            a = Poly.random(width=bits, rng=rng)
            assert poly.unpack(poly.pack(a, bits), bits) == a

def test_pack_signed_secret():
    s = Poly.from_signed([-4, 4, -1, 0] * 64, 16)
    unpacked = poly.unpack(poly.pack(s, 13), 13).sign_extend()
    assert unpacked == s
    assert unpacked.signed().tolist()[:4] == [-4, 4, -1, 0]

def test_unpack_errors():
    with pytest.raises(saberutils.BufferLengthError):
        poly.unpack(bytes(415), 13)
    with pytest.raises(saberutils.InvalidWidth):
        poly.pack(Poly.zero(), 7)
    with pytest.raises(saberutils.BufferLengthError):
        poly.unpack_vec(bytes(320*3 - 1), 10, 3)

def test_vec_roundtrip():
    rng = np.random.default_rng(7)
    vec = [ Poly.random(width=10, rng=rng) for _ in range(3) ]
    data = poly.pack_vec(vec, 10)
    assert len(data) == 960
    assert poly.unpack_vec(data, 10, 3) == vec

def test_rank_checks():
    with pytest.raises(saberutils.RankMismatch):
        poly.check_vec([Poly.zero()] * 2, 3)
    with pytest.raises(saberutils.RankMismatch):
        poly.check_matrix([[Poly.zero()] * 3] * 2, 3)

def test_schoolbook_bilinear_and_commutative(rng, trials):
    for _ in range(trials(50, quick=10)):
        a = Poly.random(rng=rng)
        a2 = Poly.random(rng=rng)
        b = Poly.random(rng=rng)
        ab = poly.schoolbook_negacyclic(a, b)
        assert poly.schoolbook_negacyclic(a + a2, b) == ab + poly.schoolbook_negacyclic(a2, b)
        assert poly.schoolbook_negacyclic(b, a) == ab

def test_schoolbook_times_x_rotates(rng, trials):
    x = Poly.monomial(1)
    for _ in range(trials(50, quick=10)):
        a = Poly.random(rng=rng)
        coeffs = poly.schoolbook_negacyclic(x, a).tolist()
        assert coeffs[0] == (-a[255]) % 8192
        assert coeffs[1:] == a.tolist()[:255]
