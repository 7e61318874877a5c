import saberutils
from . import toomcook


class ToomCookImplementation(saberutils.Backend):

    name = 'toomcook'
    coeff_mults_per_product = toomcook.NUM_POINTS * toomcook.N_STRIDED * toomcook.N_STRIDED

    def multiply(self, a, b, out_width=13):
        return toomcook.multiply(a, b, out_width)

    def inner_product(self, a, b, out_width=13):
        return toomcook.inner_product(a, b, out_width)

    def matrix_vector_mul(self, m, s, transpose=False, out_width=13):
        return toomcook.matrix_vector_mul(m, s, transpose, out_width)
