import saberutils
from . import poly


class SchoolbookImplementation(saberutils.Backend):
    """
    Multiplier backend built on the quadratic negacyclic reference product.
    Slow, but it is the semantics every other backend is compared to.
    """

    name = 'schoolbook'
    coeff_mults_per_product = poly.N * poly.N

    def multiply(self, a, b, out_width=13):
        return poly.schoolbook_negacyclic(a, b, poly.N, out_width)

    def inner_product(self, a, b, out_width=13):
        poly.check_vec(b, len(a))
        result = poly.Poly.zero(poly.N, out_width)
        for ai, bi in zip(a, b):
            result = poly.poly_add(result, self.multiply(ai, bi, out_width))
        return result
