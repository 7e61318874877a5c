"""
Saber parameter sets and the byte lengths they imply.
"""
import saberutils

SEED_BYTES = 32
KEY_BYTES = 32

# name: (l, eT, mu)
CANONICAL = {
    'LightSaber' : (2, 3, 10),
    'Saber'      : (3, 4, 8),
    'FireSaber'  : (4, 6, 6),
    }


class SaberParams(object):
    """
    Parameter-set record. q = 2^eq, p = 2^ep and T = 2^eT are the moduli;
    mu is the binomial sampling parameter and l the module rank.
    """

    def __init__(self, name, l, eT, mu, eq=13, ep=10, n=256):
        if CANONICAL.get(name) != (l, eT, mu):
            raise saberutils.InvalidConfig(
                '{0} with (l, eT, mu) = {1}'.format(name, (l, eT, mu))
                )
        self.name = name
        self.l = l
        self.eT = eT
        self.mu = mu
        self.eq = eq
        self.ep = ep
        self.n = n

    @property
    def h1(self):
        return 1 << (self.eq - self.ep - 1)

    @property
    def h2(self):
        return (1 << (self.ep - 2)) - (1 << (self.ep - self.eT - 1)) + (1 << (self.eq - self.ep - 1))

    def poly_bytes(self, bits):
        return self.n * bits // 8

    @property
    def pk_bytes(self):
        return SEED_BYTES + self.l * self.poly_bytes(self.ep)

    @property
    def pke_sk_bytes(self):
        return self.l * self.poly_bytes(self.eq)

    @property
    def sk_bytes(self):
        return self.pke_sk_bytes + self.pk_bytes + KEY_BYTES + KEY_BYTES

    @property
    def ct_bytes(self):
        return self.l * self.poly_bytes(self.ep) + self.poly_bytes(self.eT)

    @property
    def ss_bytes(self):
        return KEY_BYTES

    @property
    def matrix_bytes(self):
        return self.l * self.l * self.poly_bytes(self.eq)

    @property
    def secret_bytes(self):
        return self.l * self.poly_bytes(self.mu)

    def lengths(self):
        return dict(
            pk=self.pk_bytes,
            sk=self.sk_bytes,
            ct=self.ct_bytes,
            ss=self.ss_bytes,
            pke_sk=self.pke_sk_bytes,
            )

    def __repr__(self):
        return '<SaberParams {0} l={1} eT={2} mu={3}>'.format(self.name, self.l, self.eT, self.mu)


LightSaber = SaberParams('LightSaber', *CANONICAL['LightSaber'])
Saber = SaberParams('Saber', *CANONICAL['Saber'])
FireSaber = SaberParams('FireSaber', *CANONICAL['FireSaber'])
ALL_PARAMS = [LightSaber, Saber, FireSaber]


def get_params(name=None):
    """
    Returns the parameter set by (case-insensitive) name. None gives
    saberutils.DEFAULT_PARAMS; SaberParams instances are passed through.
    """
    if name is None: name = saberutils.DEFAULT_PARAMS
    if isinstance(name, SaberParams): return name
    for params in ALL_PARAMS:
        if params.name.lower() == name.lower():
            return params
    raise ValueError(
        'Unknown parameter set {0} (choices: {1})'
        .format(name, ', '.join(p.name for p in ALL_PARAMS))
        )
