# -*- coding: utf-8 -*-
import os.path as osp
import logging, os
from contextlib import contextmanager

DEFAULT_LOGGING_LEVEL = logging.WARNING
DEFAULT_PARAMS = 'Saber'
DEFAULT_CLOCK_MHZ = 160
INCLUDE_DIR = osp.join(osp.abspath(osp.dirname(__file__)), "include")


def version():
    with open(osp.join(INCLUDE_DIR, "VERSION"), "r") as f:
        return(f.read().strip())


def setup_logger(name='saberutils'):
    if name in logging.Logger.manager.loggerDict:
        logger = logging.getLogger(name)
        logger.info('Logger %s is already defined', name)
    else:
        fmt = logging.Formatter(
            fmt = (
                '\033[32m[%(name)s:%(levelname)s:%(asctime)s:%(module)s:%(lineno)s]\033[0m'
                + ' %(message)s'
                ),
            datefmt='%Y-%m-%d %H:%M:%S'
            )
        handler = logging.StreamHandler()
        handler.setFormatter(fmt)
        logger = logging.getLogger(name)
        logger.setLevel(DEFAULT_LOGGING_LEVEL)
        logger.addHandler(handler)
    return logger
logger = setup_logger()


def debug(flag=True):
    """Sets the logger level to debug (for True) or warning (for False)"""
    logger.setLevel(logging.DEBUG if flag else DEFAULT_LOGGING_LEVEL)


def silent(flag=True):
    """Disables the logger (for True) or sets it back to default (for False)"""
    logger.setLevel(logging.CRITICAL+1 if flag else DEFAULT_LOGGING_LEVEL)


@contextmanager
def temp_log_level(level):
    """
    Context manager to temporarily set a different logging level
    """
    old_level = logger.level
    logger.setLevel(level)
    try:
        yield level
    finally:
        logger.setLevel(old_level)


# _______________________________________________________
# Exceptions

class SaberError(Exception):
    """
    Base exception; optionally formats the error string with some context
    (a width, a length, an address...) if it is specified.
    """
    def __init__(self, msg, context=''):
        super(SaberError, self).__init__(msg + ((': ' + str(context)) if context != '' else ''))

class WidthMismatch(SaberError):
    def __init__(self, context=''):
        super(WidthMismatch, self).__init__('Polynomial width or length mismatch', context)

class InvalidWidth(SaberError):
    def __init__(self, context=''):
        super(InvalidWidth, self).__init__('Unsupported bit width', context)

class BufferLengthError(SaberError):
    def __init__(self, context=''):
        super(BufferLengthError, self).__init__('Wrong buffer length', context)

class RankMismatch(SaberError):
    def __init__(self, context=''):
        super(RankMismatch, self).__init__('Vector rank or matrix shape mismatch', context)

class InvalidInstruction(SaberError):
    def __init__(self, context=''):
        super(InvalidInstruction, self).__init__('Invalid instruction', context)

class AddressOutOfRange(SaberError):
    def __init__(self, context=''):
        super(AddressOutOfRange, self).__init__('Data memory address out of range', context)

class DualPortViolation(SaberError):
    def __init__(self, context=''):
        super(DualPortViolation, self).__init__('More than two data memory accesses in one cycle', context)

class InvalidConfig(SaberError):
    def __init__(self, context=''):
        super(InvalidConfig, self).__init__('Invalid accelerator configuration', context)

class KatParseError(SaberError):
    def __init__(self, lineno, context=''):
        self.lineno = lineno
        super(KatParseError, self).__init__('KAT parse error on line {0}'.format(lineno), context)

class BackendDisagreement(SaberError):
    def __init__(self, context=''):
        super(BackendDisagreement, self).__init__('Multiplier backends disagree', context)

class NoSuchBackend(SaberError):
    def __init__(self, context=''):
        super(NoSuchBackend, self).__init__('No such multiplier backend', context)


# _______________________________________________________
# Multiplier backends

class Backend(object):
    """
    Base class for the polynomial multipliers the KEM can run on.
    A backend computes products in Z_{2^width}[x]/(x^256+1); the public
    operand comes first, the small signed secret second.
    """

    name = None
    coeff_mults_per_product = None

    def multiply(self, a, b, out_width=13):
        raise NotImplementedError

    def inner_product(self, a, b, out_width=13):
        raise NotImplementedError

    def matrix_vector_mul(self, m, s, transpose=False, out_width=13):
        """
        Row i of the result is the inner product of row i (or column i, if
        `transpose` is True) of `m` with `s`.
        """
        poly.check_matrix(m, len(s))
        rows = [ [m[j][i] for j in range(len(m))] for i in range(len(m)) ] if transpose else m
        return [ self.inner_product(row, s, out_width=out_width) for row in rows ]

    def __repr__(self):
        return '<{0} backend>'.format(self.name)


from . import ring
from . import poly

from .schoolbook_implementation import SchoolbookImplementation
schoolbook_backend = SchoolbookImplementation()

from .toomcook_implementation import ToomCookImplementation
toomcook_backend = ToomCookImplementation()

backends = dict(schoolbook=schoolbook_backend, toomcook=toomcook_backend)


def get_backend(backend_name):
    """
    Returns a backend instance corresponding to the passed name.
    Returns None if `backend_name` is 'auto' or None.
    Backend instances are passed through.
    """
    if backend_name in ['auto', None]:
        return None
    if isinstance(backend_name, Backend):
        return backend_name
    try:
        return backends[backend_name]
    except KeyError:
        raise NoSuchBackend(backend_name)


PREFERRED_BACKEND = None

def set_preferred_backend(backend):
    global PREFERRED_BACKEND
    PREFERRED_BACKEND = get_backend(backend)
    logger.info('Set backend %s as preferred', PREFERRED_BACKEND)

if os.environ.get('SABERUTILS_BACKEND'):
    set_preferred_backend(os.environ['SABERUTILS_BACKEND'])


def best_backend():
    """
    Returns the preferred backend if one is set, and the striding
    Toom-Cook engine otherwise
    """
    backend = PREFERRED_BACKEND if PREFERRED_BACKEND else toomcook_backend
    logger.debug('Using backend %s', backend)
    return backend


def make_global_scope_command(cmd_name):
    """
    Creates a global scope command in case the user does not care about the
    underlying backend.
    """
    def wrapper(*args, **kwargs):
        backend = get_backend(kwargs.pop('backend', None))
        if backend is None:
            backend = best_backend()
        return getattr(backend, cmd_name)(*args, **kwargs)
    wrapper.__name__ = cmd_name
    return wrapper

multiply = make_global_scope_command('multiply')
inner_product = make_global_scope_command('inner_product')
matrix_vector_mul = make_global_scope_command('matrix_vector_mul')


# _______________________________________________________
# Scheme and accelerator model

from . import params
from . import sampler
from . import kem
from . import isa
from . import accel_model
from . import kat
from . import cli
