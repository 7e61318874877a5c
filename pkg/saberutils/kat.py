"""
Known-answer test records.

A KAT file is line-oriented text, one "field = HEXVALUE" line per field and
one blank line between records:

    count = 0
    seed = 6A1F...
    pk = ...
    sk = ...
    ct = ...
    ss = ...

The seed of record i is xof_expand(master_seed, i as 4 little-endian bytes).
All randomness of the record is expanded from that seed with a domain label:
seed_A, seed_s, z for the key pair and coins for encapsulation.
"""
import os.path as osp
import saberutils
from . import sampler
from .params import get_params, SEED_BYTES
logger = saberutils.logger

FIELDS = ('count', 'seed', 'pk', 'sk', 'ct', 'ss')
RECORD_DOMAINS = dict(seed_A=b'seed_A', seed_s=b'seed_s', z=b'z', coins=b'coins')


class KatRecord(object):

    def __init__(self, count, seed, pk, sk, ct, ss):
        self.count = count
        self.seed = seed
        self.pk = pk
        self.sk = sk
        self.ct = ct
        self.ss = ss

    def lengths_match(self, params):
        params = get_params(params)
        lengths = params.lengths()
        return (
            len(self.seed) == SEED_BYTES
            and all(len(getattr(self, field)) == lengths[field] for field in ('pk', 'sk', 'ct', 'ss'))
            )

    def mismatching_field(self, other):
        """First field (in file order) in which the two records differ, or None"""
        for field in FIELDS:
            if getattr(self, field) != getattr(other, field):
                return field
        return None

    def to_text(self):
        lines = [ 'count = {0}'.format(self.count) ]
        for field in FIELDS[1:]:
            lines.append('{0} = {1}'.format(field, getattr(self, field).hex().upper()))
        return '\n'.join(lines) + '\n'

    def __eq__(self, other):
        return isinstance(other, KatRecord) and self.mismatching_field(other) is None

    def __ne__(self, other):
        return not(self == other)

    def __repr__(self):
        return '<KatRecord count={0}>'.format(self.count)


def derive_record_seed(master_seed, index):
    return sampler.xof_expand(master_seed, int(index).to_bytes(4, 'little'), SEED_BYTES)


def generate_record(record_seed, count=0, params=None, backend=None):
    """Runs keygen and encaps with all randomness expanded from `record_seed`"""
    params = get_params(params)
    sampler.check_seed(record_seed)
    seeds = { name : sampler.xof_expand(record_seed, label) for name, label in RECORD_DOMAINS.items() }
    pk, sk = saberutils.kem.kem_keygen(seeds['seed_A'], seeds['seed_s'], seeds['z'], params, backend)
    ct, ss = saberutils.kem.kem_encaps(pk, seeds['coins'], params, backend)
    return KatRecord(count, bytes(record_seed), pk, sk, ct, ss)


def generate_records(master_seed, count, params=None, backend=None):
    if count < 0:
        raise ValueError('count must be non-negative, got {0}'.format(count))
    params = get_params(params)
    logger.info('Generating %s %s KAT records', count, params.name)
    return [ generate_record(derive_record_seed(master_seed, i), i, params, backend) for i in range(count) ]


def format_kat(records):
    return '\n'.join(record.to_text() for record in records)


def write_kat(path, records):
    with open(path, 'w') as f:
        f.write(format_kat(records))
    logger.info('Wrote %s KAT records to %s', len(records), path)


def _finish_record(fields, lineno):
    missing = [ field for field in FIELDS if field not in fields ]
    if missing:
        raise saberutils.KatParseError(lineno, 'record is missing field(s) {0}'.format(', '.join(missing)))
    return KatRecord(**fields)


def parse_kat(text):
    """Parses KAT text into a list of KatRecords; errors carry the line number"""
    records = []
    fields = {}
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            if fields:
                records.append(_finish_record(fields, lineno))
                fields = {}
            continue
        if line.startswith('#'): continue
        if '=' not in line:
            raise saberutils.KatParseError(lineno, 'expected "field = value", got {0!r}'.format(line))
        field, value = [ s.strip() for s in line.split('=', 1) ]
        if field not in FIELDS:
            raise saberutils.KatParseError(lineno, 'unknown field {0!r}'.format(field))
        if field in fields:
            raise saberutils.KatParseError(lineno, 'duplicate field {0!r}'.format(field))
        try:
            fields[field] = int(value) if field == 'count' else bytes.fromhex(value)
        except ValueError:
            raise saberutils.KatParseError(lineno, 'invalid value for {0}: {1!r}'.format(field, value))
    if fields:
        records.append(_finish_record(fields, lineno))
    return records


def read_kat(path):
    if not osp.isfile(path):
        raise IOError('No such KAT file: {0}'.format(path))
    with open(path, 'r') as f:
        return parse_kat(f.read())


def verify_kat(records, params=None, backend=None):
    """
    Regenerates every record from its own seed. Returns None if all records
    match, and (count, field) of the first mismatching record otherwise.
    Records whose hex lengths do not fit `params` mismatch on the first
    field with the wrong length.
    """
    params = get_params(params)
    for record in records:
        if not record.lengths_match(params):
            lengths = dict(params.lengths(), seed=SEED_BYTES)
            field = next(f for f in FIELDS[1:] if len(getattr(record, f)) != lengths[f])
            logger.debug('KAT record %s has a wrong %s length', record.count, field)
            return record.count, field
        expected = generate_record(record.seed, record.count, params, backend)
        field = record.mismatching_field(expected)
        if field is not None:
            return record.count, field
    logger.info('Verified %s %s KAT records', len(records), params.name)
    return None
