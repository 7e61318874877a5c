from __future__ import print_function
import saberutils, os, sys, argparse, functools, json, time
import numpy as np

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

PARAM_NAMES = [ p.name for p in saberutils.params.ALL_PARAMS ]


class Parser(object):
    """
    Very thin wrapper class for argparse.ArgumentParser with some options
    used for every command line tool in saberutils
    """
    def __init__(self, *args, **kwargs):
        self.use_backend = kwargs.pop('backend', True)
        self.parser = argparse.ArgumentParser(*args, **kwargs)
        self.add_argument('-v', '--verbose', action='store_true', help='Increases verbosity')
        if self.use_backend:
            choices = list(saberutils.backends.keys())
            choices.sort()
            choices.insert(0, 'auto')
            self.add_argument(
                '-b', '--backend', type=str, default='auto',
                help='Multiplier backend to be used (choices: {0})'.format(', '.join(choices)),
                choices=choices
                )

    def add_argument(self, *args, **kwargs):
        self.parser.add_argument(*args, **kwargs)

    def add_mutually_exclusive_group(self, *args, **kwargs):
        return self.parser.add_mutually_exclusive_group(*args, **kwargs)

    def add_params(self):
        self.add_argument(
            '-p', '--params', type=str, default=saberutils.DEFAULT_PARAMS, choices=PARAM_NAMES,
            help='Saber parameter set (default: {0})'.format(saberutils.DEFAULT_PARAMS)
            )

    def add_multiplier_config(self):
        self.add_argument('--units', type=int, default=7, help='Point-multiplication units (1..7)')
        self.add_argument('--macs', type=int, default=4, help='MAC units per point unit')
        self.add_argument('--cache', action='store_true', help='Cache secret evaluations across matrix rows')

    def parse_args(self, *args, **kwargs):
        parsed_args = self.parser.parse_args(*args, **kwargs)
        if parsed_args.verbose: saberutils.debug()
        if self.use_backend:
            parsed_args.backend = saberutils.get_backend(parsed_args.backend)
        else:
            parsed_args.backend = None
        return parsed_args


def multiplier_config(args):
    return saberutils.accel_model.MultiplierConfig(args.units, args.macs, args.cache)


def exit_codes(fn):
    """
    Maps the outcome of a command onto its exit code: 0 on success, 1 on a
    verification or correctness mismatch, 2 on bad input or IO failure
    """
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            rc = fn(*args, **kwargs)
        except saberutils.BackendDisagreement as e:
            print('{0}: {1}'.format(fn.__name__, e), file=sys.stderr)
            return EXIT_MISMATCH
        except (saberutils.SaberError, IOError, OSError, ValueError) as e:
            saberutils.logger.debug('%s failed', fn.__name__, exc_info=True)
            print('{0}: {1}'.format(fn.__name__, e), file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK if rc is None else rc
    return wrapper


def read_binary(path, expected=None, what='file'):
    with open(path, 'rb') as f:
        data = f.read()
    if expected is not None and len(data) != expected:
        raise saberutils.BufferLengthError(
            '{0} {1} has {2} bytes, expected {3}'.format(what, path, len(data), expected)
            )
    return data


def write_binary(path, data):
    with open(path, 'wb') as f:
        f.write(data)
    saberutils.logger.info('Wrote %s bytes to %s', len(data), path)


def add_seed_source(parser, nbytes):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--seed-file', type=str, help='File with exactly {0} seed bytes'.format(nbytes))
    group.add_argument('--os-random', action='store_true', help='Draw the seed bytes from the OS')


def get_seed(args, nbytes):
    if args.os_random:
        return os.urandom(nbytes)
    return read_binary(args.seed_file, nbytes, 'seed file')


# ________________________________________________________
# Command line tool implementations

def version():
    print(saberutils.version())


@exit_codes
def keygen():
    parser = Parser(description='Generates a key pair into two raw binary files')
    parser.add_params()
    add_seed_source(parser, 2 * saberutils.params.SEED_BYTES)
    parser.add_argument('--out-pk', type=str, required=True, help='Public key output path')
    parser.add_argument('--out-sk', type=str, required=True, help='Secret key output path')
    args = parser.parse_args()

    seed = get_seed(args, 2 * saberutils.params.SEED_BYTES)
    seed_A, seed_s = seed[:saberutils.params.SEED_BYTES], seed[saberutils.params.SEED_BYTES:]
    z = saberutils.sampler.xof_expand(seed, b'z')
    pk, sk = saberutils.kem.kem_keygen(seed_A, seed_s, z, args.params, args.backend)
    write_binary(args.out_pk, pk)
    write_binary(args.out_sk, sk)
    print('pk_bytes = {0}'.format(len(pk)))
    print('sk_bytes = {0}'.format(len(sk)))


@exit_codes
def encaps():
    parser = Parser(description='Encapsulates a shared secret against a public key file')
    parser.add_params()
    add_seed_source(parser, saberutils.params.SEED_BYTES)
    parser.add_argument('--pk', type=str, required=True, help='Public key path')
    parser.add_argument('--out-ct', type=str, required=True, help='Ciphertext output path')
    parser.add_argument('--out-ss', type=str, required=True, help='Shared secret output path')
    args = parser.parse_args()

    params = saberutils.params.get_params(args.params)
    pk = read_binary(args.pk, params.pk_bytes, 'public key')
    ct, ss = saberutils.kem.kem_encaps(pk, get_seed(args, saberutils.params.SEED_BYTES), params, args.backend)
    write_binary(args.out_ct, ct)
    write_binary(args.out_ss, ss)
    print('ct_bytes = {0}'.format(len(ct)))
    print('ss_bytes = {0}'.format(len(ss)))


@exit_codes
def decaps():
    parser = Parser(description='Recovers the shared secret from a ciphertext file')
    parser.add_params()
    parser.add_argument('--sk', type=str, required=True, help='Secret key path')
    parser.add_argument('--ct', type=str, required=True, help='Ciphertext path')
    parser.add_argument('--out-ss', type=str, help='Shared secret output path')
    parser.add_argument('--print-ss', action='store_true', help='Also prints the shared secret in hex')
    args = parser.parse_args()

    params = saberutils.params.get_params(args.params)
    sk = read_binary(args.sk, params.sk_bytes, 'secret key')
    ct = read_binary(args.ct, params.ct_bytes, 'ciphertext')
    ss = saberutils.kem.kem_decaps(sk, ct, params, args.backend)
    if args.out_ss: write_binary(args.out_ss, ss)
    print('ss_bytes = {0}'.format(len(ss)))
    if args.print_ss: print('ss = {0}'.format(ss.hex().upper()))


@exit_codes
def kat():
    parser = Parser(description='Generates or verifies known-answer test records')
    parser.add_params()
    parser.add_argument('-n', '--count', type=int, default=10, help='Number of records to generate')
    parser.add_argument(
        '-s', '--seed', type=str, default='00' * saberutils.params.SEED_BYTES,
        help='Master seed as {0} hex bytes'.format(saberutils.params.SEED_BYTES)
        )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--out', type=str, help='Write records to this path')
    group.add_argument('--verify', type=str, help='Verify the records in this path')
    args = parser.parse_args()

    if args.verify:
        records = saberutils.kat.read_kat(args.verify)
        mismatch = saberutils.kat.verify_kat(records, args.params, args.backend)
        if mismatch:
            print('count = {0}: mismatch in {1}'.format(*mismatch))
            return EXIT_MISMATCH
        print('verified {0} records'.format(len(records)))
    else:
        master_seed = bytes.fromhex(args.seed)
        saberutils.sampler.check_seed(master_seed)
        records = saberutils.kat.generate_records(master_seed, args.count, args.params, args.backend)
        saberutils.kat.write_kat(args.out, records)
        print('wrote {0} records to {1}'.format(len(records), args.out))


def random_operands(params, rng):
    """A random public-side vector and a sampled secret vector"""
    a = [ saberutils.poly.Poly.random(width=params.eq, rng=rng) for _ in range(params.l) ]
    s = saberutils.sampler.gen_secret(rng.bytes(saberutils.params.SEED_BYTES), params)
    return a, s


def check_backends_agree(a, s, params):
    """Raises BackendDisagreement unless every backend yields the same inner product"""
    results = [
        (name, saberutils.backends[name].inner_product(a, s, out_width=params.eq))
        for name in sorted(saberutils.backends)
        ]
    reference_name, reference = results[0]
    for name, result in results[1:]:
        if result != reference:
            raise saberutils.BackendDisagreement('{0} vs. {1}'.format(reference_name, name))


@exit_codes
def bench():
    parser = Parser(description='Times the inner product on random operands')
    parser.add_params()
    parser.add_argument('-n', '--iters', type=int, default=10, help='Timed inner products per backend')
    parser.add_argument('--rng-seed', type=int, default=0, help='Seed of the operand generator')
    parser.add_argument('--count-ops', action='store_true', help='Only reports coefficient multiplies, no timing')
    args = parser.parse_args()

    params = saberutils.params.get_params(args.params)
    rng = np.random.default_rng(args.rng_seed)
    check_backends_agree(*random_operands(params, rng), params=params)
    print('params = {0}'.format(params.name))
    print('backends_agree = True')

    selected = [ args.backend ] if args.backend else [ saberutils.backends[name] for name in sorted(saberutils.backends) ]
    operands = [ random_operands(params, rng) for _ in range(max(args.iters, 0)) ]
    for backend in selected:
        print('')
        print('backend = {0}'.format(backend.name))
        print('coeff_mults = {0}'.format(params.l * backend.coeff_mults_per_product))
        if args.count_ops: continue
        t0 = time.perf_counter()
        for a, s in operands:
            backend.inner_product(a, s, out_width=params.eq)
        seconds = time.perf_counter() - t0
        print('iters = {0}'.format(len(operands)))
        print('seconds = {0:.6f}'.format(seconds))
        print('ops_per_sec = {0:.3f}'.format(len(operands) / seconds if operands and seconds > 0 else 0.))


@exit_codes
def simulate():
    parser = Parser(description='Cycle report of a KEM operation on the accelerator model', backend=False)
    parser.add_params()
    parser.add_multiplier_config()
    parser.add_argument(
        '--op', type=str, default='all', choices=list(saberutils.accel_model.KEM_OPS) + ['all'],
        help='KEM operation to model'
        )
    parser.add_argument('--clock', type=float, default=saberutils.DEFAULT_CLOCK_MHZ, help='Clock in MHz')
    parser.add_argument('-o', '--out', type=str, help='Also writes the report(s) as json to this path')
    args = parser.parse_args()

    cfg = multiplier_config(args)
    ops = saberutils.accel_model.KEM_OPS if args.op == 'all' else [args.op]
    reports = [ saberutils.accel_model.model_kem(op, args.params, cfg, args.clock) for op in ops ]
    print('\n'.join(report.to_text() for report in reports), end='')
    if args.out:
        if len(reports) == 1:
            text = reports[0].to_json()
        else:
            text = json.dumps({ r.op : r.to_dict() for r in reports }, indent=2, sort_keys=True)
        with open(args.out, 'w') as f:
            f.write(text)


@exit_codes
def footprint():
    parser = Parser(description='Itemized storage of the accelerator model', backend=False)
    parser.add_params()
    parser.add_multiplier_config()
    args = parser.parse_args()
    report = saberutils.accel_model.footprint_report(args.params, multiplier_config(args))
    print(report.to_text(), end='')
    if not report.within_budget:
        saberutils.logger.error('Storage of %s bytes exceeds the budget', report.total)
        return EXIT_MISMATCH


@exit_codes
def asm():
    parser = Parser(description='Assembles a micro-program text file', backend=False)
    parser.add_argument('path', type=str, help='Assembly source')
    parser.add_params()
    parser.add_multiplier_config()
    parser.add_argument('--run', action='store_true', help='Runs the program on an empty data memory')
    args = parser.parse_args()

    with open(args.path, 'r') as f:
        program = saberutils.isa.assemble(f.read())
    if args.run:
        mem = saberutils.accel_model.DataMemory()
        _, report = saberutils.accel_model.run_program(program, mem, multiplier_config(args), args.params)
        print(report.to_text(), end='')
        return
    for instr in program:
        print('{0:06x}  {1}'.format(saberutils.isa.encode_instr(instr), instr))
    print('program_bytes = {0}'.format(saberutils.isa.program_bytes(program)))
