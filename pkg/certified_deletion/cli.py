"""
Command-line front end.

Exit codes: 0 success, 1 error, 2 rejected (decryption flag 0, verification 0, a flagged gap violation or an
exceeded robustness bound), 3 infeasible parameter plan. No environment variables are read.
"""
import argparse
import sys
import traceback

from certified_deletion.certified_deletion_app import CertifiedDeletionApp, EXIT_ERROR, EXIT_INFEASIBLE
from certified_deletion.configuration import load_config, RunConfig
from certified_deletion.errors import CertifiedDeletionError, ConfigurationError, InfeasibleTargetError
from certified_deletion.logging import get_logger

LOGGER_NAME = 'certified_deletion'


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ConfigurationError so they map to exit code 1."""

    def error(self, message):
        raise ConfigurationError(message)


def build_parser():
    parser = _ArgumentParser(
        prog='certified_deletion',
        description='Prepare-and-measure encryption with certified deletion: artifacts, bounds and attack games.',
    )
    common = _ArgumentParser(add_help=False)
    common.add_argument('--params', help='JSON configuration file or inline JSON object')
    common.add_argument('--seed', type=int, help='master seed (required by randomized subcommands)')
    common.add_argument('--out', dest='out_path', help='output path (stdout when omitted for reports)')
    common.add_argument('--log-level', help='debug, info, warning, error or critical')
    common.add_argument('--log-file', help='log to a daily-rotated file instead of stderr')

    subparsers = parser.add_subparsers(dest='subcommand', required=True)

    subparsers.add_parser('keygen', parents=[common], help='sample an auxiliary and a decryption key')

    encrypt = subparsers.add_parser('encrypt', parents=[common], help='encrypt a message file')
    encrypt.add_argument('--key', dest='key_path', help='key file')
    encrypt.add_argument('--in', dest='in_path', help='message file (ceil(n / 8) bytes)')

    decrypt = subparsers.add_parser('decrypt', parents=[common], help='decrypt a ciphertext file')
    decrypt.add_argument('--key', dest='key_path', help='key file')
    decrypt.add_argument('--in', dest='in_path', help='ciphertext file')

    delete = subparsers.add_parser('delete', parents=[common], help='measure a ciphertext into a certificate')
    delete.add_argument('--in', dest='in_path', help='ciphertext file')

    verify = subparsers.add_parser('verify', parents=[common], help='check a deletion certificate')
    verify.add_argument('--key', dest='key_path', help='key file')
    verify.add_argument('--aux', dest='aux_path', help='key file holding the auxiliary key (defaults to --key)')
    verify.add_argument('--cert', dest='cert_path', help='certificate file')

    params = subparsers.add_parser('params', parents=[common], help='plan or evaluate scheme parameters')
    params.add_argument('action', choices=('plan', 'eval'))

    simulate = subparsers.add_parser('simulate', parents=[common], help='estimate the certified-deletion gap')
    simulate.add_argument('--strategy', default='honest', help="adversary, e.g. honest, partial:f=0.3, forging")
    simulate.add_argument('--trials', type=int, help='trials per challenge bit')
    simulate.add_argument('--workers', type=int, help='worker processes')

    robustness = subparsers.add_parser('robustness', parents=[common], help='estimate the false-accept rate')
    robustness.add_argument('--trials', type=int, help='trials')
    robustness.add_argument('--workers', type=int, help='worker processes')

    oracle = subparsers.add_parser('oracle', parents=[common], help='exact entanglement-based game on tiny instances')
    oracle.add_argument('--in', dest='in_path', help='instance file (params, scenario, msg0)')
    oracle.add_argument('--format', dest='output_format', choices=('json', 'csv'), default='json')

    return parser


def parse_run_config(argv):
    args = vars(build_parser().parse_args(argv))
    config = load_config(args.pop('params'))
    return RunConfig(config=config, **args).validate()


def main(argv=None, stdout=None):
    try:
        run_config = parse_run_config(argv)
    except CertifiedDeletionError as e:
        sys.stderr.write("certified_deletion: {}\n".format(e))
        return EXIT_ERROR

    logger = get_logger(run_config.get_log_level(), LOGGER_NAME, run_config.log_file)
    try:
        return CertifiedDeletionApp(run_config, logger, stdout).run()
    except InfeasibleTargetError as e:
        logger.error("Infeasible parameter target: %s", e)
        return EXIT_INFEASIBLE
    except CertifiedDeletionError as e:
        logger.error("%s failed: %s", run_config.subcommand, e)
        return EXIT_ERROR
    except Exception as e:
        logger.error("Unexpected error in %s: %s", run_config.subcommand, e)
        logger.debug(traceback.format_exc())
        return EXIT_ERROR
