# Copyright 2026 The BPSC Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Command-line entry point: compress, decompress, extract, inspect, analyze, bench."""

from __future__ import print_function

import argparse
import logging
import sys

import yaml

import bpsc
from bpsc.codec import EncodeConfig, compress, decompress
from bpsc.codec.config import INITIAL_BITS_POLICIES, SPLIT_MODES, default_seed
from bpsc.common.decomposition import DEFAULT_BETA, select_slicing_index
from bpsc.common.exceptions import (EXIT_IO, EXIT_OK, EXIT_PARSE, BPSCError, ConfigError,
                                    ContainerError)
from bpsc.common.stego import Message
from bpsc.container import read_container, read_pgm_file, write_pgm_file
from bpsc.metrics import QualityReport, bpp
from bpsc.model.autoregressive import DEFAULT_PATCH_SIZE
from bpsc.model.latent import DEFAULT_BLOCK_SIZE
from bpsc.run import bench
from bpsc.run.util import config_parser
from bpsc.run.util.log import configure_logging

logger = logging.getLogger(__name__)

ANALYZE_BETAS = [0.6, 0.7, 0.8, 0.9]


class ArgumentParser(argparse.ArgumentParser):
    """Exits with the parse-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, '{}: error: {}\n'.format(self.prog, message))


def make_override_action(override_args):
    class StoreOverrideAction(argparse.Action):
        def __init__(self,
                     option_strings,
                     dest,
                     nargs=1,
                     default=None,
                     type=None,
                     choices=None,
                     required=False,
                     metavar=None,
                     help=None):
            super(StoreOverrideAction, self).__init__(
                option_strings=option_strings,
                dest=dest,
                nargs=nargs,
                default=default,
                type=type,
                choices=choices,
                required=required,
                metavar=metavar,
                help=help)

        def __call__(self, parser, args, values, option_string=None):
            override_args.add(self.dest)
            setattr(args, self.dest, values[0] if self.nargs == 1 else list(values))

    return StoreOverrideAction


def make_override_bool_action(override_args, bool_value):
    class StoreOverrideBoolAction(argparse.Action):
        def __init__(self,
                     option_strings,
                     dest,
                     required=False,
                     help=None):
            super(StoreOverrideBoolAction, self).__init__(
                option_strings=option_strings,
                dest=dest,
                const=bool_value,
                nargs=0,
                default=None,
                required=required,
                help=help)

        def __call__(self, parser, args, values, option_string=None):
            override_args.add(self.dest)
            setattr(args, self.dest, self.const)

    return StoreOverrideBoolAction


def make_override_true_action(override_args):
    return make_override_bool_action(override_args, True)


def make_override_false_action(override_args):
    return make_override_bool_action(override_args, False)


def _add_common_args(parser, override_args):
    parser.add_argument('--config-file', action='store', dest='config_file',
                        help='Path to YAML file containing codec, bench and logging settings. '
                             'Note that this will override any command line arguments provided before '
                             'this argument, and will be overridden by any arguments that come after it.')

    group_logging = parser.add_argument_group('logging arguments')
    group_logging.add_argument('--log-level', action=make_override_action(override_args),
                               choices=config_parser.LOG_LEVELS,
                               help='Minimum level to log to stderr. Falls back to the BPSC_LOG_LEVEL '
                                    'environment variable. (default: WARNING)')
    group_logging_timestamp = group_logging.add_mutually_exclusive_group()
    group_logging_timestamp.add_argument('--log-hide-timestamp', action=make_override_true_action(override_args),
                                         help='Hide the timestamp from log messages.')
    group_logging_timestamp.add_argument('--no-log-hide-timestamp', dest='log_hide_timestamp',
                                         action=make_override_false_action(override_args), help=argparse.SUPPRESS)


def _add_codec_args(parser, override_args, sweep=False):
    group_codec = parser.add_argument_group('codec arguments')
    nargs = '+' if sweep else 1
    group_codec.add_argument('--beta', action=make_override_action(override_args), type=float, nargs=nargs,
                             default=[DEFAULT_BETA] if sweep else DEFAULT_BETA,
                             help='Fraction of the image entropy the local planes must carry. '
                                  '{}(default: %(default)s)'.format('Several values sweep the corpus. '
                                                                    if sweep else ''))
    group_codec.add_argument('--patch', action=make_override_action(override_args), type=int, nargs=nargs,
                             default=[DEFAULT_PATCH_SIZE] if sweep else DEFAULT_PATCH_SIZE,
                             help='Patch size of the local path. (default: %(default)s)')
    group_codec.add_argument('--ar-model', action=make_override_action(override_args), type=int, default=1,
                             help='Autoregressive model id for the local path. (default: %(default)s)')
    group_codec.add_argument('--lvm-model', action=make_override_action(override_args), type=int, default=1,
                             help='Latent variable model id for the global path. (default: %(default)s)')
    group_codec.add_argument('--block-size', action=make_override_action(override_args), type=int,
                             default=DEFAULT_BLOCK_SIZE,
                             help='Block size of the latent model. (default: %(default)s)')
    group_codec.add_argument('--initial-bits', action=make_override_action(override_args),
                             choices=INITIAL_BITS_POLICIES, default=INITIAL_BITS_POLICIES[0],
                             help='Source of the bits-back initial bits. (default: %(default)s)')
    group_codec.add_argument('--seed', action=make_override_action(override_args), type=int,
                             default=default_seed(),
                             help='Seed of the pseudo-random initial-bits source. Falls back to the '
                                  'BPSC_SEED environment variable. (default: %(default)s)')
    group_codec.add_argument('--split', action=make_override_action(override_args), choices=SPLIT_MODES,
                             default=SPLIT_MODES[0],
                             help='"information" picks s from beta, "rate" keeps the smallest '
                                  'container over every s the message fits. (default: %(default)s)')


def make_parser(override_args):
    parser = ArgumentParser(prog='bpsc', description='Bit-plane steganographic lossless image codec')
    parser.add_argument('-v', '--version', action='version', version=bpsc.__version__,
                        help='Shows bpsc version.')
    commands = parser.add_subparsers(dest='command', metavar='command',
                                     parser_class=ArgumentParser)

    p = commands.add_parser('compress', help='Embed a message and compress a P5 image.')
    p.add_argument('--input', required=True, help='Input P5 graymap.')
    p.add_argument('--output', required=True, help='Output container.')
    p.add_argument('--message', help='Message file; its bits are embedded MSB-first.')
    p.add_argument('--message-bits', action=make_override_action(override_args), type=int,
                   help='Embed only the first N bits of the message file. (default: 8 x file size)')
    _add_codec_args(p, override_args)
    _add_common_args(p, override_args)

    p = commands.add_parser('decompress', help='Restore the image and message from a container.')
    p.add_argument('--input', required=True, help='Input container.')
    p.add_argument('--output', required=True, help='Output P5 graymap.')
    p.add_argument('--message-out', help='Write the message here, zero-padded to whole bytes. '
                                         'Not written when the container carries no message.')
    _add_common_args(p, override_args)

    p = commands.add_parser('extract', help='Write only the message carried by a container.')
    p.add_argument('--input', required=True, help='Input container.')
    p.add_argument('--message-out', required=True, help='Output message file.')
    _add_common_args(p, override_args)

    p = commands.add_parser('inspect', help='Print container header fields without decoding.')
    p.add_argument('--input', required=True, help='Input container.')
    _add_common_args(p, override_args)

    p = commands.add_parser('analyze', help='Print per-plane information and s for several betas.')
    p.add_argument('--input', required=True, help='Input P5 graymap.')
    p.add_argument('--beta', type=float, nargs='+', default=ANALYZE_BETAS,
                   help='Betas to report the slicing index for. (default: %(default)s)')
    _add_common_args(p, override_args)

    p = commands.add_parser('bench', help='Compress every P5 file in a directory and report a CSV.')
    p.add_argument('--corpus', required=True, help='Directory of .pgm files.')
    p.add_argument('--report', required=True, help='Output CSV.')
    p.add_argument('--message-bits', action=make_override_action(override_args), type=int, default=0,
                   help='Random message bits embedded in every image, seeded by file name. '
                        '(default: %(default)s)')
    p.add_argument('--jobs', action=make_override_action(override_args), type=int,
                   default=bench.default_jobs(),
                   help='Files compressed concurrently. (default: physical cores, %(default)s)')
    group_verify = p.add_mutually_exclusive_group()
    group_verify.add_argument('--no-verify', action=make_override_true_action(override_args),
                              help='Skip the per-file round-trip check.')
    group_verify.add_argument('--verify', dest='no_verify', action=make_override_false_action(override_args),
                              help=argparse.SUPPRESS)
    _add_codec_args(p, override_args, sweep=True)
    _add_common_args(p, override_args)
    return parser


def parse_args(argv=None):
    override_args = set()
    parser = make_parser(override_args)
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error('a command is required')

    if args.config_file:
        with open(args.config_file, 'r') as f:
            config = yaml.load(f, Loader=yaml.FullLoader)
        config_parser.set_args_from_config(args, config or {}, override_args)
    config_parser.validate_config_args(args)
    return args


def _encode_config(args, beta=None, patch=None):
    return EncodeConfig(beta=args.beta if beta is None else beta,
                        patch_size=args.patch if patch is None else patch,
                        ar_model_id=args.ar_model,
                        lvm_model_id=args.lvm_model,
                        block_size=args.block_size,
                        initial_bits=args.initial_bits,
                        seed=args.seed,
                        split=args.split)


def _read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


def _write_bytes(path, data):
    with open(path, 'wb') as f:
        f.write(data)


def _format_db(value):
    return 'inf' if value == float('inf') else '{:.2f}'.format(value)


def cmd_compress(args):
    image = read_pgm_file(args.input)
    if args.message:
        payload = _read_bytes(args.message)
        if args.message_bits is not None and not 0 <= args.message_bits <= 8 * len(payload):
            raise ConfigError('--message-bits {} does not fit the {}-byte message file {}'
                              .format(args.message_bits, len(payload), args.message))
        message = Message.from_bytes(payload, args.message_bits)
    elif args.message_bits:
        raise ConfigError('--message-bits needs --message')
    else:
        message = Message.empty()

    compressed = compress(image, message, _encode_config(args))
    data = compressed.to_bytes()
    _write_bytes(args.output, data)

    summary = 's={} bpp={:.4f} bytes={}'.format(compressed.header.s,
                                               bpp(len(data), image.width, image.height), len(data))
    if message.length:
        report = QualityReport.measure(image, compressed.stats.stego_image, len(data))
        summary += ' message_bits={} psnr={} ssim={}'.format(
            message.length, _format_db(report.psnr),
            'n/a' if report.ssim is None else '{:.6f}'.format(report.ssim))
    print(summary)
    return EXIT_OK


def cmd_decompress(args):
    image, message = decompress(_read_bytes(args.input))
    write_pgm_file(args.output, image)
    if args.message_out and message.length:
        _write_bytes(args.message_out, message.to_bytes())
    print('{}x{} message_bits={}'.format(image.width, image.height, message.length))
    return EXIT_OK


def cmd_extract(args):
    _, message = decompress(_read_bytes(args.input))
    _write_bytes(args.message_out, message.to_bytes())
    print('message_bits={}'.format(message.length))
    return EXIT_OK


def cmd_inspect(args):
    data = _read_bytes(args.input)
    try:
        container = read_container(data)
    except ContainerError as e:
        print('bpsc: malformed container: {}'.format(e), file=sys.stderr)
        return EXIT_PARSE
    header = container.header
    for offset, size, name, value in header.layout():
        print('{:>6} {:>2}  {:<14} {}'.format(offset, size, name,
                                             value.decode('ascii') if isinstance(value, bytes) else value))
    print('{:>6} {:>2}  {:<14} {:#010x}'.format(header.size - 4, 4, 'crc32', container.crc))
    print('beta {:.4f}  sigma_x {:.4f}  policy {:#04x}'.format(header.beta, header.sigma_x_fixed / 256.0,
                                                             header.policy))
    print('sidecar {} bytes, global {} bytes ({} initial bits reused), local {} bytes'.format(
        header.sidecar_len, header.global_len, header.consumed_bits, header.local_len))
    print('total {} bytes, {:.4f} bpp'.format(len(data), bpp(len(data), header.width, header.height)))
    return EXIT_OK


def cmd_analyze(args):
    image = read_pgm_file(args.input)
    decision = select_slicing_index(image, DEFAULT_BETA)
    print('H(x) = {:.4f} bits'.format(decision.total_entropy))
    cumulative = decision.cumulative_info()
    for i, info in enumerate(decision.per_plane_info):
        print('plane {}  I = {:.4f}  cumulative = {:.4f}'.format(i + 1, info, cumulative[i]))
    for beta in args.beta:
        print('beta {:.2f}  s = {}'.format(beta, select_slicing_index(image, beta).s))
    return EXIT_OK


def _as_list(value):
    return value if isinstance(value, list) else [value]


def cmd_bench(args):
    configs = [_encode_config(args, beta=beta, patch=patch)
               for beta in _as_list(args.beta) for patch in _as_list(args.patch)]
    return bench.run_bench(args.corpus, args.report, configs, message_bits=args.message_bits,
                           jobs=args.jobs, verify=not args.no_verify, log_level=args.log_level,
                           log_hide_timestamp=args.log_hide_timestamp)


COMMANDS = {
    'compress': cmd_compress,
    'decompress': cmd_decompress,
    'extract': cmd_extract,
    'inspect': cmd_inspect,
    'analyze': cmd_analyze,
    'bench': cmd_bench,
}


def run_commandline(argv=None):
    """:return: process exit code."""
    try:
        args = parse_args(argv)
    except (BPSCError, yaml.YAMLError) as e:
        print('bpsc: {}'.format(e), file=sys.stderr)
        return EXIT_PARSE
    except (IOError, OSError) as e:
        print('bpsc: {}'.format(e), file=sys.stderr)
        return EXIT_IO

    try:
        configure_logging(args.log_level, args.log_hide_timestamp)
        return COMMANDS[args.command](args)
    except BPSCError as e:
        print('bpsc {}: {}'.format(args.command, e), file=sys.stderr)
        return e.exit_code
    except (IOError, OSError) as e:
        print('bpsc {}: {}'.format(args.command, e), file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(run_commandline())
