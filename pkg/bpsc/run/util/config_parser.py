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

from bpsc.common.exceptions import ConfigError

# Environment knobs
BPSC_LOG_LEVEL = 'BPSC_LOG_LEVEL'
BPSC_SEED = 'BPSC_SEED'
LOG_LEVELS = ['TRACE', 'DEBUG', 'INFO', 'WARNING', 'ERROR', 'FATAL']


def _set_arg_from_config(args, arg_base_name, override_args, config, arg_prefix='', arg_name=None):
    arg_name = arg_name or arg_prefix + arg_base_name
    if arg_name in override_args or not hasattr(args, arg_name):
        return

    value = config.get(arg_base_name)
    if value is not None:
        setattr(args, arg_name, value)


def set_args_from_config(args, config, override_args):
    """Copies YAML config values onto args, skipping anything set on the
    command line after --config-file."""
    # Codec
    codec = config.get('codec')
    if codec:
        _set_arg_from_config(args, 'beta', override_args, codec)
        _set_arg_from_config(args, 'patch_size', override_args, codec, arg_name='patch')
        _set_arg_from_config(args, 'ar_model', override_args, codec)
        _set_arg_from_config(args, 'lvm_model', override_args, codec)
        _set_arg_from_config(args, 'block_size', override_args, codec)
        _set_arg_from_config(args, 'seed', override_args, codec)
        _set_arg_from_config(args, 'initial_bits', override_args, codec)
        _set_arg_from_config(args, 'split', override_args, codec)

    # Bench
    bench = config.get('bench')
    if bench and getattr(args, 'command', None) == 'bench':
        _set_arg_from_config(args, 'message_bits', override_args, bench)
        _set_arg_from_config(args, 'jobs', override_args, bench)
        if 'no_verify' not in override_args and hasattr(args, 'no_verify') and \
                bench.get('verify') is not None:
            args.no_verify = not bench.get('verify')

    # Logging
    logging = config.get('logging')
    if logging:
        _set_arg_from_config(args, 'level', override_args, logging, arg_prefix='log_')
        _set_arg_from_config(args, 'hide_timestamp', override_args, logging, arg_prefix='log_')


def _values(args, arg_name):
    value = getattr(args, arg_name, None)
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def _validate_arg_range(args, arg_name, low, high):
    for value in _values(args, arg_name):
        if not low <= value <= high:
            raise ConfigError('{}={} must be in [{}, {}]'.format(arg_name, value, low, high))


def _validate_arg_nonnegative(args, arg_name):
    for value in _values(args, arg_name):
        if value < 0:
            raise ConfigError('{}={} must be >= 0'.format(arg_name, value))


def validate_config_args(args):
    _validate_arg_range(args, 'beta', 0.0, 1.0)
    _validate_arg_range(args, 'patch', 1, 255)
    _validate_arg_range(args, 'block_size', 1, 255)
    _validate_arg_range(args, 'seed', 0, (1 << 64) - 1)
    _validate_arg_nonnegative(args, 'message_bits')
    _validate_arg_range(args, 'jobs', 1, 1 << 16)

    level = getattr(args, 'log_level', None)
    if level is not None and level not in LOG_LEVELS:
        raise ConfigError('log_level={} must be one of {}'.format(level, LOG_LEVELS))
