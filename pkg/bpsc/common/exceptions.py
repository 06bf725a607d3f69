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

"""Errors raised by the codec. Every error carries the CLI exit code it maps to."""

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CAPACITY = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_UNKNOWN_MODEL = 5
EXIT_ROUND_TRIP = 6


class BPSCError(Exception):
    exit_code = EXIT_PARSE


class ConfigError(BPSCError, ValueError):
    exit_code = EXIT_PARSE


class ImageFormatError(BPSCError, ValueError):
    exit_code = EXIT_PARSE


class CapacityError(BPSCError):
    exit_code = EXIT_CAPACITY

    def __init__(self, message_bits, max_capacity):
        super(CapacityError, self).__init__(
            'Message of {} bits exceeds the embedding capacity of {} bits.'
            .format(message_bits, max_capacity))
        self.message_bits = message_bits
        self.max_capacity = max_capacity


class UnknownModelError(BPSCError, KeyError):
    exit_code = EXIT_UNKNOWN_MODEL

    def __init__(self, kind, model_id):
        super(UnknownModelError, self).__init__(
            'No {} model registered with model_id={}.'.format(kind, model_id))
        self.kind = kind
        self.model_id = model_id

    def __str__(self):
        return self.args[0]


class RoundTripError(BPSCError):
    exit_code = EXIT_ROUND_TRIP


class ContainerError(BPSCError):
    """Malformed or corrupted container, raised before any payload is decoded."""
    exit_code = EXIT_CORRUPT

    def __init__(self, message, offset):
        super(ContainerError, self).__init__('{} (byte offset {})'.format(message, offset))
        self.offset = offset


class BadMagicError(ContainerError):
    pass


class VersionError(ContainerError):
    pass


class ChecksumError(ContainerError):
    pass


class TruncatedError(ContainerError):
    pass


class ContainerFormatError(ContainerError):
    pass


class CoderError(BPSCError):
    exit_code = EXIT_CORRUPT


class ZeroFrequencyError(CoderError, ValueError):
    pass


class TruncatedStreamError(CoderError):
    pass


class ExhaustedStreamError(CoderError):
    pass
