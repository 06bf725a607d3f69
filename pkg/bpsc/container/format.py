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

"""On-disk container: header | sidecar | global stream | local stream.

All integers are little-endian. The trailing CRC32 covers the header bytes
before it and the whole payload.
"""

import struct
import zlib

from bpsc.common.exceptions import (BadMagicError, ChecksumError, ContainerFormatError,
                                    TruncatedError, VersionError)
from bpsc.common.util import ceil_div

MAGIC = b'BPSC'
VERSION = 1

POLICY_LOCAL_TAIL = 0
POLICY_SEEDED = 1
POLICY_TAIL_EXHAUSTED = 0x80
POLICY_LOCAL_RAW = 0x40
POLICY_FLAGS = POLICY_TAIL_EXHAUSTED | POLICY_LOCAL_RAW

# magic, version, width, height, s, beta, ar_model_id, lvm_model_id,
# patch_size, block_size, sigma_x, policy, seed, message_bits
_FIXED = struct.Struct('<4sBIIBHBBBBHBQQ')
# sidecar_len, global_len, consumed_bits, local_len
_LENGTHS = struct.Struct('<IIII')
_CRC = struct.Struct('<I')
_SEGMENT = struct.Struct('<I')

_S_OFFSET = 13
_SEGMENTS_OFFSET = _FIXED.size

_FIELDS = [
    ('magic', 4), ('version', 1), ('width', 4), ('height', 4), ('s', 1), ('beta', 2),
    ('ar_model_id', 1), ('lvm_model_id', 1), ('patch_size', 1), ('block_size', 1),
    ('sigma_x', 2), ('policy', 1), ('seed', 8), ('message_bits', 8),
]


def beta_to_fixed(beta):
    return int(round(beta * 10000))


def beta_from_fixed(value):
    return value / 10000.0


def header_size(s):
    return _FIXED.size + _SEGMENT.size * s + _LENGTHS.size + _CRC.size


class ContainerHeader(object):
    def __init__(self, width, height, s, beta_fixed, ar_model_id, lvm_model_id, patch_size,
                 block_size, sigma_x_fixed, policy, seed, segment_lengths, sidecar_len=0,
                 global_len=0, consumed_bits=0, local_len=0, version=VERSION):
        """
        :param beta_fixed: beta x 10000
        :type beta_fixed: int
        :param sigma_x_fixed: likelihood scale of the latent model, x 256; 0 when
        the global path is empty
        :type sigma_x_fixed: int
        :param policy: initial-bits policy byte, POLICY_LOCAL_TAIL or POLICY_SEEDED,
        with POLICY_TAIL_EXHAUSTED set when the local tail ran out and
        POLICY_LOCAL_RAW set when the local grid is stored uncoded
        :type policy: int
        :param segment_lengths: message bits embedded in each of planes 1..s
        :type segment_lengths: list
        :param consumed_bits: initial bits taken from the end of the local stream
        :type consumed_bits: int
        """
        self.version = version
        self.width = width
        self.height = height
        self.s = s
        self.beta_fixed = beta_fixed
        self.ar_model_id = ar_model_id
        self.lvm_model_id = lvm_model_id
        self.patch_size = patch_size
        self.block_size = block_size
        self.sigma_x_fixed = sigma_x_fixed
        self.policy = policy
        self.seed = seed
        self.segment_lengths = tuple(segment_lengths)
        self.sidecar_len = sidecar_len
        self.global_len = global_len
        self.consumed_bits = consumed_bits
        self.local_len = local_len

    @property
    def message_bits(self):
        return sum(self.segment_lengths)

    @property
    def beta(self):
        return beta_from_fixed(self.beta_fixed)

    @property
    def size(self):
        return header_size(self.s)

    @property
    def payload_size(self):
        return self.sidecar_len + self.global_len + self.local_len

    def pack(self):
        """Header bytes up to, not including, the CRC."""
        return (_FIXED.pack(MAGIC, self.version, self.width, self.height, self.s,
                            self.beta_fixed, self.ar_model_id, self.lvm_model_id,
                            self.patch_size, self.block_size, self.sigma_x_fixed, self.policy,
                            self.seed, self.message_bits) +
                b''.join(_SEGMENT.pack(l) for l in self.segment_lengths) +
                _LENGTHS.pack(self.sidecar_len, self.global_len, self.consumed_bits,
                              self.local_len))

    def layout(self):
        """(offset, size, field, value) rows in file order, CRC excluded."""
        rows, offset = [], 0
        values = dict(magic=MAGIC, version=self.version, width=self.width,
                      height=self.height, s=self.s, beta=self.beta_fixed,
                      ar_model_id=self.ar_model_id, lvm_model_id=self.lvm_model_id,
                      patch_size=self.patch_size, block_size=self.block_size,
                      sigma_x=self.sigma_x_fixed, policy=self.policy, seed=self.seed,
                      message_bits=self.message_bits)
        for name, size in _FIELDS:
            rows.append((offset, size, name, values[name]))
            offset += size
        for i, length in enumerate(self.segment_lengths, 1):
            rows.append((offset, 4, 'segment_{}'.format(i), length))
            offset += 4
        for name in ('sidecar_len', 'global_len', 'consumed_bits', 'local_len'):
            rows.append((offset, 4, name, getattr(self, name)))
            offset += 4
        return rows

    def __eq__(self, other):
        return isinstance(other, ContainerHeader) and self.__dict__ == other.__dict__

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'ContainerHeader({}x{}, s={}, L={})'.format(self.width, self.height, self.s,
                                                          self.message_bits)


class Container(object):
    def __init__(self, header, sidecar, global_stream, local_stream, crc=None):
        self.header = header
        self.sidecar = bytes(sidecar)
        self.global_stream = bytes(global_stream)
        self.local_stream = bytes(local_stream)
        self.crc = crc


def _checksum(header_bytes, payload):
    return zlib.crc32(payload, zlib.crc32(header_bytes)) & 0xFFFFFFFF


def write_container(header, sidecar, global_stream, local_stream):
    """:return: the container bytes. Raises ValueError if the header's lengths
    disagree with the payload."""
    actual = (len(sidecar), len(global_stream), len(local_stream))
    declared = (header.sidecar_len, header.global_len, header.local_len)
    if actual != declared:
        raise ValueError('Header declares payload lengths {}, got {}.'.format(declared, actual))
    if header.sidecar_len != ceil_div(header.message_bits, 8):
        raise ValueError('Sidecar of {} bytes does not hold {} bitmap bits.'
                         .format(header.sidecar_len, header.message_bits))
    head = header.pack()
    payload = bytes(sidecar) + bytes(global_stream) + bytes(local_stream)
    return head + _CRC.pack(_checksum(head, payload)) + payload


def _need(data, end, what):
    if len(data) < end:
        raise TruncatedError('File ends before the {}'.format(what), len(data))


def read_container(data):
    """Parses and validates a container. Raises a ContainerError subclass
    carrying the byte offset of the first problem found."""
    data = bytes(data)
    _need(data, 4, 'magic')
    if data[:4] != MAGIC:
        raise BadMagicError('Bad magic {!r}, expected {!r}'.format(data[:4], MAGIC), 0)
    _need(data, 5, 'version')
    if data[4] != VERSION:
        raise VersionError('Unsupported container version {}, expected {}'
                           .format(data[4], VERSION), 4)
    _need(data, _FIXED.size, 'fixed header')
    (_, version, width, height, s, beta_fixed, ar_model_id, lvm_model_id, patch_size,
     block_size, sigma_x_fixed, policy, seed, message_bits) = _FIXED.unpack_from(data)
    if not 1 <= s <= 8:
        raise ContainerFormatError('Slicing index s={} outside [1, 8]'.format(s), _S_OFFSET)

    size = header_size(s)
    _need(data, size, 'end of header')
    segments = [_SEGMENT.unpack_from(data, _SEGMENTS_OFFSET + 4 * i)[0] for i in range(s)]
    lengths_offset = _SEGMENTS_OFFSET + 4 * s
    sidecar_len, global_len, consumed_bits, local_len = _LENGTHS.unpack_from(data, lengths_offset)
    crc_offset = lengths_offset + _LENGTHS.size
    crc, = _CRC.unpack_from(data, crc_offset)

    end = size + sidecar_len + global_len + local_len
    _need(data, end, 'end of payload')
    if len(data) > end:
        raise ContainerFormatError('{} trailing bytes after the payload'
                                   .format(len(data) - end), end)
    if _checksum(data[:crc_offset], data[size:end]) != crc:
        raise ChecksumError('CRC32 mismatch', crc_offset)

    if width < 1 or height < 1:
        raise ContainerFormatError('Image dimensions {}x{} are empty'.format(width, height), 5)
    for i, length in enumerate(segments):
        if length > width * height:
            raise ContainerFormatError('Segment {} holds {} bits, plane capacity is {}'
                                       .format(i + 1, length, width * height),
                                       _SEGMENTS_OFFSET + 4 * i)
    if sum(segments) != message_bits:
        raise ContainerFormatError('Segment lengths sum to {}, message length is {}'
                                   .format(sum(segments), message_bits), _SEGMENTS_OFFSET)
    if sidecar_len != ceil_div(message_bits, 8):
        raise ContainerFormatError('Sidecar of {} bytes cannot hold {} bitmap bits'
                                   .format(sidecar_len, message_bits), lengths_offset)
    if consumed_bits % 32:
        raise ContainerFormatError('Consumed initial bits {} are not whole words'
                                   .format(consumed_bits), lengths_offset + 8)
    if policy & ~POLICY_FLAGS not in (POLICY_LOCAL_TAIL, POLICY_SEEDED):
        raise ContainerFormatError('Unknown initial-bits policy {:#04x}'.format(policy), 22)

    header = ContainerHeader(width, height, s, beta_fixed, ar_model_id, lvm_model_id, patch_size,
                             block_size, sigma_x_fixed, policy, seed, segments,
                             sidecar_len=sidecar_len, global_len=global_len,
                             consumed_bits=consumed_bits, local_len=local_len, version=version)
    sidecar_end = size + sidecar_len
    global_end = sidecar_end + global_len
    return Container(header, data[size:sidecar_end], data[sidecar_end:global_end],
                     data[global_end:end], crc=crc)
