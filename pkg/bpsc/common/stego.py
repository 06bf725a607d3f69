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

"""Segmented message embedding into the local bit planes.

Segment i of the message replaces the first L_i raster positions of plane i.
The XOR of original and stego bits over that prefix forms the bitmap B^i,
which is all the receiver needs to restore the original planes exactly.
"""

import numpy as np

from bpsc.common.bitplane import BitPlane
from bpsc.common.exceptions import CapacityError
from bpsc.common.util import ceil_div


class Message(object):
    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
        if bits.size and bits.max() > 1:
            raise ValueError('Message bits must be binary.')
        self.bits = bits

    @property
    def length(self):
        return int(self.bits.size)

    def __len__(self):
        return self.length

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=np.uint8))

    @classmethod
    def from_bytes(cls, data, bit_length=None):
        """Bits are taken MSB-first within each byte."""
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        if bit_length is None:
            bit_length = bits.size
        if not 0 <= bit_length <= bits.size:
            raise ValueError('bit_length={} must be in [0, {}]'.format(bit_length, bits.size))
        return cls(bits[:bit_length])

    def to_bytes(self):
        """Packs MSB-first, zero-padding the final byte."""
        return np.packbits(self.bits).tobytes()

    def __eq__(self, other):
        return isinstance(other, Message) and np.array_equal(self.bits, other.bits)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Message(length={})'.format(self.length)


class SegmentPlan(object):
    def __init__(self, lengths, plane_capacity):
        self.lengths = tuple(int(l) for l in lengths)
        self.plane_capacity = plane_capacity
        for i, l in enumerate(self.lengths, 1):
            if not 0 <= l <= plane_capacity:
                raise ValueError('Segment {} length {} must be in [0, {}]'.format(i, l, plane_capacity))

    @property
    def segments(self):
        return len(self.lengths)

    @property
    def total(self):
        return sum(self.lengths)

    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.lengths)]).astype(np.int64)

    def __eq__(self, other):
        return isinstance(other, SegmentPlan) and self.lengths == other.lengths and \
            self.plane_capacity == other.plane_capacity

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'SegmentPlan(lengths={}, plane_capacity={})'.format(self.lengths, self.plane_capacity)


class StegoPlanes(object):
    def __init__(self, planes):
        self.planes = list(planes)


class BitmapSidecar(object):
    """XOR bitmaps B^1..B^s, each truncated to its segment length."""

    def __init__(self, bitmaps):
        self.bitmaps = [np.asarray(b, dtype=np.uint8).reshape(-1) for b in bitmaps]

    @property
    def lengths(self):
        return tuple(int(b.size) for b in self.bitmaps)

    def to_bytes(self):
        """Concatenates every bitmap and packs MSB-first into ceil(L / 8) bytes."""
        if not self.bitmaps:
            return b''
        return np.packbits(np.concatenate(self.bitmaps)).tobytes()

    @classmethod
    def from_bytes(cls, data, lengths):
        total = sum(lengths)
        if len(data) != ceil_div(total, 8):
            raise ValueError('Sidecar holds {} bytes, {} bits need {}.'
                             .format(len(data), total, ceil_div(total, 8)))
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))[:total]
        offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
        return cls(bits[offsets[i]:offsets[i + 1]] for i in range(len(lengths)))

    def __eq__(self, other):
        return isinstance(other, BitmapSidecar) and len(self.bitmaps) == len(other.bitmaps) and \
            all(np.array_equal(a, b) for a, b in zip(self.bitmaps, other.bitmaps))

    def __ne__(self, other):
        return not self == other


def plan_segments(message_bits, segments, capacity):
    """Near-equal split; the remainder goes to the lowest planes."""
    if segments < 1:
        raise ValueError('segments={} must be >= 1'.format(segments))
    if message_bits < 0:
        raise ValueError('message_bits={} must be >= 0'.format(message_bits))
    if message_bits > segments * capacity:
        raise CapacityError(message_bits, segments * capacity)
    base, extra = divmod(message_bits, segments)
    return SegmentPlan([base + 1 if i < extra else base for i in range(segments)], capacity)


def _check_plan(planes, plan):
    if len(planes) != plan.segments:
        raise ValueError('Plan has {} segments but {} planes were given.'
                         .format(plan.segments, len(planes)))
    for plane in planes:
        if plane.bits.size != plan.plane_capacity:
            raise ValueError('Plane {} holds {} bits, plan capacity is {}.'
                             .format(plane.plane_index, plane.bits.size, plan.plane_capacity))


def embed(local_planes, message, plan):
    _check_plan(local_planes, plan)
    if plan.total != message.length:
        raise ValueError('Plan covers {} bits, message has {}.'.format(plan.total, message.length))

    offsets = plan.offsets()
    stego, bitmaps = [], []
    for i, plane in enumerate(local_planes):
        original = plane.raster()
        length = plan.lengths[i]
        replaced = original.copy()
        replaced[:length] = message.bits[offsets[i]:offsets[i + 1]]
        bitmaps.append(original[:length] ^ replaced[:length])
        stego.append(BitPlane(replaced.reshape(plane.bits.shape), plane.plane_index))
    return StegoPlanes(stego), BitmapSidecar(bitmaps)


def extract_message(stego, plan):
    _check_plan(stego.planes, plan)
    parts = [plane.raster()[:length] for plane, length in zip(stego.planes, plan.lengths)]
    if not parts:
        return Message.empty()
    return Message(np.concatenate(parts))


def recover_planes(stego, sidecar):
    if len(stego.planes) != len(sidecar.bitmaps):
        raise ValueError('Sidecar has {} bitmaps for {} stego planes.'
                         .format(len(sidecar.bitmaps), len(stego.planes)))
    planes = []
    for plane, bitmap in zip(stego.planes, sidecar.bitmaps):
        raster = plane.raster().copy()
        if bitmap.size > raster.size:
            raise ValueError('Bitmap of {} bits exceeds plane {} capacity of {} bits.'
                             .format(bitmap.size, plane.plane_index, raster.size))
        raster[:bitmap.size] ^= bitmap
        planes.append(BitPlane(raster.reshape(plane.bits.shape), plane.plane_index))
    return planes
