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

"""Bit-plane slicing of 8-bit grayscale images.

Planes are indexed 1 (least significant) through 8 (most significant):
plane l holds floor(x / 2**(l - 1)) mod 2 for every pixel x.
"""

import numpy as np

from bpsc.common.exceptions import ImageFormatError

NUM_PLANES = 8
MAX_SAMPLE = 255


class Image(object):
    """Rectangular grid of 8-bit grayscale intensities, stored row-major."""

    def __init__(self, samples):
        samples = np.asarray(samples)
        if samples.ndim != 2:
            raise ImageFormatError('Image must be a single-channel 2-D grid, got shape {}.'
                                   .format(samples.shape))
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ImageFormatError('Image must be at least 1x1, got shape {}.'.format(samples.shape))
        if samples.dtype != np.uint8:
            if samples.dtype.kind == 'f':
                if not np.all(np.isfinite(samples)) or np.any(samples != np.floor(samples)):
                    raise ImageFormatError('Image samples must be whole numbers.')
            elif samples.dtype.kind not in 'biu':
                raise ImageFormatError('Image samples must be integers, got dtype {}.'
                                       .format(samples.dtype))
            if samples.size and (samples.min() < 0 or samples.max() > MAX_SAMPLE):
                raise ImageFormatError('Image samples must lie in [0, 255].')
            samples = samples.astype(np.uint8)
        self.samples = samples

    @property
    def width(self):
        return self.samples.shape[1]

    @property
    def height(self):
        return self.samples.shape[0]

    @property
    def num_pixels(self):
        return self.samples.size

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.samples, other.samples)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Image(width={}, height={})'.format(self.width, self.height)


class BitPlane(object):
    def __init__(self, bits, plane_index):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError('Bit plane must be 2-D, got shape {}.'.format(bits.shape))
        if bits.size and bits.max() > 1:
            raise ValueError('Bit plane values must be binary.')
        if not 1 <= plane_index <= NUM_PLANES:
            raise ValueError('plane_index={} must be in [1, {}]'.format(plane_index, NUM_PLANES))
        self.bits = bits
        self.plane_index = plane_index

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def height(self):
        return self.bits.shape[0]

    def raster(self):
        """Bits scanned top to bottom, left to right within each row."""
        return self.bits.reshape(-1)

    def __eq__(self, other):
        return isinstance(other, BitPlane) and self.plane_index == other.plane_index and \
            np.array_equal(self.bits, other.bits)

    def __ne__(self, other):
        return not self == other


class PlaneStack(object):
    def __init__(self, planes):
        planes = list(planes)
        if len(planes) != NUM_PLANES:
            raise ValueError('A plane stack holds exactly {} planes, got {}.'
                             .format(NUM_PLANES, len(planes)))
        shape = planes[0].bits.shape
        for expected_index, plane in enumerate(planes, 1):
            if plane.plane_index != expected_index:
                raise ValueError('Planes must be ordered 1..8, found plane {} at position {}.'
                                 .format(plane.plane_index, expected_index))
            if plane.bits.shape != shape:
                raise ValueError('Plane {} has shape {}, expected {}.'
                                 .format(plane.plane_index, plane.bits.shape, shape))
        self.planes = planes

    @property
    def width(self):
        return self.planes[0].width

    @property
    def height(self):
        return self.planes[0].height

    def plane(self, index):
        return self.planes[index - 1]

    def with_planes(self, replacements):
        """Returns a new stack with the given planes swapped in by plane_index."""
        planes = list(self.planes)
        for plane in replacements:
            planes[plane.plane_index - 1] = plane
        return PlaneStack(planes)


class SymbolGrid(object):
    """Row-major grid of packed plane symbols, each bits_per_symbol wide."""

    def __init__(self, symbols, bits_per_symbol):
        symbols = np.asarray(symbols, dtype=np.uint8)
        if symbols.ndim != 2:
            raise ValueError('Symbol grid must be 2-D, got shape {}.'.format(symbols.shape))
        if not 0 <= bits_per_symbol <= NUM_PLANES:
            raise ValueError('bits_per_symbol={} must be in [0, {}]'
                             .format(bits_per_symbol, NUM_PLANES))
        if symbols.size and int(symbols.max()) >= (1 << bits_per_symbol):
            raise ValueError('Symbols exceed the {}-bit alphabet.'.format(bits_per_symbol))
        self.symbols = symbols
        self.bits_per_symbol = bits_per_symbol

    @property
    def width(self):
        return self.symbols.shape[1]

    @property
    def height(self):
        return self.symbols.shape[0]

    @property
    def alphabet_size(self):
        return 1 << self.bits_per_symbol

    @property
    def empty(self):
        return self.bits_per_symbol == 0

    def __eq__(self, other):
        return isinstance(other, SymbolGrid) and self.bits_per_symbol == other.bits_per_symbol and \
            np.array_equal(self.symbols, other.symbols)

    def __ne__(self, other):
        return not self == other


def _check_range(lo, hi):
    if lo < 1 or hi > NUM_PLANES or lo > hi + 1:
        raise ValueError('Plane range lo={}, hi={} must satisfy 1 <= lo <= hi + 1 and hi <= {}.'
                         .format(lo, hi, NUM_PLANES))


def slice_planes(image):
    x = image.samples
    return PlaneStack(BitPlane((x >> (l - 1)) & 1, l) for l in range(1, NUM_PLANES + 1))


def recompose(stack):
    shape = stack.planes[0].bits.shape
    acc = np.zeros(shape, dtype=np.uint16)
    for plane in stack.planes:
        if plane.bits.shape != shape:
            raise ValueError('Plane {} has shape {}, expected {}.'
                             .format(plane.plane_index, plane.bits.shape, shape))
        acc += plane.bits.astype(np.uint16) << (plane.plane_index - 1)
    return Image(acc.astype(np.uint8))


def pack_range(stack, lo, hi):
    """Packs planes lo..hi into symbols, plane lo in the lowest bit."""
    _check_range(lo, hi)
    acc = np.zeros((stack.height, stack.width), dtype=np.uint16)
    for l in range(lo, hi + 1):
        acc += stack.plane(l).bits.astype(np.uint16) << (l - lo)
    return SymbolGrid(acc.astype(np.uint8), hi - lo + 1)


def unpack_range(grid, lo, hi):
    _check_range(lo, hi)
    if grid.bits_per_symbol != hi - lo + 1:
        raise ValueError('Grid holds {}-bit symbols but range {}..{} spans {} planes.'
                         .format(grid.bits_per_symbol, lo, hi, hi - lo + 1))
    return [BitPlane((grid.symbols >> (l - lo)) & 1, l) for l in range(lo, hi + 1)]


def recombine(local, global_, s):
    """Rebuilds the image from the local (planes 1..s) and global (s+1..8) grids."""
    if local.bits_per_symbol != s or global_.bits_per_symbol != NUM_PLANES - s:
        raise ValueError('Grids of {} and {} bits do not partition 8 planes at s={}.'
                         .format(local.bits_per_symbol, global_.bits_per_symbol, s))
    if local.symbols.shape != global_.symbols.shape:
        raise ValueError('Local grid {} and global grid {} differ in shape.'
                         .format(local.symbols.shape, global_.symbols.shape))
    value = (global_.symbols.astype(np.uint16) << s) | local.symbols
    return Image(value.astype(np.uint8))
