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

"""Binary portable graymap (P5) reading and writing, maxval 255 only."""

import numpy as np

from bpsc.common.bitplane import Image
from bpsc.common.exceptions import ImageFormatError

_WHITESPACE = b' \t\n\r\x0b\x0c'


def _skip_space_and_comments(data, pos):
    while pos < len(data):
        if data[pos:pos + 1] in _WHITESPACE:
            pos += 1
        elif data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] not in b'\r\n':
                pos += 1
        else:
            break
    return pos


def _read_int(data, pos, name):
    pos = _skip_space_and_comments(data, pos)
    start = pos
    while pos < len(data) and data[pos:pos + 1].isdigit():
        pos += 1
    if start == pos:
        raise ImageFormatError('PGM header is missing its {} field.'.format(name))
    return int(data[start:pos]), pos


def read_pgm(data):
    data = bytes(data)
    if data[:2] != b'P5':
        raise ImageFormatError('Not a binary graymap: magic {!r}, expected {!r}.'
                               .format(data[:2], b'P5'))
    width, pos = _read_int(data, 2, 'width')
    height, pos = _read_int(data, pos, 'height')
    maxval, pos = _read_int(data, pos, 'maxval')
    if maxval != 255:
        raise ImageFormatError('maxval={} is not supported, only 255.'.format(maxval))
    if width < 1 or height < 1:
        raise ImageFormatError('Image dimensions {}x{} are empty.'.format(width, height))
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise ImageFormatError('PGM header must end with a single whitespace byte.')
    pos += 1
    size = width * height
    if len(data) - pos < size:
        raise ImageFormatError('Raster truncated: {} of {} bytes present.'
                               .format(len(data) - pos, size))
    samples = np.frombuffer(data, dtype=np.uint8, count=size, offset=pos)
    return Image(samples.reshape(height, width).copy())


def write_pgm(image):
    return b'P5\n%d %d\n255\n' % (image.width, image.height) + image.samples.tobytes()


def read_pgm_file(path):
    with open(path, 'rb') as f:
        return read_pgm(f.read())


def write_pgm_file(path, image):
    with open(path, 'wb') as f:
        f.write(write_pgm(image))
