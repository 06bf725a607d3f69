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

"""32-bit renormalizing range coder with carry propagation.

The encoder keeps a 33-bit ``low`` and a pending byte plus a run of 0xFF bytes
that a later carry may still increment. Output is the minimal byte string the
decoder consumes exactly: reading past its end is an error.
"""

import math

from bpsc.coder.frequency import RANGE_PRECISION
from bpsc.common.exceptions import TruncatedStreamError

TOP = 1 << 24
MASK32 = 0xFFFFFFFF
_FLUSH_SHIFTS = 5


def _check_precision(table):
    if table.precision > RANGE_PRECISION:
        raise ValueError('Range coder tables are limited to {} bits of precision, got {}.'
                         .format(RANGE_PRECISION, table.precision))


class Bitstream(object):
    """Coded bytes plus the ideal code length of the symbols they carry."""

    def __init__(self, data, ideal_bits=0.0, num_symbols=0):
        self.data = bytes(data)
        self.ideal_bits = ideal_bits
        self.num_symbols = num_symbols

    @property
    def bit_length(self):
        return 8 * len(self.data)

    def __len__(self):
        return len(self.data)

    def __eq__(self, other):
        return isinstance(other, Bitstream) and self.data == other.data

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Bitstream(bytes={}, ideal_bits={:.1f})'.format(len(self.data), self.ideal_bits)


class RangeEncoder(object):
    def __init__(self):
        self._low = 0
        self._range = MASK32
        self._cache = 0
        self._cache_size = 1
        self._out = bytearray()
        self.ideal_bits = 0.0
        self.num_symbols = 0

    def _shift_low(self):
        if self._low < 0xFF000000 or self._low > MASK32:
            carry = self._low >> 32
            temp = self._cache
            while True:
                self._out.append((temp + carry) & 0xFF)
                temp = 0xFF
                self._cache_size -= 1
                if self._cache_size == 0:
                    break
            self._cache = (self._low >> 24) & 0xFF
        self._cache_size += 1
        self._low = (self._low & 0x00FFFFFF) << 8

    def encode(self, symbol, table):
        _check_precision(table)
        start, freq = table.interval(symbol)
        r = self._range // table.total
        self._low += start * r
        self._range = r * freq
        while self._range < TOP:
            self._range <<= 8
            self._shift_low()
        self.ideal_bits += table.precision - math.log2(freq)
        self.num_symbols += 1

    def finish(self):
        for _ in range(_FLUSH_SHIFTS):
            self._shift_low()
        # the leading byte is the initial empty cache and is always zero
        return Bitstream(self._out[1:], self.ideal_bits, self.num_symbols)


class RangeDecoder(object):
    def __init__(self, data):
        self._data = bytes(data)
        self._pos = 0
        self._range = MASK32
        self._code = 0
        for _ in range(4):
            self._code = (self._code << 8) | self._next_byte()

    def _next_byte(self):
        if self._pos >= len(self._data):
            raise TruncatedStreamError(
                'Range decoder read past the end of a {}-byte stream.'.format(len(self._data)))
        byte = self._data[self._pos]
        self._pos += 1
        return byte

    @property
    def bytes_consumed(self):
        return self._pos

    def decode(self, table):
        _check_precision(table)
        r = self._range // table.total
        target = min(self._code // r, table.total - 1)
        symbol = table.find(target)
        start, freq = table.interval(symbol)
        self._code -= start * r
        self._range = r * freq
        while self._range < TOP:
            self._range <<= 8
            self._code = ((self._code << 8) | self._next_byte()) & MASK32
        return symbol


def arith_encode(symbols, next_table, update=None):
    """Range-codes ``symbols``.

    :param symbols: iterable of integer symbols.
    :param next_table: callable returning the FrequencyTable for the next symbol.
    :param update: optional callable receiving each symbol after it is coded,
                   used by adaptive models to advance their state.
    :return: Bitstream.
    """
    encoder = RangeEncoder()
    for symbol in symbols:
        encoder.encode(int(symbol), next_table())
        if update is not None:
            update(int(symbol))
    return encoder.finish()


def arith_decode(data, next_table, count, update=None):
    """Inverse of arith_encode. Tables must be presented in the same sequence;
    a mismatched sequence decodes to garbage rather than raising."""
    if isinstance(data, Bitstream):
        data = data.data
    decoder = RangeDecoder(data)
    symbols = []
    for _ in range(count):
        symbol = decoder.decode(next_table())
        symbols.append(symbol)
        if update is not None:
            update(symbol)
    return symbols
