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

"""Stack (LIFO) asymmetric numeral system coder used by the bits-back path.

The head lives in [2**31, 2**63) and spills 32-bit words onto a stack. When a
pop needs more bits than the stack holds, words are drawn from an initial-bits
source; the decoder later pushes those same words back, which is how the bits
are reclaimed.
"""

import struct

import numpy as np

from bpsc.common.exceptions import CoderError, ExhaustedStreamError, TruncatedStreamError

RANS_L = 1 << 31
WORD_BITS = 32
WORD_MASK = (1 << WORD_BITS) - 1
HEAD_BYTES = 8


class TailBits(object):
    """Serves 32-bit big-endian words from the end of a byte string backwards."""

    def __init__(self, data):
        self._data = bytes(data)
        self._end = len(self._data)
        self.words_drawn = 0

    def next_word(self):
        if self._end < 4:
            raise ExhaustedStreamError(
                'Local stream tail exhausted after {} words.'.format(self.words_drawn))
        word, = struct.unpack('>I', self._data[self._end - 4:self._end])
        self._end -= 4
        self.words_drawn += 1
        return word

    @property
    def exhausted(self):
        return self._end < 4

    @property
    def remaining(self):
        """The bytes not handed out yet."""
        return self._data[:self._end]


class SeededBits(object):
    """Reproducible pseudo-random words, the top half of each PCG64 output."""

    def __init__(self, seed):
        self.seed = seed
        self._generator = np.random.PCG64(seed)
        self.words_drawn = 0

    def next_word(self):
        self.words_drawn += 1
        return int(self._generator.random_raw()) >> 32

    @staticmethod
    def prefix(seed, count):
        source = SeededBits(seed)
        return [source.next_word() for _ in range(count)]


class ChainedBits(object):
    """Draws from ``primary`` until it is exhausted, then from ``fallback``."""

    def __init__(self, primary, fallback):
        self.primary = primary
        self.fallback = fallback
        self.switched = False

    def next_word(self):
        if not self.switched:
            try:
                return self.primary.next_word()
            except ExhaustedStreamError:
                self.switched = True
        return self.fallback.next_word()

    @property
    def words_drawn(self):
        return self.primary.words_drawn + self.fallback.words_drawn


class StackCoderState(object):
    def __init__(self, head=RANS_L, stack=None, source=None):
        if not RANS_L <= head < (RANS_L << WORD_BITS):
            raise CoderError('Stack coder head {:#x} out of range.'.format(head))
        self.head = head
        self.stack = list(stack) if stack is not None else []
        self.source = source

    @classmethod
    def primed(cls, source):
        """A state whose head already carries one word of initial bits."""
        return cls(head=(1 << WORD_BITS) | source.next_word(), source=source)

    def bit_length(self):
        return WORD_BITS * len(self.stack) + self.head.bit_length()

    def _refill(self):
        if self.stack:
            return self.stack.pop()
        if self.source is None:
            raise ExhaustedStreamError('Stack coder is empty and has no initial-bits source.')
        return self.source.next_word()

    def to_bytes(self):
        return struct.pack('>Q', self.head) + struct.pack('>{}I'.format(len(self.stack)),
                                                          *self.stack)

    @classmethod
    def from_bytes(cls, data):
        data = bytes(data)
        if len(data) < HEAD_BYTES or (len(data) - HEAD_BYTES) % 4:
            raise TruncatedStreamError(
                'Stack coder stream of {} bytes is not a head plus whole words.'.format(len(data)))
        head, = struct.unpack('>Q', data[:HEAD_BYTES])
        count = (len(data) - HEAD_BYTES) // 4
        stack = struct.unpack('>{}I'.format(count), data[HEAD_BYTES:])
        return cls(head=head, stack=stack)

    def reclaimed_words(self):
        """Initial-bit words in the order they were drawn, valid once every
        pop of the encoder has been undone."""
        if self.head >> WORD_BITS != 1:
            raise CoderError('Stack coder did not unwind to a primed state (head {:#x}).'
                             .format(self.head))
        return [self.head & WORD_MASK] + self.stack[::-1]

    def __eq__(self, other):
        return (isinstance(other, StackCoderState) and self.head == other.head and
                self.stack == other.stack)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'StackCoderState(head={:#x}, words={})'.format(self.head, len(self.stack))


def stack_push(state, symbol, table):
    start, freq = table.interval(symbol)
    precision = table.precision
    x = state.head
    if x >= ((RANS_L >> precision) << WORD_BITS) * freq:
        state.stack.append(x & WORD_MASK)
        x >>= WORD_BITS
    state.head = ((x // freq) << precision) + (x % freq) + start
    return state


def stack_pop(state, table):
    precision = table.precision
    x = state.head
    cf = x & ((1 << precision) - 1)
    symbol = table.find(cf)
    start, freq = table.interval(symbol)
    x = freq * (x >> precision) + cf - start
    if x < RANS_L:
        x = (x << WORD_BITS) | state._refill()
    state.head = x
    return state, symbol
