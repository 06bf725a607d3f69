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

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import struct
import unittest

import numpy as np
import pytest

from bpsc.coder.ans import (RANS_L, ChainedBits, SeededBits, StackCoderState, TailBits,
                            stack_pop, stack_push)
from bpsc.coder.arithmetic import arith_decode, arith_encode
from bpsc.coder.frequency import (FrequencyTable, quantize_counts, quantize_probabilities)
from bpsc.common.exceptions import (CoderError, ExhaustedStreamError, TruncatedStreamError,
                                    ZeroFrequencyError)
from bpsc.model.autoregressive import Order0Model


def _constant_tables(table):
    return lambda: table


def _random_table(rng, size, precision):
    return FrequencyTable.from_counts(rng.integers(1, 50, size=size), precision)


class FrequencyTableTests(unittest.TestCase):
    """
    Tests for bpsc.coder.frequency.
    """

    def test_validation(self):
        with pytest.raises(ZeroFrequencyError):
            FrequencyTable([3, 0, 1])
        with pytest.raises(ValueError):
            FrequencyTable([3, 2])
        with pytest.raises(ValueError):
            FrequencyTable([1 << 29])
        with pytest.raises(ValueError):
            FrequencyTable([])
        table = FrequencyTable([2, 1, 1])
        self.assertEqual((table.total, table.precision), (4, 2))

    def test_lookup(self):
        table = FrequencyTable([2, 1, 5])
        self.assertEqual([table.find(t) for t in range(8)], [0, 0, 1, 2, 2, 2, 2, 2])
        self.assertEqual(table.interval(2), (3, 5))
        with pytest.raises(ZeroFrequencyError):
            table.interval(3)

    def test_quantize_counts(self):
        rng = np.random.default_rng(30)
        for _ in range(100):
            size = int(rng.integers(1, 257))
            counts = rng.integers(0, 1000, size=size)
            counts[0] += 1
            freqs = quantize_counts(counts, 12)
            self.assertEqual(int(freqs.sum()), 4096)
            self.assertGreaterEqual(int(freqs.min()), 1)
            # larger counts never get smaller frequencies
            order = np.argsort(counts, kind='stable')
            self.assertTrue(np.all(np.diff(freqs[order]) >= 0))

    def test_quantize_counts_exact_total_is_kept(self):
        counts = np.array([1000, 3000, 64, 32])
        self.assertEqual(quantize_counts(counts, 12).tolist(), counts.tolist())

    def test_quantize_probabilities(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            p = rng.random(int(rng.integers(1, 200))) ** 4
            freqs = quantize_probabilities(p, 16)
            self.assertEqual(int(freqs.sum()), 1 << 16)
            self.assertGreaterEqual(int(freqs.min()), 1)
        with pytest.raises(ValueError):
            quantize_probabilities([0.0, 0.0], 16)
        with pytest.raises(ValueError):
            quantize_probabilities(np.ones(5), 2)


class ArithmeticCoderTests(unittest.TestCase):
    """
    Tests for bpsc.coder.arithmetic.
    """

    def test_fair_coin(self):
        rng = np.random.default_rng(32)
        bits = rng.integers(0, 2, size=1024).tolist()
        table = FrequencyTable([1, 1])
        stream = arith_encode(bits, _constant_tables(table))
        self.assertEqual(stream.ideal_bits, 1024.0)
        self.assertLessEqual(stream.bit_length, 1024 + 64)
        self.assertEqual(arith_decode(stream, _constant_tables(table), 1024), bits)

    def test_degenerate_table(self):
        table = FrequencyTable([4096 - 3, 1, 1, 1])
        stream = arith_encode([0] * 1000, _constant_tables(table))
        self.assertLess(stream.ideal_bits, 2.0)
        self.assertLessEqual(stream.bit_length, stream.ideal_bits + 64)
        self.assertEqual(arith_decode(stream, _constant_tables(table), 1000), [0] * 1000)

    def test_empty_stream(self):
        table = FrequencyTable([1, 1])
        stream = arith_encode([], _constant_tables(table))
        self.assertLessEqual(stream.bit_length, 64)
        self.assertEqual(arith_decode(stream, _constant_tables(table), 0), [])

    def test_single_symbol(self):
        table = FrequencyTable([1, 6, 1])
        stream = arith_encode([2], _constant_tables(table))
        self.assertEqual(arith_decode(stream, _constant_tables(table), 1), [2])

    def test_zero_frequency_symbol(self):
        with pytest.raises(ZeroFrequencyError):
            arith_encode([0, 5], _constant_tables(FrequencyTable([1, 1])))

    def test_random_table_sequences(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            count = int(rng.integers(1, 500))
            tables = [_random_table(rng, int(rng.integers(2, 40)), int(rng.integers(6, 17)))
                      for _ in range(count)]
            symbols = [int(rng.integers(0, t.size)) for t in tables]
            stream = arith_encode(symbols, iter(tables).__next__)
            self.assertLessEqual(stream.bit_length, stream.ideal_bits + 64)
            self.assertEqual(arith_decode(stream.data, iter(tables).__next__, count), symbols)

    def test_adaptive_stream_near_optimal(self):
        rng = np.random.default_rng(34)
        symbols = rng.choice(16, size=100000, p=np.linspace(1, 16, 16) / 136.0).tolist()
        encoder_model = Order0Model(4)
        stream = arith_encode(symbols, encoder_model.next_distribution, encoder_model.update)
        self.assertLessEqual(stream.bit_length, stream.ideal_bits + 64)

        decoder_model = Order0Model(4)
        self.assertEqual(arith_decode(stream, decoder_model.next_distribution, len(symbols),
                                      decoder_model.update), symbols)
        self.assertTrue(np.array_equal(encoder_model.counts, decoder_model.counts))

    def test_truncated_stream(self):
        rng = np.random.default_rng(35)
        bits = rng.integers(0, 2, size=256).tolist()
        table = FrequencyTable([1, 1])
        stream = arith_encode(bits, _constant_tables(table))
        with pytest.raises(TruncatedStreamError):
            arith_decode(stream.data[:-1], _constant_tables(table), 256)


class StackCoderTests(unittest.TestCase):
    """
    Tests for bpsc.coder.ans.
    """

    def test_push_pop_identity(self):
        rng = np.random.default_rng(36)
        for _ in range(20):
            count = int(rng.integers(1, 300))
            tables = [_random_table(rng, int(rng.integers(2, 64)), int(rng.integers(4, 17)))
                      for _ in range(count)]
            symbols = [int(rng.integers(0, t.size)) for t in tables]
            state = StackCoderState()
            for symbol, table in zip(symbols, tables):
                stack_push(state, symbol, table)

            restored = StackCoderState.from_bytes(state.to_bytes())
            self.assertEqual(restored, state)
            popped = []
            for table in reversed(tables):
                restored, symbol = stack_pop(restored, table)
                popped.append(symbol)
            self.assertEqual(popped[::-1], symbols)
            self.assertEqual(restored, StackCoderState())

    def test_pop_without_source(self):
        table = FrequencyTable([1, 1, 1, 1])
        with pytest.raises(ExhaustedStreamError):
            stack_pop(StackCoderState(), table)

    def test_seeded_pop_is_deterministic(self):
        table = FrequencyTable.from_counts(np.arange(1, 33), 16)

        def draw():
            state = StackCoderState.primed(SeededBits(1234))
            symbols = []
            for _ in range(200):
                state, symbol = stack_pop(state, table)
                symbols.append(symbol)
            return symbols, state

        first, state_a = draw()
        second, state_b = draw()
        self.assertEqual(first, second)
        self.assertEqual(state_a, state_b)
        self.assertNotEqual(len(set(first)), 1)

    def test_amortized_cost(self):
        # dyadic table: the analytic entropy is exactly 1.75 bits
        table = FrequencyTable([2048, 1024, 512, 512])
        counts = [4000, 2000, 1000, 1000]
        symbols = np.repeat(np.arange(4), counts)
        np.random.default_rng(37).shuffle(symbols)
        state = StackCoderState()
        start = state.bit_length()
        for symbol in symbols.tolist():
            stack_push(state, symbol, table)
        self.assertLessEqual(state.bit_length() - start, 8000 * 1.75 + 32)

    def test_from_bytes_validation(self):
        with pytest.raises(TruncatedStreamError):
            StackCoderState.from_bytes(b'\x00' * 7)
        with pytest.raises(TruncatedStreamError):
            StackCoderState.from_bytes(b'\x80' + b'\x00' * 9)
        with pytest.raises(CoderError):
            StackCoderState.from_bytes(b'\x00' * 8)

    def test_tail_bits(self):
        source = TailBits(b'\x01\x02\x03\x04\x05\x06\x07\x08\x09')
        self.assertEqual(source.next_word(), 0x06070809)
        self.assertEqual(source.next_word(), 0x02030405)
        self.assertEqual(source.remaining, b'\x01')
        self.assertTrue(source.exhausted)
        with pytest.raises(ExhaustedStreamError):
            source.next_word()
        self.assertEqual(source.words_drawn, 2)

    def test_chained_bits(self):
        source = ChainedBits(TailBits(b'\x00\x00\x00\x07'), SeededBits(9))
        self.assertEqual(source.next_word(), 7)
        self.assertFalse(source.switched)
        self.assertEqual(source.next_word(), SeededBits.prefix(9, 1)[0])
        self.assertTrue(source.switched)
        self.assertEqual(source.words_drawn, 2)

    def test_bits_back_reclaims_initial_words(self):
        rng = np.random.default_rng(38)
        data = rng.integers(0, 256, size=64, dtype=np.uint8).tobytes()
        inference = FrequencyTable.from_counts(np.ones(256), 16)
        likelihood = _random_table(rng, 16, 12)
        source = TailBits(data)

        state = StackCoderState.primed(source)
        latents, pixels = [], []
        for _ in range(6):
            state, z = stack_pop(state, inference)
            latents.append(z)
            block = rng.integers(0, 16, size=5).tolist()
            pixels.append(block)
            for x in block:
                stack_push(state, x, likelihood)

        decoder = StackCoderState.from_bytes(state.to_bytes())
        for z, block in zip(reversed(latents), reversed(pixels)):
            decoded = []
            for _ in block:
                decoder, x = stack_pop(decoder, likelihood)
                decoded.append(x)
            self.assertEqual(decoded[::-1], block)
            stack_push(decoder, z, inference)

        drawn = source.words_drawn
        self.assertGreaterEqual(drawn, 1)
        expected = [struct.unpack('>I', data[len(data) - 4 * (i + 1):len(data) - 4 * i])[0]
                    for i in range(drawn)]
        self.assertEqual(decoder.reclaimed_words(), expected)

    def test_head_range(self):
        with pytest.raises(CoderError):
            StackCoderState(head=RANS_L - 1)
        with pytest.raises(CoderError):
            StackCoderState(head=RANS_L << 32)
