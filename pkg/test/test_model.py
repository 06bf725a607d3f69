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

import math
import unittest

import numpy as np
import pytest

from bpsc.coder.frequency import FrequencyTable, quantize_counts
from bpsc.common.bitplane import SymbolGrid
from bpsc.common.exceptions import CoderError, TruncatedStreamError, UnknownModelError
from bpsc.model import (AR_MODELS, LATENT_MODELS, BlockMeanLatentModel, Order0Model,
                        Order1ContextModel, PatchOrder, ar_next_distribution, ar_update,
                        create_ar_model, create_latent_model, elbo_estimate, lvm_tables)
from bpsc.model.latent import (INFERENCE_PRECISION, INFERENCE_SCALES, MIN_SCALE, PREAMBLE_BYTES,
                               from_fixed, to_fixed)


def _recount(symbols, size, limit=4096):
    """Plain-list replay of the order-1 counting rules."""
    order0 = [1] * size
    rows = [[1] * size for _ in range(size + 1)]
    context = size
    for symbol in symbols:
        rows[context][symbol] += 1
        if sum(rows[context]) > limit:
            rows[context] = [max(c // 2, 1) for c in rows[context]]
        order0[symbol] += 1
        if sum(order0) > limit:
            order0 = [max(c // 2, 1) for c in order0]
        context = symbol
    return order0, rows


class AutoregressiveModelTests(unittest.TestCase):
    """
    Tests for bpsc.model.autoregressive.
    """

    def test_fresh_model_is_uniform(self):
        for bits in range(1, 9):
            for model in (Order1ContextModel(bits), Order0Model(bits)):
                table = ar_next_distribution(model)
                self.assertEqual(table.size, 1 << bits)
                self.assertEqual(len(set(table.frequencies.tolist())), 1)

    def test_table_follows_counts(self):
        model = Order1ContextModel(3)
        for _ in range(40):
            ar_update(model, 5)
            ar_update(model, 2)
        table = ar_next_distribution(model)
        self.assertEqual(model.context, 2)
        expected = quantize_counts(model.counts_for(2), 12)
        self.assertEqual(table, FrequencyTable(expected))
        self.assertEqual(table.find(table.interval(5)[0]), 5)
        self.assertGreater(table.interval(5)[1], table.interval(0)[1])

    def test_identical_histories_give_identical_tables(self):
        rng = np.random.default_rng(40)
        symbols = rng.integers(0, 16, size=3000).tolist()
        a, b = Order1ContextModel(4), Order1ContextModel(4)
        for symbol in symbols:
            self.assertEqual(ar_next_distribution(a), ar_next_distribution(b))
            ar_update(a, symbol)
            ar_update(b, symbol)

    def test_counts_match_recount(self):
        rng = np.random.default_rng(41)
        symbols = rng.choice(4, size=20000, p=[0.7, 0.1, 0.1, 0.1]).tolist()
        model = Order1ContextModel(2)
        for symbol in symbols:
            model.update(symbol)
        order0, rows = _recount(symbols, 4)
        self.assertEqual(model.order0.tolist(), order0)
        self.assertEqual(model.context_counts.tolist(), rows)

    def test_rescale_keeps_every_symbol(self):
        model = Order0Model(2)
        for _ in range(10000):
            model.update(3)
        self.assertGreaterEqual(int(model.counts.min()), 1)
        self.assertLessEqual(int(model.counts.sum()), 4096)
        self.assertGreater(ar_next_distribution(model).interval(0)[1], 0)

    def test_reset_context(self):
        model = Order1ContextModel(1)
        model.update(1)
        self.assertEqual(model.context, 1)
        model.reset_context()
        self.assertEqual(model.context, model.start_token)

    def test_symbol_out_of_range(self):
        with pytest.raises(ValueError):
            ar_update(Order1ContextModel(2), 4)
        with pytest.raises(ValueError):
            Order0Model(0)

    def test_patch_order_covers_each_pixel_once(self):
        for patch_size, width, height in [(16, 20, 10), (1, 3, 2), (4, 4, 4), (64, 7, 9), (3, 10, 11)]:
            indices, starts = PatchOrder(patch_size).traversal(width, height)
            self.assertEqual(sorted(indices.tolist()), list(range(width * height)))
            expected_patches = int(math.ceil(width / patch_size) * math.ceil(height / patch_size))
            self.assertEqual(int(starts.sum()), expected_patches)
            self.assertTrue(starts[0])

    def test_patch_order_raster_within_patch(self):
        indices, starts = PatchOrder(2).traversal(3, 2)
        self.assertEqual(indices.tolist(), [0, 1, 3, 4, 2, 5])
        self.assertEqual(starts.tolist(), [True, False, False, False, True, False])


class LatentModelTests(unittest.TestCase):
    """
    Tests for bpsc.model.latent.
    """

    def _fitted(self, symbols, bits, block_size=8):
        grid = SymbolGrid(symbols, bits)
        return BlockMeanLatentModel(bits, block_size=block_size).fit(grid), grid

    def test_tables_sum_to_precision(self):
        rng = np.random.default_rng(42)
        model, grid = self._fitted(rng.integers(0, 32, size=(20, 13)), 5)
        tables = lvm_tables(model, grid)
        self.assertEqual(len(tables.inference), 3 * 2)
        self.assertEqual(len(tables.likelihood), 32)
        for table in tables.inference:
            self.assertEqual(table.total, 1 << INFERENCE_PRECISION)
        for table in tables.likelihood + [tables.prior]:
            self.assertEqual(table.total, 1 << 16)
        for table in tables.inference + tables.likelihood + [tables.prior]:
            self.assertEqual(table.size, 32)

    def test_inference_peaks_at_block_mean(self):
        model, grid = self._fitted(np.full((8, 8), 9, dtype=np.uint8), 4)
        table = lvm_tables(model, grid).inference[0]
        freqs = table.frequencies
        self.assertEqual(int(np.argmax(freqs)), 9)

    def test_block_center_rounds_half_up(self):
        self.assertEqual(BlockMeanLatentModel.block_center(np.array([1, 2])), 2)
        self.assertEqual(BlockMeanLatentModel.block_center(np.array([1, 1, 2])), 1)
        self.assertEqual(BlockMeanLatentModel.block_center(np.array([0, 0, 1, 2])), 1)

    def test_constant_grid_clamps_scales(self):
        model, _ = self._fitted(np.full((16, 16), 3, dtype=np.uint8), 3)
        self.assertEqual(model.sigma_x, MIN_SCALE)
        self.assertEqual(model.prior_std, MIN_SCALE)
        self.assertEqual(model.prior_mean, 3.0)
        self.assertEqual(model.sigma_q, min(INFERENCE_SCALES))

    def test_noisy_grid_fits_wider_scale(self):
        rng = np.random.default_rng(43)
        model, _ = self._fitted(rng.integers(0, 64, size=(32, 32)), 6)
        self.assertGreater(model.sigma_x, 4.0)

    def test_preamble(self):
        rng = np.random.default_rng(44)
        model, _ = self._fitted(rng.integers(0, 8, size=(16, 24)), 3)
        decoder = BlockMeanLatentModel(3, sigma_x_fixed=model.sigma_x_fixed)
        self.assertEqual(decoder.read_preamble(model.preamble() + b'tail'), PREAMBLE_BYTES)
        self.assertEqual(decoder.prior_table(), model.prior_table())
        block = np.array([1, 2, 2, 5])
        self.assertEqual(decoder.inference_table(block), model.inference_table(block))
        self.assertEqual(decoder.likelihood_table(2), model.likelihood_table(2))
        with pytest.raises(TruncatedStreamError):
            decoder.read_preamble(b'\x00\x01')
        with pytest.raises(CoderError):
            decoder.read_preamble(b'\x00\x01\x00\x02\x00\x00')

    def test_fit_maximises_elbo_over_inference_widths(self):
        rng = np.random.default_rng(47)
        values = np.clip(np.round(rng.laplace(6.0, 2.0, size=(32, 32))), 0, 15)
        model, grid = self._fitted(values.astype(np.uint8), 4)
        self.assertIn(model.sigma_q, INFERENCE_SCALES)
        fitted = elbo_estimate(model, grid)
        for scale in INFERENCE_SCALES:
            model.sigma_q_fixed = to_fixed(scale)
            self.assertLessEqual(elbo_estimate(model, grid), fitted + 1e-6 * abs(fitted))

    def test_fixed_point(self):
        self.assertEqual(to_fixed(0.5), 128)
        self.assertEqual(from_fixed(to_fixed(2.25)), 2.25)
        self.assertEqual(to_fixed(1000.0), 0xFFFF)

    def test_elbo_matches_brute_force(self):
        rng = np.random.default_rng(45)
        symbols = rng.integers(0, 4, size=(4, 4))
        model, grid = self._fitted(symbols, 2)
        tables = lvm_tables(model, grid)
        q = tables.inference[0].probabilities()
        prior = tables.prior.probabilities()
        expected = 0.0
        for z in range(4):
            likelihood = tables.likelihood[z].probabilities()
            log_joint = math.log(prior[z], 2) + sum(math.log(likelihood[x], 2)
                                                    for x in symbols.ravel())
            expected += q[z] * (log_joint - math.log(q[z], 2))
        self.assertAlmostEqual(elbo_estimate(model, grid), expected, places=6)

    def test_rate_is_non_negative(self):
        rng = np.random.default_rng(46)
        for bits in (1, 4, 7):
            model, grid = self._fitted(rng.integers(0, 1 << bits, size=(12, 17)), bits, 4)
            self.assertGreaterEqual(-elbo_estimate(model, grid), 0.0)

    def test_empty_grid(self):
        grid = SymbolGrid(np.zeros((4, 4)), 0)
        with pytest.raises(ValueError):
            lvm_tables(BlockMeanLatentModel(1), grid)


class RegistryTests(unittest.TestCase):
    """
    Tests for bpsc.model.
    """

    def test_known_models(self):
        self.assertIsInstance(create_ar_model(1, 3), Order1ContextModel)
        self.assertIsInstance(create_ar_model(2, 3), Order0Model)
        model = create_latent_model(1, 5, block_size=4)
        self.assertEqual(model.block_size, 4)
        self.assertEqual(sorted(AR_MODELS), [1, 2])
        self.assertEqual(sorted(LATENT_MODELS), [1])

    def test_unknown_models(self):
        with pytest.raises(UnknownModelError) as e:
            create_ar_model(9, 3)
        self.assertEqual(e.value.exit_code, 5)
        with pytest.raises(UnknownModelError):
            create_latent_model(0, 3)
