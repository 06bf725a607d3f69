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

"""Adaptive autoregressive models for the local (low-plane) path.

A model exposes the distribution of the next symbol given everything it has
been shown so far. Encoder and decoder feed it the same symbols in the same
order, so both see identical tables.
"""

import functools

import numpy as np

from bpsc.coder.frequency import ADAPTIVE_PRECISION, FrequencyTable

DEFAULT_PATCH_SIZE = 16
RESCALE_LIMIT = 1 << ADAPTIVE_PRECISION


def _halve(counts):
    np.maximum(counts >> 1, 1, out=counts)


class AutoregressiveModel(object):
    """Base class. Subclasses set ``model_id`` and implement next_distribution
    and update."""

    model_id = None

    def __init__(self, bits_per_symbol):
        if not 1 <= bits_per_symbol <= 8:
            raise ValueError('bits_per_symbol={} must be in [1, 8]'.format(bits_per_symbol))
        self.bits_per_symbol = bits_per_symbol
        self.alphabet_size = 1 << bits_per_symbol

    def reset_context(self):
        """Called at the first pixel of every patch."""
        pass

    def next_distribution(self, side_info=None):
        """:param side_info: reserved for backends conditioned on the global
                             modality; the adaptive models ignore it."""
        raise NotImplementedError()

    def update(self, symbol):
        raise NotImplementedError()

    def _check_symbol(self, symbol):
        if not 0 <= symbol < self.alphabet_size:
            raise ValueError('symbol={} must be in [0, {})'.format(symbol, self.alphabet_size))


class Order0Model(AutoregressiveModel):
    """Adaptive symbol frequencies with no context."""

    model_id = 2

    def __init__(self, bits_per_symbol):
        super(Order0Model, self).__init__(bits_per_symbol)
        self.counts = np.ones(self.alphabet_size, dtype=np.int64)
        self._total = self.alphabet_size

    def next_distribution(self, side_info=None):
        return FrequencyTable.from_counts(self.counts, ADAPTIVE_PRECISION)

    def update(self, symbol):
        self._check_symbol(symbol)
        self.counts[symbol] += 1
        self._total += 1
        if self._total > RESCALE_LIMIT:
            _halve(self.counts)
            self._total = int(self.counts.sum())


class Order1ContextModel(AutoregressiveModel):
    """Previous-symbol context counts blended additively with order-0 counts.

    Context ``alphabet_size`` is the start token used at each patch origin.
    Each context row and the order-0 row rescale independently.
    """

    model_id = 1

    def __init__(self, bits_per_symbol):
        super(Order1ContextModel, self).__init__(bits_per_symbol)
        size = self.alphabet_size
        self.order0 = np.ones(size, dtype=np.int64)
        self.context_counts = np.ones((size + 1, size), dtype=np.int64)
        self._order0_total = size
        self._context_totals = np.full(size + 1, size, dtype=np.int64)
        self.start_token = size
        self.context = self.start_token

    def reset_context(self):
        self.context = self.start_token

    def counts_for(self, context):
        return self.order0 + self.context_counts[context]

    def next_distribution(self, side_info=None):
        return FrequencyTable.from_counts(self.counts_for(self.context), ADAPTIVE_PRECISION)

    def update(self, symbol):
        self._check_symbol(symbol)
        row = self.context_counts[self.context]
        row[symbol] += 1
        self._context_totals[self.context] += 1
        if self._context_totals[self.context] > RESCALE_LIMIT:
            _halve(row)
            self._context_totals[self.context] = row.sum()

        self.order0[symbol] += 1
        self._order0_total += 1
        if self._order0_total > RESCALE_LIMIT:
            _halve(self.order0)
            self._order0_total = int(self.order0.sum())

        self.context = symbol


def ar_next_distribution(model, side_info=None):
    return model.next_distribution(side_info)


def ar_update(model, symbol):
    model.update(symbol)


class PatchOrder(object):
    """Patches in raster order, pixels raster-scanned inside each patch.
    Edge patches may be partial."""

    def __init__(self, patch_size=DEFAULT_PATCH_SIZE):
        if patch_size < 1:
            raise ValueError('patch_size={} must be >= 1'.format(patch_size))
        self.patch_size = patch_size

    def traversal(self, width, height):
        """:return: (flat raster indices in coding order, boolean mask marking
                    the first pixel of each patch)."""
        return _traversal(self.patch_size, width, height)

    def __eq__(self, other):
        return isinstance(other, PatchOrder) and self.patch_size == other.patch_size

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'PatchOrder(patch_size={})'.format(self.patch_size)


@functools.lru_cache(maxsize=16)
def _traversal(patch_size, width, height):
    order = []
    offset = 0
    starts = np.zeros(width * height, dtype=bool)
    for y0 in range(0, height, patch_size):
        for x0 in range(0, width, patch_size):
            rows = np.arange(y0, min(y0 + patch_size, height))
            cols = np.arange(x0, min(x0 + patch_size, width))
            starts[offset] = True
            offset += len(rows) * len(cols)
            order.append((rows[:, None] * width + cols[None, :]).ravel())
    indices = np.concatenate(order) if order else np.zeros(0, dtype=np.int64)
    indices.setflags(write=False)
    starts.setflags(write=False)
    return indices, starts
