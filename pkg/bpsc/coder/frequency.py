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

"""Integer frequency tables shared by both entropy coders."""

import bisect
import math

import numpy as np

from bpsc.common.exceptions import ZeroFrequencyError
from bpsc.common.util import is_power_of_two

# the range coder accepts up to RANGE_PRECISION, the stack coder up to MAX_PRECISION
MAX_PRECISION = 28
RANGE_PRECISION = 16
ADAPTIVE_PRECISION = 12
STATIC_PRECISION = 16


class FrequencyTable(object):
    """Per-symbol integer frequencies summing to exactly 2**precision."""

    def __init__(self, frequencies):
        freqs = np.asarray(frequencies, dtype=np.int64).reshape(-1)
        if freqs.size == 0:
            raise ValueError('A frequency table needs at least one symbol.')
        if freqs.min() < 1:
            raise ZeroFrequencyError('Symbol {} has zero frequency.'.format(int(np.argmin(freqs))))
        total = int(freqs.sum())
        if not is_power_of_two(total):
            raise ValueError('Table total {} is not a power of two.'.format(total))
        precision = total.bit_length() - 1
        if precision > MAX_PRECISION:
            raise ValueError('Table precision {} exceeds {} bits.'.format(precision, MAX_PRECISION))
        self.frequencies = freqs
        self.total = total
        self.precision = precision
        self._freq = freqs.tolist()
        self._cum = [0] + np.cumsum(freqs).tolist()

    @property
    def size(self):
        return len(self._freq)

    def interval(self, symbol):
        """Returns (start, freq) of the symbol's slot in [0, total)."""
        if not 0 <= symbol < len(self._freq):
            raise ZeroFrequencyError('Symbol {} lies outside the {}-symbol table.'
                                     .format(symbol, len(self._freq)))
        return self._cum[symbol], self._freq[symbol]

    def find(self, target):
        """Returns the symbol whose slot contains target."""
        return bisect.bisect_right(self._cum, target) - 1

    def code_length(self, symbol):
        return self.precision - math.log2(self._freq[symbol])

    def probabilities(self):
        return self.frequencies / float(self.total)

    def __eq__(self, other):
        return isinstance(other, FrequencyTable) and np.array_equal(self.frequencies, other.frequencies)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'FrequencyTable(size={}, precision={})'.format(self.size, self.precision)

    @classmethod
    def uniform(cls, size, precision=ADAPTIVE_PRECISION):
        return cls(quantize_counts(np.ones(size, dtype=np.int64), precision))

    @classmethod
    def from_counts(cls, counts, precision=ADAPTIVE_PRECISION):
        return cls(quantize_counts(counts, precision))

    @classmethod
    def from_probabilities(cls, probabilities, precision=STATIC_PRECISION):
        return cls(quantize_probabilities(probabilities, precision))


def _largest_remainder(base, fractions, remainder):
    # ties go to the lower symbol index
    if remainder > 0:
        order = np.argsort(-fractions, kind='stable')
        base[order[:remainder]] += 1
    return base


def _check_size(size, precision):
    if not 0 < precision <= MAX_PRECISION:
        raise ValueError('precision={} must be in [1, {}]'.format(precision, MAX_PRECISION))
    if size > (1 << precision):
        raise ValueError('{} symbols do not fit a table of total {}.'.format(size, 1 << precision))


def quantize_counts(counts, precision):
    """Integer-only largest-remainder rounding of counts to total 2**precision,
    every symbol keeping a frequency of at least 1."""
    counts = np.asarray(counts, dtype=np.int64).reshape(-1)
    _check_size(counts.size, precision)
    total = 1 << precision
    count_sum = int(counts.sum())
    if counts.min() >= 1 and count_sum == total:
        return counts.copy()
    if counts.min() < 0 or count_sum <= 0:
        raise ValueError('Counts must be non-negative with a positive sum.')
    spare = total - counts.size
    scaled = counts * spare
    base = scaled // count_sum
    remainder = spare - int(base.sum())
    base = _largest_remainder(base, scaled % count_sum, remainder)
    return base + 1


def quantize_probabilities(probabilities, precision):
    """Largest-remainder rounding of a probability vector to total 2**precision
    with a floor of 1 per symbol."""
    p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
    _check_size(p.size, precision)
    if not np.all(np.isfinite(p)) or p.min() < 0 or p.sum() <= 0:
        raise ValueError('Probabilities must be finite, non-negative and not all zero.')
    total = 1 << precision
    spare = total - p.size
    share = p / p.sum() * spare
    base = np.floor(share).astype(np.int64)
    remainder = min(max(spare - int(base.sum()), 0), p.size)
    base = _largest_remainder(base, share - base, remainder)
    # float rounding may leave the sum one or two units off
    base[int(np.argmax(base))] += spare - int(base.sum())
    return base + 1
