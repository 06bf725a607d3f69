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

"""Latent variable models for the global (high-plane) path.

The default model summarises each k x k block by a latent value near its mean
intensity. Three families of integer tables are needed by bits-back coding:
the inference distribution q(z|x), the prior p(z) and the likelihood p(x|z).
"""

import functools
import logging
import struct

import numpy as np
from scipy import stats

from bpsc.coder.frequency import MAX_PRECISION, STATIC_PRECISION, FrequencyTable
from bpsc.common.exceptions import CoderError, TruncatedStreamError
from bpsc.common.util import ceil_div

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 8
MIN_SCALE = 0.5
FIXED_POINT_ONE = 256
# sigma_x and prior std candidates, quarter-octave steps from 0.5 to 64
SCALE_CANDIDATES = tuple(2.0 ** (e / 4.0) for e in range(-4, 25))
# q(z|x) widths tried by fit(); unfitted models use the default
INFERENCE_SCALES = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
DEFAULT_INFERENCE_SCALE = 2.0
# q(z|x) is popped right after the prior push of the previous block, whose slot
# only fixes the low STATIC_PRECISION bits of the head; the bits above it pick z
INFERENCE_PRECISION = MAX_PRECISION
PREAMBLE_FORMAT = '<HHH'
PREAMBLE_BYTES = struct.calcsize(PREAMBLE_FORMAT)
TABLE_CACHE_SIZE = 512


def to_fixed(value):
    return int(min(max(round(value * FIXED_POINT_ONE), 0), 0xFFFF))


def from_fixed(value):
    return value / float(FIXED_POINT_ONE)


def _bin_masses(cdf, size):
    # unit-width bins centred on 0..size-1, tails folded into the edge bins
    edges = np.arange(1, size) - 0.5
    inner = cdf(edges)
    shape = inner.shape[:-1] + (1,)
    cumulative = np.concatenate([np.zeros(shape), inner, np.ones(shape)], axis=-1)
    return np.clip(np.diff(cumulative, axis=-1), 0.0, None)


@functools.lru_cache(maxsize=TABLE_CACHE_SIZE)
def gaussian_tables(size, scale, precision=STATIC_PRECISION):
    """Discretized Gaussians of the given scale, one table per integer centre."""
    centres = np.arange(size, dtype=np.float64)[:, None]
    masses = _bin_masses(lambda x: stats.norm.cdf(x, loc=centres, scale=scale), size)
    return tuple(FrequencyTable.from_probabilities(row, precision) for row in masses)


@functools.lru_cache(maxsize=TABLE_CACHE_SIZE)
def laplace_tables(size, scale):
    """Discretized Laplace densities of the given scale, one table per integer centre."""
    centres = np.arange(size, dtype=np.float64)[:, None]
    masses = _bin_masses(lambda x: stats.laplace.cdf(x, loc=centres, scale=scale), size)
    return tuple(FrequencyTable.from_probabilities(row, STATIC_PRECISION) for row in masses)


@functools.lru_cache(maxsize=TABLE_CACHE_SIZE)
def gaussian_table(size, loc, scale):
    masses = _bin_masses(lambda x: stats.norm.cdf(x, loc=loc, scale=scale), size)
    return FrequencyTable.from_probabilities(masses, STATIC_PRECISION)


def _log2_matrix(tables):
    return np.log2(np.stack([t.probabilities() for t in tables]))


class LatentTables(object):
    """Tables for one grid: an inference table per block, the prior, and a
    likelihood table per latent value."""

    def __init__(self, inference, prior, likelihood):
        self.inference = inference
        self.prior = prior
        self.likelihood = likelihood


class LatentVariableModel(object):
    model_id = None

    def __init__(self, bits_per_symbol):
        if not 1 <= bits_per_symbol <= 7:
            raise ValueError('bits_per_symbol={} must be in [1, 7]'.format(bits_per_symbol))
        self.bits_per_symbol = bits_per_symbol
        self.alphabet_size = 1 << bits_per_symbol

    @property
    def latent_size(self):
        raise NotImplementedError()

    def fit(self, grid):
        """Sets per-image parameters from the grid the encoder is about to code."""
        raise NotImplementedError()

    def blocks(self, width, height):
        raise NotImplementedError()

    def inference_table(self, block_values):
        raise NotImplementedError()

    def prior_table(self):
        raise NotImplementedError()

    def likelihood_table(self, z):
        raise NotImplementedError()

    def preamble(self):
        """Per-image parameters carried at the start of the global stream."""
        return b''

    def read_preamble(self, data):
        """Restores parameters written by preamble(); returns bytes consumed."""
        return 0


class BlockMeanLatentModel(LatentVariableModel):
    """One latent per block, drawn around the block's rounded mean.

    fit() picks the q(z|x) width, the prior and sigma_x that maximise the
    exact ELBO of the grid over fixed candidate sets.

    :param bits_per_symbol: bits per global symbol; latents share the alphabet.
    :param block_size: block side length k.
    :param sigma_x_fixed: likelihood scale as u16 fixed point (x256); set by
                          fit() on the encoder, read from the header on the decoder.
    """

    model_id = 1

    def __init__(self, bits_per_symbol, block_size=DEFAULT_BLOCK_SIZE, sigma_x_fixed=None):
        super(BlockMeanLatentModel, self).__init__(bits_per_symbol)
        if block_size < 1:
            raise ValueError('block_size={} must be >= 1'.format(block_size))
        self.block_size = block_size
        self.sigma_x_fixed = sigma_x_fixed
        self.sigma_q_fixed = to_fixed(DEFAULT_INFERENCE_SCALE)
        self.prior_mean_fixed = None
        self.prior_std_fixed = None

    @property
    def latent_size(self):
        return self.alphabet_size

    @property
    def sigma_x(self):
        return max(from_fixed(self.sigma_x_fixed), MIN_SCALE)

    @property
    def sigma_q(self):
        return from_fixed(self.sigma_q_fixed)

    @property
    def prior_mean(self):
        return from_fixed(self.prior_mean_fixed)

    @property
    def prior_std(self):
        return max(from_fixed(self.prior_std_fixed), MIN_SCALE)

    def blocks(self, width, height):
        k = self.block_size
        return [(y0, min(y0 + k, height), x0, min(x0 + k, width))
                for y0 in range(0, height, k) for x0 in range(0, width, k)]

    def grid_dims(self, width, height):
        return ceil_div(width, self.block_size), ceil_div(height, self.block_size)

    @staticmethod
    def block_center(values):
        """Block mean rounded half-up, in integer arithmetic."""
        n = len(values)
        return int((2 * int(np.sum(values, dtype=np.int64)) + n) // (2 * n))

    def _block_values(self, symbols):
        return [symbols[y0:y1, x0:x1].ravel()
                for y0, y1, x0, x1 in self.blocks(symbols.shape[1], symbols.shape[0])]

    def fit(self, grid):
        size = self.alphabet_size
        values = self._block_values(grid.symbols)
        centers = np.array([self.block_center(v) for v in values])
        histograms = np.stack([np.bincount(v, minlength=size) for v in values])
        self.prior_mean_fixed = to_fixed(np.mean([v.mean() for v in values]))

        scales = sorted(set(to_fixed(s) for s in SCALE_CANDIDATES))
        log_likelihoods = [_log2_matrix(laplace_tables(size, max(from_fixed(f), MIN_SCALE)))
                           for f in scales]
        log_priors = [np.log2(gaussian_table(size, self.prior_mean,
                                             max(from_fixed(f), MIN_SCALE)).probabilities())
                      for f in scales]

        fits = []
        for sigma_q in INFERENCE_SCALES:
            sigma_q_fixed = to_fixed(sigma_q)
            log_q = _log2_matrix(gaussian_tables(size, from_fixed(sigma_q_fixed),
                                                 INFERENCE_PRECISION))[centers]
            q = np.exp2(log_q)
            # expected pixel counts per latent, and expected latent counts
            pairs = q.T.dot(histograms)
            occupancy = q.sum(axis=0)
            reconstruction = [float(np.sum(pairs * m)) for m in log_likelihoods]
            prior = [float(occupancy.dot(v)) for v in log_priors]
            i, j = int(np.argmax(reconstruction)), int(np.argmax(prior))
            elbo = reconstruction[i] + prior[j] - float(np.sum(q * log_q))
            fits.append((elbo, sigma_q_fixed, scales[i], scales[j]))

        # max() keeps the first of equal candidates
        best_elbo, self.sigma_q_fixed, self.sigma_x_fixed, self.prior_std_fixed = \
            max(fits, key=lambda fit: fit[0])
        logger.debug('Fitted latent model: sigma_q=%.3f sigma_x=%.3f prior=(%.3f, %.3f), '
                     'ELBO %.1f bits over %d blocks', self.sigma_q, self.sigma_x,
                     self.prior_mean, self.prior_std, best_elbo, len(values))
        return self

    def inference_table(self, block_values):
        tables = gaussian_tables(self.latent_size, self.sigma_q, INFERENCE_PRECISION)
        return tables[self.block_center(block_values)]

    def prior_table(self):
        return gaussian_table(self.latent_size, self.prior_mean, self.prior_std)

    def likelihood_table(self, z):
        return laplace_tables(self.alphabet_size, self.sigma_x)[z]

    def preamble(self):
        return struct.pack(PREAMBLE_FORMAT, self.prior_mean_fixed, self.prior_std_fixed,
                           self.sigma_q_fixed)

    def read_preamble(self, data):
        if len(data) < PREAMBLE_BYTES:
            raise TruncatedStreamError('Global stream too short for the latent model preamble.')
        self.prior_mean_fixed, self.prior_std_fixed, self.sigma_q_fixed = \
            struct.unpack(PREAMBLE_FORMAT, data[:PREAMBLE_BYTES])
        if not self.sigma_q_fixed:
            raise CoderError('Latent model preamble carries a zero inference width.')
        return PREAMBLE_BYTES


def lvm_tables(model, global_grid):
    """:return: LatentTables for a fitted model and a non-empty global grid."""
    if global_grid.empty:
        raise ValueError('The global modality is empty; there is nothing to model.')
    values = model._block_values(global_grid.symbols)
    return LatentTables(inference=[model.inference_table(v) for v in values],
                        prior=model.prior_table(),
                        likelihood=[model.likelihood_table(z) for z in range(model.latent_size)])


def elbo_estimate(model, global_grid):
    """Exact expectation over the discrete q of the evidence lower bound, in bits.

    The expected net rate of bits-back coding the grid is its negation.
    """
    tables = lvm_tables(model, global_grid)
    values = model._block_values(global_grid.symbols)
    size = model.alphabet_size
    histograms = np.stack([np.bincount(v, minlength=size) for v in values])
    log_q = _log2_matrix(tables.inference)
    log_prior = np.log2(tables.prior.probabilities())
    log_lik = _log2_matrix(tables.likelihood)
    # [block, z]: sum over the block's pixels of log2 p(x|z)
    reconstruction = histograms.dot(log_lik.T)
    q = np.exp2(log_q)
    per_block = np.sum(q * (reconstruction + log_prior[None, :] - log_q), axis=1)
    return float(np.sum(per_block))
