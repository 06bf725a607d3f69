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

"""Empirical information measures and adaptive slicing-index selection.

All probabilities are estimated from full-image histograms.
"""

import logging

import numpy as np

from bpsc.common.bitplane import NUM_PLANES, pack_range, slice_planes
from bpsc.common.exceptions import ConfigError

DEFAULT_BETA = 0.8

logger = logging.getLogger(__name__)


class SplitDecision(object):
    def __init__(self, slicing_index, beta, per_plane_info, total_entropy):
        """
        :param slicing_index: number of planes assigned to the local modality
        :type slicing_index: int
        :param beta: information retention fraction the index was selected for
        :type beta: float
        :param per_plane_info: I(x^i; x) for planes 1..8, bits/pixel
        :type per_plane_info: tuple(float)
        :param total_entropy: H(x), bits/pixel
        :type total_entropy: float
        """
        self.slicing_index = slicing_index
        self.beta = beta
        self.per_plane_info = tuple(per_plane_info)
        self.total_entropy = total_entropy

    @property
    def s(self):
        return self.slicing_index

    def cumulative_info(self):
        return tuple(np.cumsum(self.per_plane_info).tolist())

    def __eq__(self, other):
        return isinstance(other, SplitDecision) and self.__dict__ == other.__dict__

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'SplitDecision(s={}, beta={}, total_entropy={:.6f})'.format(
            self.slicing_index, self.beta, self.total_entropy)


def _entropy(counts):
    counts = counts[counts > 0]
    p = counts / float(counts.sum())
    return float(-np.sum(p * np.log2(p)))


def pixel_entropy(image):
    counts = np.bincount(image.samples.reshape(-1), minlength=256)
    return _entropy(counts)


def plane_entropy(plane):
    """Binary entropy of a plane's empirical bit distribution."""
    ones = int(plane.bits.sum())
    return _entropy(np.array([plane.bits.size - ones, ones]))


def plane_mutual_information(plane, image):
    """I(x^i; x) from the joint histogram of (plane bit, pixel value)."""
    if plane.bits.shape != image.samples.shape:
        raise ValueError('Plane shape {} does not match image shape {}.'
                         .format(plane.bits.shape, image.samples.shape))
    joint_index = plane.bits.reshape(-1).astype(np.int64) * 256 + image.samples.reshape(-1)
    joint = np.bincount(joint_index, minlength=512).reshape(2, 256).astype(np.float64)
    joint /= joint.sum()
    p_bit = joint.sum(axis=1)
    p_pixel = joint.sum(axis=0)
    nz = joint > 0
    outer = np.outer(p_bit, p_pixel)
    return float(np.sum(joint[nz] * np.log2(joint[nz] / outer[nz])))


def _check_beta(beta):
    if beta is None or not 0.0 <= beta <= 1.0:
        raise ConfigError('beta={} must be in [0, 1]'.format(beta))


def select_slicing_index(image, beta=DEFAULT_BETA):
    """Smallest s whose cumulative plane information, accumulated from the
    least significant plane upward, reaches beta * H(x)."""
    _check_beta(beta)
    stack = slice_planes(image)
    per_plane = [plane_mutual_information(p, image) for p in stack.planes]
    total = pixel_entropy(image)
    target = beta * total

    slicing_index = NUM_PLANES
    cumulative = 0.0
    for i, info in enumerate(per_plane, 1):
        cumulative += info
        if cumulative >= target:
            slicing_index = i
            break

    decision = SplitDecision(slicing_index, beta, per_plane, total)
    logger.debug('Selected %r.', decision)
    return decision


def decompose(image, beta=DEFAULT_BETA):
    """Splits the image into local planes 1..s and global planes s+1..8."""
    decision = select_slicing_index(image, beta)
    stack = slice_planes(image)
    s = decision.slicing_index
    return pack_range(stack, 1, s), pack_range(stack, s + 1, NUM_PLANES), decision
