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

"""Rate and stego-invisibility measures."""

import math

import numpy as np
from scipy import ndimage

DYNAMIC_RANGE = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

PSNR_IDENTICAL = float('inf')


def _check_dims(a, b):
    if a.samples.shape != b.samples.shape:
        raise ValueError('Images differ in size: {}x{} vs {}x{}.'
                         .format(a.width, a.height, b.width, b.height))


def bpp(num_bytes, width, height):
    if width < 1 or height < 1:
        raise ValueError('width={}, height={} must be >= 1'.format(width, height))
    return 8.0 * num_bytes / (width * height)


def _psnr_from_mse(mse):
    if mse == 0:
        return PSNR_IDENTICAL
    return 10.0 * math.log10(DYNAMIC_RANGE ** 2 / mse)


def psnr(a, b):
    """Peak signal-to-noise ratio in dB; infinity for identical images."""
    _check_dims(a, b)
    diff = a.samples.astype(np.int64) - b.samples.astype(np.int64)
    return _psnr_from_mse(float(np.sum(diff * diff)) / diff.size)


def psnr_from_changes(deltas, num_pixels):
    """PSNR from a ledger of per-pixel intensity changes, unchanged pixels omitted."""
    deltas = np.asarray(deltas, dtype=np.int64)
    return _psnr_from_mse(float(np.sum(deltas * deltas)) / num_pixels)


def _gaussian_window():
    offsets = np.arange(SSIM_WINDOW) - SSIM_WINDOW // 2
    g = np.exp(-(offsets ** 2) / (2.0 * SSIM_SIGMA ** 2))
    window = np.outer(g, g)
    return window / window.sum()


def ssim(a, b):
    """Mean structural similarity over the valid region of an 11x11 Gaussian window."""
    _check_dims(a, b)
    if a.width < SSIM_WINDOW or a.height < SSIM_WINDOW:
        raise ValueError('SSIM needs images of at least {0}x{0}, got {1}x{2}.'
                         .format(SSIM_WINDOW, a.width, a.height))
    if a == b:
        return 1.0
    x = a.samples.astype(np.float64)
    y = b.samples.astype(np.float64)
    window = _gaussian_window()
    half = SSIM_WINDOW // 2
    valid = (slice(half, x.shape[0] - half), slice(half, x.shape[1] - half))

    def filtered(z):
        return ndimage.correlate(z, window, mode='constant')[valid]

    mu_x, mu_y = filtered(x), filtered(y)
    sigma_xx = filtered(x * x) - mu_x * mu_x
    sigma_yy = filtered(y * y) - mu_y * mu_y
    sigma_xy = filtered(x * y) - mu_x * mu_y
    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    ssim_map = ((2 * mu_x * mu_y + c1) * (2 * sigma_xy + c2) /
                ((mu_x * mu_x + mu_y * mu_y + c1) * (sigma_xx + sigma_yy + c2)))
    return float(ssim_map.mean())


def change_ratio(a, b):
    """:return: (changed pixel count, changed fraction)."""
    _check_dims(a, b)
    changed = int(np.count_nonzero(a.samples != b.samples))
    return changed, changed / float(a.num_pixels)


class QualityReport(object):
    def __init__(self, bpp, psnr, ssim, changed_pixels, change_ratio):
        self.bpp = bpp
        self.psnr = psnr
        self.ssim = ssim
        self.changed_pixels = changed_pixels
        self.change_ratio = change_ratio

    @classmethod
    def measure(cls, original, stego, num_bytes):
        """ssim is None for images smaller than the SSIM window."""
        changed, ratio = change_ratio(original, stego)
        quality = None
        if original.width >= SSIM_WINDOW and original.height >= SSIM_WINDOW:
            quality = ssim(original, stego)
        return cls(bpp(num_bytes, original.width, original.height), psnr(original, stego),
                   quality, changed, ratio)

    def __repr__(self):
        return 'QualityReport(bpp={:.4f}, psnr={}, ssim={}, changed={})'.format(
            self.bpp, self.psnr, self.ssim, self.changed_pixels)
