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

from bpsc.common.bitplane import Image, recompose, slice_planes
from bpsc.common.stego import Message, embed, plan_segments
from bpsc.metrics import QualityReport, bpp, change_ratio, psnr, psnr_from_changes, ssim

from common import constant_image, random_image, random_message_bits, smooth_image


class MetricsTests(unittest.TestCase):
    """
    Tests for bpsc.metrics.
    """

    def test_bpp(self):
        self.assertEqual(bpp(100, 1000, 1), 0.8)
        with pytest.raises(ValueError):
            bpp(1, 0, 4)

    def test_psnr(self):
        rng = np.random.default_rng(80)
        image = random_image(rng, 16, 16, 0, 255)
        self.assertTrue(math.isinf(psnr(image, image)))
        brighter = Image(image.samples.astype(np.int64) + 1)
        self.assertAlmostEqual(psnr(image, brighter), 48.13, places=2)

    def test_psnr_from_changes(self):
        self.assertAlmostEqual(psnr_from_changes(np.ones(292), 82928), 72.66, places=2)
        self.assertTrue(math.isinf(psnr_from_changes([], 100)))

        rng = np.random.default_rng(81)
        image = random_image(rng, 32, 32, 4, 250)
        deltas = np.zeros(image.num_pixels, dtype=np.int64)
        changed = rng.choice(image.num_pixels, size=40, replace=False)
        deltas[changed] = rng.choice([-4, -1, 1, 2], size=40)
        stego = Image(image.samples.astype(np.int64) + deltas.reshape(32, 32))
        self.assertAlmostEqual(psnr(image, stego),
                               psnr_from_changes(deltas[changed], image.num_pixels))

    def test_ssim(self):
        rng = np.random.default_rng(82)
        a = smooth_image(rng, 40, 30)
        b = random_image(rng, 40, 30)
        self.assertEqual(ssim(a, a), 1.0)
        self.assertAlmostEqual(ssim(a, b), ssim(b, a))
        self.assertLess(ssim(a, b), 0.5)
        with pytest.raises(ValueError):
            ssim(constant_image(10, 20), constant_image(10, 20))
        with pytest.raises(ValueError):
            ssim(constant_image(20, 20), constant_image(20, 21))

    def test_lsb_embedding_is_invisible(self):
        rng = np.random.default_rng(83)
        image = smooth_image(rng, 288, 288)
        stack = slice_planes(image)
        # about 0.35% of pixels change when half the embedded bits differ
        length = int(round(2 * 0.0035 * image.num_pixels))
        message = Message(random_message_bits(rng, length))
        stego, _ = embed([stack.plane(1)], message, plan_segments(message.length, 1,
                                                                  image.num_pixels))
        stego_image = recompose(stack.with_planes(stego.planes))
        changed, ratio = change_ratio(image, stego_image)
        self.assertLessEqual(changed, length)
        self.assertLess(ratio, 0.005)
        self.assertGreater(ssim(image, stego_image), 0.999)

        errors = stego_image.samples.astype(np.float64) - image.samples.astype(np.float64)
        closed_form = 10.0 * math.log10(255.0 ** 2 * image.num_pixels / np.sum(errors ** 2))
        self.assertAlmostEqual(psnr(image, stego_image), closed_form, delta=1e-9)
        self.assertGreater(psnr(image, stego_image), 60.0)

    def test_quality_report(self):
        rng = np.random.default_rng(84)
        image = random_image(rng, 8, 8)
        report = QualityReport.measure(image, image, 40)
        self.assertEqual(report.bpp, 5.0)
        self.assertIsNone(report.ssim)
        self.assertEqual(report.changed_pixels, 0)
        self.assertEqual(report.change_ratio, 0.0)
        big = random_image(rng, 12, 12)
        self.assertEqual(QualityReport.measure(big, big, 1).ssim, 1.0)
