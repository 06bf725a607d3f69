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

import contextlib
import os
import shutil
import sys
import tempfile

import numpy as np

from bpsc.common.bitplane import Image
from bpsc.container.pgm import write_pgm_file


@contextlib.contextmanager
def env(**kwargs):
    # ignore args with None values
    for k in list(kwargs.keys()):
        if kwargs[k] is None:
            del kwargs[k]

    backup = {k: os.environ.get(k) for k in kwargs}
    os.environ.update(kwargs)
    try:
        yield
    finally:
        for k, v in backup.items():
            if v is not None:
                os.environ[k] = v
            else:
                del os.environ[k]


@contextlib.contextmanager
def tempdir():
    dirpath = tempfile.mkdtemp()
    try:
        yield dirpath
    finally:
        shutil.rmtree(dirpath)


@contextlib.contextmanager
def temppath():
    path = tempfile.mktemp()
    try:
        yield path
    finally:
        if os.path.exists(path):
            if os.path.isfile(path):
                os.remove(path)
            else:
                shutil.rmtree(path)


@contextlib.contextmanager
def override_args(tool=None, *args):
    old = sys.argv[:]
    try:
        if tool:
            sys.argv[0] = tool
        sys.argv[1:] = args
        yield
    finally:
        sys.argv = old


def random_image(rng, width, height, low=0, high=256):
    return Image(rng.integers(low, high, size=(height, width), dtype=np.int64))


def constant_image(width, height, value=128):
    return Image(np.full((height, width), value, dtype=np.uint8))


def checkerboard_image(width, height, low=0, high=255):
    yy, xx = np.indices((height, width))
    return Image(np.where((yy + xx) % 2 == 0, low, high).astype(np.uint8))


def gradient_image(width, height):
    yy, xx = np.indices((height, width))
    return Image(((xx + yy) * 255 // max(width + height - 2, 1)).astype(np.uint8))


def smooth_image(rng, width, height, noise=3):
    """Gradient plus small noise; most information sits in the low planes."""
    base = gradient_image(width, height).samples.astype(np.int64)
    noisy = base + rng.integers(-noise, noise + 1, size=base.shape)
    return Image(np.clip(noisy, 0, 255))


def adversarial_images(width, height):
    return [constant_image(width, height, 0), constant_image(width, height, 255),
            checkerboard_image(width, height), gradient_image(width, height)]


def random_message_bits(rng, count):
    return rng.integers(0, 2, size=count, dtype=np.uint8)


def write_corpus(dirpath, images):
    """Writes images as img_00.pgm, img_01.pgm, ..."""
    names = []
    for i, image in enumerate(images):
        name = 'img_{:02d}.pgm'.format(i)
        write_pgm_file(os.path.join(dirpath, name), image)
        names.append(name)
    return names


# bit l of every pixel is set with probability p[l - 1], independently
KNOWN_ENTROPY_PLANES = {
    'uniform': (0.5,) * 8,
    'decaying': (0.5, 0.5, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05),
    'sparse_high': (0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.2, 0.05),
}


def bitplane_image(rng, width, height, probabilities):
    """I.i.d. pixels with independent bits; see bitplane_entropy."""
    p = np.asarray(probabilities, dtype=np.float64)[:, None, None]
    bits = rng.random((len(probabilities), height, width)) < p
    weights = (1 << np.arange(len(probabilities)))[:, None, None]
    return Image(np.sum(bits * weights, axis=0))


def bitplane_entropy(probabilities):
    """Pixel entropy of bitplane_image: the sum of the per-bit binary entropies."""
    p = np.asarray(probabilities, dtype=np.float64)
    p = p[(p > 0) & (p < 1)]
    return float(-np.sum(p * np.log2(p) + (1 - p) * np.log2(1 - p)))
