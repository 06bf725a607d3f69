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

import os

from bpsc.common.decomposition import DEFAULT_BETA
from bpsc.common.exceptions import ConfigError
from bpsc.model import check_ar_model, check_latent_model
from bpsc.model.autoregressive import DEFAULT_PATCH_SIZE
from bpsc.model.latent import DEFAULT_BLOCK_SIZE

LOCAL_TAIL = 'local-tail'
SEEDED = 'seeded'
INITIAL_BITS_POLICIES = [LOCAL_TAIL, SEEDED]

SPLIT_INFORMATION = 'information'
SPLIT_RATE = 'rate'
SPLIT_MODES = [SPLIT_INFORMATION, SPLIT_RATE]

MAX_SEED = (1 << 64) - 1


def default_seed():
    value = os.getenv('BPSC_SEED', '0')
    try:
        return int(value)
    except ValueError:
        raise ConfigError('BPSC_SEED={} is not an integer'.format(value))


class EncodeConfig(object):

    def __init__(self, beta=DEFAULT_BETA, patch_size=DEFAULT_PATCH_SIZE, ar_model_id=1,
                 lvm_model_id=1, block_size=DEFAULT_BLOCK_SIZE, initial_bits=LOCAL_TAIL,
                 seed=None, split=SPLIT_INFORMATION):
        """
        :param beta: fraction of the image entropy the local planes must carry
        :type beta: float
        :param patch_size: side of the square patches the local path is coded in
        :type patch_size: int
        :param ar_model_id: registered autoregressive model for the local path
        :type ar_model_id: int
        :param lvm_model_id: registered latent variable model for the global path
        :type lvm_model_id: int
        :param block_size: side of the blocks summarised by one latent
        :type block_size: int
        :param initial_bits: where bits-back draws its initial bits from,
        'local-tail' or 'seeded'
        :type initial_bits: string
        :param seed: seed of the pseudo-random initial-bits source; defaults to
        BPSC_SEED from the environment, else 0
        :type seed: int
        :param split: 'information' picks s from beta; 'rate' tries every s the
        message fits and keeps the smallest container
        :type split: string
        """
        self.beta = beta
        self.patch_size = patch_size
        self.ar_model_id = ar_model_id
        self.lvm_model_id = lvm_model_id
        self.block_size = block_size
        self.initial_bits = initial_bits
        self.seed = default_seed() if seed is None else seed
        self.split = split

    def validate(self):
        if self.beta is None or not 0.0 <= self.beta <= 1.0:
            raise ConfigError('beta={} must be in [0, 1]'.format(self.beta))
        # the container stores both as u8
        if not 1 <= self.patch_size <= 255:
            raise ConfigError('patch_size={} must be in [1, 255]'.format(self.patch_size))
        if not 1 <= self.block_size <= 255:
            raise ConfigError('block_size={} must be in [1, 255]'.format(self.block_size))
        if self.initial_bits not in INITIAL_BITS_POLICIES:
            raise ConfigError('initial_bits={} must be one of {}'
                              .format(self.initial_bits, INITIAL_BITS_POLICIES))
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError('seed={} must be in [0, 2**64)'.format(self.seed))
        if self.split not in SPLIT_MODES:
            raise ConfigError('split={} must be one of {}'.format(self.split, SPLIT_MODES))
        check_ar_model(self.ar_model_id)
        check_latent_model(self.lvm_model_id)
        return self

    def __eq__(self, other):
        return isinstance(other, EncodeConfig) and self.__dict__ == other.__dict__

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'EncodeConfig({})'.format(
            ', '.join('{}={!r}'.format(k, v) for k, v in sorted(self.__dict__.items())))

    def __getstate__(self):
        return self.__dict__.copy()
