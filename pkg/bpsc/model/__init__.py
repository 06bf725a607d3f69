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

"""Registry of probability models, keyed by the model_id stored in containers.

Autoregressive: 1 Order1ContextModel (default), 2 Order0Model.
Latent: 1 BlockMeanLatentModel (default).
"""

from bpsc.common.exceptions import UnknownModelError
from bpsc.model.autoregressive import (AutoregressiveModel, Order0Model, Order1ContextModel,
                                       PatchOrder, ar_next_distribution, ar_update)
from bpsc.model.latent import (BlockMeanLatentModel, LatentVariableModel, elbo_estimate,
                               lvm_tables)

AR_MODELS = {cls.model_id: cls for cls in (Order1ContextModel, Order0Model)}
LATENT_MODELS = {cls.model_id: cls for cls in (BlockMeanLatentModel,)}


def check_ar_model(model_id):
    if model_id not in AR_MODELS:
        raise UnknownModelError('autoregressive', model_id)


def check_latent_model(model_id):
    if model_id not in LATENT_MODELS:
        raise UnknownModelError('latent', model_id)


def create_ar_model(model_id, bits_per_symbol):
    check_ar_model(model_id)
    return AR_MODELS[model_id](bits_per_symbol)


def create_latent_model(model_id, bits_per_symbol, **kwargs):
    check_latent_model(model_id)
    return LATENT_MODELS[model_id](bits_per_symbol, **kwargs)
