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

import logging
import os

from bpsc.common.exceptions import ConfigError
from bpsc.run.util.config_parser import BPSC_LOG_LEVEL, LOG_LEVELS

TRACE = 5
_LEVELS = {
    'TRACE': TRACE,
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'FATAL': logging.CRITICAL,
}
DEFAULT_LOG_LEVEL = 'WARNING'


def resolve_level(level=None):
    """Flag value first, then BPSC_LOG_LEVEL, then WARNING."""
    level = (level or os.getenv(BPSC_LOG_LEVEL) or DEFAULT_LOG_LEVEL).upper()
    if level not in LOG_LEVELS:
        raise ConfigError('log level {} must be one of {}'.format(level, LOG_LEVELS))
    return level


def configure_logging(level=None, hide_timestamp=False):
    logging.addLevelName(TRACE, 'TRACE')
    level = resolve_level(level)
    fmt = '[%(levelname)s] %(name)s: %(message)s'
    if not hide_timestamp:
        fmt = '%(asctime)s ' + fmt
    root = logging.getLogger('bpsc')
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(fmt))
    root.addHandler(handler)
    root.setLevel(_LEVELS[level])
    return level
