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
import textwrap

from setuptools import setup, find_packages

from bpsc import __version__

require_list = ['numpy>=1.17', 'scipy', 'psutil', 'pyyaml']
test_require_list = ['mock', 'pytest', 'pytest-forked', 'six']


def get_package_version():
    return __version__ + "+" + os.environ['BPSC_LOCAL_VERSION'] if 'BPSC_LOCAL_VERSION' in os.environ else __version__


setup(name='bpsc',
      version=get_package_version(),
      packages=find_packages(exclude=['test', 'test.*', 'examples', 'examples.*']),
      description='Lossless grayscale image codec with a bit-plane steganographic message channel.',
      author='The BPSC Authors',
      long_description=textwrap.dedent('''\
          bpsc splits an image into low and high bit planes, hides a message in the low planes,
          and codes the low planes with an adaptive autoregressive model and the high planes
          with bits-back coding under a latent variable model. Image and message are both
          recovered exactly.'''),
      classifiers=[
          'License :: OSI Approved :: Apache Software License'
      ],
      install_requires=require_list,
      tests_require=test_require_list,
      extras_require={
          'test': test_require_list,
      },
      zip_safe=False,
      scripts=['bin/bpsc'])
