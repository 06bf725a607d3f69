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

"""Corpus benchmark: compress every P5 file, verify the round trip, report a CSV."""

from __future__ import print_function

import csv
import hashlib
import logging
import os
import sys
import time

import numpy as np
import psutil

from bpsc.codec import compress, decompress
from bpsc.common.exceptions import EXIT_IO, EXIT_OK, EXIT_ROUND_TRIP, BPSCError, RoundTripError
from bpsc.common.stego import Message
from bpsc.container import read_pgm_file
from bpsc.metrics import QualityReport, bpp
from bpsc.run.util import workers
from bpsc.run.util.log import configure_logging

logger = logging.getLogger(__name__)

COLUMNS = ['file', 'W', 'H', 's', 'beta', 'patch', 'bpp_total', 'bpp_local', 'bpp_global',
           'sidecar_bpp', 'psnr_stego', 'ssim_stego', 'change_ratio', 'encode_ms', 'decode_ms']
TIMING_COLUMNS = ['encode_ms', 'decode_ms']


def default_jobs():
    return psutil.cpu_count(logical=False) or 1


def list_corpus(corpus):
    return sorted(name for name in os.listdir(corpus)
                  if name.lower().endswith('.pgm') and os.path.isfile(os.path.join(corpus, name)))


def message_for(name, num_bits):
    """Random message bits seeded from the file name, independent of scheduling."""
    seed = int(hashlib.md5(name.encode('utf-8')).hexdigest()[:16], 16)
    rng = np.random.default_rng(seed)
    return Message(rng.integers(0, 2, size=num_bits, dtype=np.uint8))


def _float(value, digits=6):
    if value is None:
        return ''
    if value == float('inf'):
        return 'inf'
    return '{:.{}f}'.format(value, digits)


def bench_file(corpus, name, config, message_bits=0, verify=True):
    """:return: a CSV row dict. Raises BPSCError on failure."""
    image = read_pgm_file(os.path.join(corpus, name))
    message = message_for(name, message_bits)

    start = time.time()
    compressed = compress(image, message, config)
    data = compressed.to_bytes()
    encode_ms = (time.time() - start) * 1000.0

    decode_ms = None
    if verify:
        start = time.time()
        try:
            restored, restored_message = decompress(data)
        except Exception as e:
            raise RoundTripError('Decoding {} failed (beta={}, patch={}): {}'
                                 .format(name, config.beta, config.patch_size, e))
        decode_ms = (time.time() - start) * 1000.0
        if restored != image or restored_message != message:
            raise RoundTripError('Round trip failed for {} (beta={}, patch={})'
                                 .format(name, config.beta, config.patch_size))

    stats = compressed.stats
    pixels = float(image.num_pixels)
    report = QualityReport.measure(image, stats.stego_image, len(data))
    row = {
        'file': name,
        'W': image.width,
        'H': image.height,
        's': compressed.header.s,
        'beta': _float(config.beta, 4),
        'patch': config.patch_size,
        'bpp_total': _float(bpp(len(data), image.width, image.height)),
        'bpp_local': _float(stats.stored_local_bits / pixels),
        'bpp_global': _float(stats.global_bits / pixels),
        'sidecar_bpp': _float(stats.sidecar_bits / pixels),
        'psnr_stego': _float(report.psnr, 4),
        'ssim_stego': _float(report.ssim),
        'change_ratio': _float(report.change_ratio),
        'encode_ms': _float(encode_ms, 1),
        'decode_ms': _float(decode_ms, 1),
    }
    logger.info('%s beta=%s patch=%d: s=%d %s bpp', name, row['beta'], config.patch_size,
                row['s'], row['bpp_total'])
    return row


def _job(corpus, name, config, message_bits, verify):
    """:return: (row, None) or (None, (exit code, message)); exceptions do not
    cross the worker boundary."""
    try:
        return bench_file(corpus, name, config, message_bits, verify), None
    except BPSCError as e:
        logger.error('%s: %s', name, e)
        return None, (e.exit_code, str(e))
    except (IOError, OSError) as e:
        logger.error('%s: %s', name, e)
        return None, (EXIT_IO, str(e))
    except Exception as e:
        logger.exception('%s: unexpected failure', name)
        return None, (EXIT_ROUND_TRIP, '{}: {}'.format(type(e).__name__, e))


def write_report(path, rows):
    with open(path, 'w') as f:
        writer = csv.DictWriter(f, fieldnames=COLUMNS, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_bench(corpus, report, configs, message_bits=0, jobs=1, verify=True, log_level=None,
              log_hide_timestamp=False):
    """Benchmarks every (file, config) pair and writes the CSV, rows ordered by
    file then config. Jobs above 1 run in separate processes.

    :return: exit code, EXIT_OK or the code of the first failing file.
    """
    args_list = [[corpus, name, config, message_bits, verify]
                 for name in list_corpus(corpus) for config in configs]
    results = workers.execute_function_multiprocess(
        _job, args_list, max_concurrent_executions=jobs, initializer=configure_logging,
        initargs=(log_level, log_hide_timestamp))
    rows, exit_code = [], EXIT_OK
    for index, args in enumerate(args_list):
        row, error = results[index]
        if row is not None:
            rows.append(row)
            continue
        code, reason = error
        print('bpsc bench: {} failed: {}'.format(args[1], reason), file=sys.stderr)
        if exit_code == EXIT_OK:
            exit_code = code
    write_report(report, rows)
    return exit_code
