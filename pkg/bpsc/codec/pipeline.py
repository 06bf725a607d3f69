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

"""Dual-path codec.

Encoding: slice the image, pick s, embed the message into planes 1..s,
range-code the stego local grid, then bits-back code the global grid drawing
initial bits from the tail of the local stream. Decoding runs in reverse: the
global path first, which hands the borrowed tail back to the local stream.
"""

import logging
import struct

import numpy as np

from bpsc.coder.ans import (ChainedBits, SeededBits, StackCoderState, TailBits, stack_pop,
                            stack_push)
from bpsc.coder.arithmetic import Bitstream, arith_decode, arith_encode
from bpsc.codec.config import LOCAL_TAIL, SPLIT_RATE, EncodeConfig
from bpsc.common.bitplane import (NUM_PLANES, PlaneStack, SymbolGrid, pack_range, recompose,
                                  slice_planes, unpack_range)
from bpsc.common.decomposition import select_slicing_index
from bpsc.common.exceptions import CapacityError, CoderError, TruncatedStreamError
from bpsc.common.stego import (BitmapSidecar, Message, SegmentPlan, StegoPlanes, embed,
                               extract_message, plan_segments, recover_planes)
from bpsc.common.util import ceil_div
from bpsc.container.format import (POLICY_FLAGS, POLICY_LOCAL_RAW, POLICY_LOCAL_TAIL,
                                   POLICY_SEEDED, POLICY_TAIL_EXHAUSTED, ContainerHeader,
                                   beta_to_fixed, read_container, write_container)
from bpsc.model import create_ar_model, create_latent_model, elbo_estimate
from bpsc.model.autoregressive import PatchOrder

logger = logging.getLogger(__name__)

WORD_BYTES = 4


def _patch_tables(model, starts):
    starts = iter(starts.tolist())

    def next_table():
        if next(starts):
            model.reset_context()
        return model.next_distribution()

    return next_table


def encode_local(grid, model, patch_order):
    """Range-codes the local grid in patch order under an adaptive model."""
    indices, starts = patch_order.traversal(grid.width, grid.height)
    symbols = grid.symbols.reshape(-1)[indices].tolist()
    return arith_encode(symbols, _patch_tables(model, starts), model.update)


def decode_local(data, model, width, height, patch_order):
    indices, starts = patch_order.traversal(width, height)
    symbols = arith_decode(data, _patch_tables(model, starts), len(indices), model.update)
    flat = np.zeros(width * height, dtype=np.uint8)
    flat[indices] = symbols
    return SymbolGrid(flat.reshape(height, width), model.bits_per_symbol)


def store_local(grid):
    """Packs the local grid uncoded, raster order, s bits per symbol MSB-first."""
    bits = np.unpackbits(grid.symbols.reshape(-1, 1), axis=1)[:, 8 - grid.bits_per_symbol:]
    size = grid.width * grid.height * grid.bits_per_symbol
    return Bitstream(np.packbits(bits.reshape(-1)).tobytes(), ideal_bits=float(size),
                     num_symbols=grid.width * grid.height)


def load_local(data, width, height, bits_per_symbol):
    count = width * height
    expected = ceil_div(count * bits_per_symbol, 8)
    if len(data) != expected:
        raise TruncatedStreamError('Stored local grid holds {} bytes, expected {}.'
                                   .format(len(data), expected))
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))[:count * bits_per_symbol]
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    symbols = bits.reshape(count, bits_per_symbol).dot(weights)
    return SymbolGrid(symbols.reshape(height, width).astype(np.uint8), bits_per_symbol)


def encode_global(grid, model, initial_bits):
    """Bits-back codes the global grid with a fitted latent model.

    Per block, in raster order: pop z under q(z|x) (consuming initial bits),
    push the block's pixels under p(x|z), push z under the prior.

    :param initial_bits: word source used when the stack runs dry.
    :return: Bitstream whose ideal_bits is the net ideal code length.
    """
    if grid.empty:
        return Bitstream(b'')
    state = StackCoderState.primed(initial_bits)
    prior = model.prior_table()
    net_bits = 0.0
    for y0, y1, x0, x1 in model.blocks(grid.width, grid.height):
        values = grid.symbols[y0:y1, x0:x1].reshape(-1)
        inference = model.inference_table(values)
        state, z = stack_pop(state, inference)
        likelihood = model.likelihood_table(z)
        for x in values.tolist():
            stack_push(state, x, likelihood)
            net_bits += likelihood.code_length(x)
        stack_push(state, z, prior)
        net_bits += prior.code_length(z) - inference.code_length(z)
    return Bitstream(model.preamble() + state.to_bytes(), ideal_bits=net_bits,
                     num_symbols=grid.width * grid.height)


def decode_global(data, model, width, height):
    """:param model: latent model configured from the header, or None when
                  the global modality is empty.
    :return: (global grid, initial-bit words reclaimed in the order the
             encoder drew them)."""
    if model is None:
        return SymbolGrid(np.zeros((height, width), dtype=np.uint8), 0), []
    data = bytes(data)
    offset = model.read_preamble(data)
    state = StackCoderState.from_bytes(data[offset:])
    prior = model.prior_table()
    symbols = np.zeros((height, width), dtype=np.uint8)
    for y0, y1, x0, x1 in reversed(model.blocks(width, height)):
        state, z = stack_pop(state, prior)
        likelihood = model.likelihood_table(z)
        values = [0] * ((y1 - y0) * (x1 - x0))
        for i in reversed(range(len(values))):
            state, values[i] = stack_pop(state, likelihood)
        block = np.array(values, dtype=np.uint8)
        symbols[y0:y1, x0:x1] = block.reshape(y1 - y0, x1 - x0)
        stack_push(state, z, model.inference_table(block))
    return SymbolGrid(symbols, model.bits_per_symbol), state.reclaimed_words()


class CompressionStats(object):
    """Encoder-side accounting for one container, in bits. elbo_bits is the
    negated ELBO of the global grid, the expected net global rate."""

    def __init__(self, decision, s, local_bits, local_ideal_bits, global_bits, global_ideal_bits,
                 initial_bits_drawn, tail_bits, sidecar_bits, header_bits, elbo_bits=None):
        self.decision = decision
        self.s = s
        self.local_bits = local_bits
        self.local_ideal_bits = local_ideal_bits
        self.global_bits = global_bits
        self.global_ideal_bits = global_ideal_bits
        self.initial_bits_drawn = initial_bits_drawn
        self.tail_bits = tail_bits
        self.sidecar_bits = sidecar_bits
        self.header_bits = header_bits
        self.elbo_bits = elbo_bits
        self.stego_image = None

    @property
    def net_global_bits(self):
        """Gross global stream minus every initial bit it borrowed."""
        return self.global_bits - self.initial_bits_drawn

    @property
    def stored_local_bits(self):
        return self.local_bits - self.tail_bits

    @property
    def total_bits(self):
        return self.header_bits + self.sidecar_bits + self.global_bits + self.stored_local_bits


class CompressedImage(object):
    def __init__(self, header, sidecar, global_stream, local_stream, stats=None):
        self.header = header
        self.sidecar = bytes(sidecar)
        self.global_stream = bytes(global_stream)
        self.local_stream = bytes(local_stream)
        self.stats = stats

    def to_bytes(self):
        return write_container(self.header, self.sidecar, self.global_stream, self.local_stream)

    @classmethod
    def from_bytes(cls, data):
        container = read_container(data)
        return cls(container.header, container.sidecar, container.global_stream,
                   container.local_stream)

    def __len__(self):
        return self.header.size + self.header.payload_size


def _initial_bits(config, local_data):
    if config.initial_bits == LOCAL_TAIL:
        tail = TailBits(local_data)
        return tail, ChainedBits(tail, SeededBits(config.seed))
    return None, SeededBits(config.seed)


def _compress_at(image, message, config, s, decision):
    width, height = image.width, image.height
    stack = slice_planes(image)
    plan = plan_segments(message.length, s, width * height)
    stego, sidecar = embed([stack.plane(l) for l in range(1, s + 1)], message, plan)
    stego_stack = stack.with_planes(stego.planes)
    local_grid = pack_range(stego_stack, 1, s)

    local = encode_local(local_grid, create_ar_model(config.ar_model_id, s),
                         PatchOrder(config.patch_size))
    policy = POLICY_LOCAL_TAIL if config.initial_bits == LOCAL_TAIL else POLICY_SEEDED
    stored = store_local(local_grid)
    if len(stored) < len(local):
        logger.debug('Storing the %d-bit local grid uncoded: %d bytes against %d coded.',
                     s, len(stored), len(local))
        local = stored
        policy |= POLICY_LOCAL_RAW
    local_stored = local.data
    sigma_x_fixed, tail_bits, drawn_bits, elbo_rate = 0, 0, 0, None
    global_ = Bitstream(b'')

    if s < NUM_PLANES:
        global_grid = pack_range(stack, s + 1, NUM_PLANES)
        lvm = create_latent_model(config.lvm_model_id, NUM_PLANES - s,
                                  block_size=config.block_size).fit(global_grid)
        sigma_x_fixed = lvm.sigma_x_fixed
        tail, source = _initial_bits(config, local.data)
        global_ = encode_global(global_grid, lvm, source)
        drawn_bits = 32 * source.words_drawn
        if tail is not None:
            tail_bits = 32 * tail.words_drawn
            local_stored = tail.remaining
            if source.switched:
                policy |= POLICY_TAIL_EXHAUSTED
                logger.debug('Local tail exhausted after %d bits; continued from seed %d.',
                             tail_bits, config.seed)
        elbo_rate = -elbo_estimate(lvm, global_grid)

    sidecar_bytes = sidecar.to_bytes()
    header = ContainerHeader(width, height, s, beta_to_fixed(config.beta), config.ar_model_id,
                             config.lvm_model_id, config.patch_size, config.block_size,
                             sigma_x_fixed, policy, config.seed, plan.lengths,
                             sidecar_len=len(sidecar_bytes), global_len=len(global_.data),
                             consumed_bits=tail_bits, local_len=len(local_stored))
    stats = CompressionStats(decision, s, local.bit_length, local.ideal_bits,
                             global_.bit_length, global_.ideal_bits, drawn_bits, tail_bits,
                             8 * len(sidecar_bytes), 8 * header.size, elbo_rate)
    stats.stego_image = recompose(stego_stack)
    logger.debug('s=%d local=%d bits (ideal %.1f) global=%d bits, net %d, tail reused %d bits',
                 s, local.bit_length, local.ideal_bits, global_.bit_length,
                 stats.net_global_bits, tail_bits)
    return CompressedImage(header, sidecar_bytes, global_.data, local_stored, stats)


def compress(image, message=None, config=None):
    """:return: CompressedImage. Raises CapacityError if the message does not
    fit the local planes."""
    message = message if message is not None else Message.empty()
    config = (config if config is not None else EncodeConfig()).validate()
    decision = select_slicing_index(image, config.beta)
    capacity = image.num_pixels

    if config.split == SPLIT_RATE:
        best = None
        for s in range(1, NUM_PLANES + 1):
            if message.length > s * capacity:
                continue
            candidate = _compress_at(image, message, config, s, decision)
            if best is None or len(candidate) < len(best):
                best = candidate
        if best is None:
            raise CapacityError(message.length, NUM_PLANES * capacity)
        logger.debug('Rate split chose s=%d over information split s=%d.',
                     best.header.s, decision.s)
        return best

    s = decision.s
    if message.length > s * capacity:
        raise CapacityError(message.length, s * capacity)
    return _compress_at(image, message, config, s, decision)


def _tail_bytes(words):
    # words were drawn from the end of the stream backwards
    return b''.join(struct.pack('>I', w) for w in reversed(words))


def _split_reclaimed(header, words):
    tail_words = header.consumed_bits // 32
    base_policy = header.policy & ~POLICY_FLAGS
    if base_policy == POLICY_SEEDED and tail_words:
        raise CoderError('Seeded policy cannot reuse local tail bits.')
    if tail_words > len(words):
        raise CoderError('Header claims {} tail words, only {} were reclaimed.'
                         .format(tail_words, len(words)))
    seeded = words[tail_words:]
    if base_policy == POLICY_LOCAL_TAIL and seeded and \
            not header.policy & POLICY_TAIL_EXHAUSTED:
        raise CoderError('{} initial-bit words unaccounted for.'.format(len(seeded)))
    if seeded != SeededBits.prefix(header.seed, len(seeded)):
        raise CoderError('Reclaimed initial bits differ from the seeded source.')
    return words[:tail_words]


def decompress(compressed):
    """:param compressed: CompressedImage or container bytes.
    :return: (Image, Message)."""
    if not isinstance(compressed, CompressedImage):
        compressed = CompressedImage.from_bytes(compressed)
    header = compressed.header
    width, height, s = header.width, header.height, header.s

    ar_model = create_ar_model(header.ar_model_id, s)
    local_data = compressed.local_stream
    global_planes = []
    if s < NUM_PLANES:
        lvm = create_latent_model(header.lvm_model_id, NUM_PLANES - s,
                                  block_size=header.block_size,
                                  sigma_x_fixed=header.sigma_x_fixed)
        global_grid, words = decode_global(compressed.global_stream, lvm, width, height)
        local_data += _tail_bytes(_split_reclaimed(header, words))
        global_planes = unpack_range(global_grid, s + 1, NUM_PLANES)

    if header.policy & POLICY_LOCAL_RAW:
        local_grid = load_local(local_data, width, height, s)
    else:
        local_grid = decode_local(local_data, ar_model, width, height,
                                  PatchOrder(header.patch_size))
    stego = StegoPlanes(unpack_range(local_grid, 1, s))
    message = extract_message(stego, SegmentPlan(header.segment_lengths, width * height))
    sidecar = BitmapSidecar.from_bytes(compressed.sidecar, header.segment_lengths)
    image = recompose(PlaneStack(recover_planes(stego, sidecar) + global_planes))
    return image, message
