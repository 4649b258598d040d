"""Counter-based random streams.

A stream is identified by ``(master_seed, stream_index)``, which becomes the
128-bit Philox4x64-10 key.  Inside kernels each independent unit of work
(a walk, a curve, a path) gets its own counter block ``(·, unit, purpose, 0)``
so that results never depend on scheduling or on how many units run.

The kernel implementation is checked bit-for-bit against
``numpy.random.Philox`` in the test suite.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import njit

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_INV53 = 1.0 / 9007199254740992.0

# state layout: key0, key1, ctr0..ctr3, buffer0..buffer3, position
STATE_SIZE = 11


@njit
def _mulhilo(a, b):
    # 64x64 -> 128 product with 32-bit limbs; no intermediate exceeds 2**64
    a0 = a & _MASK32
    a1 = a >> _S32
    b0 = b & _MASK32
    b1 = b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _S32) + (p01 & _MASK32) + (p10 & _MASK32)
    hi = p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
    lo = ((mid & _MASK32) << _S32) | (p00 & _MASK32)
    return hi, lo


@njit
def _add64(a, b):
    lo = (a & _MASK32) + (b & _MASK32)
    hi = (a >> _S32) + (b >> _S32) + (lo >> _S32)
    return ((hi & _MASK32) << _S32) | (lo & _MASK32)


@njit
def philox4x64(c0, c1, c2, c3, k0, k1):
    """One Philox4x64-10 block for counter ``(c0..c3)`` and key ``(k0, k1)``."""
    for rnd in range(10):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        if rnd < 9:
            k0 = _add64(k0, _W0)
            k1 = _add64(k1, _W1)
    return c0, c1, c2, c3


@njit
def rng_init(state, key0, key1, unit, purpose):
    state[0] = key0
    state[1] = key1
    state[2] = _ZERO
    state[3] = np.uint64(unit)
    state[4] = np.uint64(purpose)
    state[5] = _ZERO
    state[10] = np.uint64(4)


@njit
def rng_next_u64(state):
    pos = state[10]
    if pos >= np.uint64(4):
        # counter is bumped before use, matching numpy's Philox
        state[2] = _add64(state[2], _ONE)
        b0, b1, b2, b3 = philox4x64(state[2], state[3], state[4], state[5], state[0], state[1])
        state[6] = b0
        state[7] = b1
        state[8] = b2
        state[9] = b3
        pos = _ZERO
    out = state[6 + np.int64(pos)]
    state[10] = pos + _ONE
    return out


@njit
def rng_uniform(state):
    """Uniform on the open interval (0, 1)."""
    return (np.float64(rng_next_u64(state) >> _S11) + 0.5) * _INV53


@njit
def rng_normal(state):
    u1 = rng_uniform(state)
    u2 = rng_uniform(state)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def new_state():
    return np.zeros(STATE_SIZE, dtype=np.uint64)


@dataclass(frozen=True)
class RngStream:
    """Splittable stream keyed by ``(master_seed, stream_index)``.

    ``purpose`` selects a disjoint counter sub-space so that different
    consumers of one stream (e.g. curve driving vs. walk angles) never
    overlap.
    """

    master_seed: int
    stream_index: int = 0
    purpose: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index", "purpose"):
            value = getattr(self, name)
            if not (0 <= int(value) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")

    @property
    def key(self):
        return np.uint64(self.master_seed), np.uint64(self.stream_index)

    def child(self, stream_index):
        """Stream for a sub-task, e.g. one experiment cell or replicate block."""
        mixed = _splitmix(_splitmix(self.stream_index) ^ int(stream_index))
        return RngStream(self.master_seed, mixed, self.purpose)

    def with_purpose(self, purpose):
        return RngStream(self.master_seed, self.stream_index, int(purpose))

    def kernel_state(self, unit=0):
        """Fresh kernel state for work unit ``unit`` of this stream."""
        state = new_state()
        k0, k1 = self.key
        rng_init(state, k0, k1, np.uint64(unit), np.uint64(self.purpose))
        return state

    def generator(self, unit=0):
        """numpy Generator over the same counter sub-space (Python-side sampling)."""
        bitgen = np.random.Philox(
            key=np.array([self.master_seed, self.stream_index], dtype=np.uint64),
            counter=np.array([0, int(unit), self.purpose, 0], dtype=np.uint64),
        )
        return np.random.Generator(bitgen)


def _splitmix(x):
    x = (int(x) + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)
