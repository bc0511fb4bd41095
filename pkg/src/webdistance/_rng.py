"""Counter-based keyed hashing.

Every random quantity in the package is a pure function of a 64-bit key and
an integer counter, so values never depend on evaluation order or thread
count.  The mixer is the SplitMix64 finaliser, applied twice per lookup.
"""

import numba
import numpy as np

MASK64 = (1 << 64) - 1

# stream tags keep the sign field, SJ weights and per-sample keys apart
STREAM_SIGN = 1
STREAM_SJ = 2
STREAM_SAMPLE = 3
STREAM_WALK = 4

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_LOW32 = np.uint64(0xFFFFFFFF)


@numba.njit(cache=True, inline="always")
def mix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, inline="always")
def hash2(key, a, b):
    """Hash of the pair (a, b) under ``key``; a and b are taken mod 2**32."""
    key = np.uint64(key)
    packed = ((np.uint64(a) & _LOW32) << np.uint64(32)) | (np.uint64(b) & _LOW32)
    return mix64(mix64(key ^ packed) + key)


@numba.njit(cache=True, inline="always")
def sign_bit(key, a, b):
    """+1 or -1 from the top bit of ``hash2``."""
    if hash2(key, a, b) >> np.uint64(63):
        return 1
    return -1


@numba.njit(cache=True, inline="always")
def bit(key, a, b):
    return np.int64(hash2(key, a, b) >> np.uint64(63))


@numba.njit(cache=True)
def _stream_key(seed, stream):
    return mix64(mix64(seed) ^ (np.uint64(stream) * _GOLDEN))


def stream_key(seed: int, stream: int) -> np.uint64:
    """Key for one named stream of ``seed``."""
    return np.uint64(_stream_key(np.uint64(seed & MASK64), np.uint64(stream)))


@numba.njit(cache=True)
def _derive(key, index):
    return hash2(key, index >> np.int64(32), index & np.int64(0xFFFFFFFF))


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for sample ``index`` of an experiment."""
    key = stream_key(seed, STREAM_SAMPLE)
    return int(_derive(key, np.int64(index)))


@numba.njit(cache=True)
def signs_at(key, times, spaces):
    out = np.empty(times.shape[0], dtype=np.int8)
    for t in range(times.shape[0]):
        out[t] = sign_bit(key, times[t], spaces[t])
    return out


@numba.njit(cache=True)
def _sample_keys(sample_base, first, count, stream):
    out = np.empty(count, dtype=np.uint64)
    for s in range(count):
        out[s] = _stream_key(_derive(sample_base, np.int64(first + s)), stream)
    return out


def sample_keys(seed: int, count: int, stream: int, first: int = 0) -> np.ndarray:
    """Stream keys of samples ``first .. first+count-1``; matches ``derive_seed``."""
    base = stream_key(seed, STREAM_SAMPLE)
    return _sample_keys(base, np.int64(first), np.int64(count), np.uint64(stream))
