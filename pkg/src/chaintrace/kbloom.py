"""Keyed Bloom filters and the inclusiveness (INC) operator.

A filter is an m-bit array filled by one HMAC function evaluated under k
secret keys.  Only the key holder can build a filter that tests as
containing a chosen element, so handing filters to a third party reveals
set relations but not set contents.  The number of keys k itself stays
secret inside a public [k_min, k_max] range.
"""

from __future__ import annotations

import hashlib
import hmac
import math
import secrets
from dataclasses import dataclass, field
from random import Random
from typing import Iterable

MAGIC = b"KBF1"
_INDEX_BYTES = 8  # first 8 MAC bytes, big-endian, mod m


class ParameterError(ValueError):
    """Bad construction parameters (sizes, bounds, key mismatch)."""


class StructuralError(ValueError):
    """Operands structurally incompatible (length mismatch, bad wire data)."""


@dataclass(frozen=True)
class FilterParams:
    """Public-ish filter parameters; k itself must not leave the key holder."""

    m: int
    hash_name: str = "sha256"
    k: int = 4
    key_bounds: tuple[int, int] = (4, 8)

    def __post_init__(self):
        k_min, k_max = self.key_bounds
        if self.m <= 0:
            raise ParameterError("filter size m must be positive")
        if k_min < 1 or k_min > k_max:
            raise ParameterError(f"bad key bounds {self.key_bounds}")
        if not k_min <= self.k <= k_max:
            raise ParameterError("k outside its public bounds")
        if self.hash_name not in hashlib.algorithms_available:
            raise ParameterError(f"unknown hash {self.hash_name!r}")


@dataclass(frozen=True)
class SecretKeySet:
    """The k HMAC keys; never serialized, never shown to the querying party."""

    keys: tuple[bytes, ...]

    def __post_init__(self):
        if len(set(self.keys)) != len(self.keys):
            raise ParameterError("duplicate HMAC keys")
        if not self.keys:
            raise ParameterError("empty key set")

    def __repr__(self):  # keep keys out of logs and tracebacks
        return f"SecretKeySet(<{len(self.keys)} keys>)"


@dataclass(frozen=True)
class KeyedBloomFilter:
    """Immutable m-bit array; bit j of byte i is filter index 8*i + j."""

    m: int
    bits: bytes = b""

    def __post_init__(self):
        nbytes = (self.m + 7) // 8
        if not self.bits:
            object.__setattr__(self, "bits", bytes(nbytes))
        elif len(self.bits) != nbytes:
            raise StructuralError("bit array length does not match m")

    def get(self, i: int) -> int:
        return (self.bits[i // 8] >> (i % 8)) & 1

    def popcount(self) -> int:
        return sum(b.bit_count() for b in self.bits)

    def to_bytes(self) -> bytes:
        """Wire format: "KBF1" + m as 8-byte big-endian + 4 zero bytes + payload."""
        return MAGIC + self.m.to_bytes(8, "big") + b"\x00" * 4 + self.bits

    @classmethod
    def from_bytes(cls, data: bytes) -> "KeyedBloomFilter":
        if len(data) < 16 or data[:4] != MAGIC:
            raise StructuralError("not a serialized filter")
        m = int.from_bytes(data[4:12], "big")
        payload = data[16:]
        if len(payload) != (m + 7) // 8:
            raise StructuralError("truncated filter payload")
        return cls(m=m, bits=payload)


def setup(m: int, key_bounds: tuple[int, int] = (4, 8), rng: Random | None = None,
          hash_name: str = "sha256") -> tuple[FilterParams, SecretKeySet]:
    """Draw k uniformly inside the public bounds and generate k distinct keys.

    With rng=None the keys come from the OS entropy pool; passing a seeded
    Random makes the whole fixture reproducible.
    """
    k_min, k_max = key_bounds
    if m <= 0 or k_min < 1 or k_min > k_max:
        raise ParameterError("invalid setup parameters")
    if rng is None:
        k = k_min + secrets.randbelow(k_max - k_min + 1)
        draw = lambda: secrets.token_bytes(16)
    else:
        k = rng.randint(k_min, k_max)
        draw = lambda: rng.getrandbits(128).to_bytes(16, "big")
    keys = set()
    while len(keys) < k:
        keys.add(draw())
    params = FilterParams(m=m, hash_name=hash_name, k=k, key_bounds=key_bounds)
    return params, SecretKeySet(keys=tuple(sorted(keys)))


def _positions(params: FilterParams, keys: SecretKeySet, element: bytes):
    for key in keys.keys:
        mac = hmac.new(key, element, params.hash_name).digest()
        yield int.from_bytes(mac[:_INDEX_BYTES], "big") % params.m


def create(params: FilterParams, keys: SecretKeySet,
           elements: Iterable[bytes]) -> KeyedBloomFilter:
    """Build the filter of a whole element set."""
    if len(keys.keys) != params.k:
        raise ParameterError("key set inconsistent with params")
    arr = bytearray((params.m + 7) // 8)
    for element in elements:
        for pos in _positions(params, keys, element):
            arr[pos // 8] |= 1 << (pos % 8)
    return KeyedBloomFilter(m=params.m, bits=bytes(arr))


def insert(bf: KeyedBloomFilter, params: FilterParams, keys: SecretKeySet,
           element: bytes) -> KeyedBloomFilter:
    """Return a new filter with one more element set."""
    if bf.m != params.m:
        raise StructuralError("filter length does not match params")
    arr = bytearray(bf.bits)
    for pos in _positions(params, keys, element):
        arr[pos // 8] |= 1 << (pos % 8)
    return KeyedBloomFilter(m=bf.m, bits=bytes(arr))


def inc(bf_a: KeyedBloomFilter, bf_b: KeyedBloomFilter) -> KeyedBloomFilter:
    """Inclusiveness operator: result = NOT(A) OR B, bit by bit.

    All-ones output means every bit set in A is also set in B, i.e. the set
    behind A is likely included in the set behind B.
    """
    if bf_a.m != bf_b.m:
        raise StructuralError("filter lengths differ")
    out = bytearray(len(bf_a.bits))
    for i, (a, b) in enumerate(zip(bf_a.bits, bf_b.bits)):
        out[i] = (~a | b) & 0xFF
    # mask the padding bits above index m-1 so popcount semantics stay exact
    excess = len(out) * 8 - bf_a.m
    if excess:
        out[-1] &= (1 << (8 - excess)) - 1
    return KeyedBloomFilter(m=bf_a.m, bits=bytes(out))


SUBSET_LIKELY = "SubsetLikely"
NOT_SUBSET = "NotSubset"


def is_subset(bf_a: KeyedBloomFilter, bf_b: KeyedBloomFilter) -> str:
    """SubsetLikely iff INC(A,B) is all ones; NotSubset is always certain."""
    return SUBSET_LIKELY if inc(bf_a, bf_b).popcount() == bf_a.m else NOT_SUBSET


def contains(bf: KeyedBloomFilter, params: FilterParams, keys: SecretKeySet,
             element: bytes) -> bool:
    """Key-holder-side membership probe (all k positions set)."""
    return all(bf.get(p) for p in _positions(params, keys, element))


def fp_rate(m: int, k: int, n: int) -> float:
    """Standard false-positive estimate (1 - e^(-kn/m))^k for n insertions."""
    if m <= 0 or k <= 0 or n < 0:
        raise ParameterError("m, k must be positive and n non-negative")
    if n == 0:
        return 0.0
    return (1.0 - math.exp(-k * n / m)) ** k
