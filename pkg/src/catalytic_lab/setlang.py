"""Catalytic-set descriptors: membership, lexicographic enumeration, exact density."""

from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from . import _kernels, codes
from .codes import CodeSpec
from .errors import ConfigInvalid, LengthMismatch, TooLarge

ENUM_LIMIT = 24


def _fmt(values, m):
    return [format(int(v), f"0{m}b") for v in values]


class CatalyticSet:
    """Base class; subclasses define ``m`` and ``_member``."""

    m: int
    direct = False  # has an enumeration that avoids scanning {0,1}^m

    def member(self, w):
        if len(w) != self.m:
            raise LengthMismatch(f"|w|={len(w)} but set is instantiated at m={self.m}")
        if w.strip("01"):
            return False
        return self._member(w)

    def __contains__(self, w):
        return self.member(w)

    def _member(self, w):
        raise NotImplementedError

    def _mask(self):
        idx = np.arange(1 << self.m, dtype=np.int64)
        return np.fromiter((self._member(s) for s in _fmt(idx, self.m)), dtype=bool, count=idx.size)

    def mask(self):
        """Membership of every point of {0,1}^m, indexed by int(w, 2)."""
        if self.m > ENUM_LIMIT:
            raise TooLarge(f"m={self.m} exceeds the mask limit {ENUM_LIMIT}")
        return self._mask()

    def _direct(self):
        raise NotImplementedError

    def enumerate(self):
        if self.direct:
            yield from self._direct()
            return
        if self.m > ENUM_LIMIT:
            raise TooLarge(f"enumerating {self.describe()} needs 2^{self.m} membership tests")
        yield from _fmt(np.flatnonzero(self.mask()), self.m)

    def density(self):
        if self.direct:
            return sum(1 for _ in self._direct())
        if self.m > ENUM_LIMIT:
            raise TooLarge(f"density of {self.describe()} at m={self.m}")
        return int(self.mask().sum())

    def describe(self):
        return type(self).__name__.lower()


@dataclass(frozen=True)
class All(CatalyticSet):
    m: int

    def _member(self, w):
        return True

    def _mask(self):
        return np.ones(1 << self.m, dtype=bool)

    def density(self):
        return 1 << self.m

    def describe(self):
        return "all"


@dataclass(frozen=True)
class Empty(CatalyticSet):
    m: int
    direct = True

    def _member(self, w):
        return False

    def _mask(self):
        return np.zeros(1 << self.m, dtype=bool)

    def _direct(self):
        return iter(())

    def describe(self):
        return "empty"


@dataclass(frozen=True)
class Parity(CatalyticSet):
    """Strings of odd weight."""

    m: int

    def _member(self, w):
        return w.count("1") % 2 == 1

    def _mask(self):
        return (_kernels.popcount(np.arange(1 << self.m)) & 1).astype(bool)

    def density(self):
        return 1 << (self.m - 1) if self.m else 0

    def describe(self):
        return "parity"


@dataclass(frozen=True)
class ComplementOf(CatalyticSet):
    inner: CatalyticSet

    @property
    def m(self):
        return self.inner.m

    def _member(self, w):
        return not self.inner._member(w)

    def _mask(self):
        return ~self.inner.mask()

    def density(self):
        return (1 << self.m) - self.inner.density()

    def describe(self):
        return "not:" + self.inner.describe()


@dataclass(frozen=True)
class Tally(CatalyticSet):
    m: int
    direct = True

    def _member(self, w):
        return "0" not in w

    def _direct(self):
        yield "1" * self.m

    def describe(self):
        return "tally"


@dataclass(frozen=True)
class PrefixZero(CatalyticSet):
    """Strings whose first ``prefix_len`` bits are zero."""

    m: int
    prefix_len: int

    def __post_init__(self):
        if not 0 <= self.prefix_len <= self.m:
            raise ConfigInvalid(f"prefix_len {self.prefix_len} outside [0, {self.m}]")

    def _member(self, w):
        return "1" not in w[: self.prefix_len]

    def _mask(self):
        return (np.arange(1 << self.m) >> (self.m - self.prefix_len)) == 0

    def density(self):
        return 1 << (self.m - self.prefix_len)

    def describe(self):
        return f"prefix-zero:{self.prefix_len}"


def _check_words(m, words, strict):
    for w in words:
        if len(w) != m or w.strip("01"):
            raise ConfigInvalid(f"{w!r} is not a binary string of length {m}")
    if len(set(words)) != len(words):
        raise ConfigInvalid("duplicate strings in explicit set")
    if strict and any(a >= b for a, b in zip(words, words[1:])):
        raise ConfigInvalid("sparse set must be strictly increasing")


@dataclass(frozen=True)
class Explicit(CatalyticSet):
    m: int
    words: tuple
    direct = True
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        _check_words(self.m, self.words, strict=False)
        object.__setattr__(self, "_lookup", frozenset(self.words))

    def _member(self, w):
        return w in self._lookup

    def _mask(self):
        mask = np.zeros(1 << self.m, dtype=bool)
        mask[[int(w, 2) for w in self.words]] = True
        return mask

    def _direct(self):
        return iter(sorted(self.words))

    def density(self):
        return len(self.words)

    def describe(self):
        return "explicit"


@dataclass(frozen=True)
class SparseSorted(Explicit):
    """Explicit list that is strictly increasing as integers."""

    def __post_init__(self):
        super().__post_init__()
        _check_words(self.m, self.words, strict=True)

    def describe(self):
        return "sparse"


@dataclass(frozen=True)
class Codewords(CatalyticSet):
    code: CodeSpec
    direct = True

    @property
    def m(self):
        return self.code.n

    def _member(self, w):
        out = codes.decode(self.code, w)
        return out.ok and not out.error_positions

    def _mask(self):
        return codes.codeword_mask(self.code)

    def _direct(self):
        return iter(codes.codewords(self.code))

    def density(self):
        return 1 << self.code.k

    def describe(self):
        return f"codewords:{self.code.tag}"


@dataclass(frozen=True)
class BallUnion(CatalyticSet):
    """Words within distance ``radius`` of some codeword (2*radius < d keeps the balls disjoint)."""

    code: CodeSpec
    radius: int

    def __post_init__(self):
        if not 0 <= self.radius or 2 * self.radius >= self.code.d:
            raise ConfigInvalid(f"ball radius {self.radius} needs 2r < d={self.code.d}")

    @property
    def m(self):
        return self.code.n

    def _member(self, w):
        out = codes.decode(self.code, w)
        return out.ok and len(out.error_positions) <= self.radius

    def _mask(self):
        return _kernels.distance_transform(codes.codeword_mask(self.code), self.m) <= self.radius

    def density(self):
        return (1 << self.code.k) * sum(comb(self.m, i) for i in range(self.radius + 1))

    def describe(self):
        return f"ball:{self.code.tag}:{self.radius}"


@dataclass(frozen=True)
class HammingBallUnion(CatalyticSet):
    m: int
    centers: tuple
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        for c in self.centers:
            if len(c) != self.m or c.strip("01"):
                raise ConfigInvalid(f"center {c!r} is not a binary string of length {self.m}")

    def _member(self, w):
        return any(codes.hamming_distance(w, c) <= self.radius for c in self.centers)

    def _mask(self):
        src = np.zeros(1 << self.m, dtype=bool)
        src[[int(c, 2) for c in self.centers]] = True
        if not self.centers:
            return src
        return _kernels.distance_transform(src, self.m) <= self.radius

    def describe(self):
        return "hamming-balls:{}:{}".format(",".join(self.centers), self.radius)


def _read_words(ref):
    text = Path(ref[1:]).read_text() if ref.startswith("@") else ref.replace(",", "\n")
    return [line.strip() for line in text.splitlines() if line.strip()]


def parse_set(text, m=None):
    """Build a set from CLI syntax: ``parity``, ``tally``, ``prefix-zero:2``,
    ``codewords:rm(1,3)``, ``ball:rm(1,3):1``, ``explicit:@file``, ``sparse:@file``,
    ``hamming-balls:000000,111111:1``, ``all``, ``empty``, ``even``, ``not:<set>``."""
    head, _, rest = text.partition(":")
    if head in ("not", "complement"):
        return ComplementOf(parse_set(rest, m))
    if head == "codewords":
        return Codewords(codes.parse_code(rest))
    if head == "ball":
        code_text, _, r = rest.rpartition(":")
        return BallUnion(codes.parse_code(code_text), int(r))
    if head in ("explicit", "sparse"):
        words = _read_words(rest)
        width = m if m is not None else (len(words[0]) if words else 0)
        cls = SparseSorted if head == "sparse" else Explicit
        return cls(width, tuple(words))
    if head == "hamming-balls":
        centers, _, r = rest.rpartition(":")
        cs = tuple(centers.split(","))
        return HammingBallUnion(m if m is not None else len(cs[0]), cs, int(r))
    if m is None:
        raise ConfigInvalid(f"set {text!r} needs an explicit length m")
    simple = {"all": All, "empty": Empty, "parity": Parity, "tally": Tally}
    if head in simple:
        return simple[head](m)
    if head == "even":
        return ComplementOf(Parity(m))
    if head == "prefix-zero":
        return PrefixZero(m, int(rest))
    raise ConfigInvalid(f"unknown set descriptor {text!r}")
