"""Small binary linear codes with certified distance and bounded-distance decoding.

These stand in for the asymptotic, logspace-decodable codes the restoration
engines were designed around: an engine only needs ``encode``, a decoder that
either returns the unique codeword within ``radius`` or reports failure, and
the per-bit corruption indicator derived from it.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _kernels
from .errors import ConfigInvalid, LengthMismatch, NotDecodable, TooLarge

EXHAUSTIVE_LIMIT = 24  # max block length for min_distance / covering_radius
BRUTE_FORCE_MAX_K = 12
_CACHE_LIMIT = 1 << 16


def to_bits(word):
    return np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")


def to_str(bits):
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


def hamming_distance(a, b):
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def gf2_rank(matrix):
    m = np.array(matrix, dtype=np.uint8) & 1
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def gf2_nullspace(matrix):
    """Basis (as rows) of {x : matrix @ x = 0 over GF(2)}."""
    m = np.array(matrix, dtype=np.uint8) & 1
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i, c]), None)
        if pivot is None:
            continue
        m[[r, pivot]] = m[[pivot, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = m[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


@dataclass(frozen=True)
class DecodeOutcome:
    status: str  # "Decoded" | "Failure"
    codeword: str | None = None
    error_positions: tuple = ()

    @property
    def ok(self):
        return self.status == "Decoded"


class CodeSpec:
    """An [n, k, d] binary linear code given by a k x n generator matrix.

    ``d`` is certified by exhaustive weight enumeration when n <= 24, and taken
    from the family formula otherwise.  ``delta`` is the relative distance d/n.
    """

    def __init__(self, generator, family, params=(), d=None):
        g = np.array(generator, dtype=np.uint8) & 1
        if g.ndim != 2:
            raise ConfigInvalid("generator must be a 2-d matrix")
        self.generator = g
        self.k, self.n = g.shape
        self.family = family
        self.params = tuple(params)
        if gf2_rank(g) != self.k:
            raise ConfigInvalid(f"generator of {self.tag} is not full rank")
        if d is None or self.n <= EXHAUSTIVE_LIMIT:
            exact = _min_weight(self)
            if d is not None and d != exact:
                raise ConfigInvalid(f"{self.tag}: claimed d={d} but minimum weight is {exact}")
            d = exact
        self.d = int(d)
        self.delta = Fraction(self.d, self.n)
        self.radius = (self.d - 1) // 2
        if self.radius < 1:
            raise ConfigInvalid(f"{self.tag}: decoding radius (d-1)//2 must be >= 1 (d={self.d})")
        self._cw = None
        self._cache = {}

    @property
    def tag(self):
        if self.family == "reed-muller":
            return "rm({},{})".format(*self.params)
        if self.family == "random":
            return "random({},{},{})".format(*self.params)
        return f"{self.family}({self.n})"

    def __repr__(self):
        return f"CodeSpec({self.tag}, n={self.n}, k={self.k}, d={getattr(self, 'd', '?')})"

    def __eq__(self, other):
        return (
            isinstance(other, CodeSpec)
            and self.family == other.family
            and np.array_equal(self.generator, other.generator)
        )

    def __hash__(self):
        return hash((self.family, self.generator.tobytes(), self.generator.shape))

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state

    def codeword_matrix(self):
        """All 2^k codewords as rows, indexed by message integer (first message bit = row 0)."""
        if self._cw is None:
            if self.k > 20:
                raise TooLarge(f"2^{self.k} codewords")
            msgs = (np.arange(1 << self.k)[:, None] >> np.arange(self.k - 1, -1, -1)) & 1
            self._cw = (msgs.astype(np.int64) @ self.generator.astype(np.int64) % 2).astype(np.uint8)
        return self._cw

    def to_dict(self):
        return {
            "family": self.family,
            "params": list(self.params),
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "generator": [to_str(row) for row in self.generator],
        }

    @classmethod
    def from_dict(cls, data):
        gen = np.array([to_bits(r) for r in data["generator"]], dtype=np.uint8)
        return cls(gen, data.get("family", "custom"), data.get("params", ()), data.get("d"))


def _row_ints(code):
    weights = 1 << np.arange(code.n - 1, -1, -1, dtype=np.int64)
    return (code.generator.astype(np.int64) * weights).sum(axis=1)


def _min_weight(code):
    if code.k > 20:
        raise TooLarge(f"exhaustive weight enumeration over 2^{code.k} codewords")
    if code.n <= 62:
        cws = _kernels.span_ints(_row_ints(code))
        weights = _kernels.popcount(cws[1:])
    else:
        weights = code.codeword_matrix()[1:].sum(axis=1)
    return int(weights.min())


# ----------------------------------------------------------------- families


def repetition(n):
    return CodeSpec(np.ones((1, n), dtype=np.uint8), "rep", (n,), d=n)


def hamming(n=7):
    r = (n + 1).bit_length() - 1
    if n != (1 << r) - 1 or r < 2:
        raise ConfigInvalid(f"Hamming length must be 2^r - 1, got {n}")
    cols = np.arange(1, n + 1)
    h = ((cols[None, :] >> np.arange(r - 1, -1, -1)[:, None]) & 1).astype(np.uint8)
    return CodeSpec(gf2_nullspace(h), "hamming", (n,), d=3)


def extended_hamming(n=8):
    base = hamming(n - 1)
    parity = base.generator.sum(axis=1, keepdims=True) % 2
    return CodeSpec(np.hstack([base.generator, parity]), "exthamming", (n,), d=4)


def reed_muller(r, mu):
    """First-order Reed-Muller RM(1, mu): all-ones row first, then the mu coordinate functions."""
    if r != 1:
        raise ConfigInvalid("only first-order Reed-Muller codes are supported")
    n = 1 << mu
    j = np.arange(n)
    rows = [np.ones(n, dtype=np.uint8)]
    for i in range(mu):
        rows.append(((j >> (mu - 1 - i)) & 1).astype(np.uint8))
    return CodeSpec(np.array(rows), "reed-muller", (1, mu), d=1 << (mu - 1))


def random_linear(n, k, seed, attempts=1000):
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        g = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if gf2_rank(g) != k:
            continue
        try:
            return CodeSpec(g, "random", (n, k, seed))
        except ConfigInvalid:
            continue
    raise ConfigInvalid(f"no [{n},{k},>=3] code found for seed {seed}")


_DESCRIPTOR = re.compile(r"^\s*([a-z-]+)\s*(?:[:(]\s*([0-9,\s]*)\)?)?\s*$")


def parse_code(text):
    """Parse ``rep:5``, ``hamming:7``, ``exthamming:8``, ``rm:1,3`` / ``rm(1,3)``, ``random:n,k,seed``."""
    match = _DESCRIPTOR.match(text)
    if not match:
        raise ConfigInvalid(f"bad code descriptor {text!r}")
    name, args = match.group(1), match.group(2) or ""
    nums = [int(a) for a in args.replace(" ", "").split(",") if a]
    try:
        if name in ("rep", "repetition"):
            return repetition(*nums)
        if name == "hamming":
            return hamming(*nums)
        if name in ("exthamming", "extended-hamming"):
            return extended_hamming(*nums)
        if name in ("rm", "reed-muller"):
            return reed_muller(*nums)
        if name == "random":
            return random_linear(*nums)
    except TypeError as exc:
        raise ConfigInvalid(f"bad arguments in code descriptor {text!r}") from exc
    raise ConfigInvalid(f"unknown code family {name!r}")


# --------------------------------------------------------------- operations


def encode(code, msg):
    if len(msg) != code.k:
        raise LengthMismatch(f"message length {len(msg)} != k={code.k}")
    bits = to_bits(msg).astype(np.int64)
    return to_str(bits @ code.generator.astype(np.int64) % 2)


def codewords(code):
    """All codewords in lexicographic order."""
    if code.n <= 62:
        ints = np.sort(_kernels.span_ints(_row_ints(code)))
        return [format(int(v), f"0{code.n}b") for v in ints]
    return sorted(to_str(row) for row in code.codeword_matrix())


def _majority(ones, total):
    if 2 * ones > total:
        return 1
    if 2 * ones < total:
        return 0
    return None


def _decode_rm(code, bits):
    mu = code.params[1]
    n = code.n
    j = np.arange(n)
    coeffs = []
    for i in range(mu):
        b = 1 << (mu - 1 - i)
        low = j[(j & b) == 0]
        votes = int((bits[low] ^ bits[low | b]).sum())
        a = _majority(votes, low.size)
        if a is None:
            return None
        coeffs.append(a)
    affine = np.zeros(n, dtype=np.uint8)
    for a, row in zip(coeffs, code.generator[1:]):
        if a:
            affine ^= row
    a0 = _majority(int((bits ^ affine).sum()), n)
    if a0 is None:
        return None
    return affine ^ a0


def _decode_brute(code, bits):
    if code.k > BRUTE_FORCE_MAX_K:
        raise TooLarge(f"brute-force decoding needs k <= {BRUTE_FORCE_MAX_K}")
    cw = code.codeword_matrix()
    dist = (cw != bits).sum(axis=1)
    best = int(dist.argmin())
    return cw[best]


def decode(code, word):
    """Bounded-distance decode: the unique codeword within ``code.radius`` or Failure."""
    if len(word) != code.n:
        raise LengthMismatch(f"word length {len(word)} != n={code.n}")
    hit = code._cache.get(word)
    if hit is not None:
        return hit
    bits = to_bits(word)
    if code.family == "reed-muller":
        cand = _decode_rm(code, bits)
    else:
        cand = _decode_brute(code, bits)
    outcome = DecodeOutcome("Failure")
    if cand is not None:
        errors = np.flatnonzero(cand != bits)
        if errors.size <= code.radius:
            outcome = DecodeOutcome("Decoded", to_str(cand), tuple(int(e) for e in errors))
    if len(code._cache) >= _CACHE_LIMIT:
        code._cache.clear()
    code._cache[word] = outcome
    return outcome


def corrupted_indices(code, word):
    """Positions where ``word`` disagrees with its nearest codeword (the corruption indicator's support)."""
    out = decode(code, word)
    if not out.ok:
        raise NotDecodable(f"word is not within radius {code.radius} of any codeword of {code.tag}")
    return frozenset(out.error_positions)


def codeword_mask(code):
    if code.n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"n={code.n} exceeds exhaustive limit {EXHAUSTIVE_LIMIT}")
    mask = np.zeros(1 << code.n, dtype=bool)
    mask[_kernels.span_ints(_row_ints(code))] = True
    return mask


def min_distance(code):
    if code.n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"n={code.n} exceeds exhaustive limit {EXHAUSTIVE_LIMIT}")
    return _min_weight(code)


def covering_radius(code):
    if code.n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"n={code.n} exceeds exhaustive limit {EXHAUSTIVE_LIMIT}")
    return int(_kernels.distance_transform(codeword_mask(code), code.n).max())


def sphere_covering_holds(code, radius):
    """2^k * |ball(radius)| >= 2^n, which every covering radius must satisfy."""
    return (1 << code.k) * sum(comb(code.n, i) for i in range(radius + 1)) >= 1 << code.n
