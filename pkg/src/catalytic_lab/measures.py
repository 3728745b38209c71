"""Subcube partition complexity, random projection complexity, and exact Fourier spectra.

Points of {0,1}^m are integers with coordinate 0 as the most significant bit,
so ``int(w, 2)`` indexes masks.  Subsets S of coordinates use the same
convention.
"""

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import ConfigInvalid, LengthMismatch, TooLarge

MAX_M = 24
PARTITION_MAX_M = 14
PROJECTION_EXHAUSTIVE_M = 20
SPECTRUM_MAX_M = 20


# ----------------------------------------------------------------- sets


@dataclass(frozen=True, eq=False)
class BitVectorSet:
    m: int
    mask: np.ndarray

    def __post_init__(self):
        if not 0 <= self.m <= MAX_M:
            raise TooLarge(f"m={self.m} outside [0, {MAX_M}]")
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        if mask.shape != (1 << self.m,):
            raise LengthMismatch(f"mask has {mask.size} entries, expected 2^{self.m}")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_points(cls, m, points):
        mask = np.zeros(1 << m, dtype=bool)
        idx = [int(p, 2) if isinstance(p, str) else int(p) for p in points]
        if isinstance(points, (list, tuple)) and any(isinstance(p, str) and len(p) != m for p in points):
            raise LengthMismatch(f"points must have length {m}")
        mask[idx] = True
        return cls(m, mask)

    @classmethod
    def from_set(cls, catalytic_set):
        return cls(catalytic_set.m, catalytic_set.mask())

    @classmethod
    def from_hex(cls, text, m=None):
        text = "".join(text.split())
        raw = np.unpackbits(np.frombuffer(bytes.fromhex(text), dtype=np.uint8))
        if m is None:
            m = int(raw.size).bit_length() - 1
            if raw.size != 1 << m or m < 3:
                raise ConfigInvalid("cannot infer m from the hex mask; pass m explicitly")
        if raw.size < 1 << m or raw[1 << m:].any():
            raise LengthMismatch(f"hex mask does not encode exactly 2^{m} bits")
        return cls(m, raw[: 1 << m].astype(bool))

    def to_hex(self):
        return np.packbits(self.mask.astype(np.uint8)).tobytes().hex()

    def points(self):
        return np.flatnonzero(self.mask).astype(np.int64)

    def words(self):
        return [format(int(p), f"0{self.m}b") for p in self.points()]

    @property
    def size(self):
        return int(self.mask.sum())

    def __len__(self):
        return self.size

    def __contains__(self, w):
        if len(w) != self.m:
            raise LengthMismatch(f"|w|={len(w)} but m={self.m}")
        return bool(self.mask[int(w, 2)]) if self.m else bool(self.mask[0])

    def __eq__(self, other):
        return isinstance(other, BitVectorSet) and self.m == other.m and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.m, self.mask.tobytes()))

    def issubset(self, other):
        return self.m == other.m and not (self.mask & ~other.mask).any()

    def union(self, other):
        if self.m != other.m:
            raise LengthMismatch("dimension mismatch")
        return BitVectorSet(self.m, self.mask | other.mask)


def _as_bvs(A):
    return A if isinstance(A, BitVectorSet) else BitVectorSet.from_set(A)


def xor_shift(A, z):
    """{a xor z : a in A}."""
    A = _as_bvs(A)
    if len(z) != A.m:
        raise LengthMismatch(f"|z|={len(z)} but m={A.m}")
    shift = int(z, 2) if z else 0
    idx = np.arange(1 << A.m, dtype=np.int64) ^ shift
    return BitVectorSet(A.m, A.mask[idx])


def ball_union(centers, k, m=None):
    centers = list(centers)
    if m is None:
        if not centers:
            raise ConfigInvalid("need m when there are no centers")
        m = len(centers[0])
    if any(len(c) != m for c in centers):
        raise LengthMismatch("centers must share one length")
    src = np.zeros(1 << m, dtype=bool)
    if not centers:
        return BitVectorSet(m, src)
    src[[int(c, 2) for c in centers]] = True
    return BitVectorSet(m, _kernels.distance_transform(src, m) <= k)


def threshold_set(m, k):
    """Support of Th_{m,k}: strings of weight at most k."""
    return BitVectorSet(m, _kernels.popcount(np.arange(1 << m)) <= k)


# --------------------------------------------------- partition complexity


@dataclass(frozen=True)
class Subcube:
    pattern: str

    @property
    def free(self):
        return self.pattern.count("*")

    def points(self):
        fixed = int(self.pattern.replace("*", "0"), 2)
        stars = [len(self.pattern) - 1 - i for i, ch in enumerate(self.pattern) if ch == "*"]
        out = []
        for sub in range(1 << len(stars)):
            v = fixed
            for j, bit in enumerate(stars):
                if sub >> j & 1:
                    v |= 1 << bit
            out.append(v)
        return sorted(out)

    def __str__(self):
        return self.pattern


def _cube_pattern(point, free, m):
    return "".join("*" if free >> (m - 1 - i) & 1 else str(point >> (m - 1 - i) & 1) for i in range(m))


@dataclass
class PartitionResult:
    value: int
    witness: list
    lower_bound: int = None
    method: str = ""
    nodes: int = 0

    def to_dict(self):
        return {"value": self.value, "witness": [s.pattern for s in self.witness], "method": self.method}


def check_partition(A, witness):
    """True iff the subcubes are disjoint, inside A, and cover A."""
    A = _as_bvs(A)
    hit = np.zeros(1 << A.m, dtype=np.int64)
    for cube in witness:
        pts = cube.points()
        hit[pts] += 1
    return bool(np.array_equal(hit > 0, A.mask) and hit.max(initial=0) <= 1)


def _dt_witness(counts, dt, m):
    pow3 = [3 ** (m - 1 - i) for i in range(m)]
    out = []
    stack = [3 ** m - 1]
    while stack:
        t = stack.pop()
        c = int(counts[t])
        if c == 0:
            continue
        digits = [(t // q) % 3 for q in pow3]
        if c == 1 << digits.count(2):
            out.append(Subcube("".join("*" if d == 2 else str(d) for d in digits)))
            continue
        for i, q in enumerate(pow3):
            if digits[i] == 2 and dt[t - 2 * q] + dt[t - q] == dt[t]:
                stack += [t - 2 * q, t - q]
                break
    return out


def _span(p, free):
    """Points of the subcube through p with free coordinates ``free`` (a bitmask)."""
    out = [p & ~free]
    bit = 1
    while bit <= free:
        if free & bit:
            out += [v | bit for v in out]
        bit <<= 1
    return out


def _cubes_at(p, rem, m):
    """Free-coordinate masks F with subcube(p, F) inside ``rem``, largest first."""
    found = []
    stack = [(0, 0)]  # (free mask, next coordinate bit index to consider)
    while stack:
        free, start = stack.pop()
        found.append(free)
        pts = _span(p, free)
        for b in range(start, m):
            bit = 1 << b
            if all(rem[v ^ bit] for v in pts):
                stack.append((free | bit, b + 1))
    found.sort(key=lambda f: (-bin(f).count("1"), f))
    return found


def _greedy_independent(compat):
    """Greedy set of pairwise incompatible points, lowest compatibility degree first."""
    order = np.argsort(compat.sum(axis=1), kind="stable")
    blocked = np.zeros(compat.shape[0], dtype=bool)
    size = 0
    for i in order:
        if not blocked[i]:
            size += 1
            blocked |= compat[i]
    return size


class _PartitionSearch:
    """Branch and bound over subcubes through the least-covered remaining point.

    Every node recomputes the subcube table of the remaining set, which yields
    the subcubes available to each point, a decision-tree upper bound, and a
    lower bound from pairwise incompatible points.
    """

    MATRIX_LIMIT = 1 << 22

    def __init__(self, m, max_nodes):
        self.m = m
        self.max_nodes = max_nodes
        x = np.arange(1 << m, dtype=np.int64)
        self.b3 = np.zeros(1 << m, dtype=np.int64)
        for j in range(m):
            self.b3 += ((x >> j) & 1) * 3 ** j
        self.free = x
        self.free_size = _kernels.popcount(x)
        total = 3 ** m
        self.stars = np.zeros(total, dtype=np.int64)
        t = np.arange(total, dtype=np.int64)
        for j in range(m):
            self.stars += (t // 3 ** j) % 3 == 2
        self.top = total - 1
        self.memo = {}
        self.nodes = 0
        self.best = None
        self.witness = None
        self.chosen = []

    def _pattern_index(self, pts, free):
        return self.b3[pts & ~free] + 2 * self.b3[free]

    def _node(self, rem):
        m = self.m
        counts, dt = _kernels.subcube_tables(rem, m)
        full = (counts > 0) & (counts == (1 << self.stars))
        pts = np.flatnonzero(rem).astype(np.int64)
        depth = len(self.chosen)
        if depth + int(dt[self.top]) < self.best:
            self.best = depth + int(dt[self.top])
            self.witness = [Subcube(_cube_pattern(p, f, m)) for p, f in self.chosen] + _dt_witness(counts, dt, m)
        lb = -(-pts.size // (1 << int(self.stars[full].max())))
        n = pts.size
        if n * (1 << m) <= self.MATRIX_LIMIT and n * n <= self.MATRIX_LIMIT:
            diff = pts[:, None] ^ pts[None, :]
            compat = full[self.b3[pts[:, None] & ~diff] + 2 * self.b3[diff]]
            lb = max(lb, _greedy_independent(compat))
            through = full[self._pattern_index(pts[:, None], self.free[None, :])]
            i = int(np.argmin(through.sum(axis=1)))
            p = int(pts[i])
            frees = self.free[through[i]]
            frees = frees[np.lexsort((frees, -self.free_size[frees]))]
            return lb, p, [int(f) for f in frees]
        p = int(pts[0])
        return lb, p, _cubes_at(p, rem, m)

    def search(self, rem):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise TooLarge(f"partition search exceeded {self.max_nodes} nodes")
        if not rem.any():
            return
        depth = len(self.chosen)
        key = rem.tobytes()
        seen = self.memo.get(key)
        if seen is not None and seen <= depth:
            return
        self.memo[key] = depth
        lb, p, frees = self._node(rem)
        if depth + lb >= self.best:
            return
        for free in frees:
            if depth + max(lb, 1) >= self.best:
                return
            cube = _span(p, free)
            rem[cube] = False
            self.chosen.append((p, free))
            self.search(rem)
            self.chosen.pop()
            rem[cube] = True


ILP_MAX_NONZEROS = 5_000_000


def _full_patterns(counts, stars):
    return np.flatnonzero((counts > 0) & (counts == (1 << stars)))


def _pattern_parts(t, m):
    """(fixed bits, free mask) of ternary pattern indices."""
    fixed = np.zeros_like(t)
    free = np.zeros_like(t)
    for j in range(m):
        digit = (t // 3 ** j) % 3
        fixed |= (digit == 1).astype(np.int64) << j
        free |= (digit == 2).astype(np.int64) << j
    return fixed, free


def _solve_ilp(A, counts, stars):
    """Exact cover with the fewest subcubes as a 0/1 program (HiGHS through scipy)."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix

    m = A.m
    cubes = _full_patterns(counts, stars)
    nnz = int((1 << stars[cubes]).sum())
    if nnz > ILP_MAX_NONZEROS:
        return None
    fixed, free = _pattern_parts(cubes, m)
    pts = A.points()
    row_of = np.full(1 << m, -1, dtype=np.int64)
    row_of[pts] = np.arange(pts.size)
    rows, cols = [], []
    for c, (f, fr) in enumerate(zip(fixed.tolist(), free.tolist())):
        span = _span(f, fr)
        rows.extend(row_of[span].tolist())
        cols.extend([c] * len(span))
    incidence = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(pts.size, cubes.size))
    res = milp(np.ones(cubes.size), constraints=LinearConstraint(incidence, 1, 1),
               integrality=np.ones(cubes.size), bounds=Bounds(0, 1))
    if not res.success:
        return None
    picked = np.flatnonzero(res.x > 0.5)
    return [Subcube(_cube_pattern(int(fixed[c]), int(free[c]), m)) for c in picked]


def partition_complexity(A, max_nodes=None, method="auto"):
    """Minimum number of disjoint subcubes inside A whose union is A, with a witness.

    ``method``: "auto" (bounds, then the 0/1 program, then branch and bound),
    "ilp", or "bnb".
    """
    A = _as_bvs(A)
    m = A.m
    if m > PARTITION_MAX_M:
        raise TooLarge(f"exact partition solver is limited to m <= {PARTITION_MAX_M}")
    if method not in ("auto", "ilp", "bnb"):
        raise ConfigInvalid(f"unknown partition method {method!r}")
    if not A.mask.any():
        return PartitionResult(0, [], 0, "empty")
    solver = _PartitionSearch(m, max_nodes)
    solver.best = A.size + 1
    rem = A.mask.copy()
    lb, _, _ = solver._node(rem)
    if lb >= solver.best:
        return PartitionResult(solver.best, solver.witness, lb, "bounds")
    if method in ("auto", "ilp"):
        counts, _ = _kernels.subcube_tables(A.mask, m)
        witness = _solve_ilp(A, counts, solver.stars)
        if witness is not None:
            if len(witness) > solver.best or len(witness) < lb:
                raise AssertionError("0/1 program disagrees with the combinatorial bounds")
            return PartitionResult(len(witness), witness, lb, "ilp")
        if method == "ilp":
            raise TooLarge("0/1 program too large or not solved")
    solver.search(rem)
    return PartitionResult(solver.best, solver.witness, lb, "branch-and-bound", solver.nodes)


# -------------------------------------------------- projection complexity


def parse_fraction(text):
    return Fraction(text)


@dataclass
class ProjectionStats:
    m: int
    epsilon: str
    value: int
    fractions: dict  # ell -> Fraction
    samples: dict = field(default_factory=dict)  # ell -> sample count (Monte Carlo only)
    exact: bool = True

    def to_dict(self):
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "value": self.value,
            "exact": self.exact,
            "fractions": {str(k): str(v) for k, v in sorted(self.fractions.items())},
            **({"samples": {str(k): v for k, v in sorted(self.samples.items())}} if self.samples else {}),
        }


def _meets(frac, epsilon, alpha, m):
    """frac >= 1 - epsilon, with epsilon either a rational or 2^(-alpha*m)."""
    if alpha is None:
        return frac >= 1 - epsilon
    alpha = Fraction(alpha)
    gap = 1 - frac
    if gap <= 0:
        return True
    # gap <= 2^(-p m / q)  <=>  gap^q <= 2^(-p m)
    return gap ** alpha.denominator <= Fraction(1, 2 ** (alpha.numerator * m))


def _subset_masks(m, ell):
    return np.array([sum(1 << (m - 1 - i) for i in T) for T in combinations(range(m), ell)], dtype=np.int64)


def projection_complexity(A, epsilon=None, alpha=None, samples=4096, seed=0, exhaustive=None):
    """R_epsilon(A): the largest ell whose random ell-projections hit at least 2^(ell-1) strings with probability >= 1 - epsilon.

    Give either ``epsilon`` (a rational) or ``alpha`` (epsilon = 2^(-alpha m)).
    Above m = 20 the fractions are seeded Monte Carlo estimates.
    """
    A = _as_bvs(A)
    m = A.m
    if (epsilon is None) == (alpha is None):
        raise ConfigInvalid("give exactly one of epsilon and alpha")
    if epsilon is not None:
        epsilon = Fraction(epsilon)
        if not 0 <= epsilon <= 1:
            raise ConfigInvalid("epsilon must lie in [0, 1]")
        label = str(epsilon)
    else:
        label = f"2^(-{Fraction(alpha)}*{m})"
    if exhaustive is None:
        exhaustive = m <= PROJECTION_EXHAUSTIVE_M
    elif exhaustive and m > PROJECTION_EXHAUSTIVE_M:
        raise TooLarge(f"exhaustive projection sweep is limited to m <= {PROJECTION_EXHAUSTIVE_M}")
    points = A.points()
    rng = random.Random(seed)
    fractions, counts = {}, {}
    value = 0
    for ell in range(m + 1):
        total = math.comb(m, ell)
        if exhaustive or total <= samples:
            tmasks = _subset_masks(m, ell)
        else:
            picks = [rng.sample(range(m), ell) for _ in range(samples)]
            tmasks = np.array([sum(1 << (m - 1 - i) for i in T) for T in picks], dtype=np.int64)
            counts[ell] = samples
        sizes = _kernels.projection_counts(points, tmasks, m)
        hits = int((2 * sizes >= (1 << ell)).sum())
        frac = Fraction(hits, len(tmasks))
        fractions[ell] = frac
        if _meets(frac, epsilon, alpha, m):
            value = ell
    return ProjectionStats(m, label, value, fractions, counts, exact=not counts)


def projection_complexity_bruteforce(A, epsilon):
    """Direct reference: project every member onto every T as a string."""
    A = _as_bvs(A)
    words = A.words()
    value = 0
    for ell in range(A.m + 1):
        subsets = list(combinations(range(A.m), ell))
        hits = sum(len({"".join(w[i] for i in T) for w in words}) >= 2 ** ell / 2 for T in subsets)
        if Fraction(hits, len(subsets)) >= 1 - Fraction(epsilon):
            value = ell
    return value


# ------------------------------------------------------------- spectra


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    """Fourier coefficients of f: {0,1}^m -> {-1,+1}, stored as integer numerators over 2^m."""

    m: int
    numerators: np.ndarray

    @property
    def scale(self):
        return 1 << self.m

    def coefficient(self, S):
        """S as a bitmask, an iterable of coordinates, or a 0/1 string."""
        if isinstance(S, str):
            idx = int(S, 2) if S else 0
        elif isinstance(S, (int, np.integer)):
            idx = int(S)
        else:
            idx = sum(1 << (self.m - 1 - i) for i in S)
        return Fraction(int(self.numerators[idx]), self.scale)

    def parseval_holds(self):
        total = sum(int(v) * int(v) for v in self.numerators)
        return total == self.scale * self.scale

    def nonzero(self):
        return {format(int(s), f"0{self.m}b"): self.coefficient(int(s)) for s in np.flatnonzero(self.numerators)}

    def to_dict(self):
        return {"m": self.m, "scale": self.scale,
                "coefficients": {k: str(v) for k, v in self.nonzero().items()}}


def wht_spectrum(A):
    """Spectrum of f = -1 on A, +1 elsewhere."""
    A = _as_bvs(A)
    if A.m > SPECTRUM_MAX_M:
        raise TooLarge(f"spectrum is limited to m <= {SPECTRUM_MAX_M}")
    f = np.where(A.mask, -1, 1).astype(np.int64)
    return SpectrumTable(A.m, _kernels.fwht(f))


def spectral_l1(spec):
    return Fraction(int(np.abs(spec.numerators).sum()), spec.scale)


@dataclass
class GotsmanLinialResult:
    m: int
    k: int
    value: Fraction
    holds: bool
    empty_coefficient: Fraction
    singleton_coefficients: list

    def to_dict(self):
        return {"m": self.m, "k": self.k, "value": str(self.value), "holds": self.holds,
                "empty": str(self.empty_coefficient),
                "singletons": [str(c) for c in self.singleton_coefficients]}


def gotsman_linial_check(m, k):
    """Exact f^(empty)^2 + sum_i f^({i})^2 for Th_{m,k} (-1 iff weight <= k), compared with 1/2."""
    if not 0 <= k < m:
        raise ConfigInvalid("need 0 <= k < m")
    spec = wht_spectrum(threshold_set(m, k))
    empty = spec.coefficient(0)
    singles = [spec.coefficient(1 << (m - 1 - i)) for i in range(m)]
    value = empty * empty + sum(c * c for c in singles)
    return GotsmanLinialResult(m, k, value, value >= Fraction(1, 2), empty, singles)


def ball_lower_bound_holds(m, value):
    """value >= sqrt(m)/2, compared exactly."""
    return 4 * value * value >= m
