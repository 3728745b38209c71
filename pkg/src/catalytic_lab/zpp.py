"""Dovetailed simulation of a machine pair and expected-runtime statistics."""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded, ConfigInvalid, LengthMismatch
from .machine import EXHAUSTIVE_LIMIT, Sample, all_words, run, sample_words

EXHAUSTIVE_C = 20


@dataclass
class DovetailResult:
    decision: str
    halter: str  # "M1" or "M2"
    interleaved_steps: int
    halter_steps: int

    def to_dict(self):
        return {"decision": self.decision, "halter": self.halter, "interleaved_steps": self.interleaved_steps}


def dovetail(M1, M2, input, w0, budget=None):
    """Alternate single steps M1, M2, M1, ... on two copies of w0 until one halts.

    If M1 halts at its step t1 first, t1 + (t1 - 1) steps were charged; if M2
    halts at its step t2 first, 2 * t2.
    """
    for M in (M1, M2):
        if len(w0) != M.catalytic_length:
            raise LengthMismatch(f"|w0|={len(w0)} but {M.machine_id} has catalytic length {M.catalytic_length}")
    if budget is None:
        budget = M1.default_budget(len(input)) + M2.default_budget(len(input))
    cfgs = [M1.initial(input, w0), M2.initial(input, w0)]
    machines = (M1, M2)
    counts = [0, 0]
    total = 0
    while True:
        for i in (0, 1):
            cfg = cfgs[i]
            if cfg.halted:
                return DovetailResult(cfg.phase, f"M{i + 1}", total, counts[i])
            if total >= budget:
                raise BudgetExceeded(f"dovetail: neither machine halted within {budget} interleaved steps", total)
            cfgs[i] = machines[i]._step(cfg)
            counts[i] += 1
            total += 1
            if cfgs[i].halted:
                return DovetailResult(cfgs[i].phase, f"M{i + 1}", total, counts[i])


@dataclass
class RuntimeStats:
    input: str
    mode: str
    steps: dict  # w -> interleaved steps
    t1: dict  # w -> standalone steps of M1 (None on budget failure)
    t2: dict
    in_A: dict  # w -> membership in M1's restoration set
    decisions: dict
    config_count_m1: int
    config_count_m2: int
    budget_failures: list = field(default_factory=list)
    decision_mismatches: list = field(default_factory=list)

    @property
    def mean(self):
        vals = [v for v in self.steps.values() if v is not None]
        return Fraction(sum(vals), len(vals)) if vals else None

    @property
    def sum_t1_on_A(self):
        if self.budget_failures:
            return None
        return sum(self.t1[w] for w, a in self.in_A.items() if a)

    @property
    def sum_t2_off_A(self):
        if self.budget_failures:
            return None
        return sum(self.t2[w] for w, a in self.in_A.items() if not a)

    @property
    def bound_checks_skipped(self):
        return bool(self.budget_failures)

    @property
    def bound_m1_holds(self):
        s = self.sum_t1_on_A
        return None if s is None else s <= self.config_count_m1

    @property
    def bound_m2_holds(self):
        s = self.sum_t2_off_A
        return None if s is None else s <= self.config_count_m2

    def histogram(self):
        return dict(sorted(Counter(v for v in self.steps.values() if v is not None).items()))

    def to_dict(self):
        mean = self.mean
        return {
            "input": self.input,
            "mode": self.mode,
            "words": len(self.steps),
            "mean_interleaved_steps": None if mean is None else str(mean),
            "mean_float": None if mean is None else float(mean),
            "max_interleaved_steps": max((v for v in self.steps.values() if v is not None), default=None),
            "histogram": {str(k): v for k, v in self.histogram().items()},
            "sum_t1_on_A": self.sum_t1_on_A,
            "sum_t2_off_A": self.sum_t2_off_A,
            "config_count_m1": str(self.config_count_m1),
            "config_count_m2": str(self.config_count_m2),
            "bound_m1_holds": self.bound_m1_holds,
            "bound_m2_holds": self.bound_m2_holds,
            "bound_checks_skipped": self.bound_checks_skipped,
            "budget_failures": self.budget_failures,
            "decision_mismatches": self.decision_mismatches,
        }


def audit_complementary(M1, M2):
    """At small length, check that M2's restoration set is exactly the complement of M1's."""
    A, B = M1.restoration_set(), M2.restoration_set()
    if A is None or B is None:
        raise ConfigInvalid("both machines must declare restoration sets")
    if A.m > EXHAUSTIVE_LIMIT:
        return None
    if (A.mask() == B.mask()).any():
        raise ConfigInvalid(f"{B.describe()} is not the complement of {A.describe()}")
    return True


def expected_runtime(M1, M2, input, mode="exhaustive", budget=None):
    """Dovetail over every (or a sample of) w and collect step statistics and the Σ-bounds."""
    c = M1.catalytic_length
    if mode == "exhaustive":
        if c > EXHAUSTIVE_C:
            raise ConfigInvalid(f"exhaustive mode needs catalytic length <= {EXHAUSTIVE_C}")
        words = all_words(c)
        label = "exhaustive"
    elif isinstance(mode, Sample):
        words = sorted(set(sample_words(c, mode.count, mode.seed)))
        label = mode.label
    else:
        words = list(mode)
        label = f"list[{len(words)}]"
    A = M1.restoration_set()
    stats = RuntimeStats(input, label, {}, {}, {}, {}, {},
                         M1.configuration_count(len(input)), M2.configuration_count(len(input)))
    for w in words:
        stats.in_A[w] = A.member(w)
        try:
            r1 = run(M1, input, w, budget)
            stats.t1[w] = r1.steps
        except BudgetExceeded:
            stats.t1[w] = None
            stats.budget_failures.append({"w": w, "machine": "M1"})
            r1 = None
        try:
            r2 = run(M2, input, w, budget)
            stats.t2[w] = r2.steps
        except BudgetExceeded:
            stats.t2[w] = None
            stats.budget_failures.append({"w": w, "machine": "M2"})
            r2 = None
        try:
            d = dovetail(M1, M2, input, w, budget)
            stats.steps[w] = d.interleaved_steps
            stats.decisions[w] = d.decision
        except BudgetExceeded:
            stats.steps[w] = None
            stats.decisions[w] = None
            continue
        standalone = {r.decision for r in (r1, r2) if r is not None}
        if standalone and standalone != {d.decision}:
            stats.decision_mismatches.append({"w": w, "dovetail": d.decision,
                                              "M1": r1 and r1.decision, "M2": r2 and r2.decision})
    return stats
