"""Tape/machine model, single-step semantics, and the global verifiers.

Conventions fixed here (the model leaves them open):

* The input tape holds ``<x>``: a left endmarker at cell 0, the input, and a
  right endmarker.  All heads start at cell 0.  Input-head moves are clamped to
  the endmarkers; a work head moving left of cell 0 stays at 0.
* A work head moving to cell ``space_bound`` raises WorkSpaceExceeded.
* Catalytic tapes are strings over the machine's catalytic alphabet.
"""

import json
import random
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from math import ceil, log2
from typing import NamedTuple

from .errors import (
    AlreadyHalted,
    BudgetExceeded,
    ConfigInvalid,
    HypothesisViolated,
    LengthMismatch,
    MachineError,
    TooLarge,
    UndefinedTransition,
    WorkSpaceExceeded,
)

BLANK = "_"
LEFT_END = "<"
RIGHT_END = ">"
HALTING = ("accept", "reject")
BUDGET_CAP = 10_000_000
EXHAUSTIVE_LIMIT = 24


# ------------------------------------------------------------------- tables


@dataclass
class MachineTable:
    """Deterministic finite control over a read-only input tape and one work tape.

    ``transitions`` maps (state, input symbol, work symbol) to
    (next state, work symbol written, input-head move, work-head move).
    """

    states: tuple
    transitions: dict
    accept_state: str
    reject_state: str
    space_bound: int
    start_state: str = None
    input_alphabet: tuple = ("0", "1")
    work_alphabet: tuple = ("0", "1", BLANK)
    blank: str = BLANK
    name: str = "table"

    def __post_init__(self):
        self.states = tuple(self.states)
        self.input_alphabet = tuple(self.input_alphabet)
        self.work_alphabet = tuple(self.work_alphabet)
        if self.start_state is None:
            self.start_state = self.states[0]
        if self.accept_state == self.reject_state:
            raise ConfigInvalid("accept_state and reject_state must differ")
        known = set(self.states)
        for s in (self.start_state, self.accept_state, self.reject_state):
            if s not in known:
                raise ConfigInvalid(f"state {s!r} not declared")
        if self.blank not in self.work_alphabet:
            raise ConfigInvalid("work alphabet must contain the blank")
        if self.space_bound < 0:
            raise ConfigInvalid("space_bound must be >= 0")
        readable = set(self.input_alphabet) | {LEFT_END, RIGHT_END}
        for (q, a, b), (nq, wr, di, dw) in self.transitions.items():
            if q in (self.accept_state, self.reject_state):
                raise ConfigInvalid(f"transition out of halting state {q!r}")
            if q not in known or nq not in known:
                raise ConfigInvalid(f"unknown state in transition {(q, a, b)}")
            if q in HALTING:
                raise ConfigInvalid(f"non-halting state may not be named {q!r}")
            if a not in readable or b not in self.work_alphabet or wr not in self.work_alphabet:
                raise ConfigInvalid(f"symbol outside alphabet in transition {(q, a, b)}")
            if di not in (-1, 0, 1) or dw not in (-1, 0, 1):
                raise ConfigInvalid(f"head move outside {{-1,0,1}} in transition {(q, a, b)}")

    def halting(self, state):
        return state in (self.accept_state, self.reject_state)

    def missing_transitions(self):
        readable = self.input_alphabet + (LEFT_END, RIGHT_END)
        return [
            key
            for key in product(self.states, readable, self.work_alphabet)
            if not self.halting(key[0]) and key not in self.transitions
        ]

    def is_total(self):
        return not self.missing_transitions()

    def lookup(self, state, a, b):
        try:
            return self.transitions[(state, a, b)]
        except KeyError:
            raise UndefinedTransition(f"{self.name}: no transition for {(state, a, b)}") from None

    def to_dict(self):
        return {
            "name": self.name,
            "states": list(self.states),
            "start": self.start_state,
            "input_alphabet": list(self.input_alphabet),
            "work_alphabet": list(self.work_alphabet),
            "blank": self.blank,
            "transitions": [
                [q, [a, b], nq, wr, [di, dw]]
                for (q, a, b), (nq, wr, di, dw) in sorted(self.transitions.items())
            ],
            "accept": self.accept_state,
            "reject": self.reject_state,
            "space_bound": self.space_bound,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        transitions = {}
        for t in data["transitions"]:
            if len(t) == 5:
                q, (a, b), nq, wr, (di, dw) = t
            elif len(t) == 7:
                q, a, b, nq, wr, di, dw = t
            else:
                raise ConfigInvalid(f"transition must have 5 (grouped) or 7 fields: {t}")
            if (q, a, b) in transitions:
                raise ConfigInvalid(f"duplicate transition for {(q, a, b)}")
            transitions[(q, a, b)] = (nq, wr, int(di), int(dw))
        return cls(
            states=data["states"],
            transitions=transitions,
            accept_state=data["accept"],
            reject_state=data["reject"],
            space_bound=int(data["space_bound"]),
            start_state=data.get("start"),
            input_alphabet=data.get("input_alphabet", ("0", "1")),
            work_alphabet=data.get("work_alphabet", ("0", "1", BLANK)),
            blank=data.get("blank", BLANK),
            name=data.get("name", "table"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------- configurations


class Configuration(NamedTuple):
    machine_id: str
    phase: str
    input: str
    input_head: int
    work_head: int
    catalytic_head: int
    work_tape: str
    catalytic_tape: str
    aux: tuple

    @property
    def halted(self):
        return self.phase in HALTING

    def serialize(self):
        """Canonical, injective text form."""
        return json.dumps(list(self[:8]) + [list(self.aux)], separators=(",", ":"))


@dataclass
class RunResult:
    decision: str
    steps: int
    final_catalytic: str
    trace_digest: list = None
    phases: list = None

    def to_dict(self):
        out = {"decision": self.decision, "steps": self.steps, "final_catalytic": self.final_catalytic}
        if self.trace_digest is not None:
            out["trace_digest"] = self.trace_digest
        return out


def input_symbol(x, head):
    if head == 0:
        return LEFT_END
    if head > len(x):
        return RIGHT_END
    return x[head - 1]


def move_input(x, head, d):
    return min(max(head + d, 0), len(x) + 1)


def _bits(size):
    return ceil(log2(size)) if size > 1 else 0


class AlmostCatalyticMachine(ABC):
    """A deterministic machine with a catalytic tape, steppable configuration by configuration.

    Subclasses implement ``_step`` and ``initial``.  ``aux_spec(n)`` lists the
    bounded counters kept in ``Configuration.aux`` as (name, range, scales);
    counters flagged ``scales`` are the ones charged against the logspace budget.
    """

    machine_id = "machine"
    catalytic_length = 0
    catalytic_alphabet = "01"
    phases = ()

    @abstractmethod
    def _step(self, cfg):
        ...

    def initial(self, x, w0):
        return Configuration(self.machine_id, self.phases[0], x, 0, 0, 0, "", w0, self.initial_aux())

    def initial_aux(self):
        return ()

    def aux_spec(self, n):
        return []

    def work_configurations(self):
        return 1

    def configuration_count(self, n):
        """Upper bound on the number of distinct configurations on inputs of length n."""
        count = (len(self.phases) + 2) * (n + 2) * (self.catalytic_length + 1)
        count *= self.work_configurations()
        for _, size, _ in self.aux_spec(n):
            count *= size
        return count * len(self.catalytic_alphabet) ** self.catalytic_length

    def aux_bits(self, n=0):
        return sum(_bits(size) for _, size, scales in self.aux_spec(n) if scales)

    def audit_aux(self, multiple=8):
        budget = multiple * max(1, _bits(self.catalytic_length))
        used = self.aux_bits()
        if used > budget:
            raise ConfigInvalid(
                f"{self.machine_id}: auxiliary state needs {used} bits, budget is {budget} "
                f"({multiple} x log2 of catalytic length {self.catalytic_length})"
            )
        return used

    def restoration_set(self):
        return None

    def reference_decision(self, x):
        raise NotImplementedError(f"{self.machine_id} has no reference decision oracle")

    def default_budget(self, n):
        return min(10 * self.configuration_count(n), BUDGET_CAP)


class TableMachine(AlmostCatalyticMachine):
    """A plain table machine (no catalytic tape).

    With ``initial_work`` the work tape starts from that content instead of
    blanks; with ``binary_work`` written blanks are stored as ``0``, which is
    exactly how the restoration engines present a region of catalytic cells.
    """

    def __init__(self, table, initial_work=None, binary_work=False):
        self.table = table
        self.machine_id = f"table:{table.name}"
        self.phases = tuple(s for s in table.states if not table.halting(s))
        if initial_work is not None and len(initial_work) != table.space_bound:
            raise LengthMismatch("initial work content must fill the space bound")
        self.initial_work = initial_work if initial_work is not None else table.blank * table.space_bound
        self.binary_work = binary_work

    def initial(self, x, w0=""):
        if w0:
            raise LengthMismatch("table machines have no catalytic tape")
        return Configuration(self.machine_id, self.table.start_state, x, 0, 0, 0, self.initial_work, "", ())

    def work_configurations(self):
        s = self.table.space_bound
        return max(1, s) * len(self.table.work_alphabet) ** s

    def configuration_count(self, n):
        return len(self.table.states) * (n + 2) * self.work_configurations()

    def _step(self, cfg):
        t = self.table
        wh = cfg.work_head
        work = cfg.work_tape
        b = work[wh] if t.space_bound else t.blank
        nq, wr, di, dw = t.lookup(cfg.phase, input_symbol(cfg.input, cfg.input_head), b)
        if self.binary_work and wr == t.blank:
            wr = "0"
        if t.space_bound:
            work = work[:wh] + wr + work[wh + 1:]
        elif wr != t.blank:
            raise WorkSpaceExceeded(f"{t.name}: write with space bound 0")
        nwh = max(wh + dw, 0)
        if nwh >= max(t.space_bound, 1):
            raise WorkSpaceExceeded(f"{t.name}: work head moved to cell {nwh}, space bound {t.space_bound}")
        phase = "accept" if nq == t.accept_state else "reject" if nq == t.reject_state else nq
        return cfg._replace(phase=phase, input_head=move_input(cfg.input, cfg.input_head, di),
                            work_head=nwh, work_tape=work)

    def reference_decision(self, x):
        return run(TableMachine(self.table), x, "").decision


def step(machine, cfg):
    """The unique successor configuration."""
    if cfg.halted:
        raise AlreadyHalted(f"{machine.machine_id}: configuration is halted ({cfg.phase})")
    return machine._step(cfg)


def run(machine, input, w0, budget=None, trace=False):
    if len(w0) != machine.catalytic_length:
        raise LengthMismatch(f"|w0|={len(w0)} but catalytic length is {machine.catalytic_length}")
    if w0.strip(machine.catalytic_alphabet):
        raise LengthMismatch(f"w0 has symbols outside {machine.catalytic_alphabet!r}")
    if budget is None:
        budget = machine.default_budget(len(input))
    if budget <= 0:
        raise ValueError("budget must be positive")
    cfg = machine.initial(input, w0)
    digest = [cfg.serialize()] if trace else None
    phases = [cfg.phase] if trace else None
    steps = 0
    do_step = machine._step
    while not cfg.halted:
        if steps >= budget:
            raise BudgetExceeded(f"{machine.machine_id}: no halt within {budget} steps", steps)
        cfg = do_step(cfg)
        steps += 1
        if trace:
            digest.append(cfg.serialize())
            phases.append(cfg.phase)
    return RunResult(cfg.phase, steps, cfg.catalytic_tape, digest, phases)


def phase_sequence(phases):
    """Phase tags with consecutive repeats collapsed."""
    out = []
    for p in phases:
        tag = p.split(":")[0]
        if not out or out[-1] != tag:
            out.append(tag)
    return out


# ----------------------------------------------------------- verification


@dataclass(frozen=True)
class Sample:
    count: int
    seed: int = 0

    @property
    def label(self):
        return f"sample:{self.count}:seed={self.seed}"


def all_words(c, alphabet="01"):
    if len(alphabet) ** c > 1 << EXHAUSTIVE_LIMIT:
        raise TooLarge(f"{len(alphabet)}^{c} catalytic contents")
    return ["".join(t) for t in product(alphabet, repeat=c)]


def sample_words(c, count, seed, alphabet="01"):
    rng = random.Random(seed)
    return ["".join(rng.choice(alphabet) for _ in range(c)) for _ in range(count)]


def resolve_words(machine, A, mode):
    c = machine.catalytic_length
    if mode == "exhaustive":
        return all_words(c)
    if mode == "members":
        return list(A.enumerate())
    if isinstance(mode, Sample):
        return sample_words(c, mode.count, mode.seed, machine.catalytic_alphabet)
    return list(mode)


@dataclass
class CaseRecord:
    input: str
    w: str
    in_set: bool
    decision: str = None
    expected: str = None
    restored: bool = None
    steps: int = None
    failure: str = None  # restoration | acceptance | budget | error
    detail: str = None
    final: str = None


@dataclass
class VerificationReport:
    machine_id: str
    catalytic_set: str
    mode: str
    cases: list = field(default_factory=list)

    @property
    def overall_pass(self):
        return all(c.failure is None for c in self.cases)

    def failures(self, kind=None):
        return [c for c in self.cases if c.failure and (kind is None or c.failure == kind)]

    def summary(self):
        kinds = ("restoration", "acceptance", "budget", "error")
        return {
            "cases": len(self.cases),
            "members_tested": sum(c.in_set for c in self.cases),
            **{f"{k}_failures": len(self.failures(k)) for k in kinds},
        }

    def to_dict(self, include_passing=True):
        cases = self.cases if include_passing else self.failures()
        return {
            "machine": self.machine_id,
            "set": self.catalytic_set,
            "mode": self.mode,
            "overall_pass": self.overall_pass,
            "summary": self.summary(),
            "cases": [{k: v for k, v in asdict(c).items() if v is not None} for c in cases],
        }


def _check_case(machine, A, x, w, expected, budget):
    rec = CaseRecord(x, w, A.member(w) if not w.strip("01") else False, expected=expected)
    try:
        res = run(machine, x, w, budget)
    except BudgetExceeded as exc:
        rec.failure, rec.detail, rec.steps = "budget", str(exc), exc.steps
        return rec
    except MachineError as exc:
        rec.failure, rec.detail = "error", f"{type(exc).__name__}: {exc}"
        return rec
    rec.decision, rec.steps = res.decision, res.steps
    if rec.in_set:
        rec.restored = res.final_catalytic == w
        if not rec.restored:
            rec.failure, rec.final = "restoration", res.final_catalytic
    if rec.failure is None and res.decision != expected:
        rec.failure = "acceptance"
        rec.final = res.final_catalytic
    return rec


def _check_batch(args):
    machine, A, jobs, budget = args
    return [_check_case(machine, A, x, w, exp, budget) for x, w, exp in jobs]


def verify_restoration(machine, A=None, inputs=("",), mode="exhaustive", oracle=None, budget=None, jobs=1):
    """Run every (input, w) pair; check restoration for w in A and the decision for every w."""
    A = A if A is not None else machine.restoration_set()
    if A is None:
        raise ConfigInvalid(f"{machine.machine_id} declares no restoration set; pass one")
    if A.m != machine.catalytic_length:
        raise LengthMismatch(f"set has length {A.m}, catalytic length is {machine.catalytic_length}")
    oracle = oracle or machine.reference_decision
    words = resolve_words(machine, A, mode)
    work = []
    for x in inputs:
        expected = oracle(x)
        work.extend((x, w, expected) for w in words)
    if jobs > 1 and len(work) > 1:
        size = -(-len(work) // (jobs * 4))
        chunks = [(machine, A, work[i:i + size], budget) for i in range(0, len(work), size)]
        with ProcessPoolExecutor(jobs) as pool:
            cases = [rec for batch in pool.map(_check_batch, chunks) for rec in batch]
    else:
        cases = _check_batch((machine, A, work, budget))
    label = mode if isinstance(mode, str) else mode.label if isinstance(mode, Sample) else f"list[{len(words)}]"
    return VerificationReport(machine.machine_id, A.describe(), label, cases)


@dataclass
class DisjointnessReport:
    machine_id: str
    input: str
    members: int
    passed: bool
    collisions: list
    collision_count: int
    total_configs_visited: int  # sum over w in A of t(x, w)
    distinct_configurations: int
    configuration_count: int
    restoration_failures: list = field(default_factory=list)

    @property
    def bound_holds(self):
        return self.total_configs_visited <= self.configuration_count

    def to_dict(self):
        out = asdict(self)
        out["bound_holds"] = self.bound_holds
        out["configuration_count"] = str(self.configuration_count)
        return out


def check_configuration_disjointness(machine, A=None, input="", budget=None, check_hypothesis=True,
                                     max_witnesses=10):
    """Runs from distinct restorable contents must never share a configuration.

    With ``check_hypothesis=False`` the restoration precondition is not enforced,
    so collisions of non-restoring machines are reported instead of raising.
    """
    A = A if A is not None else machine.restoration_set()
    members = list(A.enumerate())
    origin = {}
    collisions = []
    collision_count = 0
    total = 0
    bad = []
    for w in members:
        res = run(machine, input, w, budget, trace=True)
        if res.final_catalytic != w:
            if check_hypothesis:
                raise HypothesisViolated(f"{machine.machine_id} does not restore {w} on input {input!r}", w)
            bad.append(w)
        total += res.steps
        seen_here = set()
        for s in res.trace_digest:
            if s in seen_here:
                continue
            seen_here.add(s)
            prev = origin.setdefault(s, w)
            if prev != w:
                collision_count += 1
                if len(collisions) < max_witnesses:
                    collisions.append({"w": prev, "w_prime": w, "configuration": s})
    return DisjointnessReport(
        machine.machine_id,
        input,
        len(members),
        collision_count == 0,
        collisions,
        collision_count,
        total,
        len(origin),
        machine.configuration_count(len(input)),
        bad,
    )


# -------------------------------------------------------------- fixture lint


def lint_scratch_independence(table, inputs, exhaustive_limit=10, samples=64, seed=0):
    """Check that ``table`` decides the same way from any binary initial work content.

    Engines hand inner machines catalytic cells, not blanks, so an inner
    machine is only usable if its decision ignores initial scratch content.
    """
    s = table.space_bound
    if s <= exhaustive_limit:
        scratches = all_words(s)
    else:
        scratches = sample_words(s, samples, seed)
    reference = TableMachine(table)
    for x in inputs:
        want = run(reference, x, "").decision
        for scratch in scratches:
            got = run(TableMachine(table, scratch, binary_work=True), x, "").decision
            if got != want:
                raise ConfigInvalid(
                    f"{table.name} depends on scratch content: input {x!r}, scratch {scratch} "
                    f"gives {got}, blank tape gives {want}"
                )
    return True
