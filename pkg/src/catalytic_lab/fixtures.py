"""Shipped inner machines and deliberately broken fixtures.

Every inner table here decides the same way whatever its scratch cells hold
initially, which is what the restoration engines require of an inner machine.
"""

from .engines import ACCEPT, REJECT, FullDecodeEngine, InnerHost, ParityRestoreEngine, _halt
from .errors import ConfigInvalid
from .machine import BLANK, LEFT_END, RIGHT_END, AlmostCatalyticMachine, Configuration, MachineTable
from .setlang import All

READ = ("0", "1", LEFT_END, RIGHT_END)
CELLS = ("0", "1", BLANK)


def _table(name, states, rule, space_bound, start=None):
    """Build a total table from ``rule(state, a, b) -> (next, write, di, dw)``."""
    transitions = {}
    for q in states:
        if q in ("acc", "rej"):
            continue
        for a in READ:
            for b in CELLS:
                transitions[(q, a, b)] = rule(q, a, b)
    return MachineTable(states=tuple(states), transitions=transitions, accept_state="acc",
                        reject_state="rej", space_bound=space_bound, start_state=start or states[0], name=name)


def accept_all(space_bound=1):
    """Accepts immediately, writing back what it reads."""
    return _table("accept-all", ("q0", "acc", "rej"), lambda q, a, b: ("acc", b, 0, 0), space_bound)


def reject_all(space_bound=1):
    return _table("reject-all", ("q0", "acc", "rej"), lambda q, a, b: ("rej", b, 0, 0), space_bound)


def flip_first_cell():
    """Complements scratch cell 0 and accepts."""
    return _table("flip-first", ("q0", "acc", "rej"),
                  lambda q, a, b: ("acc", "0" if b == "1" else "1", 0, 0), 1)


def input_parity():
    """Accepts iff the input has an odd number of ones; one scratch cell."""

    def rule(q, a, b):
        if q == "init":
            return ("run", "0", 1, 0)
        if a == RIGHT_END:
            return ("acc" if b == "1" else "rej", b, 0, 0)
        if a == "1":
            return ("run", "0" if b == "1" else "1", 1, 0)
        return ("run", b, 1, 0)

    return _table("input-parity", ("init", "run", "acc", "rej"), rule, 1)


def counter4():
    """4-bit binary counter of the ones in x (cell 0 = least significant bit);
    accepts iff the count mod 16 is at least 8."""
    states = [f"zero{i}" for i in range(4)] + [f"back{i}" for i in range(4)]
    states += ["scan"] + [f"inc{i}" for i in range(1, 4)] + [f"goto{i}" for i in range(1, 4)] + ["acc", "rej"]

    def rule(q, a, b):
        kind, i = q.rstrip("0123"), int(q[-1]) if q[-1].isdigit() else None
        if kind == "zero":
            return (f"zero{i + 1}", "0", 0, 1) if i < 3 else ("back3", "0", 0, 0)
        if kind == "back":
            return (f"back{i - 1}", b, 0, -1) if i > 0 else ("scan", b, 1, 0)
        if q == "scan":
            if a == RIGHT_END:
                return ("goto1", b, 0, 1)
            if a == "1":
                return ("inc1", "0", 0, 1) if b == "1" else ("back0", "1", 0, 0)
            return ("scan", b, 1, 0)
        if kind == "inc":
            if b == "1":
                return (f"inc{i + 1}", "0", 0, 1) if i < 3 else ("back3", "0", 0, 0)
            return (f"back{i}", "1", 0, 0)
        # goto: walk to the top bit and read it
        if i < 3:
            return (f"goto{i + 1}", b, 0, 1)
        return ("acc" if b == "1" else "rej", b, 0, 0)

    return _table("counter4", states, rule, 4)


def palindrome(space_bound=15):
    """Copies x onto the scratch tape, then compares it backwards against x.

    Handles inputs of length below ``space_bound``.
    """

    def rule(q, a, b):
        if q == "begin":
            return ("copy", b, 1, 0)
        if q == "copy":
            if a in "01":
                return ("copy", a, 1, 1)
            if a == RIGHT_END:
                return ("rewind", b, -1, -1)
            return ("copy", b, 1, 0)
        if q == "rewind":
            return ("cmp", b, 1, 0) if a == LEFT_END else ("rewind", b, -1, 0)
        # cmp
        if a == RIGHT_END:
            return ("acc", b, 0, 0)
        if a in "01" and a == b:
            return ("cmp", b, 1, -1)
        if a == LEFT_END:
            return ("cmp", b, 1, 0)
        return ("rej", b, 0, 0)

    return _table(f"palindrome{space_bound}", ("begin", "copy", "rewind", "cmp", "acc", "rej"), rule, space_bound)


BUILTIN_TABLES = {
    "accept-all": accept_all,
    "reject-all": reject_all,
    "flip-first": flip_first_cell,
    "input-parity": input_parity,
    "counter4": counter4,
    "palindrome": palindrome,
}


def builtin_table(spec):
    """``counter4``, ``palindrome:15``, ``accept-all:2`` ..."""
    name, _, arg = spec.partition(":")
    try:
        make = BUILTIN_TABLES[name]
    except KeyError:
        raise ConfigInvalid(f"unknown builtin machine {name!r}; known: {', '.join(sorted(BUILTIN_TABLES))}") from None
    return make(int(arg)) if arg else make()


# ------------------------------------------------------- native fixtures


class Countdown(AlmostCatalyticMachine):
    """Halts after exactly ``steps`` steps with a fixed decision; never touches the tape."""

    phases = ("count",)

    def __init__(self, catalytic_length, steps, decision="accept"):
        if steps < 1:
            raise ConfigInvalid("steps must be positive")
        self.catalytic_length = catalytic_length
        self.steps = steps
        self.decision = decision
        self.machine_id = f"countdown:{steps}:{decision}"

    def initial_aux(self):
        return (0,)

    def aux_spec(self, n):
        return [("clock", self.steps + 1, True)]

    def _step(self, cfg):
        k = cfg.aux[0] + 1
        return cfg._replace(phase=self.decision if k == self.steps else "count", aux=(k,))

    def restoration_set(self):
        return All(self.catalytic_length)

    def reference_decision(self, x):
        return self.decision


# ------------------------------------------------------- broken fixtures


class SkipDecodeEngine(FullDecodeEngine):
    """Full-decode engine whose restore sweep never writes anything."""

    def __init__(self, inner, cfg):
        super().__init__(inner, cfg)
        self.machine_id = "broken-skip-decode:" + self.machine_id

    def _sweep_symbol(self, tape, j):
        return None


class TapeEraser(InnerHost):
    """Zeroes the whole catalytic tape in its first step, then runs the inner
    machine on the first cells and halts without restoring anything."""

    phases = ("erase", "simulate")

    def __init__(self, inner, catalytic_length):
        self._set_inner(inner)
        self._check_inner_space(catalytic_length, "the catalytic length")
        self.catalytic_length = catalytic_length
        self.machine_id = f"broken-eraser[{inner.name}]"

    def initial_aux(self):
        return (self._start,)

    def aux_spec(self, n):
        return [("inner_state", len(self.inner.states), False)]

    def _step(self, cfg):
        if cfg.phase == "erase":
            return cfg._replace(phase="simulate", catalytic_tape="0" * self.catalytic_length)
        nq, d, tape, ih, wh = self._inner_step(cfg, cfg.aux[0], 0, self.catalytic_length)
        phase = "simulate" if d is None else _halt(d)
        return cfg._replace(phase=phase, input_head=ih, work_head=wh, catalytic_tape=tape, aux=(nq,))

    def restoration_set(self):
        return All(self.catalytic_length)


class LoopingParityEngine(ParityRestoreEngine):
    """Even-parity restorer that spins forever when the tape starts as ``trigger``."""

    def __init__(self, inner, catalytic_length, trigger):
        super().__init__(inner, catalytic_length, odd=False)
        if len(trigger) != catalytic_length:
            raise ConfigInvalid("trigger must have the catalytic length")
        self.trigger = trigger
        self.machine_id = f"broken-loop:{trigger}[{inner.name}]"
        self.phases = ("check", "spin") + ParityRestoreEngine.phases

    def _step(self, cfg):
        if cfg.phase == "check":
            return cfg._replace(phase="spin" if cfg.catalytic_tape == self.trigger else "simulate")
        if cfg.phase == "spin":
            return cfg
        return super()._step(cfg)


def parity_pair(inner=None, catalytic_length=8):
    """(M1, M2) restoring even- and odd-weight contents around ``inner`` (default: input parity)."""
    inner = inner if inner is not None else input_parity()
    return (ParityRestoreEngine(inner, catalytic_length, odd=False),
            ParityRestoreEngine(inner, catalytic_length, odd=True))


__all__ = [
    "ACCEPT",
    "REJECT",
    "Countdown",
    "LoopingParityEngine",
    "SkipDecodeEngine",
    "TapeEraser",
    "accept_all",
    "builtin_table",
    "counter4",
    "flip_first_cell",
    "input_parity",
    "palindrome",
    "parity_pair",
    "reject_all",
]
