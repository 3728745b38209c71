"""Restoration engines: wrap an inner table machine into an almost-catalytic machine.

Every engine is a steppable machine.  Its configuration carries a phase tag,
the inner machine's control state and the engine's bounded counters in
``aux``; ``work_head`` is the inner machine's (region-relative) work head and
``catalytic_head`` the physical cell being touched.  Inner machines see the
current catalytic bits as their initial scratch content and a written blank is
stored as ``0``, so inner fixtures must decide independently of scratch content
(see :func:`catalytic_lab.machine.lint_scratch_independence`).
"""

from dataclasses import dataclass

from . import codes
from .codes import CodeSpec
from .errors import ConfigInvalid, MachineError, UndefinedTransition, WorkSpaceExceeded
from .machine import (
    BLANK,
    AlmostCatalyticMachine,
    Configuration,
    TableMachine,
    input_symbol,
    move_input,
    run,
)
from .setlang import All, BallUnion, CatalyticSet, ComplementOf, Parity, PrefixZero, SparseSorted, Tally

ACCEPT, REJECT = 1, 0


def _halt(dec):
    return "accept" if dec == ACCEPT else "reject"


class InnerHost(AlmostCatalyticMachine):
    """Shared machinery for engines that simulate an inner table on catalytic cells."""

    def _set_inner(self, inner):
        self.inner = inner
        index = {s: i for i, s in enumerate(inner.states)}
        self._start = index[inner.start_state]
        self._final = {index[inner.accept_state]: ACCEPT, index[inner.reject_state]: REJECT}
        self._delta = {
            (index[q], a, b): (index[nq], wr, di, dw)
            for (q, a, b), (nq, wr, di, dw) in inner.transitions.items()
        }

    def _inner_step(self, cfg, q, offset, limit):
        """One inner step on binary cells [offset, offset + limit).

        Returns (next state, decision or None, tape, input head, work head).
        """
        wh = cfg.work_head
        pos = offset + wh
        tape = cfg.catalytic_tape
        if self.inner.space_bound == 0:
            return self._blind_step(cfg, q)
        b = tape[pos]
        try:
            nq, wr, di, dw = self._delta[(q, input_symbol(cfg.input, cfg.input_head), b)]
        except KeyError:
            raise UndefinedTransition(
                f"{self.inner.name}: no transition for state #{q} reading "
                f"{input_symbol(cfg.input, cfg.input_head)!r}/{b!r}"
            ) from None
        if wr == BLANK:
            wr = "0"
        if wr != b:
            tape = tape[:pos] + wr + tape[pos + 1:]
        nwh = wh + dw
        if nwh < 0:
            nwh = 0
        elif nwh >= limit:
            raise WorkSpaceExceeded(f"{self.machine_id}: inner work head left its {limit}-cell region")
        return nq, self._final.get(nq), tape, move_input(cfg.input, cfg.input_head, di), nwh

    def _blind_step(self, cfg, q):
        # zero-space inner machine: it sees blank and touches no cell, as in TableMachine
        a = input_symbol(cfg.input, cfg.input_head)
        try:
            nq, wr, di, dw = self._delta[(q, a, BLANK)]
        except KeyError:
            raise UndefinedTransition(f"{self.inner.name}: no transition for state #{q} reading {a!r}/blank") from None
        if wr != BLANK:
            raise WorkSpaceExceeded(f"{self.machine_id}: inner machine with space bound 0 wrote {wr!r}")
        return nq, self._final.get(nq), cfg.catalytic_tape, move_input(cfg.input, cfg.input_head, di), 0

    def reference_decision(self, x):
        return run(TableMachine(self.inner), x, "").decision

    def _check_inner_space(self, limit, what):
        if self.inner.space_bound > limit:
            raise ConfigInvalid(
                f"inner machine {self.inner.name} needs {self.inner.space_bound} cells, {what} is {limit}"
            )


class SimulateThenSweep(InnerHost):
    """Simulate the inner machine on cells [0, region), then sweep cells 0..sweep-1 once.

    aux = (inner state, decision, sweep index)
    """

    phases = ("simulate", "restore")

    def __init__(self, inner, catalytic_length, region, sweep):
        self._set_inner(inner)
        self.catalytic_length = catalytic_length
        self.region = region
        self.sweep = sweep
        if catalytic_length < 1:
            raise ConfigInvalid("catalytic length must be positive")
        self._check_inner_space(region, "the simulation region")

    def initial_aux(self):
        return (self._start, 0, 0)

    def aux_spec(self, n):
        return [("inner_state", len(self.inner.states), False), ("decision", 2, False),
                ("sweep", self.sweep + 1, True)]

    def _sweep_symbol(self, tape, j):
        """Symbol to leave at cell j, or None to leave it."""
        raise NotImplementedError

    def _step(self, cfg):
        q, dec, j = cfg.aux
        if cfg.phase == "simulate":
            nq, d, tape, ih, wh = self._inner_step(cfg, q, 0, self.region)
            if d is None:
                return cfg._replace(input_head=ih, work_head=wh, catalytic_head=wh,
                                    catalytic_tape=tape, aux=(nq, dec, j))
            if self.sweep == 0:
                return cfg._replace(phase=_halt(d), input_head=ih, work_head=wh,
                                    catalytic_tape=tape, aux=(nq, d, 0))
            return cfg._replace(phase="restore", input_head=ih, work_head=wh, catalytic_head=0,
                                catalytic_tape=tape, aux=(nq, d, 0))
        # restore: one cell per step
        tape = cfg.catalytic_tape
        sym = self._sweep_symbol(tape, j)
        if sym is not None and tape[j] != sym:
            tape = tape[:j] + sym + tape[j + 1:]
        if j + 1 == self.sweep:
            return cfg._replace(phase=_halt(dec), catalytic_head=j, catalytic_tape=tape, aux=(q, dec, j + 1))
        return cfg._replace(catalytic_head=j, catalytic_tape=tape, aux=(q, dec, j + 1))


class TallyEngine(SimulateThenSweep):
    """Run on the whole tape, then overwrite it with 1^c; restores {1^c}."""

    def __init__(self, inner, catalytic_length):
        super().__init__(inner, catalytic_length, catalytic_length, catalytic_length)
        self.machine_id = f"tally[{inner.name}]"

    def _sweep_symbol(self, tape, j):
        return "1"

    def restoration_set(self):
        return Tally(self.catalytic_length)


class PrefixZeroEngine(SimulateThenSweep):
    """Run on the first prefix_len cells, then zero them; restores 0^prefix_len (0+1)^*."""

    def __init__(self, inner, catalytic_length, prefix_len):
        if not 1 <= prefix_len <= catalytic_length:
            raise ConfigInvalid(f"prefix_len must lie in [1, {catalytic_length}]")
        super().__init__(inner, catalytic_length, prefix_len, prefix_len)
        self.prefix_len = prefix_len
        self.machine_id = f"prefix-zero:{prefix_len}[{inner.name}]"

    def _sweep_symbol(self, tape, j):
        return "0"

    def restoration_set(self):
        return PrefixZero(self.catalytic_length, self.prefix_len)


@dataclass(frozen=True)
class FullDecodeEngineConfig:
    code: CodeSpec
    inner_space: int


class FullDecodeEngine(SimulateThenSweep):
    """Run on the first inner_space cells, then bounded-distance decode the whole tape.

    The restore sweep recomputes the decoder on the current tape for each cell
    and writes the codeword bit; on decoding failure the tape is left as is.
    """

    def __init__(self, inner, cfg):
        code = cfg.code
        if cfg.inner_space > code.radius:
            raise ConfigInvalid(
                f"inner_space {cfg.inner_space} exceeds the decoding radius {code.radius} of {code.tag}"
            )
        super().__init__(inner, code.n, cfg.inner_space, code.n)
        self.code = code
        self.config = cfg
        self.machine_id = f"full-decode:{code.tag}:{cfg.inner_space}[{inner.name}]"

    def _sweep_symbol(self, tape, j):
        out = codes.decode(self.code, tape)
        return out.codeword[j] if out.ok else None

    def restoration_set(self):
        from .setlang import Codewords

        return Codewords(self.code)


@dataclass(frozen=True)
class BlockEngineConfig:
    code: CodeSpec
    block_size: int
    tau: int

    @property
    def num_blocks(self):
        return self.code.n // self.block_size

    @property
    def guarantee_radius(self):
        return self.num_blocks * self.tau


class BlockEngine(InnerHost):
    """Pick a lightly corrupted block, remember its corruption pattern E, compute
    inside it, then flip j iff (j corrupted now) xor (j in E).

    aux = (inner state, decision, block i, index j, corrupted count, E_0..E_{tau-1});
    empty E slots hold ``block_size``.
    """

    phases = ("scan", "store", "simulate", "restore")

    def __init__(self, inner, cfg, aux_multiple=8):
        code, b, tau = cfg.code, cfg.block_size, cfg.tau
        if b < 1 or code.n % b:
            raise ConfigInvalid(f"block size {b} must divide n={code.n}")
        if tau < 0:
            raise ConfigInvalid("tau must be non-negative")
        r = cfg.guarantee_radius
        if r + b > code.radius:
            raise ConfigInvalid(f"r + b = {r} + {b} exceeds the decoding radius {code.radius}")
        self._set_inner(inner)
        self._check_inner_space(b, "the block size")
        self.code = code
        self.config = cfg
        self.b, self.tau, self.ell = b, tau, cfg.num_blocks
        self.catalytic_length = code.n
        self.machine_id = f"block:{code.tag}:b={b},tau={tau}[{inner.name}]"
        if tau * max(1, (b - 1).bit_length()) > aux_multiple * max(1, (code.n - 1).bit_length()):
            raise ConfigInvalid("the stored corruption set E does not fit the logspace budget")
        self.audit_aux(aux_multiple)

    def initial_aux(self):
        return (self._start, 0, 0, 0, 0) + (self.b,) * self.tau

    def aux_spec(self, n):
        spec = [("inner_state", len(self.inner.states), False), ("decision", 2, False),
                ("block", self.ell + 1, True), ("index", self.b + 1, True), ("count", self.tau + 2, True)]
        return spec + [(f"E{t}", self.b + 1, True) for t in range(self.tau)]

    def _corrupted(self, tape):
        out = codes.decode(self.code, tape)
        return frozenset(out.error_positions) if out.ok else None

    def _to_simulate(self, cfg, i, E):
        q = cfg.aux[0]
        return cfg._replace(phase="simulate", work_head=0, catalytic_head=i * self.b,
                            aux=(q, 0, i, 0, 0) + E)

    def _step(self, cfg):
        q, dec, i, j, cnt = cfg.aux[:5]
        E = cfg.aux[5:]
        b = self.b
        phase = cfg.phase
        if phase == "scan":
            bad = self._corrupted(cfg.catalytic_tape)
            if bad is None:  # outside every decoding ball: fall back to the last block, E empty
                return self._to_simulate(cfg, self.ell - 1, (b,) * self.tau)
            cnt += (i * b + j) in bad
            if cnt > self.tau:
                if i + 1 == self.ell:
                    return self._to_simulate(cfg, self.ell - 1, (b,) * self.tau)
                return cfg._replace(catalytic_head=i * b + j, aux=(q, dec, i + 1, 0, 0) + E)
            if j + 1 == b:
                return cfg._replace(phase="store", catalytic_head=i * b + j, aux=(q, dec, i, 0, 0) + E)
            return cfg._replace(catalytic_head=i * b + j, aux=(q, dec, i, j + 1, cnt) + E)
        if phase == "store":
            bad = self._corrupted(cfg.catalytic_tape)
            if (i * b + j) in bad:
                E = tuple(sorted(E[:cnt] + (j,))) + (b,) * (self.tau - cnt - 1)
                cnt += 1
            if j + 1 == b:
                return self._to_simulate(cfg._replace(aux=(q, dec, i, j, cnt) + E), i, E)
            return cfg._replace(catalytic_head=i * b + j, aux=(q, dec, i, j + 1, cnt) + E)
        if phase == "simulate":
            nq, d, tape, ih, wh = self._inner_step(cfg, q, i * b, b)
            if d is None:
                return cfg._replace(input_head=ih, work_head=wh, catalytic_head=i * b + wh,
                                    catalytic_tape=tape, aux=(nq, dec, i, j, cnt) + E)
            return cfg._replace(phase="restore", input_head=ih, work_head=wh, catalytic_head=i * b,
                                catalytic_tape=tape, aux=(nq, d, i, 0, 0) + E)
        # restore
        tape = cfg.catalytic_tape
        pos = i * b + j
        bad = self._corrupted(tape)
        if bad is not None and ((pos in bad) != (j in E)):
            tape = tape[:pos] + ("1" if tape[pos] == "0" else "0") + tape[pos + 1:]
        if j + 1 == b:
            return cfg._replace(phase=_halt(dec), catalytic_head=pos, catalytic_tape=tape,
                                aux=(q, dec, i, j + 1, cnt) + E)
        return cfg._replace(catalytic_head=pos, catalytic_tape=tape, aux=(q, dec, i, j + 1, cnt) + E)

    def restoration_set(self):
        return BallUnion(self.code, self.config.guarantee_radius)


@dataclass(frozen=True)
class SparseEngineConfig:
    A: SparseSorted
    max_members: int = None  # default: c^3


class SparseEngine(InnerHost):
    """Count the members of A below w while decrementing to 0^c, compute on the
    whole tape, clear it, then increment back until the count is used up.

    aux = (inner state, decision, count, clear index)
    """

    phases = ("check", "direct", "decrement", "simulate", "clear", "increment")

    def __init__(self, inner, cfg, aux_multiple=8):
        A = cfg.A
        if not isinstance(A, SparseSorted):
            raise ConfigInvalid("the sparse engine needs a SparseSorted catalytic set")
        c = A.m
        cap = cfg.max_members if cfg.max_members is not None else max(1, c) ** 3
        if len(A.words) > cap:
            raise ConfigInvalid(f"|A|={len(A.words)} exceeds the polynomial cap {cap}")
        self._set_inner(inner)
        self._check_inner_space(c, "the catalytic length")
        self.A = A
        self.catalytic_length = c
        self.machine_id = f"sparse:{len(A.words)}[{inner.name}]"
        self._zero = "0" * c
        self.audit_aux(aux_multiple)

    def initial_aux(self):
        return (self._start, 0, 0, 0)

    def aux_spec(self, n):
        return [("inner_state", len(self.inner.states), False), ("decision", 2, False),
                ("count", len(self.A.words) + 1, True), ("clear", self.catalytic_length + 1, True)]

    def _shift(self, w, delta):
        return format((int(w, 2) + delta) % (1 << len(w)), f"0{len(w)}b")

    def _step(self, cfg):
        q, dec, count, j = cfg.aux
        phase = cfg.phase
        w = cfg.catalytic_tape
        if phase == "check":
            return cfg._replace(phase="decrement" if self.A._member(w) else "direct")
        if phase == "decrement":
            if self.A._member(w):
                count += 1
            if w == self._zero:
                return cfg._replace(phase="simulate", aux=(q, dec, count, 0))
            return cfg._replace(catalytic_tape=self._shift(w, -1), aux=(q, dec, count, 0))
        if phase in ("simulate", "direct"):
            nq, d, tape, ih, wh = self._inner_step(cfg, q, 0, self.catalytic_length)
            if d is None:
                return cfg._replace(input_head=ih, work_head=wh, catalytic_head=wh,
                                    catalytic_tape=tape, aux=(nq, dec, count, j))
            nxt = _halt(d) if phase == "direct" else "clear"
            return cfg._replace(phase=nxt, input_head=ih, work_head=wh, catalytic_head=0,
                                catalytic_tape=tape, aux=(nq, d, count, 0))
        if phase == "clear":
            if w[j] != "0":
                w = w[:j] + "0" + w[j + 1:]
            nxt = "increment" if j + 1 == self.catalytic_length else "clear"
            return cfg._replace(phase=nxt, catalytic_head=j, catalytic_tape=w, aux=(q, dec, count, j + 1))
        # increment
        if self.A._member(w):
            count -= 1
        if count == 0:
            return cfg._replace(phase=_halt(dec), aux=(q, dec, 0, j))
        return cfg._replace(catalytic_tape=self._shift(w, 1), aux=(q, dec, count, j))

    def restoration_set(self):
        return self.A


HAT0 = "^"


@dataclass(frozen=True)
class ExtraSymbolEngineConfig:
    p: int

    @property
    def catalytic_length(self):
        return 4 * self.p


class ExtraSymbolEngine(InnerHost):
    """Catalytic alphabet {0, 1, ^}.  Without a ``^`` in w, the inner machine's
    cell i lives on the (2i)th and (2i+1)th cells holding the majority symbol s
    (or ``^``), encoded ss / s^ / ^s for 0 / 1 / blank; every ``^`` reverts to s
    at the end.  With a ``^`` in w the tape is erased and used directly.

    aux = (inner state, decision, index, zero count, majority symbol)
    """

    phases = ("scan", "erase", "direct", "count", "simulate", "restore")
    catalytic_alphabet = "01" + HAT0

    def __init__(self, inner, cfg, aux_multiple=8):
        if cfg.p < 1:
            raise ConfigInvalid("p must be positive")
        self._set_inner(inner)
        if not set(inner.work_alphabet) <= {"0", "1", BLANK}:
            raise ConfigInvalid("inner work alphabet must be a subset of {0, 1, blank}")
        self._check_inner_space(cfg.p, "p")
        self.p = cfg.p
        self.config = cfg
        self.catalytic_length = 4 * cfg.p
        self.machine_id = f"extra-symbol:p={cfg.p}[{inner.name}]"
        self.audit_aux(aux_multiple)

    def initial_aux(self):
        return (self._start, 0, 0, 0, 0)

    def aux_spec(self, n):
        c = self.catalytic_length
        return [("inner_state", len(self.inner.states), False), ("decision", 2, False),
                ("index", c + 1, True), ("zeros", c + 1, True), ("sigma", 2, False)]

    def _slots(self, tape, sigma):
        return [k for k, ch in enumerate(tape) if ch == sigma or ch == HAT0]

    def _simulate_encoded(self, cfg):
        q, dec, j, zeros, s = cfg.aux
        sigma = "01"[s]
        tape = cfg.catalytic_tape
        slots = self._slots(tape, sigma)
        wh = cfg.work_head
        lo, hi = slots[2 * wh], slots[2 * wh + 1]
        pair = (tape[lo] == HAT0, tape[hi] == HAT0)
        if pair == (True, True):
            raise MachineError(f"{self.machine_id}: corrupt encoding at cells {lo},{hi}")
        b = "1" if pair[1] else BLANK if pair[0] else "0"
        a = input_symbol(cfg.input, cfg.input_head)
        try:
            nq, wr, di, dw = self._delta[(q, a, b)]
        except KeyError:
            raise UndefinedTransition(f"{self.inner.name}: no transition reading {a!r}/{b!r}") from None
        enc = {"0": (sigma, sigma), "1": (sigma, HAT0), BLANK: (HAT0, sigma)}[wr]
        cells = list(tape)
        cells[lo], cells[hi] = enc
        tape = "".join(cells)
        nwh = max(wh + dw, 0)
        if nwh >= self.p:
            raise WorkSpaceExceeded(f"{self.machine_id}: inner work head left its {self.p}-cell region")
        ih = move_input(cfg.input, cfg.input_head, di)
        d = self._final.get(nq)
        if d is None:
            return cfg._replace(input_head=ih, work_head=nwh, catalytic_head=slots[2 * nwh],
                                catalytic_tape=tape, aux=(nq, dec, j, zeros, s))
        return cfg._replace(phase="restore", input_head=ih, work_head=nwh, catalytic_head=0,
                            catalytic_tape=tape, aux=(nq, d, 0, zeros, s))

    def _step(self, cfg):
        q, dec, j, zeros, s = cfg.aux
        phase = cfg.phase
        tape = cfg.catalytic_tape
        c = self.catalytic_length
        if phase == "scan":
            if tape[j] == HAT0:
                return cfg._replace(phase="erase", catalytic_head=j, aux=(q, dec, 0, zeros, s))
            if j + 1 == c:
                return cfg._replace(phase="count", catalytic_head=j, aux=(q, dec, 0, 0, s))
            return cfg._replace(catalytic_head=j, aux=(q, dec, j + 1, zeros, s))
        if phase == "erase":
            tape = tape[:j] + "0" + tape[j + 1:]
            if j + 1 == c:
                return cfg._replace(phase="direct", catalytic_head=0, catalytic_tape=tape,
                                    aux=(q, dec, 0, zeros, s))
            return cfg._replace(catalytic_head=j, catalytic_tape=tape, aux=(q, dec, j + 1, zeros, s))
        if phase == "direct":
            nq, d, tape, ih, wh = self._inner_step(cfg, q, 0, self.p)
            if d is None:
                return cfg._replace(input_head=ih, work_head=wh, catalytic_head=wh,
                                    catalytic_tape=tape, aux=(nq, dec, j, zeros, s))
            return cfg._replace(phase=_halt(d), input_head=ih, work_head=wh,
                                catalytic_tape=tape, aux=(nq, d, j, zeros, s))
        if phase == "count":
            zeros += tape[j] == "0"
            if j + 1 == c:
                s = 0 if 2 * zeros >= c else 1
                first = self._slots(tape, "01"[s])[0]
                return cfg._replace(phase="simulate", catalytic_head=first, aux=(q, dec, 0, zeros, s))
            return cfg._replace(catalytic_head=j, aux=(q, dec, j + 1, zeros, s))
        if phase == "simulate":
            return self._simulate_encoded(cfg)
        # restore
        if tape[j] == HAT0:
            tape = tape[:j] + "01"[s] + tape[j + 1:]
        if j + 1 == c:
            return cfg._replace(phase=_halt(dec), catalytic_head=j, catalytic_tape=tape,
                                aux=(q, dec, j + 1, zeros, s))
        return cfg._replace(catalytic_head=j, catalytic_tape=tape, aux=(q, dec, j + 1, zeros, s))

    def restoration_set(self):
        return All(self.catalytic_length)


class ParityRestoreEngine(InnerHost):
    """Use catalytic cell 0 as the inner machine's only scratch cell, then set
    cell 0 to the parity of cells 1..c-1 (``odd=False``, restores even-weight
    strings) or to its complement (``odd=True``, restores odd-weight strings).

    aux = (inner state, decision, index, running parity)
    """

    phases = ("simulate", "scan", "restore")

    def __init__(self, inner, catalytic_length, odd=False):
        if catalytic_length < 1:
            raise ConfigInvalid("catalytic length must be positive")
        self._set_inner(inner)
        self._check_inner_space(1, "the single scratch cell")
        self.catalytic_length = catalytic_length
        self.odd = odd
        self.machine_id = f"parity-{'odd' if odd else 'even'}[{inner.name}]"

    def initial_aux(self):
        return (self._start, 0, 1, 0)

    def aux_spec(self, n):
        return [("inner_state", len(self.inner.states), False), ("decision", 2, False),
                ("index", self.catalytic_length + 1, True), ("parity", 2, False)]

    def _step(self, cfg):
        q, dec, j, acc = cfg.aux
        c = self.catalytic_length
        if cfg.phase == "simulate":
            nq, d, tape, ih, wh = self._inner_step(cfg, q, 0, 1)
            if d is None:
                return cfg._replace(input_head=ih, work_head=wh, catalytic_tape=tape, aux=(nq, dec, j, acc))
            nxt = "scan" if c > 1 else "restore"
            return cfg._replace(phase=nxt, input_head=ih, work_head=wh, catalytic_head=min(1, c - 1),
                                catalytic_tape=tape, aux=(nq, d, 1, 0))
        if cfg.phase == "scan":
            acc ^= cfg.catalytic_tape[j] == "1"
            nxt = "restore" if j + 1 == c else "scan"
            head = 0 if nxt == "restore" else j + 1
            return cfg._replace(phase=nxt, catalytic_head=head, aux=(q, dec, j + 1, acc))
        bit = "1" if acc ^ self.odd else "0"
        tape = bit + cfg.catalytic_tape[1:]
        return cfg._replace(phase=_halt(dec), catalytic_head=0, catalytic_tape=tape, aux=(q, dec, j, acc))

    def restoration_set(self):
        parity = Parity(self.catalytic_length)
        return parity if self.odd else ComplementOf(parity)


# ------------------------------------------------------------ wrappers


@dataclass(frozen=True)
class FlipBits:
    """Involution flipping a fixed set of positions (``FlipBits((0,))`` flips the first bit)."""

    positions: tuple

    @property
    def name(self):
        if self.positions == (0,):
            return "first-bit"
        return "flip:" + ",".join(map(str, self.positions))

    def __call__(self, w):
        cells = list(w)
        for i in self.positions:
            cells[i] = "1" if cells[i] == "0" else "0"
        return "".join(cells)


@dataclass(frozen=True)
class XorMask:
    mask: str

    @property
    def name(self):
        return f"xor:{self.mask}"

    def __call__(self, w):
        return "".join("1" if a != b else "0" for a, b in zip(w, self.mask))


@dataclass(frozen=True)
class Identity:
    name = "identity"

    def __call__(self, w):
        return w


FIRST_BIT = FlipBits((0,))


def parse_involution(text):
    """``first-bit``, ``identity``, ``flip:0,3``, ``xor:0101``."""
    if text == "first-bit":
        return FIRST_BIT
    if text == "identity":
        return Identity()
    head, _, rest = text.partition(":")
    if head == "flip":
        return FlipBits(tuple(int(i) for i in rest.split(",")))
    if head == "xor":
        return XorMask(rest)
    raise ConfigInvalid(f"unknown involution {text!r}")


@dataclass(frozen=True)
class InvolutionImage(CatalyticSet):
    """{w : sigma(w) in inner}; for an involution this is sigma(inner)."""

    inner: CatalyticSet
    sigma: object

    @property
    def m(self):
        return self.inner.m

    def _member(self, w):
        return self.inner._member(self.sigma(w))

    def describe(self):
        return f"{self.sigma.name}({self.inner.describe()})"


def wrap_config(cfg, machine_id, prefix, extra):
    return Configuration(machine_id, prefix + cfg.phase, *cfg[2:8], extra + cfg.aux)


def unwrap_config(cfg, machine_id, prefix_len, extra_len):
    return Configuration(machine_id, cfg.phase[prefix_len:], *cfg[2:8], cfg.aux[extra_len:])


class InvolutionWrapper(AlmostCatalyticMachine):
    """If w is in B, apply sigma, run the wrapped machine, apply sigma again.

    aux = (flipped, decision) + wrapped machine's aux
    """

    def __init__(self, machine, sigma, B, audit_limit=16):
        if B.m != machine.catalytic_length:
            raise ConfigInvalid("B must be instantiated at the wrapped machine's catalytic length")
        self.machine = machine
        self.sigma = sigma
        self.B = B
        self.catalytic_length = machine.catalytic_length
        self.catalytic_alphabet = machine.catalytic_alphabet
        self.machine_id = f"involution:{sigma.name}:{B.describe()}[{machine.machine_id}]"
        self.phases = ("check", "flip", "unflip") + tuple("run/" + p for p in machine.phases)
        if self.catalytic_length <= audit_limit:
            self.audit_involution()

    def audit_involution(self):
        A = self.machine.restoration_set()
        from .machine import all_words

        for w in all_words(self.catalytic_length):
            s = self.sigma(w)
            if self.sigma(s) != w:
                raise ConfigInvalid(f"{self.sigma.name} is not an involution at {w}")
            if A is not None and self.B.member(w) and not A.member(s):
                raise ConfigInvalid(f"sigma({w}) = {s} is outside the wrapped machine's restoration set")

    def initial_aux(self):
        return (0, 0)

    def aux_spec(self, n):
        return [("flipped", 2, False), ("decision", 2, False)] + list(self.machine.aux_spec(n))

    def configuration_count(self, n):
        return 16 * self.machine.configuration_count(n)

    def _enter(self, cfg, flipped):
        inner = self.machine.initial(cfg.input, cfg.catalytic_tape)
        return wrap_config(inner, self.machine_id, "run/", (flipped, 0))

    def _step(self, cfg):
        flipped, dec = cfg.aux[:2]
        if cfg.phase == "check":
            if self.B.member(cfg.catalytic_tape):
                return cfg._replace(phase="flip")
            return self._enter(cfg, 0)
        if cfg.phase == "flip":
            return self._enter(cfg._replace(catalytic_tape=self.sigma(cfg.catalytic_tape)), 1)
        if cfg.phase == "unflip":
            return cfg._replace(phase=_halt(dec), catalytic_tape=self.sigma(cfg.catalytic_tape))
        inner = self.machine._step(unwrap_config(cfg, self.machine.machine_id, 4, 2))
        if inner.halted:
            d = ACCEPT if inner.phase == "accept" else REJECT
            if flipped:
                return Configuration(self.machine_id, "unflip", *inner[2:8], (1, d) + inner.aux)
            return Configuration(self.machine_id, inner.phase, *inner[2:8], (0, d) + inner.aux)
        return wrap_config(inner, self.machine_id, "run/", (flipped, dec))

    def initial(self, x, w0):
        return Configuration(self.machine_id, "check", x, 0, 0, 0, "", w0, (0, 0) + self.machine.initial_aux())

    def restoration_set(self):
        return self.B

    def reference_decision(self, x):
        return self.machine.reference_decision(x)


# ------------------------------------------------------------ builders


def build_full_decode(inner, cfg):
    return FullDecodeEngine(inner, cfg)


def build_block(inner, cfg):
    return BlockEngine(inner, cfg)


def build_sparse(inner, cfg):
    return SparseEngine(inner, cfg)


def build_tally(inner, catalytic_length):
    return TallyEngine(inner, catalytic_length)


def build_prefix_zero(inner, catalytic_length, prefix_len):
    return PrefixZeroEngine(inner, catalytic_length, prefix_len)


def build_extra_symbol(inner, cfg):
    return ExtraSymbolEngine(inner, cfg)


def wrap_involution(machine, sigma, B):
    return InvolutionWrapper(machine, sigma, B)


def build_parity_pair(inner, catalytic_length):
    """(M1, M2): M1 restores even-weight contents, M2 odd-weight contents."""
    return (ParityRestoreEngine(inner, catalytic_length, odd=False),
            ParityRestoreEngine(inner, catalytic_length, odd=True))
