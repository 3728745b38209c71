"""The fifteen acceptance checks, runnable from tests and from ``catalytic-lab report``."""

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import codes, engines, fixtures, measures, zpp
from .machine import check_configuration_disjointness, run, verify_restoration
from .setlang import Codewords, Parity, PrefixZero, SparseSorted


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float = 0.0
    limit: float = None
    details: dict = field(default_factory=dict)

    @property
    def within_time(self):
        return self.limit is None or self.seconds < self.limit

    @property
    def ok(self):
        return self.passed and self.within_time

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        limit = f" (limit {self.limit:.0f} s)" if self.limit else ""
        return f"criterion {self.number:2d} {status}: {self.title} [{self.seconds:.2f} s{limit}]"

    def to_dict(self):
        return {"number": self.number, "title": self.title, "passed": self.passed, "ok": self.ok,
                "seconds": round(self.seconds, 3), "limit": self.limit, "details": self.details}


def _flip(w, positions):
    cells = list(w)
    for i in positions:
        cells[i] = "1" if cells[i] == "0" else "0"
    return "".join(cells)


# ------------------------------------------------------------ measures


def c01_measure_values():
    d = {}
    d["P_parity"] = {m: measures.partition_complexity(Parity(m)).value for m in range(2, 6)}
    d["R0_parity"] = {m: measures.projection_complexity(Parity(m), 0).value for m in range(3, 7)}
    d["P_prefix_zero"] = {m: measures.partition_complexity(PrefixZero(m, m // 2)).value for m in (4, 8)}
    ok_p = all(v == 2 ** (m - 1) for m, v in d["P_parity"].items())
    ok_r = all(v == m - 1 for m, v in d["R0_parity"].items())
    ok_b = all(v == 1 for v in d["P_prefix_zero"].values())
    d["parts"] = {"P_parity": ok_p, "R0_parity": ok_r, "P_prefix_zero": ok_b}
    return ok_p and ok_r and ok_b, d


def c02_codes_lemma():
    A = Codewords(codes.extended_hamming())
    stats = measures.projection_complexity(A, Fraction(1, 256))
    subsets = comb(8, 4)
    return stats.value >= 4 and stats.fractions[4] == 1, {
        "value": stats.value, "fraction_at_4": str(stats.fractions[4]), "subsets": subsets}


def c03_codeword_partition():
    vals = {c.tag: measures.partition_complexity(Codewords(c)).value
            for c in (codes.hamming(), codes.reed_muller(1, 3))}
    return all(v == 16 for v in vals.values()), vals


def c04_ball_additivity():
    # centers at distance 4 keep the balls at set distance 2; at center distance
    # exactly 3 the union contains a full 3-cube and additivity fails (recorded)
    h1 = measures.ball_union(["000000"], 1)
    h2 = measures.ball_union(["111100"], 1)
    p1 = measures.partition_complexity(h1).value
    p2 = measures.partition_complexity(h2).value
    pu = measures.partition_complexity(h1.union(h2)).value
    near = measures.partition_complexity(h1.union(measures.ball_union(["111000"], 1))).value
    return pu == p1 + p2, {"P(H1)": p1, "P(H2)": p2, "P(union)": pu, "P(union) at center distance 3": near}


def c05_gotsman_linial():
    bad = []
    count = 0
    for m in range(1, 13):
        for k in range(m):
            r = measures.gotsman_linial_check(m, k)
            count += 1
            if not r.holds:
                bad.append((m, k, str(r.value)))
    return not bad, {"pairs": count, "violations": bad}


def c06_ball_lower_bound():
    rows = []
    for m in range(1, 11):
        for k in range(m):
            if 2 * k >= m:
                break
            ball = measures.ball_union(["0" * m], k)
            empty = measures.wht_spectrum(ball).coefficient(0)
            if abs(empty) >= Fraction(1, 2):
                continue
            p = measures.partition_complexity(ball).value
            rows.append({"m": m, "k": k, "P": p, "holds": measures.ball_lower_bound_holds(m, p)})
    return bool(rows) and all(r["holds"] for r in rows), {"cases": rows}


def c15_translation_monotonicity(pairs=100, seed=15):
    rng = np.random.default_rng(seed)
    eps = Fraction(1, 4)
    shift_bad, mono_bad = [], []
    for _ in range(pairs):
        A = measures.BitVectorSet(6, rng.random(64) < rng.uniform(0.1, 0.9))
        z = format(int(rng.integers(64)), "06b")
        B = measures.xor_shift(A, z)
        pa, pb = measures.partition_complexity(A).value, measures.partition_complexity(B).value
        ra, rb = measures.projection_complexity(A, eps).value, measures.projection_complexity(B, eps).value
        if pa != pb or ra != rb:
            shift_bad.append({"A": A.to_hex(), "z": z})
    for _ in range(pairs):
        big = rng.random(64) < rng.uniform(0.2, 0.9)
        small = big & (rng.random(64) < rng.uniform(0.2, 0.9))
        A, B = measures.BitVectorSet(6, small), measures.BitVectorSet(6, big)
        if measures.projection_complexity(A, eps).value > measures.projection_complexity(B, eps).value:
            mono_bad.append({"A": A.to_hex(), "B": B.to_hex()})
    return not shift_bad and not mono_bad, {"shift_failures": shift_bad, "monotonicity_failures": mono_bad}


# ------------------------------------------------------------- engines


def _decision_checks(machine, words, inputs, ref):
    bad = []
    for i, w in enumerate(words):
        x = inputs[i % len(inputs)]
        got = run(machine, x, w).decision
        if got != ref[x]:
            bad.append({"input": x, "w": w, "got": got, "want": ref[x]})
    return bad


def _restore_checks(machine, words, inputs):
    bad = []
    for w in words:
        for x in inputs:
            r = run(machine, x, w)
            if r.final_catalytic != w:
                bad.append({"input": x, "w": w, "final": r.final_catalytic})
    return bad


def c07_full_decode(seed=7):
    code = codes.reed_muller(1, 6)
    cws = codes.codewords(code)
    rng = random.Random(seed)
    words = [cws[rng.randrange(len(cws))] if i % 4 == 0 else "".join(rng.choice("01") for _ in range(64))
             for i in range(1000)]
    cases = {
        "counter4": (fixtures.counter4(), ["1" * 9, "0110", "1111111111111"]),
        "palindrome15": (fixtures.palindrome(15), ["0110", "0111", "1010101"]),
    }
    details = {}
    ok = True
    for name, (inner, inputs) in cases.items():
        eng = engines.build_full_decode(inner, engines.FullDecodeEngineConfig(code, 15))
        ref = {x: eng.reference_decision(x) for x in inputs}
        restore = _restore_checks(eng, cws, inputs)
        decide = _decision_checks(eng, words, inputs, ref)
        details[name] = {"restoration_failures": restore[:5], "decision_failures": decide[:5],
                         "reference": ref}
        ok = ok and not restore and not decide
    return ok, details


def c08_block(seed=8):
    code = codes.reed_muller(1, 7)
    cfg = engines.BlockEngineConfig(code, 8, 1)
    inner = fixtures.counter4()
    eng = engines.build_block(inner, cfg)
    inputs = ["1" * 9, "0110", "11111111"]
    ref = {x: eng.reference_decision(x) for x in inputs}
    cws = codes.codewords(code)
    rng = random.Random(seed)
    corrupted = []
    for i in range(500):
        base = cws[rng.randrange(len(cws))]
        if i % 2:
            pos = [b * 8 + rng.randrange(8) for b in range(16)]  # one error in every block
        else:
            pos = rng.sample(range(128), rng.randint(0, 16))
        corrupted.append(_flip(base, pos))
    arbitrary = ["".join(rng.choice("01") for _ in range(128)) for _ in range(500)]
    restore = []
    for i, w in enumerate(cws + corrupted):
        x = inputs[i % len(inputs)]
        r = run(eng, x, w)
        if r.final_catalytic != w or r.decision != ref[x]:
            restore.append({"input": x, "w": w, "final": r.final_catalytic, "decision": r.decision})
    decide = _decision_checks(eng, arbitrary, inputs, ref)
    return not restore and not decide, {"guarantee_radius": cfg.guarantee_radius,
                                        "restoration_failures": restore[:5], "decision_failures": decide[:5]}


SPARSE_A = ("0000010011", "0011100000", "0101010101", "1000000001", "1111111110")


def c09_sparse():
    A = SparseSorted(10, SPARSE_A)
    eng = engines.build_sparse(fixtures.counter4(), engines.SparseEngineConfig(A))
    inputs = ["1" * 9, "0110", "11111111"]
    ref = {x: eng.reference_decision(x) for x in inputs}
    restore = _restore_checks(eng, list(A.words), inputs)
    words = [format(i, "010b") for i in range(1024)]
    decide = [f for x in inputs for f in _decision_checks(eng, words, [x], ref)]
    return not restore and not decide, {"restoration_failures": restore, "decision_failures": decide[:5]}


def c10_extra_symbol(seed=10):
    eng = engines.build_extra_symbol(fixtures.palindrome(4), engines.ExtraSymbolEngineConfig(4))
    inputs = ["101", "110", "011"]
    ref = {x: eng.reference_decision(x) for x in inputs}
    restore = []
    for v in range(1 << 16):
        w = format(v, "016b")
        x = inputs[v % 3]
        r = run(eng, x, w)
        if r.final_catalytic != w or r.decision != ref[x]:
            restore.append({"input": x, "w": w, "final": r.final_catalytic})
    rng = random.Random(seed)
    words = ["".join(rng.choice("01^") for _ in range(16)) for _ in range(1000)]
    with_hat = sum("^" in w for w in words)
    decide = _decision_checks(eng, words, inputs, ref)
    return not restore and not decide, {"restoration_failures": restore[:5], "decision_failures": decide[:5],
                                        "sampled_with_hat0": with_hat}


def c11_involution():
    even, _ = fixtures.parity_pair(catalytic_length=10)
    wrapped = engines.wrap_involution(even, engines.FIRST_BIT, Parity(10))
    report = verify_restoration(wrapped, inputs=["", "1", "0111"])
    return report.overall_pass and report.summary()["members_tested"] == 3 * 512, report.summary()


def c12_disjointness():
    rows = {}
    fd = engines.build_full_decode(fixtures.flip_first_cell(),
                                   engines.FullDecodeEngineConfig(codes.extended_hamming(), 1))
    m1, m2 = fixtures.parity_pair(catalytic_length=8)
    for name, machine in (("full-decode exthamming(8)", fd), ("parity-even c=8", m1), ("parity-odd c=8", m2)):
        for x in ("", "1", "0110"):
            rep = check_configuration_disjointness(machine, input=x)
            rows[f"{name} x={x!r}"] = {"passed": rep.passed, "bound_holds": rep.bound_holds,
                                       "sum_steps": rep.total_configs_visited,
                                       "configuration_count": rep.configuration_count}
    return all(r["passed"] and r["bound_holds"] for r in rows.values()), rows


def c13_dovetail():
    m1, m2 = fixtures.parity_pair(catalytic_length=8)
    zpp.audit_complementary(m1, m2)
    rows = {}
    ok = True
    for x in ("", "1", "0110111"):
        want = m1.reference_decision(x)
        st = zpp.expected_runtime(m1, m2, x)
        accounting = all(st.steps[w] <= 2 * min(st.t1[w], st.t2[w]) + 1 for w in st.steps)
        correct = all(d == want for d in st.decisions.values()) and not st.decision_mismatches
        rows[x] = {"correct": correct, "accounting": accounting, "bound_m1": st.bound_m1_holds,
                   "bound_m2": st.bound_m2_holds, "mean": str(st.mean)}
        ok = ok and correct and accounting and st.bound_m1_holds and st.bound_m2_holds
    return ok, rows


def c14_mutations():
    d = {}
    skip = fixtures.SkipDecodeEngine(fixtures.flip_first_cell(),
                                     engines.FullDecodeEngineConfig(codes.extended_hamming(), 1))
    rep = verify_restoration(skip, inputs=["1"], mode="members")
    fails = rep.failures("restoration")
    d["skip-decode"] = {"flagged": bool(fails), "witness": fails[0].w if fails else None}

    eraser = fixtures.TapeEraser(fixtures.flip_first_cell(), 6)
    dis = check_configuration_disjointness(eraser, input="", check_hypothesis=False)
    d["tape-eraser"] = {"flagged": not dis.passed, "witness": dis.collisions[0] if dis.collisions else None}

    _, m2 = fixtures.parity_pair(catalytic_length=8)
    loop = fixtures.LoopingParityEngine(fixtures.input_parity(), 8, "00000000")
    st = zpp.expected_runtime(loop, m2, "1", budget=2000)
    d["looping-M1"] = {"flagged": bool(st.budget_failures) and st.bound_checks_skipped,
                       "witness": st.budget_failures[0] if st.budget_failures else None}
    return all(v["flagged"] and v["witness"] for v in d.values()), d


CRITERIA = [
    (1, "reference values: P(Parity), R_0(Parity), P(prefix-zero)", c01_measure_values, 60),
    (2, "codes lemma on extended Hamming [8,4,4]", c02_codes_lemma, 1),
    (3, "codeword-set partitions equal 2^k", c03_codeword_partition, 60),
    (4, "ball-union additivity at m=6", c04_ball_additivity, None),
    (5, "Gotsman-Linial for Th_{m,k}, m <= 12", c05_gotsman_linial, 30),
    (6, "ball lower bound P >= sqrt(m)/2, m <= 10", c06_ball_lower_bound, None),
    (7, "full-decode engine over RM(1,6)", c07_full_decode, 120),
    (8, "block engine over RM(1,7), b=8, tau=1", c08_block, 300),
    (9, "sparse engine, |A|=5 in {0,1}^10", c09_sparse, 60),
    (10, "extra-symbol engine, p=4", c10_extra_symbol, 300),
    (11, "involution wrapper, c=10", c11_involution, None),
    (12, "configuration disjointness and step-sum bound", c12_disjointness, 120),
    (13, "dovetailer on the parity pair, c=8", c13_dovetail, 60),
    (14, "mutation sensitivity of the three broken fixtures", c14_mutations, None),
    (15, "translation invariance and monotonicity at m=6", c15_translation_monotonicity, 60),
]


def run_criterion(number):
    num, title, fn, limit = CRITERIA[number - 1]
    start = time.perf_counter()
    passed, details = fn()
    return CriterionResult(num, title, bool(passed), time.perf_counter() - start, limit, details)


def run_all(numbers=None):
    return [run_criterion(n) for n in (numbers or range(1, len(CRITERIA) + 1))]
