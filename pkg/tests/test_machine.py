import json
import pickle
import subprocess
import sys

import pytest

from catalytic_lab import codes, fixtures
from catalytic_lab.engines import (FullDecodeEngine, FullDecodeEngineConfig, SparseEngine, SparseEngineConfig,
                                   TallyEngine)
from catalytic_lab.errors import (AlreadyHalted, BudgetExceeded, ConfigInvalid, HypothesisViolated, LengthMismatch,
                                  UndefinedTransition, WorkSpaceExceeded)
from catalytic_lab.machine import (BLANK, Configuration, MachineTable, Sample, TableMachine, all_words,
                                   check_configuration_disjointness, phase_sequence, run, sample_words, step,
                                   verify_restoration)
from catalytic_lab.setlang import Codewords, SparseSorted, Tally

EH8 = codes.extended_hamming(8)


def one_state_table():
    trans = {("q", a, b): ("acc", BLANK, 0, 0) for a in "01<>" for b in ("0", "1", BLANK)}
    return MachineTable(("q", "acc", "rej"), trans, "acc", "rej", 1, name="one-state")


def walker(space):
    """Walks the work head right forever (until it leaves the space bound)."""
    trans = {("q", a, b): ("q", b, 0, 1) for a in "01<>" for b in ("0", "1", BLANK)}
    return MachineTable(("q", "acc", "rej"), trans, "acc", "rej", space, name="walker")


def full_decode(inner=None):
    inner = inner or fixtures.flip_first_cell()
    return FullDecodeEngine(inner, FullDecodeEngineConfig(EH8, 1))


# ------------------------------------------------------------------ tables


def test_table_validation():
    good = one_state_table()
    with pytest.raises(ConfigInvalid):
        MachineTable(("q", "acc"), good.transitions, "acc", "acc", 1)
    with pytest.raises(ConfigInvalid):
        MachineTable(("q", "acc", "rej"), {("q", "0", "0"): ("zz", "0", 0, 0)}, "acc", "rej", 1)
    with pytest.raises(ConfigInvalid):
        MachineTable(("q", "acc", "rej"), {("q", "0", "0"): ("acc", "0", 2, 0)}, "acc", "rej", 1)
    with pytest.raises(ConfigInvalid):
        MachineTable(("q", "acc", "rej"), {("acc", "0", "0"): ("acc", "0", 0, 0)}, "acc", "rej", 1)
    with pytest.raises(ConfigInvalid):
        MachineTable(("q", "acc", "rej"), {}, "acc", "rej", -1)


def test_totality_check():
    t = one_state_table()
    assert t.is_total()
    partial = MachineTable(t.states, {("q", "0", "0"): ("acc", "0", 0, 0)}, "acc", "rej", 1, name="p")
    assert not partial.is_total()
    assert ("q", "1", "0") in partial.missing_transitions()
    m = TableMachine(partial)
    with pytest.raises(UndefinedTransition):
        run(m, "1", "")


@pytest.mark.parametrize("make", [fixtures.counter4, fixtures.palindrome, fixtures.input_parity])
def test_json_round_trip(make):
    t = make()
    back = MachineTable.from_json(t.to_json())
    assert back.transitions == t.transitions
    assert back.to_json() == t.to_json()


def test_json_seven_field_transitions():
    doc = json.loads(one_state_table().to_json())
    doc["transitions"] = [[q, a, b, nq, w, di, dw] for q, (a, b), nq, w, (di, dw) in doc["transitions"]]
    assert MachineTable.from_dict(doc).transitions == one_state_table().transitions
    doc["transitions"].append(doc["transitions"][0])
    with pytest.raises(ConfigInvalid):
        MachineTable.from_dict(doc)
    doc["transitions"] = [["q", "0"]]
    with pytest.raises(ConfigInvalid):
        MachineTable.from_dict(doc)


# --------------------------------------------------------------- stepping


def test_step_on_halted_configuration():
    m = TableMachine(one_state_table())
    cfg = m.initial("01")._replace(phase="accept")
    with pytest.raises(AlreadyHalted):
        step(m, cfg)


def test_one_state_blank_writer_accepts():
    m = TableMachine(one_state_table())
    cfg = m.initial("1")
    nxt = step(m, cfg)
    assert nxt.phase == "accept" and nxt.work_tape == cfg.work_tape


def test_sparse_decrement_step():
    A = SparseSorted(4, ("0001", "0010"))
    eng = SparseEngine(fixtures.accept_all(), SparseEngineConfig(A))
    cfg = eng.initial("", "0010")._replace(phase="decrement")
    assert step(eng, cfg).catalytic_tape == "0001"


def test_work_space_exceeded():
    with pytest.raises(WorkSpaceExceeded):
        run(TableMachine(walker(3)), "0", "")


def test_budget_exceeded():
    m = fixtures.LoopingParityEngine(fixtures.input_parity(), 4, "0110")
    with pytest.raises(BudgetExceeded) as info:
        run(m, "1", "0110", budget=50)
    assert info.value.steps == 50
    with pytest.raises(ValueError):
        run(m, "1", "0000", budget=0)


def test_run_length_checks():
    eng = TallyEngine(fixtures.accept_all(), 4)
    with pytest.raises(LengthMismatch):
        run(eng, "", "010")
    with pytest.raises(LengthMismatch):
        run(eng, "", "01^0")


def test_tally_run_example():
    res = run(TallyEngine(fixtures.accept_all(), 4), "", "0101")
    assert res.decision == "accept" and res.final_catalytic == "1111"


def test_restored_form_untouched():
    res = run(TallyEngine(fixtures.accept_all(), 4), "0", "1111")
    assert res.final_catalytic == "1111"
    cw = codes.encode(EH8, "1101")
    assert run(full_decode(fixtures.accept_all()), "", cw).final_catalytic == cw


def test_full_decode_corrects_flip():
    for msg in ["0000", "1010", "1111"]:
        cw = codes.encode(EH8, msg)
        res = run(full_decode(), "", cw)
        assert res.final_catalytic == cw and res.decision == "accept"


def test_trace_length_and_phases():
    res = run(full_decode(), "", codes.encode(EH8, "0110"), trace=True)
    assert res.steps == len(res.trace_digest) - 1
    assert phase_sequence(res.phases) == ["simulate", "restore", "accept"]


def test_serialization_injective():
    base = Configuration("m", "p", "01", 0, 0, 0, "", "0101", (1, 2))
    variants = [base._replace(**{f: v}) for f, v in
                [("machine_id", "n"), ("phase", "q"), ("input", "10"), ("input_head", 1), ("work_head", 1),
                 ("catalytic_head", 1), ("work_tape", "0"), ("catalytic_tape", "0100"), ("aux", (1, 3)),
                 ("aux", (12,))]]
    ser = {v.serialize() for v in variants}
    assert len(ser) == len(variants) and base.serialize() not in ser
    assert Configuration(*base).serialize() == base.serialize()


def test_step_deterministic_across_processes():
    rm = codes.reed_muller(1, 5)
    eng = FullDecodeEngine(fixtures.counter4(), FullDecodeEngineConfig(rm, 4))
    cfg = eng.initial("1101", codes.encode(rm, "100101"))
    for _ in range(5):
        cfg = step(eng, cfg)
    here = step(eng, cfg).serialize()
    assert step(eng, cfg).serialize() == here
    payload = pickle.dumps((eng, cfg)).hex()
    code = ("import pickle,sys;from catalytic_lab.machine import step;"
            f"e,c=pickle.loads(bytes.fromhex('{payload}'));sys.stdout.write(step(e,c).serialize())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout == here


# ---------------------------------------------------------- verification


def test_words_helpers():
    assert all_words(2) == ["00", "01", "10", "11"]
    assert sample_words(5, 3, seed=1) == sample_words(5, 3, seed=1)


def test_verify_tally_exhaustive():
    eng = TallyEngine(fixtures.accept_all(), 4)
    rep = verify_restoration(eng, Tally(4), inputs=[""])
    assert rep.overall_pass
    assert rep.summary()["cases"] == 16 and rep.summary()["members_tested"] == 1
    assert [c.restored for c in rep.cases if c.in_set] == [True]


def test_verify_full_decode_codewords():
    eng = full_decode(fixtures.input_parity())
    rep = verify_restoration(eng, Codewords(EH8), inputs=["", "1", "0110"], mode="members")
    assert rep.overall_pass and len(rep.cases) == 48


def test_verify_flags_skip_decode():
    eng = fixtures.SkipDecodeEngine(fixtures.flip_first_cell(), FullDecodeEngineConfig(EH8, 1))
    rep = verify_restoration(eng, Codewords(EH8), inputs=[""], mode="members")
    assert not rep.overall_pass
    assert len(rep.failures("restoration")) >= 1


def test_verify_flags_budget_and_acceptance():
    eng = fixtures.LoopingParityEngine(fixtures.input_parity(), 4, "0110")
    rep = verify_restoration(eng, inputs=["1"], budget=500)
    assert [c.w for c in rep.failures("budget")] == ["0110"]
    wrong = verify_restoration(TallyEngine(fixtures.accept_all(), 3), Tally(3), oracle=lambda x: "reject")
    assert len(wrong.failures("acceptance")) == 8


def test_verify_sample_and_jobs_agree():
    eng = full_decode(fixtures.input_parity())
    a = verify_restoration(eng, Codewords(EH8), inputs=["", "11"], mode=Sample(40, seed=3))
    b = verify_restoration(eng, Codewords(EH8), inputs=["", "11"], mode=Sample(40, seed=3), jobs=2)
    assert a.to_dict() == b.to_dict()
    assert a.mode == "sample:40:seed=3"


def test_verify_length_mismatch():
    with pytest.raises(LengthMismatch):
        verify_restoration(TallyEngine(fixtures.accept_all(), 4), Tally(5))


def test_report_json():
    rep = verify_restoration(TallyEngine(fixtures.accept_all(), 3), Tally(3))
    d = rep.to_dict(include_passing=False)
    assert d["overall_pass"] and d["cases"] == []
    json.dumps(rep.to_dict())


# ------------------------------------------------------------ disjointness


def test_disjointness_full_decode():
    eng = full_decode(fixtures.input_parity())
    rep = check_configuration_disjointness(eng, Codewords(EH8), input="101")
    assert rep.passed and rep.collisions == []
    assert rep.members == 16
    assert rep.bound_holds and rep.total_configs_visited <= rep.configuration_count
    assert rep.distinct_configurations >= rep.total_configs_visited  # every run's steps are distinct


def test_disjointness_eraser_collides():
    eng = fixtures.TapeEraser(fixtures.accept_all(), 4)
    with pytest.raises(HypothesisViolated):
        check_configuration_disjointness(eng, input="")
    rep = check_configuration_disjointness(eng, input="", check_hypothesis=False)
    assert not rep.passed
    w = rep.collisions[0]
    assert w["w"] != w["w_prime"]


def test_disjointness_singleton():
    rep = check_configuration_disjointness(TallyEngine(fixtures.input_parity(), 5), Tally(5), input="11")
    assert rep.passed and rep.members == 1


def test_default_budget_capped():
    assert 0 < full_decode().default_budget(3) <= 10_000_000
    rm = codes.reed_muller(1, 5)
    big = FullDecodeEngine(fixtures.counter4(), FullDecodeEngineConfig(rm, 4))
    assert big.default_budget(3) == 10_000_000
