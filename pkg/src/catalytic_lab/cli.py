"""``catalytic-lab`` command line front end.

Exit codes: 0 success, 1 a verification or check failed, 2 usage or
configuration error.  Every result is JSON with sorted keys.
"""

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import acceptance, codes, engines, fixtures, measures, zpp
from .errors import BudgetExceeded, CatalyticLabError, ConfigInvalid, HypothesisViolated
from .machine import MachineTable, Sample, check_configuration_disjointness, run, verify_restoration
from .setlang import SparseSorted, parse_set

GRAMMAR = """\
engines:  full-decode:<code>:<inner_space>   block:<code>:b=<b>,tau=<tau>
          sparse:@file | sparse:w1,w2,...    tally    prefix-zero:<len>
          extra-symbol:p=<p>                  parity-even   parity-odd
          involution:<sigma>:<engine>         (sigma: first-bit, identity, flip:i,j, xor:<mask>)
          broken-skip-decode:<code>:<space>   broken-eraser   broken-loop:<w>
codes:    rep:5  hamming:7  exthamming:8  rm:1,6 | rm(1,6)  random:n,k,seed
sets:     all empty parity even tally prefix-zero:<p> codewords:<code> ball:<code>:<r>
          explicit:@file sparse:@file hamming-balls:c1,c2:<r> not:<set>
inner:    @table.json or a builtin: accept-all reject-all flip-first input-parity counter4 palindrome[:space]
inputs:   @file (one input per line, '-' for the empty input) or a comma list
mode:     exhaustive | members | sample:N
"""


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def load_inner(ref):
    if ref.startswith("@"):
        return MachineTable.from_json(Path(ref[1:]).read_text())
    return fixtures.builtin_table(ref)


def parse_inputs(text):
    if text is None:
        return [""]
    if text.startswith("@"):
        lines = [ln.strip() for ln in Path(text[1:]).read_text().splitlines()]
        items = [ln for ln in lines if ln]
    else:
        items = text.split(",")
    return ["" if item in ("-", "") else item for item in items]


def parse_mode(text, seed):
    if text in ("exhaustive", "members"):
        return text
    head, _, count = text.partition(":")
    if head == "sample" and count.isdigit():
        return Sample(int(count), seed)
    raise UsageError(f"bad --mode {text!r}")


def _kv(text):
    out = {}
    for part in text.split(","):
        key, _, value = part.partition("=")
        out[key.strip()] = int(value)
    return out


def _words(ref):
    text = Path(ref[1:]).read_text() if ref.startswith("@") else ref.replace(",", "\n")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


def _need_c(c, what):
    if c is None:
        raise UsageError(f"{what} needs --c")
    return c


def parse_engine(desc, inner, c=None):
    """Build an almost-catalytic machine from an engine descriptor."""
    head, _, rest = desc.partition(":")
    if head == "full-decode":
        code_text, _, space = rest.rpartition(":")
        return engines.build_full_decode(inner, engines.FullDecodeEngineConfig(codes.parse_code(code_text), int(space)))
    if head == "broken-skip-decode":
        code_text, _, space = rest.rpartition(":")
        return fixtures.SkipDecodeEngine(inner, engines.FullDecodeEngineConfig(codes.parse_code(code_text), int(space)))
    if head == "block":
        code_text, _, params = rest.rpartition(":")
        kv = _kv(params)
        return engines.build_block(inner, engines.BlockEngineConfig(codes.parse_code(code_text), kv["b"], kv["tau"]))
    if head == "sparse":
        words = _words(rest)
        if not words:
            raise UsageError("sparse engine needs at least one member")
        return engines.build_sparse(inner, engines.SparseEngineConfig(SparseSorted(len(words[0]), words)))
    if head == "tally":
        return engines.build_tally(inner, _need_c(c, "tally"))
    if head == "prefix-zero":
        return engines.build_prefix_zero(inner, _need_c(c, "prefix-zero"), int(rest))
    if head == "extra-symbol":
        return engines.build_extra_symbol(inner, engines.ExtraSymbolEngineConfig(_kv(rest)["p"]))
    if head in ("parity-even", "parity-odd"):
        return engines.ParityRestoreEngine(inner, _need_c(c, head), odd=head == "parity-odd")
    if head == "broken-eraser":
        return fixtures.TapeEraser(inner, _need_c(c, head))
    if head == "broken-loop":
        return fixtures.LoopingParityEngine(inner, len(rest), rest)
    if head == "involution":
        sigma_text, _, inner_desc = rest.partition(":")
        if sigma_text in ("flip", "xor"):
            arg, _, inner_desc = inner_desc.partition(":")
            sigma_text = f"{sigma_text}:{arg}"
        sigma = engines.parse_involution(sigma_text)
        wrapped = parse_engine(inner_desc, inner, c)
        B = engines.InvolutionImage(wrapped.restoration_set(), sigma)
        return engines.wrap_involution(wrapped, sigma, B)
    raise UsageError(f"unknown engine descriptor {desc!r}")


def parse_epsilon(args):
    if args.epsilon is not None:
        return {"epsilon": Fraction(args.epsilon)}
    return {"alpha": Fraction(args.alpha)}


def load_bvs(args):
    if args.mask:
        return measures.BitVectorSet.from_hex(Path(args.mask[1:]).read_text() if args.mask.startswith("@")
                                              else args.mask, args.m)
    if not args.set:
        raise UsageError("measures needs --set or --mask")
    return measures.BitVectorSet.from_set(parse_set(args.set, args.m))


# --------------------------------------------------------------- commands


def _machine(args):
    return parse_engine(args.engine, load_inner(args.inner), args.c)


def cmd_run(args):
    machine = _machine(args)
    w = args.w if args.w is not None else "0" * machine.catalytic_length
    try:
        res = run(machine, args.input or "", w, args.budget, trace=args.trace)
    except BudgetExceeded as exc:
        return 1, {"machine": machine.machine_id, "error": "BudgetExceeded", "steps": exc.steps, "w": w}
    out = {"machine": machine.machine_id, "input": args.input or "", "w": w, **res.to_dict()}
    A = machine.restoration_set()
    if A is not None and not w.strip("01"):
        out["in_restoration_set"] = A.member(w)
        out["restored"] = res.final_catalytic == w
    return 0, out


def cmd_verify(args):
    machine = _machine(args)
    A = parse_set(args.set, machine.catalytic_length) if args.set else None
    report = verify_restoration(machine, A, parse_inputs(args.inputs), parse_mode(args.mode, args.seed),
                                budget=args.budget, jobs=args.jobs)
    return (0 if report.overall_pass else 1), report.to_dict(include_passing=args.all_cases)


def cmd_disjoint(args):
    machine = _machine(args)
    A = parse_set(args.set, machine.catalytic_length) if args.set else None
    try:
        rep = check_configuration_disjointness(machine, A, args.input or "", args.budget,
                                               check_hypothesis=not args.no_hypothesis)
    except HypothesisViolated as exc:
        return 1, {"machine": machine.machine_id, "error": "HypothesisViolated", "detail": str(exc),
                   "witness": exc.witness}
    return (0 if rep.passed and rep.bound_holds else 1), rep.to_dict()


def cmd_measures(args):
    if args.measure == "gl":
        return cmd_gl(args)
    A = load_bvs(args)
    out = {"m": A.m, "measure": args.measure}
    status = 0
    if args.measure == "partition":
        res = measures.partition_complexity(A)
        out.update(value=res.value, witness=[c.pattern for c in res.witness], method=res.method)
    elif args.measure == "projection":
        stats = measures.projection_complexity(A, samples=args.samples, seed=args.seed, **parse_epsilon(args))
        out.update(stats.to_dict())
        out["measure"] = "projection"
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["ell", "fraction", "float"])
                for ell, frac in sorted(stats.fractions.items()):
                    writer.writerow([ell, str(frac), f"{float(frac):.12g}"])
    elif args.measure == "spectrum":
        spec = measures.wht_spectrum(A)
        out.update(spec.to_dict(), value=str(measures.spectral_l1(spec)), parseval=spec.parseval_holds())
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["S", "coefficient"])
                for s, v in spec.nonzero().items():
                    writer.writerow([s, str(v)])
    elif args.measure == "l1":
        out["value"] = str(measures.spectral_l1(measures.wht_spectrum(A)))
    else:
        raise UsageError(f"unknown measure {args.measure!r}")
    return status, out


def cmd_gl(args):
    if args.m is None:
        raise UsageError("the gl measure needs --m")
    if args.k is None:
        rows = [measures.gotsman_linial_check(args.m, k).to_dict() for k in range(args.m)]
        return (0 if all(r["holds"] for r in rows) else 1), {"m": args.m, "measure": "gl", "results": rows}
    res = measures.gotsman_linial_check(args.m, args.k)
    return (0 if res.holds else 1), {"measure": "gl", **res.to_dict()}


def cmd_codes(args):
    code = codes.parse_code(args.code)
    out = {"code": code.tag, "n": code.n, "k": code.k, "d": code.d, "op": args.op}
    op = args.op
    if op == "info":
        out.update(code.to_dict(), radius=code.radius)
    elif op == "min-distance":
        out["value"] = codes.min_distance(code)
    elif op == "covering-radius":
        out["value"] = codes.covering_radius(code)
    elif op == "sphere-covering":
        r = args.radius if args.radius is not None else codes.covering_radius(code)
        out.update(radius=r, value=codes.sphere_covering_holds(code, r))
    elif op == "codewords":
        out["value"] = codes.codewords(code)
    elif op == "encode":
        if args.word is None:
            raise UsageError("encode needs --word <message>")
        out["value"] = codes.encode(code, args.word)
    elif op == "decode":
        if args.word is None:
            raise UsageError("decode needs --word")
        res = codes.decode(code, args.word)
        out.update(status=res.status, codeword=res.codeword,
                   error_positions=list(res.error_positions) if res.ok else None)
    else:
        raise UsageError(f"unknown codes op {op!r}")
    return 0, out


def cmd_zpp(args):
    inner = load_inner(args.inner)
    if args.m1 or args.m2:
        if not (args.m1 and args.m2):
            raise UsageError("give both --m1 and --m2")
        M1, M2 = parse_engine(args.m1, inner, args.c), parse_engine(args.m2, inner, args.c)
    else:
        M1, M2 = fixtures.parity_pair(inner, args.c or 8)
    zpp.audit_complementary(M1, M2)
    rows = []
    status = 0
    for x in parse_inputs(args.inputs):
        st = zpp.expected_runtime(M1, M2, x, parse_mode(args.mode, args.seed), args.budget)
        row = st.to_dict()
        accounting = all(st.steps[w] is not None and st.t1[w] is not None and st.t2[w] is not None
                         and st.steps[w] <= 2 * min(st.t1[w], st.t2[w]) + 1 for w in st.steps)
        row["accounting_holds"] = accounting
        if st.budget_failures or st.decision_mismatches or not accounting \
                or st.bound_m1_holds is False or st.bound_m2_holds is False:
            status = 1
        rows.append(row)
    return status, {"M1": M1.machine_id, "M2": M2.machine_id, "results": rows}


def cmd_report(args):
    wanted = [int(n) for n in args.only.split(",")] if args.only else None
    results = acceptance.run_all(wanted)
    for r in results:
        print(r.line(), file=sys.stderr)
    return (0 if all(r.ok for r in results) else 1), {"criteria": [r.to_dict() for r in results]}


# ------------------------------------------------------------------- main


def _machine_flags(p, input_flag="input"):
    p.add_argument("--engine", required=True)
    p.add_argument("--inner", default="accept-all")
    p.add_argument("--c", type=int)
    p.add_argument("--budget", type=int)
    if input_flag == "input":
        p.add_argument("--input", default="")
    else:
        p.add_argument("--inputs")


def build_parser():
    parser = argparse.ArgumentParser(prog="catalytic-lab", description="Almost-catalytic machine laboratory.",
                                     epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one machine on one (input, w)")
    _machine_flags(p)
    p.add_argument("--w")
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("verify", help="check restoration and decisions")
    _machine_flags(p, "inputs")
    p.add_argument("--set")
    p.add_argument("--mode", default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--all-cases", action="store_true", help="list passing cases too")

    p = sub.add_parser("disjoint", help="configuration disjointness over the restoration set")
    _machine_flags(p)
    p.add_argument("--set")
    p.add_argument("--no-hypothesis", action="store_true", help="report collisions even if restoration fails")

    p = sub.add_parser("measures", help="P, R_eps, Fourier spectra, Gotsman-Linial")
    p.add_argument("--set")
    p.add_argument("--mask", help="hex mask, inline or @file")
    p.add_argument("--m", type=int)
    p.add_argument("--measure", default="partition", choices=["partition", "projection", "spectrum", "l1", "gl"])
    p.add_argument("--k", type=int, help="threshold for --measure gl (all k if omitted)")
    p.add_argument("--epsilon", help="p/q")
    p.add_argument("--alpha", default="1/4", help="epsilon = 2^(-alpha m) when --epsilon is absent")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also write the fraction or coefficient table as CSV")

    p = sub.add_parser("codes", help="code operations")
    p.add_argument("--code", required=True)
    p.add_argument("--op", default="info",
                   choices=["info", "encode", "decode", "codewords", "min-distance", "covering-radius",
                            "sphere-covering"])
    p.add_argument("--word")
    p.add_argument("--radius", type=int)

    p = sub.add_parser("zpp", help="dovetail a machine pair and collect runtime statistics")
    p.add_argument("--inner", default="input-parity")
    p.add_argument("--c", type=int)
    p.add_argument("--m1")
    p.add_argument("--m2")
    p.add_argument("--inputs")
    p.add_argument("--mode", default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)

    p = sub.add_parser("report", help="run the acceptance criteria")
    p.add_argument("--only", help="comma list of criterion numbers")
    return parser


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "disjoint": cmd_disjoint,
    "measures": cmd_measures,
    "codes": cmd_codes,
    "zpp": cmd_zpp,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, payload = COMMANDS[args.command](args)
    except (UsageError, ConfigInvalid, KeyError, ValueError) as exc:
        print(f"catalytic-lab: {exc}\n\n{GRAMMAR}", file=sys.stderr)
        return 2
    except CatalyticLabError as exc:
        print(f"catalytic-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
