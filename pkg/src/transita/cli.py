"""Unified command-line frontend.

Decision output is a single JSON report on stdout; diagnostics go to
stderr.  All randomized behavior is seed-controlled and reports embed the
seed, so identical invocations are byte-identical apart from the elapsed
time field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import io as tio
from .compath import compath, family_for_bound
from .core import Endpoint, TransitionSystem, validate_transition_system
from .detour import comdetour
from .dsp import edge_disjoint_2dspp, vertex_disjoint_2dspp
from .genred import (
    gen_random_edge_colored,
    gen_random_ftg,
    gen_random_psi,
    hamiltonian_reduction,
    psi_reduction,
)
from .oracle import (
    brute_2dspp,
    brute_compatible_path,
    brute_disjoint_paths,
    brute_pchc,
    brute_psi,
)
from .pchc import naive_pchc, rank_based_pchc
from .treecut import comvdp, exhaustive_treecut_decomposition

SCHEMA = "transita-report/1"


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_instance(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    return tio.parse_instance(raw), _digest(raw)


def _load_decomposition(path):
    with open(path, "rb") as fh:
        return tio.parse_decomposition(fh.read())


def _endpoint(text: str) -> Endpoint:
    if text.startswith("e"):
        return Endpoint.edge(int(text[1:]))
    return Endpoint.vertex(int(text))


def _emit(report: dict, started: float, args) -> int:
    report["schema"] = SCHEMA
    report["stats"] = dict(report.get("stats", {}))
    report["stats"]["elapsed_ms"] = round(1000 * (time.perf_counter() - started), 3)
    if getattr(args, "threads", None):
        report["threads"] = args.threads
    json.dump(report, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    answer = report.get("answer")
    if getattr(args, "strict_exit", False):
        if answer is False or answer is None:
            return 1
    return 0


def _pairs_from(args, inst) -> list:
    pairs = []
    if getattr(args, "pairs", None):
        for item in args.pairs:
            a, b = item.split(",")
            pairs.append((int(a), int(b)))
    elif inst.terminals:
        pairs = list(inst.terminals)
    return pairs


def cmd_compath(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    x, y = _endpoint(getattr(args, "from")), _endpoint(args.to)
    fam = family_for_bound(inst.graph.n, args.max_len, args.seed)
    res = compath(
        inst.graph, inst.transitions, x, y, args.max_len,
        seed=args.seed, witness=args.witness, family=fam,
    )
    length, wit = res if args.witness else (res, None)
    report = {
        "solver": "compath",
        "input_digest": digest,
        "seed": args.seed,
        "answer": length is not None,
        "length": length,
        "family_size": len(fam),
    }
    if args.witness and wit is not None:
        report["witness"] = list(wit.vertices)
    return _emit(report, started, args)


def cmd_detour(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    res = comdetour(
        inst.graph, inst.transitions, getattr(args, "from"), args.to, args.slack,
        seed=args.seed, witness=args.witness,
    )
    report = {
        "solver": "detour",
        "input_digest": digest,
        "seed": args.seed,
        "answer": res.yes,
        "yes": res.yes,
        "nu": res.nu,
        "dist": res.dist,
    }
    if res.diagnostic:
        report["diagnostic"] = res.diagnostic
    if args.witness and res.witness is not None:
        report["witness"] = list(res.witness.vertices)
    return _emit(report, started, args)


def cmd_comvdp(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    pairs = _pairs_from(args, inst)
    if args.decomposition:
        dec = _load_decomposition(args.decomposition)
    else:
        dec = exhaustive_treecut_decomposition(inst.graph, args.max_width)
        if dec is None:
            print("no decomposition within the width bound", file=sys.stderr)
            return 2
    yes, info = comvdp(inst.graph, inst.transitions, pairs, dec)
    report = {
        "solver": "comvdp",
        "input_digest": digest,
        "seed": args.seed,
        "answer": yes,
        "yes": yes,
        "width": info.get("width"),
        "nice": info.get("nice"),
    }
    return _emit(report, started, args)


def cmd_pchc(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    if inst.coloring is None:
        print("pchc needs an edge-colored instance", file=sys.stderr)
        return 2
    dec = _load_decomposition(args.decomposition)
    stats = {}
    if args.engine == "naive":
        yes = naive_pchc(inst.graph, inst.coloring, dec, stats=stats)
    else:
        yes = rank_based_pchc(inst.graph, inst.coloring, dec, stats=stats)
    report = {
        "solver": f"pchc-{args.engine}",
        "input_digest": digest,
        "seed": args.seed,
        "answer": yes,
        "yes": yes,
        "max_family": stats.get("max_family", 0),
        "field_a": stats.get("field_a"),
    }
    return _emit(report, started, args)


def cmd_dsp(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    s1, t1, s2, t2 = (int(x) for x in args.pairs.split(","))
    fn = edge_disjoint_2dspp if args.mode == "edge" else vertex_disjoint_2dspp
    res = fn(inst.graph, inst.transitions, s1, t1, s2, t2)
    report = {
        "solver": f"dsp-{args.mode}",
        "input_digest": digest,
        "seed": args.seed,
        "answer": res.yes,
        "yes": res.yes,
    }
    if res.paths is not None:
        report["paths"] = [list(w.vertices) for w in res.paths]
    if res.diagnostic:
        report["diagnostic"] = res.diagnostic
    return _emit(report, started, args)


def cmd_validate(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    violations = validate_transition_system(inst.graph, inst.transitions)
    report = {
        "solver": "validate",
        "input_digest": digest,
        "seed": args.seed,
        "answer": not violations,
        "violations": [{"pair": list(v.pair), "reason": v.reason} for v in violations],
    }
    return _emit(report, started, args)


def _write_instance(inst, args) -> None:
    data = tio.serialize_instance(inst)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_gen(args) -> int:
    if args.kind == "random-ftg":
        g, t = gen_random_ftg(args.n, args.p, args.q, args.seed)
        inst = tio.Instance(g, t)
    elif args.kind == "random-colored":
        g, c = gen_random_edge_colored(args.n, args.p, args.colors, args.seed)
        inst = tio.Instance(g, TransitionSystem(), coloring=c)
    elif args.kind == "psi-reduce":
        psi = gen_random_psi(args.mh, args.n, args.p, args.seed)
        out = psi_reduction(psi)
        inst = tio.Instance(
            out.graph, out.transition_system(), terminals=((out.s, out.t),)
        )
    else:  # psi-reduce-ham
        psi = gen_random_psi(args.mh, args.n, args.p, args.seed)
        out = hamiltonian_reduction(psi)
        inst = tio.Instance(out.graph, out.transition_system())
    _write_instance(inst, args)
    return 0


def cmd_oracle(args) -> int:
    started = time.perf_counter()
    inst, digest = _load_instance(args.instance)
    if args.problem == "compath":
        val = brute_compatible_path(
            inst.graph, inst.transitions, _endpoint(getattr(args, "from")),
            _endpoint(args.to), args.max_len,
        )
        report = {"answer": val is not None, "length": val}
    elif args.problem == "disjoint":
        pairs = _pairs_from(args, inst)
        yes = brute_disjoint_paths(inst.graph, inst.transitions, pairs, args.mode)
        report = {"answer": yes, "yes": yes}
    elif args.problem == "pchc":
        if inst.coloring is None:
            print("oracle pchc needs colors", file=sys.stderr)
            return 2
        yes = brute_pchc(inst.graph, inst.coloring)
        report = {"answer": yes, "yes": yes}
    else:  # 2dspp
        flat = ",".join(args.pairs or ())
        s1, t1, s2, t2 = (int(x) for x in flat.split(","))
        yes = brute_2dspp(inst.graph, inst.transitions, [(s1, t1), (s2, t2)], args.mode)
        report = {"answer": yes, "yes": yes}
    report.update({"solver": f"oracle-{args.problem}", "input_digest": digest, "seed": args.seed})
    return _emit(report, started, args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="transita",
        description="Solvers, oracles and generators for forbidden-transition graphs",
    )
    default_threads = int(os.environ.get("TRANSITA_THREADS", "1"))
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--strict-exit", action="store_true")
        p.add_argument(
            "--threads", type=int, default=default_threads,
            help="reserved; results are independent of the thread count",
        )

    p = sub.add_parser("compath", help="shortest compatible path of bounded length")
    p.add_argument("--instance", required=True)
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--witness", action="store_true")
    common(p)
    p.set_defaults(func=cmd_compath)

    p = sub.add_parser("detour", help="compatible path within dist+slack")
    p.add_argument("--instance", required=True)
    p.add_argument("--from", type=int, required=True)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--slack", type=int, required=True)
    p.add_argument("--witness", action="store_true")
    common(p)
    p.set_defaults(func=cmd_detour)

    p = sub.add_parser("comvdp", help="compatible vertex-disjoint paths")
    p.add_argument("--instance", required=True)
    p.add_argument("--decomposition")
    p.add_argument("--pairs", nargs="*")
    p.add_argument("--max-width", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_comvdp)

    p = sub.add_parser("pchc", help="properly colored Hamiltonian cycle")
    p.add_argument("--instance", required=True)
    p.add_argument("--decomposition", required=True)
    p.add_argument("--engine", choices=("naive", "rank"), default="rank")
    common(p)
    p.set_defaults(func=cmd_pchc)

    p = sub.add_parser("dsp", help="two disjoint shortest compatible paths")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("edge", "vertex"), required=True)
    p.add_argument("--pairs", required=True, help="s1,t1,s2,t2")
    common(p)
    p.set_defaults(func=cmd_dsp)

    p = sub.add_parser("validate", help="validate an instance file")
    p.add_argument("--instance", required=True)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="instance generators")
    p.add_argument(
        "kind",
        choices=("random-ftg", "random-colored", "psi-reduce", "psi-reduce-ham"),
    )
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--q", type=float, default=0.7)
    p.add_argument("--colors", type=int, default=3)
    p.add_argument("--mh", type=int, default=2)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="brute-force reference solvers")
    p.add_argument("problem", choices=("compath", "disjoint", "pchc", "2dspp"))
    p.add_argument("--instance", required=True)
    p.add_argument("--from", dest="from")
    p.add_argument("--to")
    p.add_argument("--max-len", type=int)
    p.add_argument("--mode", choices=("edge", "vertex"), default="vertex")
    p.add_argument("--pairs", nargs="*")
    common(p)
    p.set_defaults(func=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except tio.InstanceFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
