"""Command-line entry point: ``schurkit <subcommand> ...``.

Every run prints JSON lines and ends with a manifest line. Exit codes:
0 success, 1 a checked property failed, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, abelian
from .errors import BudgetExceeded, SchurError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    parameters: dict
    versions: dict = field(default_factory=dict)
    input_hashes: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"manifest": asdict(self)}


def _versions() -> dict:
    import sympy

    return {"schurkit": __version__, "numpy": np.__version__, "sympy": sympy.__version__,
            "python": platform.python_version()}


def _hash_file(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Output:
    """JSON-lines sink: stdout, or a file when ``--out`` is given."""

    def __init__(self, path: str | None):
        self.fh = open(path, "w") if path else sys.stdout
        self.count = 0

    def emit(self, obj: dict):
        self.fh.write(json.dumps(obj, separators=(",", ":"), sort_keys=True) + "\n")
        self.count += 1

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _read_jsonl(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _load_srings(path: str):
    from .sring import sring_from_json

    return [sring_from_json(r) for r in _read_jsonl(path) if "classes" in r]


# ------------------------------------------------------------ commands


def cmd_construct(args, out: Output) -> tuple[int, dict]:
    from .constructions import FAMILY_NAMES, TABLE2, build_family, p_subgroup, table2_check

    if args.family not in FAMILY_NAMES:
        raise SchurError(f"unknown family {args.family!r}; choose from {', '.join(FAMILY_NAMES)}")
    inst = build_family(args.family, args.p, H=args.h, M_order=args.m_order)
    A = inst.sring
    P = p_subgroup(A.group)
    report = {
        "family": inst.family, "p": inst.p, "H": inst.H, "m_order": inst.M_order,
        "rank": A.rank, "N": sorted(set(A.size_profile())),
        "N_P": sorted({len(X) for X in A.classes[1:] if X[0] in P.member_set}),
    }
    code = EXIT_OK
    if inst.family in TABLE2:
        ok = table2_check(inst)
        report["table2"] = "match" if ok else "mismatch"
        code = EXIT_OK if ok else EXIT_VIOLATION
    out.emit({"sring": A.to_json(), "signature": report})
    return code, report


def cmd_enumerate(args, out: Output) -> tuple[int, dict]:
    from .enumeration import enumerate_srings

    G = abelian.make_group(args.group)
    cat = enumerate_srings(G, with_orbits=args.up_to_cayley)
    members = [orb[0][0] for orb in cat.orbits] if args.up_to_cayley else cat.all
    for A in members:
        out.emit(A.to_json())
    return EXIT_OK, {"group": G.spec(), "count": len(cat.all), "emitted": len(members)}


def cmd_classify(args, out: Output) -> tuple[int, dict]:
    from .enumeration import classify, enumerate_srings, lemma_statements
    from .iso import Budget

    if args.catalog:
        srings = _load_srings(args.catalog)
    else:
        srings = enumerate_srings(abelian.make_group(args.group), with_orbits=False).all
    budget = Budget(args.budget_nodes)
    exceptions = 0
    for i, A in enumerate(srings):
        tag = classify(A, mode=args.mode, budget=budget)
        st = lemma_statements(tag)
        exceptions += not st
        out.emit({"index": i, **tag.to_json(), "statements": st})
    return (EXIT_VIOLATION if exceptions else EXIT_OK), {"srings": len(srings), "exceptions": exceptions}


def cmd_iso(args, out: Output) -> tuple[int, dict]:
    from .iso import Budget, combinatorially_isomorphic, find_algebraic_isos, find_cayley_isos

    (A,), (B,) = _load_srings(args.first)[:1], _load_srings(args.second)[:1]
    budget = Budget(args.budget_nodes)
    res: dict = {}
    if args.alg:
        isos = find_algebraic_isos(A, B, limit=args.limit, budget=budget)
        res["algebraic"] = [list(p.class_map) for p in isos]
    if args.comb:
        f = combinatorially_isomorphic(A, B, budget=budget)
        res["combinatorial"] = None if f is None else list(f.images)
    if args.cayley:
        if A.group != B.group:
            res["cayley"] = []
        else:
            res["cayley"] = [list(s.images) for s in find_cayley_isos(A, B, limit=args.limit)]
    out.emit(res)
    return EXIT_OK, {k: (len(v) if isinstance(v, list) else v is not None) for k, v in res.items()}


def _sweep(records, out: Output, checkpoint: str | None) -> tuple[int, dict]:
    fails = done = 0
    ck = open(checkpoint, "a") if checkpoint else None
    try:
        for rec in records:
            out.emit(rec)
            if rec["kind"] == "sring":
                done += 1
                fails += rec["verdict"] != "separable"
                if ck:
                    ck.write(json.dumps([rec["group"], rec["index"]]) + "\n")
                    ck.flush()
    finally:
        if ck:
            ck.close()
    return (EXIT_VIOLATION if fails else EXIT_OK), {"checked": done, "not_separable": fails}


def _skip_set(checkpoint: str | None) -> frozenset:
    if not checkpoint or not Path(checkpoint).exists():
        return frozenset()
    return frozenset(tuple(x) for x in _read_jsonl(checkpoint))


def cmd_separability(args, out: Output) -> tuple[int, dict]:
    from .batch import SweepConfig, separability_sweep, verify_records
    from .enumeration import cayley_orbits_of_order
    from .iso import Budget, is_separable

    if args.verify:
        checked, failed = verify_records(_read_jsonl(args.verify))
        out.emit({"replayed": checked, "failed": failed})
        return (EXIT_VIOLATION if failed else EXIT_OK), {"replayed": checked, "failed": failed}
    if args.order:
        cfg = SweepConfig(args.order, args.budget_nodes, representatives_only=args.representatives)
        return _sweep(separability_sweep(cfg, _skip_set(args.checkpoint)), out, args.checkpoint)
    fails = 0
    budget = Budget(args.budget_nodes)
    for A in _load_srings(args.sring):
        rep = is_separable(A, target_orbits=cayley_orbits_of_order(A.group.order, rank=A.rank), budget=budget)
        fails += not rep.separable
        out.emit({**rep.summary(), "witnesses": [
            {"target": w.target.to_json(), "class_map": list(w.class_map),
             "images": None if w.images is None else list(w.images), "verified": w.verified}
            for w in rep.witnesses]})
    return (EXIT_VIOLATION if fails else EXIT_OK), {"not_separable": fails}


def cmd_verify_main_theorem(args, out: Output) -> tuple[int, dict]:
    from .batch import SweepConfig, groups_of_order_9p, separability_sweep, verify_records

    if args.verify:
        checked, failed = verify_records(_read_jsonl(args.verify))
        out.emit({"replayed": checked, "failed": failed})
        return (EXIT_VIOLATION if failed else EXIT_OK), {"replayed": checked, "failed": failed}
    if args.p is None:
        raise SchurError("--p is required")
    groups_of_order_9p(args.p)
    if args.p not in (2, 5) and args.budget_nodes is None:
        raise SchurError("p outside {2, 5} needs an explicit --budget-nodes")
    cfg = SweepConfig(9 * args.p, args.budget_nodes)
    return _sweep(separability_sweep(cfg, _skip_set(args.checkpoint)), out, args.checkpoint)


def cmd_nonisom_matrix(args, out: Output) -> tuple[int, dict]:
    from .batch import nonisom_families, nonisom_matrix
    from .constructions import _check_prime
    from .iso import Budget

    _check_prime(args.p)
    entries = nonisom_families(args.p, H=args.h)
    M = nonisom_matrix(entries, budget=Budget(args.budget_nodes))
    names = [e.name for e in entries]
    off = [[names[a], names[b]] for a in range(len(names)) for b in range(a + 1, len(names)) if M[a, b]]
    out.emit({"p": args.p, "H": args.h, "families": names, "matrix": M.astype(int).tolist(),
              "off_diagonal": off})
    return (EXIT_VIOLATION if off else EXIT_OK), {"families": len(names), "off_diagonal": len(off)}


def cmd_wl_check(args, out: Output) -> tuple[int, dict]:
    from .batch import inverse_closed_sets, sampled_sets, wl_sweep

    items = []
    for spec in args.group:
        G = abelian.make_group(spec)
        if args.all_inverse_closed:
            sets = inverse_closed_sets(G)
        else:
            sets = sampled_sets(G, args.sample, args.seed)
        items.extend((G, X) for X in sets)
    res = wl_sweep(items, joint_samples=args.joint_samples, seed=args.seed)
    summary = {k: v for k, v in asdict(res).items() if k != "details"}
    out.emit({"groups": args.group, **summary, "details": res.details})
    return (EXIT_OK if res.ok else EXIT_VIOLATION), summary


def cmd_wl_pair(args, out: Output) -> tuple[int, dict]:
    from .wl import digraph_coloring, graph_from_json, graph_isomorphism, wl2_equivalent

    a1 = graph_from_json(json.loads(Path(args.first).read_text()))
    a2 = graph_from_json(json.loads(Path(args.second).read_text()))
    eq = wl2_equivalent(digraph_coloring(a1), digraph_coloring(a2))
    f = graph_isomorphism(a1, a2) if a1.shape == a2.shape else None
    res = {"wl2_equivalent": eq, "isomorphic": f is not None,
           "isomorphism": None if f is None else f.tolist()}
    out.emit(res)
    # 2-WL separating isomorphic graphs would be a bug; the converse is the claim under test
    return (EXIT_OK if eq == (f is not None) else EXIT_VIOLATION), {"wl2_equivalent": eq, "isomorphic": f is not None}


# -------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schurkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="write JSON lines here instead of stdout")
        p.add_argument("--budget-nodes", type=int, default=None,
                       help="backtracking node budget (default: $SCHURKIT_BUDGET_NODES or 1e8)")
        return p

    p = add("construct", cmd_construct, "build one of the named S-ring families")
    p.add_argument("family")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h", choices=("E", "C"), default="E")
    p.add_argument("--m-order", type=int, default=None)

    p = add("enumerate", cmd_enumerate, "all S-rings over a group")
    p.add_argument("--group", required=True, help="group spec, e.g. 9x5 or 3x3x5")
    p.add_argument("--up-to-cayley", action="store_true")

    p = add("classify", cmd_classify, "tag S-rings with the classification statements they satisfy")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog")
    src.add_argument("--group")
    p.add_argument("--mode", choices=("9p", "p2", "circ", "generic"), default=None)

    p = add("iso", cmd_iso, "isomorphisms between two S-rings (JSON files)")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--alg", action="store_true")
    p.add_argument("--comb", action="store_true")
    p.add_argument("--cayley", action="store_true")
    p.add_argument("--limit", type=int, default=None)

    p = add("separability", cmd_separability, "inducing isomorphisms for every algebraic isomorphism")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--sring", help="JSON-lines file of S-rings")
    src.add_argument("--order", type=int, help="every S-ring over every abelian group of this order")
    src.add_argument("--verify", help="replay the witnesses of an earlier report")
    p.add_argument("--representatives", action="store_true", help="one S-ring per Cayley orbit")
    p.add_argument("--checkpoint")

    p = add("verify-main-theorem", cmd_verify_main_theorem, "separability sweep over order 9p")
    p.add_argument("--p", type=int)
    p.add_argument("--checkpoint", help="file of finished S-rings; rerun to resume")
    p.add_argument("--verify", help="replay the witnesses of an earlier report")

    p = add("nonisom-matrix", cmd_nonisom_matrix, "pairwise algebraic isomorphism of the named families")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h", choices=("E", "C"), default="E")

    p = add("wl-check", cmd_wl_check, "2-WL versus isomorphism on Cayley graphs")
    p.add_argument("--group", action="append", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--all-inverse-closed", action="store_true")
    mode.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--joint-samples", type=int, default=50)

    p = add("wl-pair", cmd_wl_pair, "2-WL equivalence and isomorphism of two graph files")
    p.add_argument("first")
    p.add_argument("second")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    out = Output(args.out)
    params = {k: v for k, v in vars(args).items() if k not in ("fn", "out")}
    manifest = RunManifest(args.command, params, _versions())
    for key in ("catalog", "first", "second", "sring", "verify"):
        path = getattr(args, key, None)
        if path and Path(path).exists():
            manifest.input_hashes[path] = _hash_file(path)
    t0 = time.perf_counter()
    try:
        code, summary = args.fn(args, out)
    except BudgetExceeded as e:
        code, summary = EXIT_BUDGET, {"error": str(e), "nodes": e.nodes}
    except SchurError as e:
        code, summary = EXIT_USAGE, {"error": f"{type(e).__name__}: {e}"}
    except (OSError, json.JSONDecodeError) as e:
        code, summary = EXIT_USAGE, {"error": str(e)}
    manifest.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    manifest.result = {"exit_code": code, "records": out.count, **summary}
    out.emit(manifest.to_json())
    out.close()
    if code == EXIT_USAGE:
        print(summary.get("error", "usage error"), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
