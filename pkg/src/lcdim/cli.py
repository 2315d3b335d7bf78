"""Command-line front end.

Exit codes: 0 on success or a passing verdict, 1 when a verdict or trace
check fails, 2 for usage and cap errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import adversaries as adv
from .concepts import (
    GENERATORS,
    CapError,
    ClassFileError,
    ConceptClass,
    RealizabilityError,
    class_to_dict,
    load_class,
    save_class,
)
from .dimensions import (
    DEFAULT_MAX_CONCEPTS,
    DEFAULT_MAX_INSTANCES,
    dim_branching,
    dim_ds,
    dim_graph,
    dim_level_littlestone,
    dim_littlestone,
    dim_nt,
)
from .game import (
    MINIMAX_MAX_T,
    VERIFY_MAX_T,
    MinimaxOracle,
    frac_str,
    run,
    run_agnostic,
    verify_bounds,
    verify_halving_trace,
    verify_potential_trace,
)
from .learners import DEFAULT_MAX_EXPERTS, LEARNERS
from .rng import LCG, derive_seed
from .trees import normalize_tree

HARD_CAPS = {
    "max_concepts": DEFAULT_MAX_CONCEPTS,
    "max_instances": DEFAULT_MAX_INSTANCES,
    "max_t_worst": adv.DEFAULT_MAX_T,
    "max_t_verify": VERIFY_MAX_T,
    "max_t_minimax": MINIMAX_MAX_T,
    "max_experts": DEFAULT_MAX_EXPERTS,
}
ADVERSARIES = ("worst_case", "path", "logT", "block", "random")


class UsageError(Exception):
    pass


def parse_kv(text: str | None) -> dict:
    """``a=1,b=true`` -> {"a": 1, "b": True}."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        k, v = k.strip(), v.strip()
        if v.lower() in ("true", "false"):
            out[k] = v.lower() == "true"
        else:
            try:
                out[k] = int(v)
            except ValueError:
                out[k] = v
    return out


def parse_caps(text: str | None) -> dict:
    caps = dict(HARD_CAPS)
    for k, v in parse_kv(text).items():
        if k not in HARD_CAPS:
            raise UsageError(f"unknown cap {k!r}; known caps: {', '.join(HARD_CAPS)}")
        if not isinstance(v, int) or isinstance(v, bool) or v < 0 or v > HARD_CAPS[k]:
            raise UsageError(f"cap {k} must be an integer in 0..{HARD_CAPS[k]}")
        caps[k] = v
    return caps


def make_class(gen: str | None, params: dict, path: str | None) -> ConceptClass:
    if (gen is None) == (path is None):
        raise UsageError("give exactly one of --gen or --class")
    if path is not None:
        return load_class(path)
    if gen not in GENERATORS:
        raise UsageError(f"unknown generator {gen!r}; choose from {', '.join(GENERATORS)}")
    try:
        return GENERATORS[gen](**params)
    except TypeError as e:
        raise UsageError(f"bad parameters for generator {gen}: {e}") from e


def load_source(args, caps: dict) -> ConceptClass:
    C = make_class(args.gen, parse_kv(args.params), args.class_file)
    C.check_caps(caps["max_concepts"], caps["max_instances"])
    return C


def out_dir(args) -> Path | None:
    if args.out is None:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


def default_xs(C: ConceptClass, T: int) -> list[int]:
    return [t % C.n_instances for t in range(T)]


# ---------------------------------------------------------------- commands


def cmd_dims(args, caps) -> int:
    C = load_source(args, caps)
    L = dim_littlestone(C)
    res = {
        "D": dim_level_littlestone(C),
        "B": dim_branching(C, seq_cap=args.seq_cap, littlestone=L.value),
        "L": L,
        "DS": dim_ds(C, caps["max_concepts"], caps["max_instances"]),
        "G": dim_graph(C),
        "NT": dim_nt(C),
    }
    b = res["B"]
    print(
        f"D={res['D'].value} B={b.value} ({'exact' if b.exact else 'lower bound'}) "
        f"L={L.value} DS={res['DS'].value} G={res['G'].value} NT={res['NT'].value}"
    )
    d = out_dir(args)
    if d is not None:
        write_json(d / "dims.json", {k: {"value": w.value, "exact": w.exact} for k, w in res.items()})
        for k, w in res.items():
            write_json(d / f"witness_{k}.json", w.to_dict())
    return 0


def _adversary_streams(name: str, C: ConceptClass, T: int, seeds: list[int], learner: str, caps: dict):
    """Yield (tag, stream) pairs for one learner."""
    if name == "worst_case":
        if learner == "agnostic":
            raise UsageError("worst_case needs a deterministic learner")
        s, _ = adv.worst_case_stream(C, default_xs(C, T), learner, max_t=caps["max_t_worst"])
        yield "worst_case", s
        return
    if name == "random":
        for sd in seeds:
            rng = LCG(sd)
            c = int(rng.uniform() * len(C))
            xs = [int(rng.uniform() * C.n_instances) for _ in range(T)]
            ys = [C.concepts[c][x] for x in xs]
            yield f"random_s{sd}", adv.Stream(xs, ys, {"construction": "random", "realizable": True, "concept": c, "seed": sd})
        return
    Dw = dim_level_littlestone(C)
    for sd in seeds:
        if name == "path":
            yield f"path_s{sd}", adv.path_stream(Dw.witness, C, seed=sd)
        elif name == "block":
            yield f"block_s{sd}", adv.block_stream(Dw.witness, T, seed=sd, C=C)
        elif name == "logT":
            Bw = dim_branching(C)
            tree = normalize_tree(Bw.witness, C, Bw.value)
            yield f"logT_s{sd}", adv.logT_stream(tree, C, T, seed=sd)
        else:
            raise UsageError(f"unknown adversary {name!r}; choose from {', '.join(ADVERSARIES)}")


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from e
    cls = cfg.get("class", {})
    if args.gen or args.class_file:
        cls = {"gen": args.gen, "params": parse_kv(args.params)} if args.gen else {"file": args.class_file}
    cfg["class"] = cls
    if args.T is not None:
        cfg["T"] = args.T
    if args.learners:
        cfg["learners"] = args.learners.split(",")
    if args.adversary:
        cfg["adversary"] = args.adversary
    if args.seeds:
        cfg["seeds"] = parse_ints(args.seeds)
    if args.eta_scale is not None:
        cfg["eta_scale"] = args.eta_scale
    cfg.setdefault("learners", ["bp", "ssh"])
    cfg.setdefault("adversary", "worst_case")
    cfg.setdefault("seeds", [args.seed])
    cfg.setdefault("eta_scale", 1.0)
    if "T" not in cfg:
        raise UsageError("simulate needs a horizon: --T or \"T\" in the config")
    for ln in cfg["learners"]:
        if ln not in LEARNERS:
            raise UsageError(f"unknown learner {ln!r}; choose from {', '.join(LEARNERS)}")
    if cfg["adversary"] not in ADVERSARIES:
        raise UsageError(f"unknown adversary {cfg['adversary']!r}; choose from {', '.join(ADVERSARIES)}")
    if "gen" not in cls and "file" not in cls:
        raise UsageError("no class source: use --gen/--class or a \"class\" entry in the config")
    return cfg


def cmd_simulate(args, caps) -> int:
    cfg = load_config(args)
    cls = cfg["class"]
    C = make_class(cls.get("gen"), cls.get("params", {}), cls.get("file"))
    C.check_caps(caps["max_concepts"], caps["max_instances"])
    T = int(cfg["T"])
    d = out_dir(args)
    rows, ok = [], True
    for learner in cfg["learners"]:
        for tag, stream in _adversary_streams(cfg["adversary"], C, T, cfg["seeds"], learner, caps):
            seed = derive_seed(stream.meta.get("seed", cfg["seeds"][0]), 1)
            kw = {"eta_scale": cfg["eta_scale"], "max_experts": caps["max_experts"]} if learner == "agnostic" else {}
            if learner == "agnostic":
                tr = run("agnostic", C, stream, seed=seed, **kw)
            else:
                tr = run(learner, C, stream)
            check = ""
            if learner == "bp":
                check = "potential:" + ("pass" if verify_potential_trace(tr) else "fail")
            elif learner == "ssh":
                check = "halving:" + ("pass" if verify_halving_trace(tr) else "fail")
            ok &= not check.endswith("fail")
            rows.append([learner, tag, T, tr.mistakes, tr.best_in_class, tr.regret, check])
            if d is not None:
                (d / f"transcript_{learner}_{tag}.csv").write_text(tr.to_csv())
    header = ["learner", "stream", "T", "mistakes", "best_in_class", "regret", "check"]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if d is not None:
        with open(d / "summary.csv", "w", newline="") as fh:
            cw = csv.writer(fh, lineterminator="\n")
            cw.writerow(header)
            cw.writerows(rows)
    if "agnostic" in cfg["learners"] and len(cfg["seeds"]) > 1 and cfg["adversary"] != "worst_case":
        streams = dict(_adversary_streams(cfg["adversary"], C, T, cfg["seeds"], "agnostic", caps))
        summ = run_agnostic(C, lambda s: streams[f"{cfg['adversary']}_s{s}"], cfg["seeds"], cfg["eta_scale"])
        print(json.dumps(summ.to_dict()))
    return 0 if ok else 1


def cmd_minimax(args, caps) -> int:
    C = load_source(args, caps)
    oracle = MinimaxOracle(C, max_concepts=caps["max_concepts"], max_t=caps["max_t_minimax"])
    if args.xs is not None:
        xs = parse_ints(args.xs)
        v = oracle(xs)
    elif args.T is not None:
        from itertools import product

        if args.T > caps["max_t_minimax"]:
            raise CapError(f"T={args.T} exceeds the oracle cap of {caps['max_t_minimax']}")
        v, xs = max((oracle(s), list(s)) for s in product(range(C.n_instances), repeat=args.T))
    else:
        raise UsageError("minimax needs --xs or --T")
    out = {"xs": list(xs), "value": frac_str(v)}
    print(json.dumps(out))
    d = out_dir(args)
    if d is not None:
        write_json(d / "minimax.json", out)
    return 0


def cmd_verify(args, caps) -> int:
    C = load_source(args, caps)
    if args.T is None:
        raise UsageError("verify needs --T")
    verdict = verify_bounds(C, args.T, max_t=caps["max_t_verify"], seq_cap=args.seq_cap,
                            max_concepts=caps["max_concepts"])
    out = verdict.to_dict()
    print(json.dumps(out))
    d = out_dir(args)
    if d is not None:
        write_json(d / "verdict.json", out)
    return 0 if verdict.passed else 1


def cmd_gen(args, caps) -> int:
    C = make_class(args.gen, parse_kv(args.params), None)
    d = out_dir(args)
    if d is None:
        print(json.dumps(class_to_dict(C)))
    else:
        save_class(C, d / f"{C.name or args.gen}.json")
    return 0


# ---------------------------------------------------------------- parser


def _add_source(p):
    p.add_argument("--gen", help="generator name: " + ", ".join(GENERATORS))
    p.add_argument("--params", help="generator parameters as k=v,k=v")
    p.add_argument("--class", dest="class_file", help="class JSON file")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--caps", default=argparse.SUPPRESS, help="lower the hard caps, e.g. max_concepts=12")

    p = argparse.ArgumentParser(prog="lcdim", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("dims", parents=[common], help="compute D, B, L, DS, G, NT with witnesses")
    _add_source(s)
    s.add_argument("--seq-cap", type=int, default=None, help="longest instance sequence searched for B")
    s.set_defaults(func=cmd_dims)

    s = sub.add_parser("simulate", parents=[common], help="run learners against an adversary")
    _add_source(s)
    s.add_argument("--config", help="experiment config JSON; flags override its entries")
    s.add_argument("--T", type=int)
    s.add_argument("--learners", help="comma-separated: " + ", ".join(LEARNERS))
    s.add_argument("--adversary", help="one of: " + ", ".join(ADVERSARIES))
    s.add_argument("--seeds", help="comma-separated seeds (default: --seed)")
    s.add_argument("--eta-scale", type=float, default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("minimax", parents=[common], help="exact minimax expected mistakes")
    _add_source(s)
    s.add_argument("--xs", help="instance sequence, e.g. 0,1,0")
    s.add_argument("--T", type=int, help="maximize over all sequences of length T")
    s.set_defaults(func=cmd_minimax)

    s = sub.add_parser("verify", parents=[common], help="check the mistake-bound sandwich")
    _add_source(s)
    s.add_argument("--T", type=int)
    s.add_argument("--seq-cap", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gen", parents=[common], help="write a generated class file")
    _add_source(s)
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    args.seed = getattr(args, "seed", 0)
    args.out = getattr(args, "out", None)
    try:
        caps = parse_caps(getattr(args, "caps", None))
        return args.func(args, caps)
    except (UsageError, CapError, ClassFileError, RealizabilityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
