"""Command-line interface.

Subcommands mirror the library one-to-one: analyze, embed, trajectory,
construct, rado. Exit codes: 0 success, 1 numerical-contract failure
(e.g. an embedding residual above threshold), 2 input or validation error.
Every artifact embeds {seed, tol_rel, version}; identical invocations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .constructions import (
    CountableRadoModel,
    er_adjacency,
    perturb_to_max_negative,
    prescribed_signature_space,
    quadratic_gap_clique,
    rado_s_matrix,
    residue_class_clique,
    union_space,
)
from .errors import BadParams, InvalidInput, MmsigError
from .linalg import inertia
from .sampling import DiscreteMeasure, load_measure
from .signature import (
    classify_embeddability,
    embedding_to_json,
    limit_signature_trajectory,
    mds_embed,
    sampled_signature_trajectory,
    space_signature,
    centered_signature,
    verify_isometry,
    write_trajectory_csv,
)
from .spaces import (
    from_graph,
    named_example,
    read_distance_csv,
    read_edge_list,
    write_distance_csv,
)
from .spectral import (
    delta_ratio,
    esd,
    ks_to_semicircle,
    rado_ratio_trials,
    ratio_summary,
    summary_to_json,
    worker_count,
    write_esd_csv,
    write_ratio_csv,
)

EMBED_RESIDUAL_REL = 1e-6


def _provenance(args) -> dict:
    return {
        "seed": int(getattr(args, "seed", 0) or 0),
        "tol_rel": args.tol,
        "version": __version__,
    }


def _provenance_comment(args) -> str:
    p = _provenance(args)
    return f"mmsig version={p['version']} seed={p['seed']} tol_rel={p['tol_rel']!r}"


def _load_space(args):
    if args.example:
        params = {}
        if args.n is not None:
            params["n"] = args.n
        if args.dim is not None:
            params["dim"] = args.dim
        if args.example in ("sphere", "sphere_sqrt"):
            params.setdefault("seed", args.seed or 0)
        return named_example(args.example, **params)
    if args.input:
        fmt = args.input_format
        if fmt == "auto":
            fmt = "csv" if args.input.endswith(".csv") else "edges"
        if fmt == "csv":
            return read_distance_csv(args.input)
        return from_graph(read_edge_list(args.input))
    raise InvalidInput("need --example or --input")


def _emit(text: str, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _add_space_args(sub):
    sub.add_argument("--example", help="named example space")
    sub.add_argument("--input", help="distance CSV or edge-list file")
    sub.add_argument(
        "--input-format", choices=["auto", "csv", "edges"], default="auto"
    )
    sub.add_argument("--n", type=int, help="point count for sized examples")
    sub.add_argument("--dim", type=int, help="sphere dimension")


def _add_common(sub):
    sub.add_argument("--output", help="output path (default stdout)")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=1e-9, help="relative zero tolerance")


def cmd_analyze(args) -> int:
    space = _load_space(args)
    ine_s = space_signature(space, args.tol)
    verdict = classify_embeddability(space, args.tol)
    ine_t = verdict.certificate
    doc = {
        "n": space.n,
        "inertia_S": list(ine_s.counts()),
        "theta_S": ine_s.tol,
        "inertia_T": list(ine_t.counts()),
        "theta_T": ine_t.tol,
        "verdict": verdict.describe(),
        **_provenance(args),
    }
    if args.format == "json":
        _emit(json.dumps(doc, sort_keys=True, indent=2), args.output)
    else:
        flat = dict(doc)
        for key in ("inertia_S", "inertia_T"):
            sm, s0, sp = flat.pop(key)
            flat[f"{key}_minus"], flat[f"{key}_zero"], flat[f"{key}_plus"] = sm, s0, sp
        header = ",".join(flat.keys())
        row = ",".join(
            repr(v) if isinstance(v, float) else str(v) for v in flat.values()
        )
        _emit(header + "\n" + row, args.output)
    return 0


def cmd_embed(args) -> int:
    space = _load_space(args)
    embedding = mds_embed(space, args.tol)
    residual = verify_isometry(embedding, space, args.tol)
    text = embedding_to_json(embedding, provenance=_provenance(args))
    _emit(text, args.output)
    print(f"max residual: {residual!r}")
    if space.n > 1 and residual > EMBED_RESIDUAL_REL * space.diameter:
        print(
            f"residual exceeds {EMBED_RESIDUAL_REL!r} * diameter", file=sys.stderr
        )
        return 1
    return 0


def _parse_sizes(text, n):
    if not text:
        return None
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 1:
        return [parts[0]]
    lo, hi = parts[0], parts[1]
    step = parts[2] if len(parts) > 2 else 1
    return list(range(lo, min(hi, n) + 1, step))


def cmd_trajectory(args) -> int:
    if args.model_p is not None:
        # countable-model source: sample vertices, nest their dedup prefixes
        from mmsig.spectral import sampled_prefix_trajectory

        if args.m_max is None:
            raise InvalidInput("model trajectory needs --m-max")
        model = CountableRadoModel(
            edge_prob=args.model_p,
            seed=args.model_seed if args.model_seed is not None else args.seed,
            planted_clique=_parse_clique(args),
        )
        measure = _parse_measure(args.measure or "geometric:0.9")
        traj = sampled_prefix_trajectory(
            model, measure, args.m_max, args.seed, tol_rel=args.tol
        )
    elif args.measure:
        space = _load_space(args)
        measure = _parse_measure(args.measure, n=space.n)
        if args.m_max is None:
            raise InvalidInput("sampled trajectory needs --m-max")
        traj = sampled_signature_trajectory(
            space, measure, args.m_max, args.seed, tol_rel=args.tol
        )
    else:
        space = _load_space(args)
        traj = limit_signature_trajectory(
            space, sizes=_parse_sizes(args.sizes, space.n), tol_rel=args.tol
        )
    if args.output:
        write_trajectory_csv(traj, args.output, comment=_provenance_comment(args))
    else:
        print("size,s_minus,s_zero,s_plus,theta")
        for size, sm, s0, sp, theta in traj.rows():
            print(f"{size},{sm},{s0},{sp},{theta!r}")
    if traj.stabilized is not None:
        print(
            f"tentative plateau (s_minus, s_plus) = {traj.stabilized} "
            f"over the last {traj.window} steps"
        )
    return 0


def cmd_construct(args) -> int:
    if args.kind == "prescribed":
        if args.n is None or args.p is None:
            raise InvalidInput("prescribed needs --n and --p")
        space = prescribed_signature_space(args.n, args.p, args.seed, args.tol)
    elif args.kind == "perturb":
        if not args.input:
            raise InvalidInput("perturb needs --input")
        space = perturb_to_max_negative(
            read_distance_csv(args.input, strict=True), args.seed, args.tol
        )
    elif args.kind == "union":
        if not args.inputs or args.h is None:
            raise InvalidInput("union needs --inputs and --h")
        comps = [read_distance_csv(p) for p in args.inputs]
        space = union_space(comps, args.h)
    else:
        raise InvalidInput(f"unknown construct kind {args.kind!r}")
    if not args.output:
        raise InvalidInput("construct needs --output")
    write_distance_csv(space, args.output, comment=_provenance_comment(args))
    ine = centered_signature(space, args.tol)
    print(f"wrote {space.n}-point space, centered inertia {ine.counts()}")
    return 0


def _parse_measure(spec: str, n=None) -> DiscreteMeasure:
    if os.path.exists(spec):
        return load_measure(spec, n=n)
    name, _, rest = spec.partition(":")
    if name == "uniform":
        if n is None:
            raise InvalidInput("uniform measure needs a finite space")
        return DiscreteMeasure.uniform(n)
    if name == "geometric":
        if not rest:
            raise InvalidInput("geometric measure needs a ratio, e.g. geometric:0.9")
        return DiscreteMeasure.geometric(float(rest))
    if name == "super_geometric":
        return DiscreteMeasure.super_geometric()
    if name == "class_biased":
        parts = rest.split(":") if rest else []
        if not parts or not parts[0]:
            raise InvalidInput("class_biased needs j, e.g. class_biased:30")
        q = float(parts[1]) if len(parts) > 1 else 0.9
        return DiscreteMeasure.class_biased(int(parts[0]), q)
    raise InvalidInput(f"unknown measure {spec!r}")


def _parse_clique(args):
    if args.clique and args.clique_rule:
        raise InvalidInput("give either --clique or --clique-rule, not both")
    if args.clique:
        return frozenset(int(x) for x in args.clique.split(",") if x.strip())
    if args.clique_rule:
        name, _, param = args.clique_rule.partition(":")
        if name == "modular":
            if not param:
                raise InvalidInput("modular clique rule needs a modulus")
            return residue_class_clique(int(param))
        if name == "quadratic":
            return quadratic_gap_clique()
        raise InvalidInput(f"unknown clique rule {args.clique_rule!r}")
    return None


def cmd_rado(args) -> int:
    if args.p is None or not (0.0 < args.p < 1.0):
        raise BadParams(f"edge probability must be in (0, 1), got {args.p!r}")
    model = CountableRadoModel(
        edge_prob=args.p,
        seed=args.model_seed if args.model_seed is not None else args.seed,
        planted_clique=_parse_clique(args),
    )
    prefix = args.output_prefix or "rado"
    if args.ratio:
        measure = _parse_measure(args.measure or "geometric:0.9")
        if args.m_max is None:
            raise InvalidInput("--ratio needs --m-max")
        trajectories = rado_ratio_trials(
            model,
            measure,
            args.m_max,
            trials=args.trials,
            seed=args.seed,
            tol_rel=args.tol,
            workers=worker_count(),
        )
        write_ratio_csv(
            trajectories, f"{prefix}_ratio.csv", comment=_provenance_comment(args)
        )
        doc = ratio_summary(
            trajectories,
            provenance={
                **_provenance(args),
                "m_max": args.m_max,
                "measure": measure.rule or "weights",
                "model": {"p": args.p, "seed": model.seed},
            },
            delta_threshold=args.delta_threshold,
            min_fraction=args.min_fraction,
        )
        with open(f"{prefix}_summary.json", "w") as fh:
            fh.write(summary_to_json(doc) + "\n")
        print(f"wrote {prefix}_ratio.csv and {prefix}_summary.json")
        return 0
    if args.N is None:
        raise InvalidInput("need --N for the spectral run")
    graph = er_adjacency(model, args.N)
    S = rado_s_matrix(graph)
    e = esd(S)
    sigma = 1.5 * math.sqrt(args.p * (1.0 - args.p))
    ks = ks_to_semicircle(e, sigma)
    ine = inertia(S, args.tol)
    write_esd_csv(e, f"{prefix}_esd.csv", comment=_provenance_comment(args))
    doc = {
        "N": args.N,
        "edges": len(graph.edges),
        "sigma": sigma,
        "ks_to_semicircle": ks,
        "inertia": list(ine.counts()),
        "delta": delta_ratio(ine),
        **_provenance(args),
        "model": {"p": args.p, "seed": model.seed},
    }
    with open(f"{prefix}_summary.json", "w") as fh:
        fh.write(summary_to_json(doc) + "\n")
    print(f"KS to semicircle: {ks!r}")
    print(f"delta: {doc['delta']!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmsig",
        description="Signatures of squared-distance matrices: analysis, "
        "embeddings, trajectories, constructions, random-graph experiments.",
    )
    parser.add_argument("--version", action="version", version=f"mmsig {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="signatures and embeddability verdict")
    _add_space_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("embed", help="indefinite scaling embedding")
    _add_space_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = subs.add_parser("trajectory", help="signatures along nested prefixes")
    _add_space_args(p)
    _add_common(p)
    p.add_argument("--sizes", help="prefix sizes lo:hi[:step]")
    p.add_argument("--measure", help="sample instead of deterministic nesting")
    p.add_argument("--m-max", type=int, help="sample size for --measure")
    p.add_argument("--model-p", type=float, help="sample a countable model instead")
    p.add_argument("--model-seed", type=int, help="adjacency seed (default --seed)")
    p.add_argument("--clique", help="comma-separated planted clique indices")
    p.add_argument("--clique-rule", help="predicate clique: modular:MOD or quadratic")
    p.set_defaults(func=cmd_trajectory)

    p = subs.add_parser("construct", help="build spaces with prescribed signatures")
    p.add_argument("kind", choices=["prescribed", "perturb", "union"])
    p.add_argument("--n", type=int, help="target s_minus for prescribed")
    p.add_argument("--p", type=int, help="target s_plus for prescribed")
    p.add_argument("--input", help="input distance CSV for perturb")
    p.add_argument("--inputs", nargs="+", help="component CSVs for union")
    p.add_argument("--h", type=float, help="cross-component distance for union")
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    p = subs.add_parser("rado", help="random-graph spectra and ratio experiments")
    p.add_argument("--p", type=float, help="edge probability")
    p.add_argument("--N", type=int, help="truncation order for the spectral run")
    p.add_argument("--model-seed", type=int, help="adjacency seed (default --seed)")
    p.add_argument("--clique", help="comma-separated planted clique indices")
    p.add_argument(
        "--clique-rule", help="predicate clique: modular:MOD or quadratic"
    )
    p.add_argument("--ratio", action="store_true", help="run the ratio experiment")
    p.add_argument("--measure", help="sampling measure for --ratio")
    p.add_argument("--m-max", type=int, help="draws per trial for --ratio")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument(
        "--delta-threshold", type=float,
        help="report the fraction of trials whose ratio reaches this value",
    )
    p.add_argument(
        "--min-fraction", type=float,
        help="with --delta-threshold, add a pass/fail verdict at this fraction",
    )
    p.add_argument("--output-prefix", help="prefix for output files")
    _add_common(p)
    p.set_defaults(func=cmd_rado)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MmsigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
