"""Command-line interface: spec parsing, experiment orchestration, reports
and rendering.

Subcommands: dims, sample, render, estimate, percolate, tangent, report.
Exit codes: 0 ok, 2 spec error, 3 scale error, 4 retries exhausted.
All randomized outputs are a pure function of (spec, seed).
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import __version__, estimate, percolation, selfsim, specio
from ._core import BACKEND, thread_cap
from .carpet import (CarpetRIFS, as_assouad_carpet, carpet_grid,
                     gui_li_average, mackay_dim, sure_upper_carpet)
from .errors import (AssouadLabError, InsufficientPrefixError,
                     RetriesExhaustedError, ScaleError, SpecError)
from .percolation import PercConfig
from .selfsim import SimilarityRIFS
from .tangent import carpet_tangent_stage, percolation_tangent
from .words import RealizationStream

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_SCALE = 3
EXIT_RETRIES = 4


def _parse_window(text: str) -> tuple[Fraction, ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise SpecError("window must be x_lo,y_lo,x_side,y_side")
    return tuple(specio.parse_fraction(p) for p in parts)


def _parse_centers(text: str):
    if text == "all":
        return "all"
    try:
        k, seed = text.split(":")
        return (int(k), int(seed))
    except ValueError:
        raise SpecError("centers must be 'all' or 'k:seed'") from None


def _load(args) -> object:
    return specio.load_model(specio.read_spec(args.spec))


def _load_realization(args, model) -> RealizationStream:
    if getattr(args, "realization", None):
        return specio.load_realization(specio.read_spec(args.realization))
    if args.seed is None:
        raise SpecError("--seed is required without a realization spec")
    n = model.alphabet_size
    return RealizationStream.iid([Fraction(1, n)] * n, args.seed)


def _dims_payload(model) -> dict:
    if isinstance(model, SimilarityRIFS):
        sim_dims = [selfsim.similarity_dimension(ifs.ratios)
                    for ifs in model.ifss]
        upper, uosc = selfsim.sure_assouad_upper(model)
        probe = selfsim.periodic_sup_probe(model, max_period=2,
                                           max_patterns=4096)
        witness = None
        if probe.independent_witness is not None:
            witness = [specio.format_fraction(c)
                       for c in probe.independent_witness]
        return {
            "kind": "selfsim",
            "sim_dims": sim_dims,
            "as_hausdorff": selfsim.almost_sure_hausdorff(model),
            "as_assouad": upper,
            "uosc": uosc,
            "independence_witness": witness,
        }
    if isinstance(model, CarpetRIFS):
        mackay = [mackay_dim(c) for c in model.ifss]
        value, (i, j) = as_assouad_carpet(model)
        payload = {
            "kind": "carpet",
            "mackay": mackay,
            "as_assouad": value,
            "attaining_letters": [i, j],
            "sure_upper": sure_upper_carpet(model),
        }
        uniform = (len({c.m for c in model.ifss}) == 1
                   and len({c.n for c in model.ifss}) == 1)
        payload["gui_li_of_mackay"] = (
            gui_li_average(model, mackay) if uniform else None)
        return payload
    if isinstance(model, PercConfig):
        q, p_noext = percolation.extinction_probability(model.n, model.d,
                                                        model.p)
        payload = {
            "kind": "percolation",
            "n": model.n, "d": model.d,
            "p": specio.format_fraction(model.p),
            "extinction": q,
            "supercritical": model.supercritical,
        }
        if model.supercritical:
            payload["as_hausdorff"] = percolation.hausdorff_dim_percolation(
                model.n, model.d, model.p)
            payload["as_assouad"] = percolation.assouad_dim_percolation(
                model.n, model.d, model.p)
            payload["projection_assouad"] = [
                percolation.projection_assouad(model.n, model.d, model.p, k)
                for k in range(1, model.d + 1)]
        return payload
    raise SpecError(f"no dimension formulas for {type(model).__name__}")


def cmd_dims(args, outputs) -> int:
    payload = _dims_payload(_load(args))
    payload["backend"] = BACKEND
    payload["version"] = __version__
    _emit_json(args.out, payload, outputs)
    return EXIT_OK


def cmd_sample(args, outputs) -> int:
    model = _load(args)
    if isinstance(model, PercConfig):
        if args.seed is None:
            raise SpecError("--seed is required for percolation sampling")
        config = PercConfig(model.n, model.d, model.p, args.seed)
        levels = percolation.simulate(config, args.depth)
        payload = {
            "kind": "percolation",
            "seed": args.seed,
            "level_sizes": [len(lv) for lv in levels.levels],
            "levels": [lv.tolist() for lv in levels.levels],
        }
    else:
        stream = _load_realization(args, model)
        payload = {
            "kind": "word",
            "realization": specio.dump_realization(stream),
            "word": list(stream.prefix(args.length)),
        }
    _emit_json(args.out, payload, outputs)
    return EXIT_OK


def _build_gridset(args, model) -> estimate.GridSet:
    if isinstance(model, PercConfig):
        if args.seed is None:
            raise SpecError("--seed is required for percolation grids")
        config = PercConfig(model.n, model.d, model.p, args.seed)
        levels = percolation.simulate(config, args.depth)
        return estimate.from_percolation(levels, args.depth)
    if isinstance(model, CarpetRIFS):
        stream = _load_realization(args, model)
        word = stream.prefix(args.depth)
        window = None
        if args.window:
            x, y, w, h = _parse_window(args.window)
            window = (x, x + w, y, y + h)
        grid = carpet_grid(word, model, args.depth, window=window)
        return estimate.from_carpet_grid(grid)
    raise SpecError("grids are defined for carpet and percolation models")


def cmd_render(args, outputs) -> int:
    model = _load(args)
    grid = _build_gridset(args, model)
    if args.window:
        x, y, w, h = _parse_window(args.window)
        grid = estimate.blowup(grid, (x, y), (w, h))
    outputs.append(args.out)
    specio.write_pgm(args.out, specio.render_gridset(grid))
    return EXIT_OK


def cmd_estimate(args, outputs) -> int:
    model = _load(args)
    grid = _build_gridset(args, model)
    if args.window:
        x, y, w, h = _parse_window(args.window)
        grid = estimate.blowup(grid, (x, y), (w, h))
    ratios = [float(q) for q in args.ratios.split(",")]
    ladder = estimate.geometric_ladder(args.rho, ratios)
    result = estimate.assouad_estimate(grid, ladder,
                                       _parse_centers(args.centers))
    if args.csv:
        outputs.append(args.csv)
        specio.write_csv(args.csv, ("R", "r", "sup_count"),
                         [(R, r, m) for R, r, m in result.counts])
    _emit_json(args.out, {
        "exponent": result.exponent,
        "residual": result.residual,
        "counts": [[R, r, m] for R, r, m in result.counts],
        "rho": ladder.rho,
    }, outputs)
    return EXIT_OK


def cmd_percolate(args, outputs) -> int:
    model = _load(args)
    if not isinstance(model, PercConfig):
        raise SpecError("percolate requires a percolation spec")
    config = PercConfig(model.n, model.d, model.p, args.seed)
    if args.condition:
        levels, retries = percolation.conditioned_sample(
            config, args.depth, args.max_retries)
    else:
        levels, retries = percolation.simulate(config, args.depth), 0
    q, p_noext = percolation.extinction_probability(config.n, config.d,
                                                    config.p)
    payload = {
        "kind": "percolation",
        "seed": args.seed,
        "conditioned": bool(args.condition),
        "retries": retries,
        "level_sizes": [len(lv) for lv in levels.levels],
        "extinction": q,
        "survival_at_depth": percolation.survival_probability_by_depth(
            config.n, config.d, config.p, args.depth),
    }
    if config.supercritical:
        payload["as_hausdorff"] = percolation.hausdorff_dim_percolation(
            config.n, config.d, config.p)
        payload["as_assouad"] = percolation.assouad_dim_percolation(
            config.n, config.d, config.p)
    _emit_json(args.out, payload, outputs)
    return EXIT_OK


def cmd_tangent(args, outputs) -> int:
    model = _load(args)
    if isinstance(model, PercConfig):
        if args.seed is None:
            raise SpecError("--seed is required for percolation tangents")
        config = PercConfig(model.n, model.d, model.p, args.seed)
        result = percolation_tangent(config, args.depth, args.m_target,
                                     args.max_retries)
        payload = {
            "kind": "percolation",
            "witness": {
                "level": result.witness.level,
                "coord": list(result.witness.coord),
                "m": result.witness.m,
                "distance_bound": result.witness.distance_bound,
            },
            "retries": result.retries,
            "hausdorff_distance": result.distance,
            "dominated": result.dominated,
        }
    elif isinstance(model, CarpetRIFS):
        stream = _load_realization(args, model)
        if not args.schedule:
            raise SpecError("--schedule is required for carpet tangents")
        stages = []
        for part in args.schedule.split(";"):
            R_text, n_text = part.split(":")
            stages.append((specio.parse_fraction(R_text), int(n_text)))
        _, (i, j) = as_assouad_carpet(model)
        records = []
        for R, n in stages:
            st = carpet_tangent_stage(model, stream, i, j, R, n, args.depth)
            records.append({
                "R": specio.format_fraction(st.R), "n": st.n,
                "k1": st.k1, "k2": st.k2,
                "hausdorff_distance": st.distance,
                "bound": st.bound, "collar": st.collar,
                "dominated": st.dominated,
            })
        payload = {"kind": "carpet", "letters": [i, j], "stages": records}
    else:
        raise SpecError("tangent requires a carpet or percolation spec")
    _emit_json(args.out, payload, outputs)
    return EXIT_OK


def cmd_report(args, outputs) -> int:
    spec = specio.read_spec(args.spec)
    model = specio.load_model(spec.get("model", spec))
    payload = {"theoretical": _dims_payload(model), "empirical": None,
               "backend": BACKEND, "version": __version__,
               "threads": thread_cap()}
    if "ratios" in spec:
        ns = argparse.Namespace(
            seed=spec.get("seed"), depth=int(spec.get("depth", 0)),
            window=None, realization=None)
        if "realization" in spec:
            stream = specio.load_realization(spec["realization"])
            word = stream.prefix(ns.depth)
            grid = estimate.from_carpet_grid(
                carpet_grid(word, model, ns.depth))
        else:
            grid = _build_gridset(ns, model)
        ladder = estimate.geometric_ladder(
            float(spec.get("rho", estimate.DEFAULT_RHO)),
            [float(q) for q in spec["ratios"]])
        centers = spec.get("centers", "all")
        if isinstance(centers, list):
            centers = (int(centers[0]), int(centers[1]))
        result = estimate.assouad_estimate(grid, ladder, centers)
        payload["empirical"] = {
            "exponent": result.exponent,
            "residual": result.residual,
            "counts": [[R, r, m] for R, r, m in result.counts],
            "seed": spec.get("seed"),
            "ladder": [[R, r] for R, r in ladder.pairs],
        }
    _emit_json(args.out, payload, outputs)
    return EXIT_OK


def _emit_json(path, payload, outputs) -> None:
    if path is not None:
        outputs.append(path)
    specio.write_json(path, payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assouadlab",
        description="Dimension analysis for random self-similar sets, "
                    "carpets and fractal percolation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--spec", required=True, help="model spec (JSON)")
        p.add_argument("--out", default=None, help="output JSON path")
        if seed:
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("dims", help="closed-form dimension report")
    common(p)

    p = sub.add_parser("sample", help="sample a word or percolation levels")
    common(p, seed=True)
    p.add_argument("--realization", default=None)
    p.add_argument("--length", type=int, default=32)
    p.add_argument("--depth", type=int, default=6)

    p = sub.add_parser("render", help="render occupancy to a PGM image")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="output PGM path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--realization", default=None)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--window", default=None,
                   help="x_lo,y_lo,x_side,y_side rationals")

    p = sub.add_parser("estimate", help="two-scale exponent estimate")
    common(p, seed=True)
    p.add_argument("--realization", default=None)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--rho", type=float, default=estimate.DEFAULT_RHO)
    p.add_argument("--ratios", default="2,4,8,16,32,64")
    p.add_argument("--centers", default="all", help="'all' or 'k:seed'")
    p.add_argument("--csv", default=None)
    p.add_argument("--window", default=None)

    p = sub.add_parser("percolate", help="simulate fractal percolation")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--condition", action="store_true",
                   help="reject realisations that die before depth")
    p.add_argument("--max-retries", type=int, default=1000)

    p = sub.add_parser("tangent", help="weak-tangent blow-up experiment")
    common(p, seed=True)
    p.add_argument("--realization", default=None)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--m-target", type=int, default=3)
    p.add_argument("--max-retries", type=int, default=1000)
    p.add_argument("--schedule", default=None,
                   help="carpet schedule 'R1:n1;R2:n2;...' with rational R")

    p = sub.add_parser("report", help="combined theoretical/empirical report")
    common(p)
    return parser


_COMMANDS = {
    "dims": cmd_dims,
    "sample": cmd_sample,
    "render": cmd_render,
    "estimate": cmd_estimate,
    "percolate": cmd_percolate,
    "tangent": cmd_tangent,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outputs: list[str] = []
    try:
        return _COMMANDS[args.command](args, outputs)
    except AssouadLabError as exc:
        for path in outputs:
            try:
                os.unlink(path)
            except OSError:
                pass
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, RetriesExhaustedError):
            return EXIT_RETRIES
        if isinstance(exc, (ScaleError, InsufficientPrefixError)):
            return EXIT_SCALE
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
