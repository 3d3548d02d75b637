"""Serialization: JSON model and realization specs with exact "p/q"
rationals, P5 PGM rendering, and CSV scale data.

Round-trip guarantee: dump followed by load reproduces the model with exact
rational equality.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .carpet import CarpetGrid, CarpetIFS, CarpetRIFS
from .errors import SpecError
from .estimate import GridSet
from .percolation import PercConfig
from .selfsim import SimilarityIFS, SimilarityMap, SimilarityRIFS
from .words import RealizationStream


def parse_fraction(text) -> Fraction:
    """Exact rational from "p/q" or an integer literal (string or int)."""
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad rational {text!r}: {exc}") from None
    raise SpecError(f"bad rational {text!r}: expected \"p/q\" string or int")


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _require(spec: dict, field: str, where: str):
    if field not in spec:
        raise SpecError(f"{where}: missing field {field!r}")
    return spec[field]


def load_model(spec: dict):
    """Model object from a parsed JSON spec; kind selects the family."""
    kind = _require(spec, "kind", "model")
    if kind == "selfsim":
        return _load_selfsim(spec)
    if kind == "carpet":
        return _load_carpet(spec)
    if kind == "percolation":
        return _load_percolation(spec)
    raise SpecError(f"model: unknown kind {kind!r}")


def _load_selfsim(spec: dict) -> SimilarityRIFS:
    ifss = []
    for i, maps in enumerate(_require(spec, "ifss", "selfsim")):
        where = f"selfsim.ifss[{i}]"
        built = []
        for j, m in enumerate(maps):
            built.append(SimilarityMap(
                parse_fraction(_require(m, "ratio", f"{where}[{j}]")),
                tuple(parse_fraction(t)
                      for t in _require(m, "translation", f"{where}[{j}]")),
            ))
        ifss.append(SimilarityIFS(tuple(built)))
    probs = tuple(parse_fraction(p) for p in _require(spec, "probs", "selfsim"))
    return SimilarityRIFS(tuple(ifss), probs)


def _load_carpet(spec: dict) -> CarpetRIFS:
    ifss = []
    for i, c in enumerate(_require(spec, "ifss", "carpet")):
        where = f"carpet.ifss[{i}]"
        digits = frozenset(
            (int(a), int(b)) for a, b in _require(c, "digits", where)
        )
        ifss.append(CarpetIFS(int(_require(c, "m", where)),
                              int(_require(c, "n", where)), digits))
    probs = tuple(parse_fraction(p) for p in _require(spec, "probs", "carpet"))
    return CarpetRIFS(tuple(ifss), probs)


def _load_percolation(spec: dict) -> PercConfig:
    return PercConfig(
        int(_require(spec, "n", "percolation")),
        int(_require(spec, "d", "percolation")),
        parse_fraction(_require(spec, "p", "percolation")),
        int(spec.get("seed", 0)),
    )


def dump_model(model) -> dict:
    if isinstance(model, SimilarityRIFS):
        return {
            "kind": "selfsim",
            "ifss": [[{"ratio": format_fraction(m.ratio),
                       "translation": [format_fraction(t)
                                       for t in m.translation]}
                      for m in ifs.maps] for ifs in model.ifss],
            "probs": [format_fraction(p) for p in model.probs],
        }
    if isinstance(model, CarpetRIFS):
        return {
            "kind": "carpet",
            "ifss": [{"m": c.m, "n": c.n,
                      "digits": sorted([a, b] for a, b in c.digits)}
                     for c in model.ifss],
            "probs": [format_fraction(p) for p in model.probs],
        }
    if isinstance(model, PercConfig):
        return {"kind": "percolation", "n": model.n, "d": model.d,
                "p": format_fraction(model.p), "seed": model.seed}
    raise SpecError(f"cannot serialize model of type {type(model).__name__}")


def load_realization(spec: dict) -> RealizationStream:
    mode = _require(spec, "mode", "realization")
    if mode == "iid":
        return RealizationStream.iid(
            [parse_fraction(p) for p in _require(spec, "probs", "realization")],
            int(_require(spec, "seed", "realization")),
        )
    if mode == "periodic":
        return RealizationStream.periodic(_require(spec, "pattern", "realization"))
    if mode == "constant":
        return RealizationStream.constant(int(_require(spec, "letter", "realization")))
    if mode == "spliced":
        base = load_realization(_require(spec, "base", "realization"))
        splices = [(int(s), tuple(int(x) for x in letters))
                   for s, letters in _require(spec, "splices", "realization")]
        return RealizationStream.spliced(base, splices)
    raise SpecError(f"realization: unknown mode {mode!r}")


def dump_realization(stream: RealizationStream) -> dict:
    if stream.mode == "iid":
        return {"mode": "iid", "seed": stream.seed,
                "probs": [format_fraction(p) for p in stream.probs]}
    if stream.mode == "periodic":
        return {"mode": "periodic", "pattern": list(stream.pattern)}
    if stream.mode == "spliced":
        return {"mode": "spliced", "base": dump_realization(stream.base),
                "splices": [[s, list(letters)]
                            for s, letters in stream.splices]}
    raise SpecError(f"cannot serialize realization mode {stream.mode!r}")


def read_spec(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"{path}: {exc}") from None
    if not isinstance(spec, dict):
        raise SpecError(f"{path}: top-level JSON value must be an object")
    return spec


def write_json(path: Optional[str], payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_pgm(path: str, image: np.ndarray) -> None:
    """Binary (P5) PGM; image is a (rows, cols) uint8 array, row 0 on top."""
    img = np.asarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise SpecError("PGM image must be 2-dimensional")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def render_carpet(grid: CarpetGrid) -> np.ndarray:
    """Occupancy image, black cells on white; one pixel per grid cell."""
    return _render_cells(grid.width, grid.height, grid.occupied)


def render_gridset(grid: GridSet) -> np.ndarray:
    if grid.dim != 2:
        raise SpecError("can only render 2-dimensional grids")
    return _render_cells(grid.resolution[0], grid.resolution[1], grid.occupied)


def _render_cells(width: int, height: int, occupied: np.ndarray) -> np.ndarray:
    img = np.full((height, width), 255, dtype=np.uint8)
    if len(occupied):
        # row 0 is the top of the image, so flip the vertical axis
        img[height - 1 - occupied[:, 1], occupied[:, 0]] = 0
    return img
