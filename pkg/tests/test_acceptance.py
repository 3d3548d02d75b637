"""End-to-end acceptance suite: one test per headline guarantee, run at the
stated tolerances.  Each test prints one pass/fail line under pytest -v."""

import json
import math
import os
import random
from fractions import Fraction as F

import pytest

from assouadlab import estimate as est
from assouadlab._core import survives_to_depth
from assouadlab.carpet import (carpet_grid, covering_upper_check, k_scales,
                               make_covering_samples)
from assouadlab.cli import main
from assouadlab.percolation import (PercConfig, conditioned_sample,
                                    extinction_probability,
                                    survival_probability_by_depth,
                                    tangent_witness_search)
from assouadlab.selfsim import (SimilarityIFS, SimilarityMap, SimilarityRIFS,
                                attractor_boxes, blowup_boxes,
                                multiplicative_dependence,
                                similarity_dimension)
from assouadlab.tangent import carpet_tangent_stage
from assouadlab.words import (RealizationStream, exceptional_dim_lower,
                              mass_distribution_check, sample_realization)
from assouadlab.carpet import as_assouad_carpet, gui_li_average, mackay_dim

HALF = (F(1, 2), F(1, 2))


def test_criterion_01_similarity_dimensions():
    s1 = similarity_dimension([F(1, 2), F(1, 4), F(1, 16)])
    s2 = similarity_dimension([F(1, 3), F(1, 9), F(1, 81)])
    assert s1 == pytest.approx(0.81137, abs=1e-4)
    assert s2 == pytest.approx(0.511918, abs=1e-5)


def test_criterion_02_carpet_one_vs_two_contrast(carpet_contrast):
    for c in carpet_contrast.ifss:
        assert mackay_dim(c) == pytest.approx(1.0, abs=1e-12)
    value, _ = as_assouad_carpet(carpet_contrast)
    assert value == pytest.approx(2.0, abs=1e-12)
    assert gui_li_average(carpet_contrast, (1, 1)) == 1.0


def test_criterion_03_multiplicative_dependence():
    assert multiplicative_dependence(F(1, 18), F(1, 12)) is False
    assert multiplicative_dependence(F(1, 2), F(1, 4)) is True


def test_criterion_04_sure_covering_bound(carpet_contrast):
    total_violations = 0
    for seed in range(100):
        word = sample_realization(seed, HALF, 12)
        grid = carpet_grid(word, carpet_contrast, 12)
        samples = make_covering_samples(grid, 200, seed + 10_000)
        report = covering_upper_check(grid, carpet_contrast, samples)
        total_violations += len(report.violations)
    assert total_violations == 0


def test_criterion_05_k_scales_sandwich_exact():
    grids = ((2, 3), (3, 5), (2, 5), (4, 7))
    rng = random.Random(20260823)
    checked = 0
    for _ in range(1000):
        word = tuple(rng.randint(1, 4) for _ in range(40))
        R = F(rng.randint(1, 10**6 - 1), 10**6)
        k1, k2 = k_scales(word, grids, R)
        ns = [n for _, n in grids]
        ms = [m for m, _ in grids]
        prod_n = math.prod(ns[w - 1] for w in word[:k1])
        prod_m = math.prod(ms[w - 1] for w in word[:k2])
        assert F(1, prod_n) <= R and F(1, prod_m) <= R
        if k1:
            assert R < F(ns[word[k1 - 1] - 1], prod_n)
        if k2:
            assert R < F(ms[word[k2 - 1] - 1], prod_m)
        checked += 1
    assert checked == 1000


def test_criterion_06_mass_distribution_identity():
    for N in range(2, 5):
        for N_nonmax in range(1, N):
            for n in range(1, 9):
                for k in range(1, 9):
                    _, _, disc = mass_distribution_check(N, N_nonmax, n, k)
                    assert disc < 1e-12
            vals = [exceptional_dim_lower(N, N_nonmax, n)
                    for n in range(1, 41)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            assert vals[-1] == pytest.approx(math.log(N) / math.log(2),
                                             abs=1e-3)


def test_criterion_07_percolation_analytics():
    configs = [(2, 2, F(1, 2)), (2, 2, F(7, 10)), (2, 2, F(9, 10)),
               (3, 1, F(1, 2))]
    for n, d, p in configs:
        q, _ = extinction_probability(n, d, p)
        N = n**d
        pf = float(p)
        assert abs((1 - pf + pf * q) ** N - q) < 1e-10
        seeds = 2000
        hits = sum(survives_to_depth(s, n, d, p.numerator, p.denominator, 14)
                   for s in range(seeds))
        p_th = survival_probability_by_depth(n, d, p, 14)
        sigma = math.sqrt(p_th * (1 - p_th) / seeds)
        assert abs(hits / seeds - p_th) <= 3 * sigma


def _witness_blowup_is_full(levels, witness) -> bool:
    n, k, m = levels.n, witness.level, witness.m
    gs = est.from_percolation(levels, k + m)
    lo = tuple(F(c, n**k) for c in witness.coord)
    blown = est.blowup(gs, lo, (F(1, n**k),) * levels.d)
    target = est.full_grid((n**m,) * levels.d)
    return est.hausdorff_distance(blown, target) == 0.0


def test_criterion_08_tangent_witness_rates():
    p = F(9, 10)
    hits_m2 = 0
    for s in range(100):
        levels, _ = conditioned_sample(PercConfig(2, 2, p, 10_000 + s), 8)
        w = tangent_witness_search(levels, 4)
        if w is not None and w.m >= 2:
            hits_m2 += 1
            assert w.distance_bound == pytest.approx(math.sqrt(2) * 2.0**(-w.m))
            assert _witness_blowup_is_full(levels, w)
    assert hits_m2 >= 90

    hits_m3 = 0
    for s in range(100):
        levels, _ = conditioned_sample(PercConfig(2, 2, p, 20_000 + s), 12)
        w = tangent_witness_search(levels, 3)
        if w is not None and w.m >= 3:
            hits_m3 += 1
            assert _witness_blowup_is_full(levels, w)
    assert hits_m3 >= 50


def test_criterion_09_empirical_exponents(carpet_contrast):
    ladder = est.geometric_ladder(0.25, [8, 16, 32, 64, 128, 256])
    assert ladder.span_decades() >= 1.5

    full = est.assouad_estimate(est.full_grid((1024, 1024)), ladder, (8, 7))
    assert full.exponent == pytest.approx(2.0, abs=0.15)

    line = carpet_grid((1,) * 12, carpet_contrast, 12)
    line_est = est.assouad_estimate(est.from_carpet_grid(line), ladder,
                                    (32, 7))
    assert line_est.exponent == pytest.approx(1.0, abs=0.2)

    base = RealizationStream.iid(HALF, 42)
    for R, n in [(F(1, 81), 2), (F(1, 243), 3), (F(1, 729), 4)]:
        stage = carpet_tangent_stage(carpet_contrast, base, 1, 2, R, n, 14)
        assert stage.distance <= stage.bound + stage.collar


def _random_grid_rifs(rng: random.Random) -> SimilarityRIFS:
    ifss = []
    for _ in range(2):
        q = rng.choice([3, 4])
        slots = rng.sample(range(q), rng.randint(2, q - 1))
        maps = tuple(SimilarityMap(F(1, q), (F(s, q),)) for s in sorted(slots))
        ifss.append(SimilarityIFS(maps))
    return SimilarityRIFS(tuple(ifss), HALF)


def test_criterion_10_discrete_shift_inclusion():
    rng = random.Random(777)
    for _ in range(50):
        rifs = _random_grid_rifs(rng)
        k = rng.randint(1, 2)
        N = rng.randint(1, 2)
        word = tuple(rng.randint(1, 2) for _ in range(k + N))
        deep = attractor_boxes(rifs, word, k + N)
        shifted = frozenset(attractor_boxes(rifs, word[k:], N).boxes)
        for lo, side in attractor_boxes(rifs, word, k).boxes:
            blown = blowup_boxes(deep, lo, side)
            assert blown == shifted


def _run_cli_bytes(argv, out_path, monkeypatch, capsys, threads):
    monkeypatch.setenv("ASSOUADLAB_THREADS", threads)
    code = main(argv + ["--out", str(out_path)])
    assert code == 0
    captured = capsys.readouterr()
    return out_path.read_bytes() + captured.out.encode()


def test_criterion_11_byte_identical_determinism(tmp_path, monkeypatch,
                                                 capsys, carpet_spec_path,
                                                 perc_spec_path,
                                                 selfsim_spec_path):
    report_spec = tmp_path / "exp.json"
    report_spec.write_text(json.dumps({
        "model": json.load(open(carpet_spec_path)),
        "realization": {"mode": "iid", "seed": 5, "probs": ["1/2", "1/2"]},
        "depth": 8, "ratios": [4, 8, 16], "centers": [8, 3],
    }))
    commands = {
        "dims": ["dims", "--spec", selfsim_spec_path],
        "sample": ["sample", "--spec", carpet_spec_path, "--seed", "5",
                   "--length", "32"],
        "render": ["render", "--spec", perc_spec_path, "--seed", "2",
                   "--depth", "7"],
        "estimate": ["estimate", "--spec", carpet_spec_path, "--seed", "2",
                     "--depth", "8", "--ratios", "4,8,16",
                     "--centers", "16:3"],
        "percolate": ["percolate", "--spec", perc_spec_path, "--seed", "1",
                      "--depth", "8"],
        "tangent": ["tangent", "--spec", perc_spec_path, "--seed", "3",
                    "--depth", "8", "--m-target", "2"],
        "report": ["report", "--spec", str(report_spec)],
    }
    max_threads = str(os.cpu_count() or 8)
    for name, argv in commands.items():
        suffix = ".pgm" if name == "render" else ".json"
        runs = []
        for tag, threads in (("a", "1"), ("b", "1"), ("c", max_threads)):
            out = tmp_path / f"{name}-{tag}{suffix}"
            runs.append(_run_cli_bytes(list(argv), out, monkeypatch,
                                       capsys, threads))
        assert runs[0] == runs[1] == runs[2], f"{name} is not deterministic"
