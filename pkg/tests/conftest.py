import json
from fractions import Fraction as F

import pytest

from assouadlab.carpet import CarpetIFS, CarpetRIFS
from assouadlab.percolation import PercConfig
from assouadlab.selfsim import SimilarityIFS, SimilarityMap, SimilarityRIFS

HALF = (F(1, 2), F(1, 2))


@pytest.fixture
def carpet_contrast() -> CarpetRIFS:
    """Two 2x3 carpets whose Mackay dimensions are both 1 while the
    almost-sure Assouad dimension of the random mix is 2."""
    c1 = CarpetIFS(2, 3, frozenset({(0, 2), (1, 2)}))
    c2 = CarpetIFS(2, 3, frozenset({(1, 0), (1, 1), (1, 2)}))
    return CarpetRIFS((c1, c2), HALF)


def _line_ifs(ratios_and_shifts) -> SimilarityIFS:
    return SimilarityIFS(tuple(
        SimilarityMap(F(c), (F(t),)) for c, t in ratios_and_shifts))


@pytest.fixture
def selfsim_pair() -> SimilarityRIFS:
    """Two overlapping IFSs on the line with similarity dimensions about
    0.8114 and 0.5119; their composed ratios are multiplicatively
    independent."""
    ifs1 = _line_ifs([(F(1, 2), 0), (F(1, 4), 0), (F(1, 16), F(15, 16))])
    ifs2 = _line_ifs([(F(1, 3), 0), (F(1, 9), 0), (F(1, 81), F(80, 81))])
    return SimilarityRIFS((ifs1, ifs2), HALF)


@pytest.fixture
def perc_22() -> PercConfig:
    return PercConfig(2, 2, F(7, 10), 1)


@pytest.fixture
def carpet_spec_path(tmp_path):
    spec = {
        "kind": "carpet",
        "ifss": [{"m": 2, "n": 3, "digits": [[0, 2], [1, 2]]},
                 {"m": 2, "n": 3, "digits": [[1, 0], [1, 1], [1, 2]]}],
        "probs": ["1/2", "1/2"],
    }
    path = tmp_path / "carpet.json"
    path.write_text(json.dumps(spec))
    return str(path)


@pytest.fixture
def perc_spec_path(tmp_path):
    spec = {"kind": "percolation", "n": 2, "d": 2, "p": "7/10"}
    path = tmp_path / "perc.json"
    path.write_text(json.dumps(spec))
    return str(path)


@pytest.fixture
def selfsim_spec_path(tmp_path):
    spec = {
        "kind": "selfsim",
        "ifss": [
            [{"ratio": "1/2", "translation": ["0"]},
             {"ratio": "1/4", "translation": ["0"]},
             {"ratio": "1/16", "translation": ["15/16"]}],
            [{"ratio": "1/3", "translation": ["0"]},
             {"ratio": "1/9", "translation": ["0"]},
             {"ratio": "1/81", "translation": ["80/81"]}],
        ],
        "probs": ["1/2", "1/2"],
    }
    path = tmp_path / "selfsim.json"
    path.write_text(json.dumps(spec))
    return str(path)
