import json

import pytest

from kglab.errors import ConfigError
from kglab.harness.config import DEFAULTS, ESTIMATES, load_config, parse_config


def _doc(**scenario):
    return {"scenario": {"estimate": "WL2_HOMO", **scenario}}


def test_defaults_fill_in():
    cfg = parse_config(_doc())
    assert cfg.estimate == "WL2_HOMO"
    assert cfg.grid.to_dict() == DEFAULTS["grid"]
    assert (cfg.T, cfg.dt) == (4.0, 0.0625)
    assert cfg.section("solver") == DEFAULTS["solver"]
    assert cfg.info is ESTIMATES["WL2_HOMO"]


def test_partial_sections_merge_but_potential_replaces():
    cfg = parse_config(_doc(grid={"N": 16}, potential={"family": "GaussianBump", "a": 1.0, "width": 1.5}))
    assert cfg.grid.N == 16 and cfg.grid.L == 16.0
    assert "eps_reg" not in cfg.section("potential") and cfg.section("potential")["width"] == 1.5


def test_round_trip_through_document():
    cfg = parse_config(_doc(seed=3))
    again = parse_config(cfg.to_document())
    assert again.raw == cfg.raw
    assert cfg.with_updates(seed=4).seed == 4


def test_every_estimate_has_a_formula_and_title():
    for info in ESTIMATES.values():
        assert info.title and info.inequality


def _errors(doc):
    with pytest.raises(ConfigError) as ei:
        parse_config(doc)
    return ei.value.errors


def test_all_problems_reported_together():
    errs = _errors(_doc(grid={"N": 24}, time={"T": 1.0, "dt": 0.3}, bogus=1, ratio_cap=-1))
    joined = "\n".join(errs)
    assert "unknown scenario keys" in joined
    assert "grid:" in joined
    assert "whole number of steps" in joined
    assert "ratio_cap" in joined


@pytest.mark.parametrize(
    "scenario, fragment",
    [
        ({"estimate": "NOPE"}, "estimate must be one of"),
        ({"estimate": "STRICHARTZ"}, "needs triple"),
        ({"estimate": "STRICHARTZ", "triple": {"q": 2, "r": 4, "theta": 0}}, "triple: q = 2.0 violates q > 2"),
        ({"estimate": "TRACE", "grid": {"n": 2, "N": 32, "L": 16}}, "n = 3 only"),
        ({"estimate": "WL2_HOMO", "grid": {"L": 4.0}}, "box too small"),
        ({"estimate": "CONTRACTION", "contraction": {"couplings": [0.1]}}, "at least two"),
        ({"estimate": "DECOMP", "decomp": {"eps": 0.0, "pads": [4]}}, "decomp.eps"),
        ({"estimate": "DECOMP", "decomp": {"pads": []}}, "decomp.pads"),
        ({"estimate": "RESOLVENT", "resolvent": {"im": [0.0]}}, "resolvent.im"),
        ({"estimate": "TRACE", "sphere": {"R": [32.0]}}, "sphere.R"),
        ({"estimate": "TRACE", "sphere": {"density": "random"}}, "need a seed"),
        ({"estimate": "WL2_HOMO", "potential": {"family": "Yukawa"}}, "unknown potential family"),
        ({"estimate": "WL2_HOMO", "potential": {"family": "InverseSquare", "a": 1, "p": 2.0}}, "potential.p"),
        ({"estimate": "WL2_HOMO", "data": {"kind": "random", "count": 2, "band": 2, "envelope": 1}}, "needs a seed"),
        ({"estimate": "WL2_HOMO", "data": {"kind": "packets", "centers": [[0, 0]], "widths": [1], "carriers": [[0, 0, 0]]}}, "n = 3 components"),
        ({"estimate": "WL2_HOMO", "data": {"kind": "waves"}}, "data.kind"),
    ],
)
def test_rejections(scenario, fragment):
    assert any(fragment in e for e in _errors({"scenario": scenario}))


def test_admissible_triple_accepted():
    cfg = parse_config({"scenario": {"estimate": "STRICHARTZ", "triple": {"q": 4, "r": 4, "theta": 0}}})
    assert cfg.section("triple") == {"q": 4, "r": 4, "theta": 0}


def test_document_shape():
    with pytest.raises(ConfigError):
        parse_config({"estimate": "WL2_HOMO"})
    with pytest.raises(ConfigError):
        parse_config({"scenario": {}, "extra": 1})


def test_load_config_seed_override(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"scenario": {"estimate": "WL2_HOMO", "data": {"kind": "random", "count": 1, "band": 2, "envelope": 1}}}))
    assert load_config(p, seed=11).seed == 11
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
