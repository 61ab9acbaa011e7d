import json
import math

import pytest

from herzlab import suites
from herzlab.cli import main, parse_function_spec
from herzlab.config import DEFAULTS, ConfigError, load_config
from herzlab.grid import make_grid

FAST = ["--grid-n", "2048", "--samples", "6"]


def _ini(tmp_path, text):
    p = tmp_path / "exp.ini"
    p.write_text(text)
    return str(p)


def test_defaults():
    cfg = load_config()
    assert cfg.spec.samples_per_axis == 16384 and cfg.spec.dimension == 1
    assert cfg.samples == 64 and cfg.families == ("packet", "mixture", "annulus")
    assert cfg.transition() == (1.0, 2.0)
    H = cfg.herz()
    assert H.p == 2 and H.lam == 0
    assert cfg.dump() == DEFAULTS


def test_file_overrides(tmp_path):
    cfg = load_config(_ini(tmp_path, "[grid]\nN = 4096 ; coarse\n[herz]\nq = log-perturbed:2.5,2,1\nw = power:0.25\n"))
    assert cfg.spec.samples_per_axis == 4096
    assert math.isclose(cfg.herz().q.value_at_origin, 2.5)


@pytest.mark.parametrize(
    "text",
    [
        "[nosuch]\nx = 1\n",
        "[grid]\nM = 3\n",
        "[grid]\nN = many\n",
        "[herz]\nq = cubic:2\n",
        "[herz]\np = 0.5\n",
        "[spaces]\ntransition = 1\n",
        "[operators]\nkind = hilbert\n",
        "[corpus]\nsamples = 0\n",
        "not an ini file",
    ],
)
def test_bad_configs(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(_ini(tmp_path, text))


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/exp.ini")


def test_with_overrides():
    cfg = load_config().with_overrides(corpus__samples=5)
    assert cfg.samples == 5
    with pytest.raises(ConfigError):
        load_config().with_overrides(corpus__size=5)
    with pytest.raises(ConfigError):
        load_config().threshold("nope")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "herz", "--out", str(tmp_path / "a"), *FAST]) == 0
    assert "herz: PASS" in capsys.readouterr().out
    assert (tmp_path / "a" / "herz.csv").exists() and (tmp_path / "a" / "herz.json").exists()
    bad = _ini(tmp_path, "[thresholds]\nghm_spread = 1.0\n")
    assert main(["run", "herz", "--config", bad, "--out", str(tmp_path / "b"), *FAST]) == 1
    assert "violated" in capsys.readouterr().out
    assert main(["run", "herz", "--config", _ini(tmp_path, "[grid]\nK = x\n")]) == 2
    with pytest.raises(SystemExit) as e:
        main(["run", "no_such_suite"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_cli_estimate(tmp_path, capsys):
    assert main(["estimate", "nosuch", "--out", str(tmp_path)]) == 2
    assert "nosuch" in capsys.readouterr().err


def test_cli_norms_json(capsys):
    assert main(["norms", "--input", "gaussian:sigma=1", "--grid-n", "2048", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    v = out["values"]
    assert {"herz", "tl", "tl_peetre", "norm1", "norm5"} <= set(v)
    assert all(x > 0 for x in v.values())
    assert out["herz_breakdown"]["value"] == v["herz"]
    assert main(["norms", "--input", "packet:level=3", "--grid-n", "2048"]) == 0
    assert "norm3" in capsys.readouterr().out
    assert main(["norms", "--input", "spline:x=1", "--grid-n", "2048"]) == 2


def test_cli_bank_round_trip(tmp_path, capsys):
    p = tmp_path / "bank.json"
    assert main(["bank", "export", str(p), "--kind", "resolution_of_unity", "--grid-n", "2048"]) == 0
    assert main(["bank", "import", str(p)]) == 0
    assert "resolution_of_unity" in capsys.readouterr().out
    p.write_text("{}")
    assert main(["bank", "import", str(p)]) == 2


def test_parse_function_spec():
    s = make_grid(1, 4, 1024, -6, 4)
    assert parse_function_spec(s, "indicator:a=0,b=1").values.sum() == pytest.approx(1 / s.step, abs=1)
    assert parse_function_spec(s, "corpus:index=2").label.startswith("2:")
    assert parse_function_spec(s, "annulus:k=1").abs.max() > 0.99
    for bad in ("gaussian:sigma", "gaussian:sigma=x", "blob"):
        with pytest.raises((ConfigError, ValueError)):
            parse_function_spec(s, bad)


def _explode(args):
    raise FloatingPointError(f"sample {args[1]} blew up")


def _flagged(args):
    return ("failed", args[1])


def test_failure_guard():
    out = suites._pmap(_explode, [(None, 0), (None, 1)], _flagged)
    assert out == [("failed", 0), ("failed", 1)]
    with pytest.raises(FloatingPointError):
        suites._pmap(_explode, [(None, 0)])
