"""Smoke test for the Python extension.

Build first with `cargo build --release -p mmwave-regime-py` (or
`maturin develop -m crates/python/Cargo.toml`), then run
`python3 python/smoke_test.py`.
"""

import importlib
import json
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG = os.path.join(ROOT, "configs", "paper_defaults.json")


def import_extension():
    try:
        return importlib.import_module("mmwave_regime_py")
    except ImportError:
        pass
    built = os.path.join(ROOT, "target", "release", "libmmwave_regime_py.so")
    if not os.path.exists(built):
        sys.exit(f"extension not built: {built} missing")
    tmp = tempfile.mkdtemp()
    shutil.copy(built, os.path.join(tmp, "mmwave_regime_py.so"))
    sys.path.insert(0, tmp)
    return importlib.import_module("mmwave_regime_py")


def main():
    m = import_extension()
    cfg = m.Config.load(CONFIG)
    assert len(cfg.sha256) == 64
    assert "noise.sigma2_watts" in cfg.defaulted

    b = m.blockage(cfg)
    assert 0.0 < b["p_b"] < 1.0, b

    mean_y = m.mean_received_power(cfg)
    assert mean_y > cfg.phi
    assert m.mean_received_power(cfg, p_b=1.0) == cfg.phi
    assert m.aggregate_mgf(cfg, 0.0) == 1.0

    lam = m.fit_me_lambda(2.0, 1.5, mode="closed_form")
    assert math.isclose(1.5 + 1.0 / lam, 2.0, rel_tol=1e-15)

    eta = m.np_threshold(0.1, cfg.sigma2, 0.0)
    assert math.isclose(1.0 - m.h0_cdf(eta, cfg.sigma2, 0.0), 0.1, abs_tol=1e-12)
    assert m.detection_probability(3.0, 0.0, 0.0) == 1.0

    det = m.detect(cfg)
    assert det["detection"]["verdict"] in ("noise_limited", "interference_limited")

    rows = m.regime_map(cfg.with_n_interferers(50))
    assert rows and all(r["point"]["error"] is None for r in rows)

    roc = m.roc(cfg)
    assert all(r["p_d"] >= r["p_f"] for r in roc)

    a = m.simulate(cfg, trials=200, seed=3)
    assert a == m.simulate(cfg, trials=200, seed=3)
    assert len(a) == 200 and min(a) >= cfg.phi

    report = m.validate(cfg, trials=20000, seed=5)
    assert {c["name"] for c in report["checks"]} >= {"h0_ks", "false_alarm_calibration"}

    try:
        m.Config.from_json(json.dumps({"schema_version": 1}))
    except ValueError as e:
        assert "radius_m" in str(e)
    else:
        raise AssertionError("incomplete config accepted")

    try:
        cfg.with_v0(10.0)
    except ValueError as e:
        assert "v0_norm" in str(e)
    else:
        raise AssertionError("receiver on the boundary accepted")

    print(f"python smoke test ok (mmwave_regime_py {m.__version__})")


if __name__ == "__main__":
    main()
