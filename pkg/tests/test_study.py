import asyncio
import json
import math

import pandas as pd
import pytest

import main
from config import CSV_HEADER, VASICEK_LOW_PARAMS
from src.config_loader import ConfigLoader, build_run_config
from src.errors import ConfigError, NumericalError
from src.quadrature import AlgorithmOrder
from src.report_generator import ReportGenerator
from src.study import (
    StudyRow,
    compute_reference_async,
    fitted_order,
    reference_price,
    run_comparison,
    run_convergence_study,
    run_price,
)

ZERO_VOL = {"SIGMA": "0", "PATHS": "2", "THREADS": "1"}


def _row(h, bias, **kwargs):
    fields = dict(h=h, delta=h, alpha=1.0, L=100, estimate=0.5, reference=0.5 - bias if bias is not None else None,
                  bias=bias, half_width=1e-5, seconds=0.25)
    fields.update(kwargs)
    return StudyRow(**fields)


def _cli(argv):
    return asyncio.run(main.main(main.parse_args(argv + ["-q"])))


def test_default_run_config():
    config = build_run_config({})
    assert config.model_family == "vasicek"
    assert config.algo is AlgorithmOrder.RECT1
    assert config.law == "h"
    assert config.payment_dates == (6.0,)
    assert config.reference_file is None
    assert config.build_model().params.kappa == 1.0


def test_low_variant_and_overrides():
    config = build_run_config({"VARIANT": "low", "SIGMA": "0.01"})
    params = config.build_model().params
    assert params.kappa == VASICEK_LOW_PARAMS["kappa"]
    assert params.theta == VASICEK_LOW_PARAMS["theta"]
    assert params.sigma == 0.01


def test_proportional_factors():
    config = build_run_config({"MODEL": "proportional", "FACTORS": "1", "SIGMA_1": "0.3", "KAPPA_1": "0.1"})
    model = config.build_model()
    assert model.d == 1
    assert model.params.sigmas == (0.3,)
    assert config.reference_file is not None
    with pytest.raises(ConfigError):
        build_run_config({"MODEL": "proportional", "FACTORS": "3"})


@pytest.mark.parametrize("values", [
    {"COLOUR": "blue"},
    {"PATHS": "many"},
    {"H": "0.2,fast"},
    {"STEP_LAW": "cubic"},
    {"MODEL": "cir"},
    {"VARIANT": "high"},
    {"ALGO": "6.1"},
    {"THREADS": "0"},
    {"NOISE": "sobol"},
])
def test_invalid_run_config(values):
    with pytest.raises(ConfigError):
        build_run_config(values)


def test_grid_derivation_per_step_law():
    grid, delta, alpha = build_run_config({}).grid_for(0.2)
    assert (delta, alpha) == (pytest.approx(0.2), 1.0)
    assert grid.N == 30

    grid, delta, alpha = build_run_config({"ALGO": "5.3"}).grid_for(0.2)
    assert grid.N == 9
    assert round(alpha, 3) == 0.997
    assert delta == pytest.approx(alpha * 0.2 ** 0.25)

    grid, delta, alpha = build_run_config({"ALGO": "5.2", "DELTA": "0.5"}).grid_for(0.25)
    assert delta == 0.5
    assert math.isnan(alpha)


def test_loader_merges_file_and_overrides(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("# caplet run\nALGO=5.2\nH=0.2,0.1\nPATHS=500\n")
    config = ConfigLoader(path).load({"PATHS": 40, "SEED": None})
    assert config.algo is AlgorithmOrder.TRAP2
    assert config.h_values == (0.2, 0.1)
    assert config.paths == 40
    with pytest.raises(FileNotFoundError):
        ConfigLoader(tmp_path / "missing.env").read()


def test_reference_lookup(tmp_path, vasicek_params):
    assert reference_price(build_run_config({"REFERENCE": "0.123"})) == 0.123
    assert reference_price(build_run_config({})) == pytest.approx(0.663, abs=0.01)
    cached = tmp_path / "ref.json"
    proportional = build_run_config({"MODEL": "proportional", "REFERENCE_FILE": str(cached)})
    assert reference_price(proportional) is None
    cached.write_text(json.dumps({"estimate": 0.0123}))
    assert reference_price(proportional) == 0.0123


def test_compute_reference_writes_cache(tmp_path):
    path = tmp_path / "ref.json"
    config = build_run_config({"MODEL": "proportional", "PATHS": "200", "THREADS": "1", "REFERENCE_FILE": str(path)})
    record = asyncio.run(compute_reference_async(config, h=0.1))
    saved = json.loads(path.read_text())
    assert saved == record
    assert saved["paths"] == 200
    assert saved["h"] == pytest.approx(0.1)
    assert saved["params"]["sigmas"] == [0.1043, 0.1719]
    assert reference_price(config) == record["estimate"]


def test_fitted_order():
    rows = [_row(h, 0.3 * h) for h in (0.2, 0.1, 0.05)]
    assert fitted_order(rows) == pytest.approx(1.0)
    assert fitted_order([_row(0.2, 0.01), _row(0.1, None)]) is None


def test_zero_volatility_price_is_pure_quadrature_error():
    row = run_price(build_run_config(ZERO_VOL))
    assert row.half_width < 1e-12
    assert row.bias == pytest.approx(0.0428, abs=3e-3)
    assert row.L == 2


def test_zero_volatility_study_is_first_order():
    rows, slope = run_convergence_study(build_run_config(ZERO_VOL))
    assert [r.h for r in rows] == pytest.approx([0.2, 0.1, 0.05, 0.025])
    assert all(r.bias > 0 for r in rows)
    assert slope == pytest.approx(1.0, abs=0.15)


def test_comparison_orders_biases():
    pairs = run_comparison(build_run_config(ZERO_VOL), 0.2)
    assert [order.label for order, _ in pairs] == ["5.1", "5.2", "5.3"]
    assert len({row.reference for _, row in pairs}) == 1
    rect, trap, simpson = (abs(row.bias) for _, row in pairs)
    assert simpson < trap < rect


def test_emit_csv_header_only(tmp_path):
    path = ReportGenerator(tmp_path).emit_csv([], tmp_path / "empty.csv")
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"


def test_emit_csv_round_trip(tmp_path):
    row = _row(0.2, None, estimate=0.123456789012345, alpha=float("nan"), half_width=2.8e-06)
    generator = ReportGenerator(tmp_path)
    path = generator.emit_csv([row])
    assert path == tmp_path / "study.csv"
    lines = path.read_text().splitlines()
    assert len(lines) == 2

    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    assert list(frame.columns) == CSV_HEADER
    assert float(frame["estimate"][0]) == 0.123456789012345
    assert float(frame["half_width_c2"][0]) == 2.8e-06
    assert frame["reference"][0] == ""
    assert frame["L"][0] == "100"

    blank = pd.read_csv(generator.emit_csv([row], tmp_path / "blank.csv", timings=False), dtype=str, keep_default_na=False)
    assert blank["seconds"][0] == ""


def test_cli_config_errors(tmp_path):
    assert _cli(["price", "--delta", "0.7"]) == main.EXIT_CONFIG
    assert _cli(["price", "--config", str(tmp_path / "missing.env")]) == main.EXIT_CONFIG
    assert _cli(["price", "--algo", "5.3", "--delta", "0.1", "--h", "0.2"]) == main.EXIT_CONFIG


def test_cli_numerical_failure(monkeypatch):
    async def failing(*args, **kwargs):
        raise NumericalError("non-finite Monte Carlo estimate nan")

    monkeypatch.setattr(main, "run_price_async", failing)
    assert _cli(["price", "--paths", "10"]) == main.EXIT_NUMERICAL


def test_cli_output_does_not_depend_on_threads(tmp_path):
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / f"threads{threads}.csv"
        argv = ["price", "--h", "0.2", "--paths", "20000", "--seed", "5", "--threads", threads, "--out", str(out), "--no-timings"]
        assert _cli(argv) == main.EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_cli_reference(tmp_path):
    out = tmp_path / "ref.json"
    argv = ["reference", "--model", "proportional", "--paths", "50", "--threads", "1",
            "--reference-h", "0.1", "--reference-out", str(out)]
    assert _cli(argv) == main.EXIT_OK
    assert set(json.loads(out.read_text())) >= {"estimate", "half_width", "h", "paths", "seed", "model"}
