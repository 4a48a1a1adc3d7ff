import datetime as dt
import json
import subprocess
import sys

import numpy as np
import pytest

from histent import cli, gram, selfcheck
from histent.timeseries import ColumnSchema, PriceSeries, write_price_csv


@pytest.fixture
def data(tmp_path):
    rng = np.random.default_rng(3)
    p = 100 + np.cumsum(rng.normal(0, 1, 130))
    v = 20 + np.cumsum(rng.normal(0, 0.3, 130))
    px = tmp_path / "px.csv"
    ref = tmp_path / "ref.csv"
    with open(px, "w") as f:
        write_price_csv(PriceSeries.from_values(p, start=dt.date(2014, 3, 17)), f)
    with open(ref, "w") as f:
        write_price_csv(PriceSeries.from_values(v, start=dt.date(2014, 3, 17)), f,
                        ColumnSchema(value_column="Close"))
    return tmp_path


def run(argv, capsysbinary):
    code = cli.main(argv)
    out, err = capsysbinary.readouterr()
    return code, out.decode(), err.decode()


def test_full_window_csv(data, capsysbinary):
    code, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--window", "full",
                        "--sigma-r", "1", "--stride", "10"], capsysbinary)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("label,N,E_1,E_2,N_E,e_max,regime,saturation,sigma_r,spectrum_1")
    assert [l.split(",")[1] for l in lines[1:]] == [str(n) for n in list(range(1, 130, 10)) + [130]]


def test_default_stride_q2_only(data, capsysbinary):
    code, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--q", "2", "--format", "json"],
                       capsysbinary)
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["stride"] == 1 and doc["metadata"]["regime_adjacent_steps"]
    assert len(doc["records"]) == 130
    _, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--format", "json"], capsysbinary)
    assert json.loads(out)["metadata"]["stride"] == 10


def test_month_log_reference_json(data, capsysbinary):
    code, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--window", "month", "--log-prices",
                        "--q", "2", "--reference", str(data / "ref.csv"), "--format", "json"], capsysbinary)
    assert code == 0
    doc = json.loads(out)
    meta = doc["metadata"]
    assert meta["window_convention"] == "calendar-month"
    assert meta["log_prices"] and meta["sigma_unit"] == "log-price"
    assert meta["reference"]["indicator"] == "e2"
    assert meta["reference"]["paired_count"] == len(doc["records"])
    assert -1 <= meta["reference"]["pearson"] <= 1
    assert doc["records"][0]["label"] == "2014-03"


def test_extremal_metadata(data, capsysbinary):
    code, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--window", "week", "--extremal",
                        "--format", "json"], capsysbinary)
    assert code == 0
    ext = json.loads(out)["metadata"]["extremal"]
    assert set(ext) == {"max_entropy", "min_entropy"}


def test_data_dir_env(data, capsysbinary, monkeypatch, tmp_path_factory):
    monkeypatch.setenv("HISTENT_DATA_DIR", str(data))
    monkeypatch.chdir(tmp_path_factory.mktemp("elsewhere"))
    code, _, _ = run(["analyze", "--input", "px.csv", "--q", "2"], capsysbinary)
    assert code == 0


def test_output_file(data, capsysbinary):
    out_path = data / "out.csv"
    code, out, _ = run(["analyze", "--input", str(data / "px.csv"), "--q", "2", "--output", str(out_path)],
                       capsysbinary)
    assert code == 0 and out == ""
    assert out_path.read_text().startswith("label,N,E_2")


@pytest.mark.parametrize("argv,needle", [
    (["--input", "{d}/empty.csv"], "EmptyFile"),
    (["--input", "{d}/missing.csv"], "FileNotFoundError"),
    (["--input", "{d}/px.csv", "--reference", "{d}/ref.csv"], "requires --window"),
    (["--input", "{d}/px.csv", "--value-column", "Close"], "MissingColumn"),
    (["--input", "{d}/neg.csv", "--log-prices"], "NonPositivePrice"),
    (["--input", "{d}/px.csv", "--sigma-r", "0"], "NonPositiveSigma"),
    (["--input", "{d}/px.csv", "--q", "-1"], "NonPositiveQ"),
    (["--input", "{d}/px.csv", "--stride", "0"], "stride"),
    (["--input", "{d}/px.csv", "--output", "{d}/no/such/dir/out.csv"], "IoFailure"),
])
def test_exit_2(data, capsysbinary, argv, needle):
    (data / "empty.csv").write_text("")
    (data / "neg.csv").write_text("Date,Open\n2020-01-02,1\n2020-01-03,-1\n")
    code, out, err = run(["analyze"] + [a.format(d=data) for a in argv], capsysbinary)
    assert code == 2
    assert needle in err
    assert out == ""


def test_bad_flag_exit_2(capsysbinary):
    code, _, _ = run(["analyze", "--window", "fortnight", "--input", "x"], capsysbinary)
    assert code == 2


def test_numerical_error_exit_3(data, capsysbinary, monkeypatch):
    def broken(matrix, vectors=True):
        w, v = gram.eigh(matrix, vectors)
        w = np.array(w)
        w[np.argmin(w)] = -0.5
        return w, v

    monkeypatch.setattr(gram, "_eigh", broken)
    code, out, err = run(["analyze", "--input", str(data / "px.csv")], capsysbinary)
    assert code == 3 and "IndefiniteMatrix" in err and out == ""


def test_selfcheck_pass(capsysbinary):
    code, out, _ = run(["selfcheck"], capsysbinary)
    assert code == 0
    assert out.count("PASS") == len(selfcheck.FIXTURES)


def test_selfcheck_deterministic(capsysbinary):
    _, a, _ = run(["selfcheck"], capsysbinary)
    _, b, _ = run(["selfcheck"], capsysbinary)
    assert a == b


def test_selfcheck_fault_injection(capsysbinary, monkeypatch):
    def corrupt(matrix, vectors=True):
        w, v = gram.eigh(matrix, vectors)
        if vectors and v.shape[0] > 1:
            v = np.array(v)
            v[:, [0, -1]] = v[:, [-1, 0]]  # pair vectors with the wrong values
        return w, v

    monkeypatch.setattr(gram, "_eigh", corrupt)
    code, out, _ = run(["selfcheck"], capsysbinary)
    assert code == 1
    assert "spectral-reconstruction" in out.splitlines()[-1]


def test_analyze_deterministic(data, capsysbinary):
    argv = ["analyze", "--input", str(data / "px.csv"), "--window", "week", "--format", "json"]
    _, a, _ = run(argv, capsysbinary)
    _, b, _ = run(argv + ["--workers", "3"], capsysbinary)
    assert a == b


def test_module_entry_point(data):
    proc = subprocess.run([sys.executable, "-m", "histent", "analyze", "--input", str(data / "px.csv"),
                           "--q", "2", "--window", "fixed:5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("0-4,5,")
