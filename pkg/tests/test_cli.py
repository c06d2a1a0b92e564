import csv
import io
import json
import subprocess
import sys

import pytest

from hlbounds.certify import reports_from_json, reports_to_json
from hlbounds.cli import main, parse_grid
from hlbounds.forms import loads, make_Tm


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exponent(capsys):
    code, out, _ = run(capsys, "exponent", "--m", "2", "--p", "4")
    assert code == 0 and "rho=2\n" in out
    code, out, _ = run(capsys, "exponent", "--m", "2", "--p", "inf")
    assert code == 0 and out.startswith("rho=1.33333333333333\n")


def test_exponent_domain_error(capsys):
    code, _, err = run(capsys, "exponent", "--m", "1", "--p", "4")
    assert code == 2 and "m must be >= 2" in err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["exponent", "--m", "2"])
    assert exc.value.code == 2


def test_bounds_single(capsys):
    code, out, _ = run(capsys, "bounds", "--m", "2", "--p", "4")
    assert code == 0
    assert "quotient=1.1546" in out
    assert "certified=true" in out


def test_bounds_grid_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--grid", "m=2..5,p=2m", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert all(r["pop"] == "true" for r in rows)
    assert [int(r["m"]) for r in rows] == [2, 3, 4, 5]


def test_bounds_domain_error(capsys):
    code, _, err = run(capsys, "bounds", "--m", "2", "--p", "3")
    assert code == 2


def test_bounds_json_roundtrip_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["bounds", "--grid", "m=2..4,p=2m,m^2,inf", "--format", "json", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert reports_to_json(reports_from_json(text)) == text
    # m=2 has 2m == m^2, which is reported once
    assert len(json.loads(text)) == 8


def test_bounds_csv_roundtrip(tmp_path):
    path = tmp_path / "g.csv"
    assert main(["bounds", "--grid", "m=2..4,p=2m,4m", "--format", "csv", "--out", str(path), "--jobs", "3"]) == 0
    text = path.read_text()
    rows = list(csv.reader(io.StringIO(text)))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    assert buf.getvalue() == text
    assert b"\r\n" not in path.read_bytes()


def test_bounds_io_error(capsys):
    code, _, err = run(capsys, "bounds", "--m", "2", "--p", "4", "--out", "/nonexistent/dir/x.txt")
    assert code == 4


def test_parse_grid():
    assert parse_grid("m=2..3,p=2m,4m") == [(2, 4.0), (2, 8.0), (3, 6.0), (3, 12.0)]
    assert parse_grid("m=2,p=m^2,10m^2,inf")[-1] == (2, float("inf"))
    # p below 2m is skipped
    assert parse_grid("m=3,p=4,2m") == [(3, 6.0)]


def test_norm_commands(capsys):
    code, out, _ = run(capsys, "norm", "--form", "t2", "--p", "4", "--certify", "--gap", "1e-4")
    assert code == 0
    values = dict(line.split("=", 1) for line in out.splitlines() if "=" in line and " " not in line.split("=")[0])
    lower = float(values["lower"].split()[0])
    upper = float(values["upper"].split()[0])
    assert 1.73 <= lower <= upper <= 1.7341 and upper < 1.74
    code, out, _ = run(capsys, "norm", "--form", "t2", "--p", "inf")
    assert out.strip() == "2 (exact)"
    code, out, _ = run(capsys, "norm", "--form", "tm:3", "--p", "inf")
    assert out.strip() == "4 (exact)"


def test_norm_from_file(tmp_path, capsys):
    path = tmp_path / "t3.txt"
    assert main(["form", "dump", "--form", "tm:3", "--out", str(path)]) == 0
    assert loads(path.read_text()) == make_Tm(3)
    code, out, _ = run(capsys, "norm", "--form", f"file:{path}", "--p", "inf")
    assert out.strip() == "4 (exact)"
    code, out, _ = run(capsys, "norm", "--form", f"file:{path}", "--p", "4", "--restarts", "4")
    assert code == 0 and out.startswith("lower=")
    code, _, _ = run(capsys, "norm", "--form", f"file:{path}", "--p", "4", "--certify")
    assert code == 2


def test_form_dump_stdout(capsys):
    code, out, _ = run(capsys, "form", "dump", "--form", "t2")
    assert out == "# dims 2 2\n1 1 1\n1 2 1\n2 1 1\n2 2 -1\n"


def test_plotdata(capsys):
    code, out, _ = run(capsys, "plotdata", "--p", "4", "--samples", "4")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["x", "f", "g", "domain"]
    assert float(rows[0]["x"]) == 0 and float(rows[0]["f"]) == pytest.approx(1.681792830507, abs=1e-12)
    split = [r for r in rows if r["domain"] == "split"]
    assert len(split) == 1 and split[0]["f"] == split[0]["g"]
    assert max(max(float(r["f"]), float(r["g"])) for r in rows) < 1.74


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--max-m", "5")
    assert code == 0 and "pop holds for m=2..5" in out
    code, out, _ = run(capsys, "verify", "--max-m", "2", "--gap", "1e-2")
    assert code == 0


def test_verify_certification_failure(capsys):
    code, out, _ = run(capsys, "verify", "--max-m", "2", "--gap", "1e-9")
    assert code == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hlbounds", "exponent", "--m", "3", "--p", "6"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("rho=2\n")
