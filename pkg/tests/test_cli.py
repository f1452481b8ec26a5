import json
import subprocess
import sys

import numpy as np
import pytest

from rlsemigroup.cli import UsageError, load_function, main, parse_complex
from rlsemigroup.discretize import read_matrix
from rlsemigroup.rl_core import GridSpec, cyclicity_index


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_parse_complex():
    assert parse_complex("0.8+0.6i") == 0.8 + 0.6j
    assert parse_complex("0.4-0.2j") == 0.4 - 0.2j
    assert parse_complex(" 1 ") == 1
    with pytest.raises(UsageError):
        parse_complex("one")


def test_schatten_member(capsys):
    code, out = run_cli(capsys, "schatten", "--xi", "1.5", "--r", "1", "--n", "1024")
    assert code == 0
    (rec,) = json.loads(out)
    assert rec["verdict"] == "member" and rec["pass"]
    for key in ("xi_re", "xi_im", "r", "slope", "residual", "verdict"):
        assert key in rec


def test_schatten_spectrum_dir(capsys, tmp_path):
    code, _ = run_cli(capsys, "schatten", "--xi", "0.75+0.5i", "--r", "1,2", "--n", "512",
                      "--spectrum-dir", str(tmp_path))
    assert code == 0
    (path,) = tmp_path.iterdir()
    assert path.read_text().splitlines()[0] == "n,s_n"


def test_hs_table(capsys):
    code, out = run_cli(capsys, "hs", "--xi", "1", "--n", "256,512,1024")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("xi_re,xi_im,n,hs_numeric,hs_exact,rel_gap")
    last = lines[-1].split(",")
    assert float(last[4]) == pytest.approx(0.70711, abs=1e-5)
    assert float(last[3]) == pytest.approx(0.70711, rel=1e-3)


def test_hs_domain_failure_names_claim(capsys, tmp_path):
    out = tmp_path / "hs.json"
    code = main(["hs", "--xi", "0.5", "--n", "64,128", "--format", "json", "--out", str(out)])
    assert code == 1
    (rec,) = json.loads(out.read_text())
    assert rec["pass"] is False
    assert "Re(xi) > 1/2" in rec["claim"] and "Hilbert-Schmidt" in rec["claim"]


def test_empty_xi_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["hs", "--xi", ""])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["schatten", "--xi", "-0.5", "--r", "2"],
    ["hs", "--xi", "1", "--n", "8192"],
    ["bounds", "--xi", "1", "--pq", "2:1"],
    ["diag", "--xi", "0.5", "--modes", "0"],
    ["frobnicate"],
])
def test_bad_flags(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_diag_csv(capsys):
    code, out = run_cli(capsys, "diag", "--xi", "0.6+0.3i,1", "--modes", "10,10000")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("xi_re,xi_im,n,exact_re,exact_im,asymptote_re,asymptote_im,ratio_abs")
    assert len(lines) == 5


def test_diag_out_of_strip_fails(capsys):
    code, out = run_cli(capsys, "diag", "--xi", "1.5", "--modes", "10", "--format", "json")
    assert code == 1
    assert json.loads(out)[0]["claim"]


def test_semigroup_table(capsys):
    code, out = run_cli(capsys, "semigroup", "--pair", "0.5:0.5", "--pair", "0.4+0.2i:0.6-0.2i",
                        "--n", "256,512", "--format", "json")
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 4 and all(r["pass"] for r in recs)


def test_bounds_and_determinism(capsys, tmp_path, monkeypatch):
    argv = ["bounds", "--xi", "0.3,1", "--pq", "1:1,2:inf", "--n", "256", "--trials", "8"]
    paths = []
    for threads in ("1", "3"):
        monkeypatch.setenv("RLSG_THREADS", threads)
        path = tmp_path / f"b{threads}.json"
        assert main(argv + ["--out", str(path)]) == 0
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    recs = json.loads(paths[0].read_text())
    assert [r["pass"] for r in recs] == [True, None, True, True]


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("RLSG_THREADS", "many")
    with pytest.raises(SystemExit) as exc:
        main(["semigroup", "--pair", "0.5:0.5", "--n", "32,64"])
    assert exc.value.code == 2


def test_cyclic(capsys):
    code, out = run_cli(capsys, "cyclic", "--function", "indicator:0.5,1")
    assert code == 0
    rec = json.loads(out)[0]
    assert rec["ell"] == 0.5 and rec["cyclic"] is False


def test_interp(capsys):
    code, out = run_cli(capsys, "interp", "--n", "128", "--sigma", "0,1")
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 2 and recs[0]["p"] == 2.0


def test_dump(tmp_path):
    path = tmp_path / "m.bin"
    assert main(["dump", "--xi", "0.5+0.1i", "--n", "32", "--out", str(path)]) == 0
    m = read_matrix(path)
    assert m.n == 32 and m.order.xi == 0.5 + 0.1j


def test_load_function_builtins():
    g = GridSpec(1024)
    assert np.all(load_function("const:1", g).values == 1)
    assert np.array_equal(load_function("monomial:2", g).values, g.nodes**2)
    f = load_function("indicator:0.5,1", g)
    assert cyclicity_index(f).ell == 0.5


def test_load_function_csv(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("x,re,im\n0.05,0,0\n0.35,1,0.5\n0.95,2,0\n")
    f = load_function(str(path), GridSpec(10))
    assert f.values[0] == 0 and f.values[3] == 1 + 0.5j and f.values[9] == 2
    assert cyclicity_index(f).ell == pytest.approx(0.2)


def test_load_function_parse_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,re,im\n0.1,0,0\n0.2,zero,0\n")
    with pytest.raises(UsageError, match=":3:"):
        load_function(str(path), GridSpec(10))
    with pytest.raises(UsageError):
        load_function(str(tmp_path / "missing.csv"), GridSpec(10))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rlsemigroup", "cyclic", "--function", "const:1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["cyclic"] is True
