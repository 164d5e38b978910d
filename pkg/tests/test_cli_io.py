import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest
from gmpy2 import mpc, mpfr

from mpexpand.cli_io import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_SUSPECT,
    ConfigError,
    atomic_write,
    format_coeff_csv,
    load_config_file,
    main,
    parse_coeff_csv,
    read_coeff_csv,
    read_zero_csv,
    render_svg,
    resolve_config,
    write_coeff_csv,
)
from mpexpand.coefficients import make_series
from mpexpand.precision import workprec


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _rows(path):
    return [line for line in path.read_text().splitlines() if line and not line.startswith("#")][1:]


@pytest.fixture(scope="module")
def xi120(tmp_path_factory):
    out = tmp_path_factory.mktemp("xi") / "xi.csv"
    assert main(["coeffs", "--function", "xi", "--nu", "1.5", "--nmax", "120", "--bits", "256",
                 "-o", str(out)]) == EXIT_OK
    return out


def test_coeffs_xi_row_count(xi120):
    rows = _rows(xi120)
    assert len(rows) == 121
    assert [int(r.split(",")[0]) for r in rows] == list(range(121))


def test_coeffs_rerun_is_identical(xi120, in_tmp):
    assert main(["coeffs", "--function", "xi", "--nmax", "120", "--bits", "256", "-o", "again.csv"]) == EXIT_OK
    assert (in_tmp / "again.csv").read_bytes() == xi120.read_bytes()


def test_coeffs_chi1_odd_rows_zero(in_tmp):
    assert main(["coeffs", "--function", "lhat_chi1", "--nmax", "60", "--bits", "512", "--trunc-j", "240",
                 "-o", "l.csv"]) == EXIT_OK
    rows = _rows(in_tmp / "l.csv")
    assert len(rows) == 61
    for r in rows:
        n, re, im = r.split(",")
        if int(n) % 2:
            assert mpfr(re) == 0 and mpfr(im) == 0
        else:
            assert mpfr(re) != 0
    cs, meta = read_coeff_csv(in_tmp / "l.csv")
    assert meta["trunc.J"] == "240"
    assert cs.trunc_params["J"] == 240


def test_round_trip_byte_identical(xi120):
    text = xi120.read_text()
    cs, meta = parse_coeff_csv(text)
    assert format_coeff_csv(cs, meta) == text


def test_round_trip_complex_values():
    with workprec(200):
        vals = [mpc(1) / 3, mpc(mpfr(2) ** -70, -mpfr(7) / 11), mpc(0)]
    cs = make_series(vals, nu=0.5, bits=200, J=40, note="x")
    text = format_coeff_csv(cs)
    back, meta = parse_coeff_csv(text)
    assert back.values == cs.values
    assert back.trunc_params == {"J": 40, "note": "x"}
    assert format_coeff_csv(back, meta) == text


@pytest.mark.parametrize("text", [
    "n,re,im\n0,1,0\n",
    "# nu=1.5\n# bits=128\nn,re,im\n",
    "# nu=1.5\n# bits=128\nn,re,im\n1,1,0\n",
    "# nu=1.5\n# bits=128\nn,re,im\n0,abc,0\n",
    "# nu=1.5\n# bits=128\nn,re,im\n0,inf,0\n",
    "# nu=1.5\n# bits=128\nx,y\n0,1,0\n",
    "# nu=-1\n# bits=128\nn,re,im\n0,1,0\n",
])
def test_malformed_coeff_csv(text):
    with pytest.raises(ConfigError):
        parse_coeff_csv(text)


def test_zeros_of_linear_toy(in_tmp, capsys):
    # S_1 = a0 - 2it a1 vanishes at t = -i a0 / (2 a1)
    cs = make_series([3, 2], nu=1.5, bits=128)
    write_coeff_csv("toy.csv", cs)
    assert main(["zeros", "toy.csv", "--n", "1", "-o", "z.csv"]) == EXIT_OK
    z = read_zero_csv(in_tmp / "z.csv")
    assert len(z) == 1
    re, im, cls = z[0]
    assert re == 0 and im == pytest.approx(-0.75, abs=1e-25)
    assert cls == "complex"
    out = capsys.readouterr().out
    assert "n=1 real=0 complex=1" in out
    assert "gerschgorin_bound" in out


def test_zeros_summary_square_sum(xi120, in_tmp, capsys):
    assert main(["zeros", str(xi120), "--n", "50", "-o", "z.csv"]) == EXIT_OK
    out = capsys.readouterr().out
    line = next(ln for ln in out.splitlines() if ln.startswith("square_sum"))
    assert float(line.rsplit("=", 1)[1]) < 1e-6
    assert len(read_zero_csv(in_tmp / "z.csv")) == 50


def test_zeros_suspect_exit_code(in_tmp, monkeypatch, capsys):
    import mpexpand.companion_spectrum as csp

    # every residual is then above threshold
    monkeypatch.setattr(csp, "RESIDUAL_TOL", -1.0)
    write_coeff_csv("s.csv", make_series([1, 0.3, -0.5, 0.2], nu=1.5, bits=128))
    assert main(["zeros", "s.csv", "-o", "z.csv"]) == EXIT_SUSPECT
    assert "# suspect=yes" in (in_tmp / "z.csv").read_text()
    cap = capsys.readouterr()
    assert "inconclusive" in cap.out
    assert "suspect" in cap.err


def test_zeros_degree_out_of_range(xi120, capsys):
    assert main(["zeros", str(xi120), "--n", "500"]) == EXIT_CONFIG
    assert "n must lie" in capsys.readouterr().err


def test_zeros_missing_file(in_tmp):
    assert main(["zeros", "nope.csv"]) == EXIT_CONFIG


def test_converge_single_degree(xi120, in_tmp, capsys):
    assert main(["converge", str(xi120), "--degrees", "40", "--re", "1", "--im", "0.1"]) == EXIT_OK
    rows = _rows_from(capsys.readouterr().out)
    assert len(rows) == 1 and rows[0].startswith("40,")


def _rows_from(text):
    return [ln for ln in text.splitlines() if ln and not ln.startswith("#")][1:]


def test_converge_decreasing(xi120, in_tmp, capsys):
    assert main(["converge", str(xi120), "--degrees", "20,60,120", "--re", "2", "--im", "0.1",
                 "-o", "c.csv"]) == EXIT_OK
    errs = [float(r.split(",")[1]) for r in _rows(in_tmp / "c.csv")]
    assert errs[0] > errs[1] > errs[2]


def test_converge_region_outside_strip(xi120, capsys):
    assert main(["converge", str(xi120), "--degrees", "40", "--im", "0.3"]) == EXIT_CONFIG
    assert "E(f)" in capsys.readouterr().err


def test_plot_empty_zero_set(in_tmp):
    (in_tmp / "e.csv").write_text("# n=0\nk,re,im,residual,class\n")
    assert main(["plot", "e.csv", "-o", "e.svg"]) == EXIT_OK
    for name in ("e.svg", "e_zoom.svg"):
        root = ET.fromstring((in_tmp / name).read_text())
        texts = [t.text for t in root.iter("{http://www.w3.org/2000/svg}text")]
        assert "Re t" in texts and "Im t" in texts
        assert not list(root.iter("{http://www.w3.org/2000/svg}circle"))


def test_plot_glyphs_and_determinism(in_tmp):
    (in_tmp / "z.csv").write_text("k,re,im,residual,class\n0,-3.5,0,1e-20,real\n1,0.5,0.2,1e-20,complex\n"
                                  "2,0.5,-0.2,1e-20,complex\n3,3.5,0,1e-20,real\n")
    assert main(["plot", "z.csv", "-o", "a.svg"]) == EXIT_OK
    first = (in_tmp / "a.svg").read_bytes(), (in_tmp / "a_zoom.svg").read_bytes()
    assert main(["plot", "z.csv", "-o", "a.svg"]) == EXIT_OK
    assert ((in_tmp / "a.svg").read_bytes(), (in_tmp / "a_zoom.svg").read_bytes()) == first
    root = ET.fromstring(first[0])
    assert len(list(root.iter("{http://www.w3.org/2000/svg}circle"))) == 2
    assert len(list(root.iter("{http://www.w3.org/2000/svg}path"))) == 2
    zoom = ET.fromstring(first[1])
    assert len(list(zoom.iter("{http://www.w3.org/2000/svg}circle"))) == 0
    assert len(list(zoom.iter("{http://www.w3.org/2000/svg}path"))) == 2


def test_plot_malformed(in_tmp):
    (in_tmp / "z.csv").write_text("k,re,im,residual,class\n0,1,0,0,maybe\n")
    assert main(["plot", "z.csv"]) == EXIT_CONFIG
    assert not list(in_tmp.glob("*.svg"))


def test_render_svg_is_xml():
    ET.fromstring(render_svg([(1.0, 0.0, "real")]))


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nnmax = 30\nbits = 128\n\nfunction=lhat_chi1\n")
    env = {"MPEXPAND_BITS": "300"}
    rc = resolve_config({"nmax": 40}, str(cfg), env)
    assert (rc.function, rc.nmax, rc.precision_bits, rc.nu) == ("lhat_chi1", 40, 128, 0.5)
    assert rc.engine == "mordell_chi1"
    rc = resolve_config({}, None, env)
    assert rc.precision_bits == 300
    rc = resolve_config({}, None, {})
    assert (rc.function, rc.nmax, rc.precision_bits) == ("xi", 120, 256)


@pytest.mark.parametrize("flags", [
    {"precision_bits": 40},
    {"nmax": 0},
    {"nu": -1.0},
    {"function": "zeta"},
    {"function": "xi", "nu": 0.5},
    {"function": "xi", "engine": "mordell_chi1"},
    {"nmax": 10, "nodes": 20},
])
def test_config_validation(flags):
    with pytest.raises(ConfigError):
        resolve_config(flags, None, {})


def test_config_file_errors(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("colour=blue\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config_file(p)
    p.write_text("nmax\n")
    with pytest.raises(ConfigError):
        load_config_file(p)
    p.write_text("nmax=ten\n")
    with pytest.raises(ConfigError):
        load_config_file(p)


def test_bad_config_exit_code(in_tmp, capsys):
    assert main(["coeffs", "--bits", "20", "-o", "x.csv"]) == EXIT_CONFIG
    assert "precision" in capsys.readouterr().err
    assert not (in_tmp / "x.csv").exists()


def test_atomic_write_leaves_nothing_on_failure(tmp_path):
    target = tmp_path / "out.csv"
    atomic_write(target, "old\n")

    class Bad:
        def __str__(self):
            raise RuntimeError

    with pytest.raises(TypeError):
        atomic_write(target, Bad())
    assert target.read_text() == "old\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.csv"]


def test_verify_subcommand(capsys):
    assert main(["verify"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out and all(line.startswith("PASS") for line in out)


def test_console_entry_point(tmp_path):
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "mpexpand.cli_io", "converge", "missing.csv"],
                       cwd=tmp_path, env=env, capture_output=True, text=True)
    assert r.returncode == EXIT_CONFIG
    assert r.stderr.startswith("error:")
