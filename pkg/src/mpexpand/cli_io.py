"""Command line, run configuration, the coefficient and zero CSV formats, SVG plots.

Exit codes: 0 success, 1 a verify check failed, 2 bad configuration or
input, 3 an engine did not converge, 4 zeros written but some residual is
above threshold.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import random
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import gmpy2
from gmpy2 import mpc, mpfr

from . import analysis, coefficients, companion_spectrum
from .coefficients import (
    NATURAL_NU,
    CoeffSeries,
    FunctionSpec,
    QuadratureNonconvergence,
    TruncationNonconvergence,
)
from .companion_spectrum import EigenNonconvergence, ZeroLeadingCoefficient
from .precision import DEFAULT_BITS, ENV_BITS, Precision, real_str, workprec

log = logging.getLogger("mpexpand")

FORMAT_VERSION = "1"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_SUSPECT = 0, 1, 2, 3, 4

FUNCTIONS = ("xi", "lhat_chi1", "rotated_chi1")
DEFAULT_ENGINE = {"xi": "quadrature", "lhat_chi1": "mordell_chi1", "rotated_chi1": "mordell_chi1"}


class ConfigError(ValueError):
    pass


# --- configuration ---------------------------------------------------------------

@dataclass
class RunConfig:
    function: str = "xi"
    nu: Optional[float] = None
    nmax: int = 120
    precision_bits: int = DEFAULT_BITS
    engine: Optional[str] = None
    nodes: Optional[int] = None
    trunc_j: Optional[int] = None
    verify: bool = False
    output: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.function not in FUNCTIONS:
            raise ConfigError(f"function must be one of {', '.join(FUNCTIONS)}")
        if self.nu is None:
            self.nu = NATURAL_NU[self.function]
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        if float(self.nu) != NATURAL_NU[self.function]:
            raise ConfigError(f"{self.function} is expanded with nu = {NATURAL_NU[self.function]}")
        if self.nmax < 1:
            raise ConfigError("nmax must be >= 1")
        if self.precision_bits < 53:
            raise ConfigError("precision must be >= 53 bits")
        if self.engine is None:
            self.engine = DEFAULT_ENGINE[self.function]
        if self.engine not in ("quadrature", "mordell_chi1"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.function == "xi" and self.engine != "quadrature":
            raise ConfigError("xi coefficients come from the quadrature engine")
        if self.nodes is not None and self.nodes < 4 * self.nmax:
            raise ConfigError(f"nodes must be >= 4*nmax = {4 * self.nmax}")
        if self.trunc_j is not None and self.trunc_j < 1:
            raise ConfigError("trunc-j must be >= 1")
        return self


_CONFIG_TYPES = {"function": str, "nu": float, "nmax": int, "precision_bits": int, "bits": int,
                 "engine": str, "nodes": int, "trunc_j": int, "verify": "bool", "output": str}


def _convert(key, raw):
    kind = _CONFIG_TYPES[key]
    try:
        if kind == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def load_config_file(path) -> dict:
    """key=value lines; blank lines and # comments are skipped."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from None
    for i, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        key, raw = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"{path}:{i}: unknown key {key!r}")
        if key == "bits":
            key = "precision_bits"
        out[key] = _convert(key, raw)
    return out


def resolve_config(flags: dict, config_file: Optional[str] = None, env=None) -> RunConfig:
    """flags > config file > environment (precision only) > defaults."""
    env = os.environ if env is None else env
    values = {}
    if env.get(ENV_BITS):
        try:
            values["precision_bits"] = int(env[ENV_BITS])
        except ValueError:
            raise ConfigError(f"{ENV_BITS} must be an integer") from None
    if config_file:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in flags.items() if v is not None})
    names = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in values.items() if k in names}).validate()


# --- files -------------------------------------------------------------------------

def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_coeff_csv(cs: CoeffSeries, meta: Optional[dict] = None) -> str:
    """Coefficient CSV text; ``meta`` (as returned by parse) overrides header values."""
    head = {
        "format-version": FORMAT_VERSION,
        "function": cs.source,
        "nu": _num(float(cs.nu)),
        "bits": str(cs.precision_bits),
        "engine": cs.engine,
        "nmax": str(cs.N),
    }
    for k in sorted(cs.trunc_params):
        head[f"trunc.{k}"] = _num(cs.trunc_params[k])
    if meta:
        head.update(meta)
    digits = Precision(cs.precision_bits).digits
    lines = [f"# {k}={v}" for k, v in head.items()]
    lines.append("n,re,im")
    for n, v in enumerate(cs.values):
        lines.append(f"{n},{real_str(v.real, digits)},{real_str(v.imag, digits)}")
    return "\n".join(lines) + "\n"


def parse_coeff_csv(text: str):
    """(CoeffSeries, header dict). Raises ConfigError on malformed input."""
    meta = {}
    rows = []
    seen_header = False
    for i, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            k, v = body.split("=", 1)
            meta[k.strip()] = v.strip()
            continue
        if not line.strip():
            continue
        if not seen_header:
            if line.strip() != "n,re,im":
                raise ConfigError(f"line {i}: expected column header n,re,im")
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ConfigError(f"line {i}: expected n,re,im")
        rows.append((i, parts))
    for key in ("nu", "bits"):
        if key not in meta:
            raise ConfigError(f"coefficient file lacks '# {key}=' header")
    try:
        bits = int(meta["bits"])
        nu = float(meta["nu"])
    except ValueError:
        raise ConfigError("bad nu or bits header") from None
    if bits < 53 or not nu > 0:
        raise ConfigError("bits must be >= 53 and nu > 0")
    if not rows:
        raise ConfigError("coefficient file has no rows")
    vals = []
    with workprec(bits):
        for expect, (i, (n, re, im)) in enumerate(rows):
            try:
                if int(n) != expect:
                    raise ConfigError(f"line {i}: expected n={expect}")
                v = mpc(mpfr(re), mpfr(im))
            except ValueError:
                raise ConfigError(f"line {i}: malformed number") from None
            if not (gmpy2.is_finite(v.real) and gmpy2.is_finite(v.imag)):
                raise ConfigError(f"line {i}: non-finite value")
            vals.append(v)
    engine = meta.get("engine", "file")
    if engine not in coefficients.ENGINES:
        engine = "file"
    source = meta.get("function", "custom")
    if source not in coefficients.KINDS:
        source = "custom"
    trunc = {k[len("trunc."):]: _parse_scalar(v) for k, v in meta.items() if k.startswith("trunc.")}
    cs = CoeffSeries(nu, tuple(vals), source, engine, bits, trunc)
    return cs, meta


def _parse_scalar(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def read_coeff_csv(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    return parse_coeff_csv(text)


def write_coeff_csv(path, cs: CoeffSeries, meta: Optional[dict] = None):
    atomic_write(path, format_coeff_csv(cs, meta))


ZERO_DIGITS = 30


def format_zero_csv(zs) -> str:
    lines = [f"# n={zs.n}", f"# bits={zs.bits}", f"# threshold={_num(zs.threshold)}",
             f"# suspect={'yes' if zs.suspect else 'no'}", "k,re,im,residual,class"]
    with workprec(zs.bits):
        for k, (z, r, c) in enumerate(zip(zs.zeros, zs.relative_residuals, zs.classification)):
            lines.append(f"{k},{real_str(z.real, ZERO_DIGITS)},{real_str(z.imag, ZERO_DIGITS)},{r:.3e},{c}")
    return "\n".join(lines) + "\n"


def read_zero_csv(path) -> list:
    """[(re, im, class)] as floats; ConfigError if malformed."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    out = []
    header = False
    for i, line in enumerate(text.splitlines(), 1):
        if line.startswith("#") or not line.strip():
            continue
        if not header:
            if line.strip() != "k,re,im,residual,class":
                raise ConfigError(f"line {i}: expected column header k,re,im,residual,class")
            header = True
            continue
        parts = line.split(",")
        if len(parts) != 5 or parts[4] not in ("real", "complex"):
            raise ConfigError(f"line {i}: expected k,re,im,residual,class")
        try:
            re, im = float(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"line {i}: malformed number") from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ConfigError(f"line {i}: non-finite value")
        out.append((re, im, parts[4]))
    if not header:
        raise ConfigError("zero file lacks the column header")
    return out


# --- SVG ---------------------------------------------------------------------------

def _ticks(lo, hi, count=5):
    span = hi - lo
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    out = []
    k = 0
    while first + k * step <= hi + 1e-12 * span:
        v = first + k * step
        out.append(0.0 if abs(v) < 1e-12 * span else v)
        k += 1
    return out


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_svg(points, xlim=None, ylim=None, title="zeros of S_n", width=640, height=400) -> str:
    """Scatter of (re, im, class): real zeros as dots, complex ones as red crosses."""
    if xlim is None:
        xs = [p[0] for p in points]
        m = max((abs(x) for x in xs), default=1.0) or 1.0
        xlim = (-1.05 * m, 1.05 * m)
    if ylim is None:
        m = max((abs(p[1]) for p in points), default=0.0)
        m = m * 1.3 if m > 0 else 1.0
        ylim = (-m, m)
    ml, mr, mt, mb = 70, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    def X(x):
        return ml + (x - xlim[0]) / (xlim[1] - xlim[0]) * pw

    def Y(y):
        return mt + (ylim[1] - y) / (ylim[1] - ylim[0]) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in _ticks(*xlim):
        x = X(v)
        out.append(f'<line x1="{x:.2f}" y1="{mt + ph}" x2="{x:.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{mt + ph + 18}" text-anchor="middle">{v:.4g}</text>')
    for v in _ticks(*ylim):
        y = Y(v)
        out.append(f'<line x1="{ml - 5}" y1="{y:.2f}" x2="{ml}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    if ylim[0] < 0 < ylim[1]:
        out.append(f'<line x1="{ml}" y1="{Y(0):.2f}" x2="{ml + pw}" y2="{Y(0):.2f}" stroke="#bbbbbb"/>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">Re t</text>')
    out.append(f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {mt + ph / 2:.1f})">Im t</text>')
    for re, im, cls in sorted(points):
        if not (xlim[0] <= re <= xlim[1] and ylim[0] <= im <= ylim[1]):
            continue
        x, y = X(re), Y(im)
        if cls == "complex":
            out.append(f'<path d="M{x - 4:.2f},{y - 4:.2f}L{x + 4:.2f},{y + 4:.2f}M{x - 4:.2f},{y + 4:.2f}'
                       f'L{x + 4:.2f},{y - 4:.2f}" stroke="#d62728" stroke-width="1.5"/>')
        else:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="#1f77b4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- commands ----------------------------------------------------------------------

def compute_coeffs(cfg: RunConfig) -> CoeffSeries:
    p = Precision(cfg.precision_bits)
    if cfg.engine == "quadrature":
        fs = FunctionSpec(cfg.function)
        return coefficients.coeffs_by_quadrature(fs, cfg.nu, cfg.nmax, nodes=cfg.nodes, precision=p,
                                                 verify=cfg.verify)
    if cfg.function == "lhat_chi1":
        return coefficients.chi1_coeffs(cfg.nmax, J=cfg.trunc_j, precision=p)
    return coefficients.aprime_series(cfg.nmax, p)


def cmd_coeffs(args) -> int:
    flags = {"function": args.function, "nu": args.nu, "nmax": args.nmax, "precision_bits": args.bits,
             "engine": args.engine, "nodes": args.nodes, "trunc_j": args.trunc_j,
             "verify": True if args.verify else None, "output": args.output}
    cfg = resolve_config(flags, args.config)
    cs = compute_coeffs(cfg)
    out = cfg.output or f"{cfg.function}_n{cfg.nmax}_b{cfg.precision_bits}.csv"
    write_coeff_csv(out, cs)
    print(f"wrote {cs.N + 1} coefficients to {out}")
    return EXIT_OK


def zeros_summary(cs: CoeffSeries, zs, n: int) -> list:
    stats = analysis.zero_statistics(zs)
    B = companion_spectrum.balance(companion_spectrum.build_companion(cs, n),
                                   companion_spectrum.estimate_balance_exponent(cs, n))
    lines = []
    if stats.status == "ok":
        lines.append(f"n={n} real={stats.real_count} complex={stats.complex_count}")
    else:
        lines.append(f"n={n} inconclusive: residual {stats.max_relative_residual:.3e} above threshold")
    lines.append(f"max|rho|={stats.max_abs:.10g} max|rho|/n={stats.max_abs_over_n:.6g}")
    lines.append(f"gerschgorin_bound/2={float(companion_spectrum.gerschgorin_bound(B)) / 2:.10g}")
    for z in stats.complex_locations:
        lines.append(f"complex zero {z.real:+.10f} {z.imag:+.10f}i")
    if n >= 2:
        obs = companion_spectrum.square_sum_observed(zs)
        pred = companion_spectrum.square_sum_predicted(cs, n)
        rel = float(abs(obs - pred) / abs(pred)) if pred != 0 else float(abs(obs))
        lines.append(f"square_sum observed={complex(obs).real:.12g} predicted={complex(pred).real:.12g} "
                     f"relative_mismatch={rel:.3e}")
    sweep = analysis.classification_sweep(zs)
    lines.append("complex count by threshold: " + " ".join(f"{t:g}:{c}" for t, c in sweep.items()))
    return lines


def cmd_zeros(args) -> int:
    cs, _ = read_coeff_csv(args.coeff_file)
    n = args.n if args.n is not None else cs.N
    if not 1 <= n <= cs.N:
        raise ConfigError(f"n must lie in [1, {cs.N}]")
    zs = companion_spectrum.zeros_of_partial_sum(cs, n, refine=not args.no_refine, eig_bits=args.eig_bits,
                                                 balance_exponent=args.balance)
    out = args.output or f"{Path(args.coeff_file).stem}_zeros_n{n}.csv"
    atomic_write(out, format_zero_csv(zs))
    for line in zeros_summary(cs, zs, n):
        print(line)
    print(f"wrote {n} zeros to {out}")
    if zs.suspect:
        print("warning: some residuals exceed threshold; results marked suspect", file=sys.stderr)
        return EXIT_SUSPECT
    return EXIT_OK


def _degrees(text):
    try:
        ds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad degree list {text!r}") from None
    if not ds:
        raise ConfigError("empty degree list")
    return ds


def _spec_for(cs: CoeffSeries, meta: dict) -> FunctionSpec:
    kind = meta.get("function", "custom")
    if kind not in FUNCTIONS:
        raise ConfigError("the coefficient file does not name a function with a reference value")
    return FunctionSpec(kind)


def cmd_converge(args) -> int:
    cs, meta = read_coeff_csv(args.coeff_file)
    fs = _spec_for(cs, meta)
    degrees = _degrees(args.degrees)
    region = analysis.Region(args.re, args.im)
    try:
        rep = analysis.convergence_study(cs, fs, degrees, region, args.density, args.eval_bits)
    except analysis.RegionError as e:
        raise ConfigError(str(e)) from None
    lines = [f"# re={_num(args.re)}", f"# im={_num(args.im)}", f"# density={args.density}", "n,sup_error"]
    lines += [f"{n},{e:.6e}" for n, e in zip(rep.degrees, rep.sup_errors)]
    text = "\n".join(lines) + "\n"
    if args.output:
        atomic_write(args.output, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_track(args) -> int:
    from .reference_values import xi_zero

    cs, _ = read_coeff_csv(args.coeff_file)
    if args.xi_zero is not None:
        if args.xi_zero not in (1, 2, 3):
            raise ConfigError("--xi-zero takes 1, 2 or 3")
        target = xi_zero(args.xi_zero, Precision(cs.precision_bits))
    elif args.target is not None:
        try:
            target = complex(args.target.replace("i", "j"))
        except ValueError:
            raise ConfigError(f"bad target {args.target!r}") from None
    else:
        raise ConfigError("give --target or --xi-zero")
    degrees = _degrees(args.degrees)
    if max(degrees) > cs.N:
        raise ConfigError(f"degrees must be <= {cs.N}")
    tr = analysis.track_zero(cs, target, degrees)
    lines = [f"# target={complex(target)!r}", "n,re,im,distance"]
    for n, z, d in zip(tr.degrees, tr.approximants, tr.distances):
        lines.append(f"{n},{real_str(z.real, 20)},{real_str(z.imag, 20)},{d:.6e}")
    text = "\n".join(lines) + "\n"
    if args.output:
        atomic_write(args.output, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_plot(args) -> int:
    pts = read_zero_csv(args.zero_file)
    out = Path(args.output or Path(args.zero_file).with_suffix(".svg"))
    atomic_write(out, render_svg(pts, title=f"zeros ({len(pts)})"))
    r = args.zoom_radius
    zoom = [p for p in pts if math.hypot(p[0], p[1]) < r]
    zout = out.with_name(out.stem + "_zoom.svg")
    ym = max((abs(p[1]) for p in zoom), default=0.0)
    ylim = (-1.3 * ym, 1.3 * ym) if ym > 0 else (-1.0, 1.0)
    atomic_write(zout, render_svg(zoom, xlim=(-r, r), ylim=ylim, title=f"zeros with |t| < {r:g}"))
    print(f"wrote {out} and {zout}")
    return EXIT_OK


def verify_checks(bits: int = 128, seed: int = 7):
    """Fast invariant suite; yields (name, passed, detail)."""
    from .mp_basis import BasisSpec, mp_eval_all, mp_gram, mp_generating_residual, mp_norm
    from .reference_values import lhat_chi1, xi_completed, zeta_functional_residual

    rng = random.Random(seed)
    p = Precision(bits)
    spec = BasisSpec(1.5, p)

    r = mp_generating_residual(spec, 0.5, 1, 60)
    yield "generating function (nu=3/2, w=0.5, t=1, N=60)", r < 1e-12, f"{float(r):.2e}"

    worst = 0.0
    with workprec(bits):
        for _ in range(10):
            t = mpc(rng.uniform(-3, 3), rng.uniform(-1, 1))
            a, b = mp_eval_all(spec, 40, t), mp_eval_all(spec, 40, -t)
            worst = max(worst, max(float(abs(b[n] - (-1) ** n * a[n])) for n in range(41)))
    yield "parity q_n(-it) = (-1)^n q_n(it)", worst == 0.0, f"{worst:.2e}"

    G = mp_gram(BasisSpec(1.5, p), 6, tol=1e-25)
    err = max(float(abs(G[m, n] - (mp_norm(spec, n) if m == n else 0))) for m in range(7) for n in range(7))
    yield "orthogonality m,n <= 6 (nu=3/2)", err < 1e-20, f"{err:.2e}"

    s = mpc(rng.uniform(2, 6), rng.uniform(-10, 10))
    r = zeta_functional_residual(s, p)
    yield "zeta functional equation", r < 1e-20, f"{float(r):.2e}"

    t = mpc(rng.uniform(-3, 3), rng.uniform(-0.2, 0.2))
    d1 = abs(xi_completed(t, p) - xi_completed(-t, p))
    d2 = abs(lhat_chi1(t, p) - lhat_chi1(-t, p))
    yield "evenness of Xi and L-hat", max(d1, d2) < 1e-25, f"{float(max(d1, d2)):.2e}"

    vals = [rng.uniform(-1, 1) for _ in range(9)]
    cs = coefficients.make_series(vals, 1.5, bits=bits)
    zs = companion_spectrum.zeros_of_partial_sum(cs, 8)
    worst = max(zs.relative_residuals)
    yield "companion zeros of a random degree-8 series", worst < 1e-10, f"{worst:.2e}"

    B = companion_spectrum.build_companion(cs, 8)
    e1 = sorted(companion_spectrum.eigenvalues(B.entries, bits), key=lambda z: (float(z.real), float(z.imag)))
    e2 = sorted(companion_spectrum.eigenvalues(companion_spectrum.balance(B, 0.75).entries, bits),
                key=lambda z: (float(z.real), float(z.imag)))
    d = max(float(abs(a - b)) for a, b in zip(e1, e2))
    yield "balancing leaves the spectrum unchanged", d < 1e-8, f"{d:.2e}"

    disks = companion_spectrum.gerschgorin_disks(companion_spectrum.balance(B, 0.75))
    inside = all(companion_spectrum.in_gerschgorin_union(z, disks, 1e-20) for z in e2)
    yield "eigenvalues inside the Gerschgorin union", inside, ""


def cmd_verify(args) -> int:
    ok = True
    for name, passed, detail in verify_checks(args.bits):
        ok &= bool(passed)
        print(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpexpand", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="compute MP-coefficients and write a coefficient CSV")
    c.add_argument("--function", choices=FUNCTIONS)
    c.add_argument("--nu", type=float)
    c.add_argument("--nmax", type=int)
    c.add_argument("--bits", type=int, help=f"working precision (default ${ENV_BITS} or {DEFAULT_BITS})")
    c.add_argument("--engine", choices=("quadrature", "mordell_chi1"))
    c.add_argument("--nodes", type=int, help="Gauss-Laguerre nodes")
    c.add_argument("--trunc-j", type=int, help="outer truncation for the chi_{-1} series")
    c.add_argument("--verify", action="store_true", help="repeat with doubled nodes and compare")
    c.add_argument("--config", help="key=value file; flags take precedence")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_coeffs)

    z = sub.add_parser("zeros", help="zeros of a partial sum via the companion matrix")
    z.add_argument("coeff_file")
    z.add_argument("--n", type=int)
    z.add_argument("--no-refine", action="store_true")
    z.add_argument("--eig-bits", type=int)
    z.add_argument("--balance", type=float, help="balancing exponent (default: fitted decay)")
    z.add_argument("-o", "--output")
    z.set_defaults(func=cmd_zeros)

    v = sub.add_parser("converge", help="sup error of partial sums on a rectangle")
    v.add_argument("coeff_file")
    v.add_argument("--degrees", default="40,80,160")
    v.add_argument("--re", type=float, default=5.0, help="half-width in Re t")
    v.add_argument("--im", type=float, default=0.2, help="half-height in Im t")
    v.add_argument("--density", type=int, default=10)
    v.add_argument("--eval-bits", type=int, default=128)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_converge)

    t = sub.add_parser("track", help="nearest zero of S_n to a target, per degree")
    t.add_argument("coeff_file")
    t.add_argument("--target")
    t.add_argument("--xi-zero", type=int)
    t.add_argument("--degrees", default="60,100,140,180,220,260")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_track)

    p = sub.add_parser("plot", help="SVG scatter of a zero CSV (plus a zoomed copy)")
    p.add_argument("zero_file")
    p.add_argument("--zoom-radius", type=float, default=2.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plot)

    f = sub.add_parser("verify", help="run the fast invariant checks")
    f.add_argument("--bits", type=int, default=128)
    f.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ZeroLeadingCoefficient, coefficients.InsufficientInput) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureNonconvergence, TruncationNonconvergence, EigenNonconvergence) as e:
        print(f"nonconvergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
