"""Command-line front end: ``ptlaser spectrum|poles|threshold|check-pt``."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys

import click
import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, assemble, load, parse
from .core import LasingPoleError
from .elements import build_structure, gain_family
from .scattering import TwoPortInput, s_coefficients, theta
from .spectral import (
    NotCheckableError,
    SearchRegion,
    ThresholdNotBracketedError,
    find_zeros,
    lasing_threshold,
    verify_pt_epsilon,
    verify_pt_matrix,
)

EXIT_CONFIG = 2
EXIT_POLE = 3
EXIT_NOT_BRACKETED = 4
EXIT_PT_FAILED = 5


def num(x) -> float:
    """Round to 15 significant digits."""
    return float(f"{float(x):.15g}")


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return num(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return str(v)


def render(columns, rows, fmt: str, meta: str | None = None, extra: dict | None = None) -> str:
    if fmt == "json":
        obj = {}
        if meta is not None:
            obj["meta"] = meta
        if extra:
            obj.update(_jsonable(extra))
        obj["columns"] = list(columns)
        obj["rows"] = [{c: _jsonable(v) for c, v in zip(columns, row)} for row in rows]
        return json.dumps(obj, indent=1) + "\n"
    buf = io.StringIO()
    if meta is not None:
        buf.write(f"# {meta}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _meta(command: str, cfg: RunConfig) -> str:
    digest = hashlib.sha256(json.dumps(cfg.document, sort_keys=True).encode()).hexdigest()[:16]
    return f"ptlaser {__version__} command={command} preset={cfg.preset} config_sha256={digest}"


def _fail(code: int, message: str):
    click.echo(message, err=True)
    sys.exit(code)


def _region(cfg: RunConfig) -> SearchRegion:
    region = cfg.region
    if region is not None:
        return region
    if cfg.grid is None:
        _fail(EXIT_CONFIG, "config error: options.region or grid is required")
    return SearchRegion(cfg.grid.start, cfg.grid.stop, -1.0, 1.0)


def resolve_excitation(cfg: RunConfig) -> TwoPortInput:
    """Build the two-port input, evaluating ``cpa_at`` against the structure."""
    ex = cfg.excitation
    mode = ex["mode"]
    if "ratio" in ex:
        r = ex["ratio"]
        return TwoPortInput.from_ratio(complex(r[0], r[1]) if isinstance(r, list) else complex(r), mode)
    if "cpa_at" in ex:
        at = ex["cpa_at"]
        if at == "auto":
            zeros = find_zeros(cfg.structure, "M11", _region(cfg), cfg.options["tol"]).roots
            if not zeros:
                _fail(EXIT_CONFIG, "config error: cpa_at=auto found no M11 zero in the search region")
            at = min(zeros, key=lambda r: (abs(r.freq.imag), r.freq.real)).freq.real
        ratio = complex(build_structure(cfg.structure, float(at)).m21)
        return TwoPortInput.from_ratio(ratio, mode)
    return TwoPortInput(mode, ex.get("sigma", 0.0), ex.get("phi", 0.0))


def run_spectrum(cfg: RunConfig):
    if cfg.grid is None:
        raise ConfigError("config error: spectrum needs a grid")
    excitation = resolve_excitation(cfg)
    delta = cfg.grid.values()
    m = build_structure(cfg.structure, delta)
    s = s_coefficients(m)
    cols = ["delta", "re_t", "im_t", "T", "R_left", "R_right", "theta_single"]
    data = [delta, s.t.real, s.t.imag, s.T, s.R_left, s.R_right, theta(m, TwoPortInput("single_left"))]
    if excitation.mode in ("coherent", "incoherent"):
        cols += ["theta_coherent", "theta_incoherent"]
        data.append(theta(m, TwoPortInput("coherent", excitation.sigma, excitation.phi)))
        data.append(theta(m, TwoPortInput("incoherent", excitation.sigma)))
    elif excitation.mode == "single_right":
        cols.append("theta_single_right")
        data.append(theta(m, excitation))
    rows = [list(r) for r in zip(*data)]
    extra = {"sigma": excitation.sigma, "phi": excitation.phi}
    return cols, rows, extra


def run_poles(cfg: RunConfig):
    region = _region(cfg)
    rows, dropped = [], []
    for target in ("M22", "M11"):
        search = find_zeros(cfg.structure, target, region, cfg.options["tol"])
        rows += [[r.target, r.freq.real, r.freq.imag, r.residual] for r in search.roots]
        dropped += [(target, *d) for d in search.dropped]
    return ["target", "re_delta", "im_delta", "residual"], rows, dropped


def run_threshold(cfg: RunConfig):
    if "g_range" not in cfg.options:
        raise ConfigError("config error: threshold needs options.g_range")
    res = lasing_threshold(
        gain_family(cfg.structure),
        tuple(cfg.options["g_range"]),
        _region(cfg),
        cfg.options["tol"],
        cfg.options["gtol"],
    )
    rows = [[res.g_th, f, r, res.iterations] for f, r in zip(res.freqs, res.residuals)]
    extra = {"g_th": res.g_th, "freqs": res.freqs, "residuals": res.residuals, "iterations": res.iterations}
    return ["g_th", "freq", "residual", "iterations"], rows, extra


def run_check_pt(cfg: RunConfig):
    region = _region(cfg)
    rng = np.random.default_rng(cfg.options["seed"])
    n = cfg.options["pt_samples"]
    w = rng.uniform(region.re_min, region.re_max, n) + 1j * rng.uniform(region.im_min, region.im_max, n)
    rows = []
    try:
        eps_ok = verify_pt_epsilon(cfg.structure)
        rows.append(["epsilon_symmetry", "", eps_ok])
    except NotCheckableError as exc:
        eps_ok = None
        rows.append(["epsilon_symmetry", f"not checkable: {exc}", ""])
    rep = verify_pt_matrix(cfg.structure, w, cfg.options["pt_tol"])
    rows += [
        ["m22_vs_conj_m11", rep.worst_m22_m11, rep.worst_m22_m11 <= cfg.options["pt_tol"]],
        ["m12_antisymmetry", rep.worst_m12, rep.worst_m12 <= cfg.options["pt_tol"]],
        ["m21_antisymmetry", rep.worst_m21, rep.worst_m21 <= cfg.options["pt_tol"]],
    ]
    passed = rep.passed and eps_ok is not False
    rows.append(["overall", "", passed])
    return ["check", "worst_deviation", "passed"], rows, passed


def _config(config_path, preset, grid, tol, sets) -> RunConfig:
    overrides = []
    if grid is not None:
        try:
            start, stop, count = grid.split(":")
            overrides.append(("grid", {"start": float(start), "stop": float(stop), "count": int(count)}))
        except ValueError:
            raise ConfigError(f"config error: --grid expects start:stop:count, got {grid!r}") from None
    if tol is not None:
        overrides.append(("options.tol", tol))
    for item in sets:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"config error: --set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        overrides.append((key, value))
    doc = assemble(preset, load(config_path) if config_path else None, overrides)
    return parse(doc, preset)


def _emit(text: str, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def common(f):
    for opt in reversed(
        [
            click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run configuration."),
            click.option("--preset", help="Embedded configuration (fig2a, fig2b, pt_dfb, fp_laser, near_threshold)."),
            click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout)."),
            click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
            click.option("--grid", help="Override grid as start:stop:count."),
            click.option("--tol", type=float, help="Root residual tolerance."),
            click.option("--set", "sets", multiple=True, help="Override a config field, e.g. structure.params.gl=4.0"),
            click.option("--meta", is_flag=True, help="Add a '#' provenance line."),
        ]
    ):
        f = opt(f)
    return f


def _run(command, runner, config_path, preset, out, fmt, grid, tol, sets, meta):
    try:
        cfg = _config(config_path, preset, grid, tol, sets)
        result = runner(cfg)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    except LasingPoleError as exc:
        _fail(EXIT_POLE, f"lasing pole on grid: {exc}")
    except ThresholdNotBracketedError as exc:
        _fail(EXIT_NOT_BRACKETED, str(exc))
    except ValueError as exc:
        _fail(EXIT_CONFIG, f"config error: {exc}")
    return cfg, result, (_meta(command, cfg) if meta else None)


@click.group()
@click.version_option(__version__)
def main():
    """Scattering, poles and thresholds of PT-symmetric laser-absorbers."""


@main.command()
@common
def spectrum(config_path, preset, out, fmt, grid, tol, sets, meta):
    """Scattering coefficients and Theta over a detuning grid."""
    cfg, (cols, rows, extra), m = _run("spectrum", run_spectrum, config_path, preset, out, fmt, grid, tol, sets, meta)
    _emit(render(cols, rows, fmt, m, extra if fmt == "json" else None), out)


@main.command()
@common
def poles(config_path, preset, out, fmt, grid, tol, sets, meta):
    """Zeros of M22 (lasing poles) and M11 (CPA zeros) in the search region."""
    cfg, (cols, rows, dropped), m = _run("poles", run_poles, config_path, preset, out, fmt, grid, tol, sets, meta)
    for target, seed, z, res in dropped:
        click.echo(f"dropped {target} seed {seed:.6g}: stalled at {z:.6g} with residual {res:.3g}", err=True)
    _emit(render(cols, rows, fmt, m), out)


@main.command()
@common
def threshold(config_path, preset, out, fmt, grid, tol, sets, meta):
    """Lasing threshold gain and the real crossing frequencies."""
    cfg, (cols, rows, extra), m = _run("threshold", run_threshold, config_path, preset, out, fmt, grid, tol, sets, meta)
    _emit(render(cols, rows, fmt, m, extra if fmt == "json" else None), out)


@main.command("check-pt")
@common
def check_pt(config_path, preset, out, fmt, grid, tol, sets, meta):
    """PT symmetry of the permittivity profile and of the transfer matrix."""
    cfg, (cols, rows, passed), m = _run("check-pt", run_check_pt, config_path, preset, out, fmt, grid, tol, sets, meta)
    _emit(render(cols, rows, fmt, m, {"passed": passed} if fmt == "json" else None), out)
    if not passed:
        sys.exit(EXIT_PT_FAILED)


if __name__ == "__main__":
    main()
