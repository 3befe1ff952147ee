"""Batch front-end: JSON config in; CSV vertex tables, an SVG overlay and a text report out.

Exit codes: 0 success, 2 invalid configuration, 3 computation error, 4 I/O error.
Errors print one line ``error:<kind>:<field or detail>:<message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, icc_model
from .polytope_fme import UnboundedRegionError
from .region_geom import Region2D, axis_intercepts, contains, excess

MODES = ("region", "hk", "gvbc", "relay", "ideal", "compare")
CONTAINMENT_TOL = 1e-6
STRICT_GAP = 1e-3
INTERCEPT_TOL = 1e-2


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class RunConfig:
    channel: icc_model.ChannelParams
    mode: str = "compare"
    sweep: icc_model.SweepConfig = field(default_factory=icc_model.SweepConfig)
    k_list: tuple[float, ...] = (1.0, 4.0)
    baseline_resolution: int = 17
    polish: bool = True
    out: Path = Path("out")
    plot: bool = True


# ---------------------------------------------------------------- config parsing


def _number(doc: dict, key: str, path: str, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", "must be a number")
    return float(value)


def parse_config(doc: dict, overrides: dict | None = None) -> RunConfig:
    """Validate a decoded JSON document; ``overrides`` come from CLI flags."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a JSON object")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    ch = doc.get("channel")
    if not isinstance(ch, dict):
        raise ConfigError("channel", "missing or not an object")
    values = {k: _number(ch, k, "channel") for k in ("P1", "P2", "a12", "a21")}
    values["K"] = _number(ch, "K", "channel", 0.0)
    try:
        channel = icc_model.ChannelParams(**values)
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from None

    mode = overrides.get("mode", doc.get("mode", "compare"))
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")

    sw = doc.get("sweep", {})
    if not isinstance(sw, dict):
        raise ConfigError("sweep", "must be an object")
    resolution = overrides.get("resolution", sw.get("resolution", 9))
    try:
        sweep = icc_model.SweepConfig(
            resolution=resolution,
            lambda_grid=tuple(sw.get("lambda_grid", (0.0, 0.5, 1.0, 1.5))),
            sides=tuple(sw.get("sides", icc_model.SIDES)),
            relay_signs=tuple(sw.get("relay_signs", (1, -1))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("sweep", str(exc)) from None
    if 0.0 not in sweep.lambda_grid or 1.0 not in sweep.lambda_grid:
        raise ConfigError("sweep.lambda_grid", "must contain 0 and 1")

    k_list = doc.get("K_list", [1, 4])
    if not isinstance(k_list, list) or not k_list or any(
            isinstance(k, bool) or not isinstance(k, (int, float)) or k < 0 for k in k_list):
        raise ConfigError("K_list", "must be a non-empty list of non-negative numbers")

    base_res = doc.get("baseline_resolution", 17)
    if isinstance(base_res, bool) or not isinstance(base_res, int) or base_res < 2:
        raise ConfigError("baseline_resolution", "must be an integer >= 2")
    polish = doc.get("polish", True)
    if not isinstance(polish, bool):
        raise ConfigError("polish", "must be true or false")

    out = overrides.get("out", doc.get("out", "out"))
    if not isinstance(out, str) or not out:
        raise ConfigError("out", "must be a non-empty path")
    plot = doc.get("plot", True)
    if not isinstance(plot, bool):
        raise ConfigError("plot", "must be true or false")
    if overrides.get("no_plot"):
        plot = False

    return RunConfig(channel, mode, sweep, tuple(sorted(float(k) for k in k_list)),
                     base_res, polish, Path(out), plot)


# ---------------------------------------------------------------- outputs


def _k_label(k: float) -> str:
    return f"{k:g}"


def region_csv(region: Region2D) -> str:
    lines = ["r1_bits,r2_bits"]
    lines += [f"{x:.6f},{y:.6f}" for x, y in region.vertices]
    return "\n".join(lines) + "\n"


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def region_svg(regions: dict[str, Region2D]) -> str:
    """Fixed 800x600 overlay; each region is a closed polyline."""
    width, height = 800, 600
    left, right, top, bottom = 70, 180, 30, 60
    pts = [r.vertices for r in regions.values() if not r.is_empty]
    span = max(1e-9, max(float(v.max()) for v in pts)) if pts else 1.0
    step = _tick_step(span)
    upper = step * np.ceil(span / step)
    sx = (width - left - right) / upper
    sy = (height - top - bottom) / upper

    def xy(x, y):
        return f"{left + x * sx:.2f},{height - bottom - y * sy:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    for k in range(int(round(upper / step)) + 1):
        t = k * step
        out.append(f'<line x1="{left + t * sx:.2f}" y1="{height - bottom}" '
                   f'x2="{left + t * sx:.2f}" y2="{height - bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{left + t * sx:.2f}" y="{height - bottom + 18}" '
                   f'text-anchor="middle">{t:.2f}</text>')
        out.append(f'<line x1="{left - 5}" y1="{height - bottom - t * sy:.2f}" '
                   f'x2="{left}" y2="{height - bottom - t * sy:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{height - bottom - t * sy + 4:.2f}" '
                   f'text-anchor="end">{t:.2f}</text>')
    out.append(f'<polyline points="{xy(0, upper)} {xy(0, 0)} {xy(upper, 0)}" '
               f'fill="none" stroke="black"/>')
    out.append(f'<text x="{(left + width - right) / 2:.0f}" y="{height - 15}" '
               f'text-anchor="middle">R1 (bits)</text>')
    out.append(f'<text x="20" y="{(top + height - bottom) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {(top + height - bottom) / 2:.0f})">R2 (bits)</text>')
    for n, (name, region) in enumerate(regions.items()):
        color = _COLORS[n % len(_COLORS)]
        if not region.is_empty:
            v = region.vertices
            path = " ".join(xy(x, y) for x, y in np.vstack([v, v[:1]]))
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = top + 20 * n + 10
        out.append(f'<line x1="{width - right + 20}" y1="{ly}" x2="{width - right + 45}" '
                   f'y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{width - right + 52}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _tick_step(span: float) -> float:
    raw = span / 5
    mag = 10 ** np.floor(np.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return float(m * mag)
    return float(10 * mag)


# ---------------------------------------------------------------- execution


@dataclass
class RunReport:
    lines: list[str] = field(default_factory=list)
    regions: dict[str, Region2D] = field(default_factory=dict)
    verdicts: dict[str, str] = field(default_factory=dict)

    def verdict(self, name: str, ok: bool | None, detail: str):
        state = "skipped" if ok is None else ("pass" if ok else "fail")
        self.verdicts[name] = state
        self.lines.append(f"check {name}: {state} ({detail})")


def _sweep_at(cfg: RunConfig, k: float, report: RunReport, polish: bool):
    params = icc_model.ChannelParams(cfg.channel.P1, cfg.channel.P2, cfg.channel.a12,
                                     cfg.channel.a21, k)
    result = icc_model.sweep(params, cfg.sweep)
    name = f"region_K{_k_label(k)}"
    report.regions[name] = result.region
    report.lines.append(
        f"{name}: {result.n_points} grid points, {result.n_polygons} polygons, "
        f"{result.n_empty} empty, {result.n_audited} slope-audited")
    report.verdict(f"slope_audit_{name}", result.slope_violations == 0,
                   f"{result.slope_violations} disallowed facets, tol 1e-6")
    if polish and not result.region.is_empty:
        r1, r2 = icc_model.polished_intercepts(params, cfg.sweep, result)
        report.lines.append(f"{name} polished intercepts: R1={r1:.6f} R2={r2:.6f}")
        return result, (r1, r2)
    return result, axis_intercepts(result.region) if not result.region.is_empty else None


def _relay_lines(params: icc_model.ChannelParams, report: RunReport):
    caps = {}
    for relay in ("user2_relays", "user1_relays"):
        res = baselines.relay_capacity(params, relay)
        caps[relay] = res.capacity
        flag = "" if res.degraded else " (degradedness not established, K < 1)"
        report.lines.append(f"relay {relay} K={_k_label(params.K)}: "
                            f"capacity={res.capacity:.6f} rho={res.rho:.6f}{flag}")
    return caps


def execute(cfg: RunConfig) -> RunReport:
    start = time.perf_counter()
    report = RunReport()
    ch = cfg.channel
    report.lines.append(f"mode={cfg.mode} P1={ch.P1:g} P2={ch.P2:g} a12={ch.a12:g} "
                        f"a21={ch.a21:g} K={ch.K:g} resolution={cfg.sweep.resolution}")
    if cfg.mode == "region":
        _sweep_at(cfg, ch.K, report, cfg.polish)
    elif cfg.mode == "hk":
        report.regions["hk"] = baselines.hk_region(ch, cfg.baseline_resolution)
    elif cfg.mode == "gvbc":
        report.regions["gvbc"] = baselines.gvbc_region(ch, cfg.baseline_resolution)
    elif cfg.mode == "ideal":
        ideal_cfg = icc_model.SweepConfig(
            resolution=cfg.baseline_resolution, lambda_grid=cfg.sweep.lambda_grid,
            sides=cfg.sweep.sides, relay_signs=cfg.sweep.relay_signs)
        report.regions["ideal"] = icc_model.ideal_conferencing_region(ch, ideal_cfg)
    elif cfg.mode == "relay":
        _relay_lines(ch, report)
    else:
        _compare(cfg, report)
    for name, region in report.regions.items():
        if not region.is_empty:
            r1, r2 = axis_intercepts(region)
            report.lines.append(f"{name}: {len(region.vertices)} vertices, "
                                f"intercepts R1={r1:.6f} R2={r2:.6f}")
    report.lines.append(f"wall_clock_seconds={time.perf_counter() - start:.1f}")
    return report


def _compare(cfg: RunConfig, report: RunReport):
    ch = cfg.channel
    hk = baselines.hk_region(ch, cfg.baseline_resolution)
    report.regions["hk"] = hk
    chain = [("hk", hk)]
    last = None
    for k in cfg.k_list:
        polish = cfg.polish and k == cfg.k_list[-1]
        result, intercepts = _sweep_at(cfg, k, report, polish)
        chain.append((f"region_K{_k_label(k)}", result.region))
        last = (k, intercepts)
    gvbc = baselines.gvbc_region(ch, cfg.baseline_resolution)
    report.regions["gvbc"] = gvbc
    chain.append(("gvbc", gvbc))
    for (inner_name, inner), (outer_name, outer) in zip(chain, chain[1:]):
        gap = excess(outer, inner)
        report.verdict(f"{inner_name}_in_{outer_name}", contains(outer, inner, CONTAINMENT_TOL),
                       f"excess {gap:.3g} bits, tol {CONTAINMENT_TOL:g}")
    first_name, first = chain[1]
    gain = excess(hk, first)
    report.verdict(f"{first_name}_exceeds_hk", gain > STRICT_GAP,
                   f"largest vertex distance outside hk {gain:.4g} bits, need > {STRICT_GAP:g}")
    k, intercepts = last
    params = icc_model.ChannelParams(ch.P1, ch.P2, ch.a12, ch.a21, k)
    caps = _relay_lines(params, report)
    if intercepts is None or k < 1:
        report.verdict("relay_intercepts", None, "needs a non-empty region and K >= 1")
    else:
        d1 = abs(intercepts[0] - caps["user2_relays"])
        d2 = abs(intercepts[1] - caps["user1_relays"])
        report.verdict("relay_intercepts", max(d1, d2) <= INTERCEPT_TOL,
                       f"|dR1|={d1:.4g} |dR2|={d2:.4g} bits, tol {INTERCEPT_TOL:g}")


def write_outputs(cfg: RunConfig, report: RunReport):
    cfg.out.mkdir(parents=True, exist_ok=True)
    for name, region in report.regions.items():
        (cfg.out / f"{name}.csv").write_text(region_csv(region))
    if cfg.plot and report.regions:
        (cfg.out / f"{cfg.mode}.svg").write_text(region_svg(report.regions))
    (cfg.out / "report.txt").write_text("\n".join(report.lines) + "\n")


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iccregion", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--mode", choices=MODES, help="overrides config mode")
    p.add_argument("--resolution", type=int, help="simplex grid points per dimension")
    p.add_argument("--no-plot", action="store_true", help="skip the SVG")
    return p


def _fail(code: int, kind: str, where: str, message: str) -> int:
    message = " ".join(str(message).split())
    print(f"error:{kind}:{where}:{message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = json.loads(Path(args.config).read_text())
    except OSError as exc:
        return _fail(4, "io", args.config, exc.strerror or exc)
    except json.JSONDecodeError as exc:
        return _fail(2, "validation", "$", f"invalid JSON: {exc.msg} at line {exc.lineno}")
    try:
        cfg = parse_config(doc, {"mode": args.mode, "out": args.out,
                                 "resolution": args.resolution, "no_plot": args.no_plot})
    except ConfigError as exc:
        return _fail(2, "validation", exc.path, exc.message)
    try:
        report = execute(cfg)
    except (UnboundedRegionError, ArithmeticError) as exc:
        return _fail(3, "computation", cfg.mode, exc)
    try:
        write_outputs(cfg, report)
    except OSError as exc:
        return _fail(4, "io", str(exc.filename or cfg.out), exc.strerror or exc)
    print("\n".join(report.lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
