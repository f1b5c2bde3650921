"""Experiment orchestration: run configurations, command dispatch, and
lossless CSV/JSON report emission.

Every report embeds the full resolved configuration (seed included), so any
output file is reproducible from its own header. Numeric CSV fields use 17
significant digits to make round-trips exact.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import crofton, deformation, intersections
from .errors import ConfigError, CroftonLabError
from .estimate import McEstimate
from .sampling import RandomStream, random_frame

COMMANDS = (
    "crofton-sphere",
    "crofton-cp",
    "cd-scan",
    "prop34-scan",
    "tasaki-check",
    "transversality",
    "equidistribution",
    "sun-example",
    "calibrate",
)

DEFAULT_SAMPLES = {
    "crofton-sphere": 100_000,
    "crofton-cp": 10_000,
    "cd-scan": 1_000_000,
    "prop34-scan": 10_000,
    "tasaki-check": 1_000_000,
    "transversality": 10_000,
    "equidistribution": 10_000,
    "calibrate": 100_000,
    "sun-example": 0,
}

MIN_SAMPLES = {
    "crofton-sphere": 100,
    "crofton-cp": 100,
    "cd-scan": 1000,
    "prop34-scan": 1000,
    "tasaki-check": 1000,
    "transversality": 1,
    "equidistribution": 100,
    "calibrate": 100,
    "sun-example": 0,
}


@dataclass
class RunConfig:
    """Fully resolved configuration of one CLI run."""

    command: str
    seed: int = 0
    samples: int | None = None
    restarts: int = 8
    threads: int = 1
    n: int | None = None
    k: int | None = None
    l: int | None = None
    m: int | None = None
    p: int | None = None
    q: int | None = None
    tau_grid: int = 9
    kind: str = "interleaved"
    tol: float = 0.05
    random_planes: int = 20
    input_path: str | None = None
    output_path: str | None = None
    format: str = "csv"
    plot: bool = False
    plot_dir: str | None = None

    def resolved(self) -> "RunConfig":
        cfg = RunConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        if cfg.command not in COMMANDS:
            raise ConfigError(f"unknown command {cfg.command!r}")
        if cfg.samples is None:
            cfg.samples = DEFAULT_SAMPLES[cfg.command]
        if cfg.samples < MIN_SAMPLES[cfg.command]:
            raise ConfigError(
                f"{cfg.command} needs samples >= {MIN_SAMPLES[cfg.command]}, got {cfg.samples}"
            )
        if cfg.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
        if cfg.threads < 1 or cfg.restarts < 1 or cfg.tau_grid < 2:
            raise ConfigError("threads and restarts must be >= 1, tau-grid >= 2")
        return cfg

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Row:
    name: str
    value: float
    stderr: float = 0.0
    samples: int = 0
    flag: str = ""


@dataclass
class RunReport:
    config: dict
    rows: list[Row]
    diagnostics: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def row(self, name: str) -> Row:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    def result_fields(self) -> list[tuple]:
        """The reproducibility contract: everything except wall time."""
        return [(r.name, r.value, r.stderr, r.samples, r.flag) for r in self.rows] + sorted(
            (k, repr(v)) for k, v in self.diagnostics.items()
        )


def _estimate_row(name: str, est: McEstimate, flag: str | None = None) -> Row:
    return Row(name, est.mean, est.stderr, est.samples, flag if flag is not None else (est.flag or ""))


def _need_input(cfg: RunConfig) -> Path:
    if not cfg.input_path:
        raise ConfigError(f"{cfg.command} needs --input")
    path = Path(cfg.input_path)
    if not path.exists():
        raise ConfigError(f"input file not found: {path}")
    return path


def _run_crofton_sphere(cfg: RunConfig, stream: RandomStream):
    polyline = crofton.read_polyline(_need_input(cfg))
    est = crofton.crofton_length(polyline, cfg.samples, stream, cfg.threads, cfg.threads)
    rows = [
        _estimate_row("crofton_length", est),
        Row("polyline_length", crofton.polyline_length(polyline), 0.0, 0, "exact"),
    ]
    return rows, {"rejected": est.rejected}


def _run_calibrate(cfg: RunConfig, stream: RandomStream):
    polyline = crofton.read_polyline(_need_input(cfg))
    est = crofton.calibrate_zeta(
        polyline.sphere_dim, polyline, cfg.samples, stream, cfg.threads, cfg.threads
    )
    rows = [
        _estimate_row("zeta_hat", est),
        Row("reference_length", crofton.polyline_length(polyline), 0.0, 0, "exact"),
    ]
    return rows, {"rejected": est.rejected}


def _curve_for(cfg: RunConfig) -> intersections.HomogeneousCurve:
    if cfg.input_path:
        return intersections.read_curve(_need_input(cfg))
    if cfg.n:
        return intersections.HomogeneousCurve.fermat(cfg.n)
    raise ConfigError(f"{cfg.command} needs --input (curve file) or --n (power-sum degree)")


def _run_crofton_cp(cfg: RunConfig, stream: RandomStream):
    curve = _curve_for(cfg)
    est = crofton.crofton_area_cp2(curve, cfg.samples, stream, cfg.threads, cfg.threads)
    rows = [
        _estimate_row("area_units", est),
        Row("degree", float(curve.degree), 0.0, 0, "exact"),
    ]
    return rows, {"rejected": est.rejected}


def _run_cd_scan(cfg: RunConfig, stream: RandomStream):
    taus = np.linspace(0.0, np.pi / 2.0, cfg.tau_grid)
    estimates = deformation.cp_tau_grid(taus, cfg.samples, stream, cfg.threads, cfg.threads)
    rows = [
        _estimate_row(f"cd[tau={tau:.10g}]", est) for tau, est in zip(taus, estimates)
    ]
    best = int(np.argmax([e.mean for e in estimates]))
    return rows, {"argmax_tau": float(taus[best])}


def _family_spec(cfg: RunConfig) -> deformation.FamilySpec:
    kind = cfg.kind
    try:
        if kind == "interleaved":
            return deformation.FamilySpec.interleaved(cfg.m or 2, cfg.p or 1, cfg.q or 2)
        if kind == "interleaved-complex":
            return deformation.FamilySpec.interleaved_complex(cfg.m or 2, cfg.p or 1, cfg.q or 2)
        if kind == "wirtinger":
            return deformation.FamilySpec.wirtinger_cp(cfg.n or 2, cfg.k or 1)
        if kind == "grassmann":
            return deformation.FamilySpec.grassmann(cfg.k or 1, cfg.l or 2, cfg.m or 2)
        if kind == "cp-hyperplanes":
            return deformation.FamilySpec.cp_hyperplanes(cfg.n or 2)
    except CroftonLabError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown scan kind {kind!r}")


def _structure_rows(diag: deformation.StructureDiagnosis) -> list[Row]:
    rows = [
        Row("product_form", 1.0 if diag.product_form else 0.0, 0.0, 0, "bool"),
        Row("i_prime_complex", 1.0 if diag.i_prime_complex else 0.0, 0.0, 0, "bool"),
    ]
    rows.extend(Row(f"residual_{k}", float(v)) for k, v in sorted(diag.residuals.items()))
    return rows


def _run_prop34_scan(cfg: RunConfig, stream: RandomStream):
    spec = _family_spec(cfg)
    result = deformation.maximizer_scan(
        spec, cfg.restarts, cfg.samples, stream, tol=cfg.tol, threads=cfg.threads
    )
    rows = [_estimate_row("best_value", result.best_value)]
    rows.extend(
        Row(f"restart_{i:02d}", v, 0.0, cfg.samples, "converged" if c else "nonconverged")
        for i, (v, c) in enumerate(zip(result.restart_values, result.restart_converged))
    )
    rows.extend(_structure_rows(result.structure))
    diag = {
        "kind": spec.kind,
        "nonconverged_restarts": result.nonconverged,
        "best_converged": bool(result.restart_converged[int(np.argmax(result.restart_values))]),
    }
    return rows, diag


def _run_tasaki_check(cfg: RunConfig, stream: RandomStream):
    q = cfg.q or 2
    m = 2
    product = deformation.product_plane(np.eye(q)[:, :1], m)
    unit = np.zeros(2 * q)
    unit[0] = unit[q + 1 if q > 1 else q] = 1.0 / np.sqrt(2.0)
    twisted = deformation.tasaki_plane(q, unit)
    rows = [
        _estimate_row(
            "product_value",
            deformation.interleaved_objective(product, m, q, cfg.samples, stream.split(0),
                                              cfg.threads, cfg.threads),
        ),
        _estimate_row(
            "tasaki_value",
            deformation.interleaved_objective(twisted, m, q, cfg.samples, stream.split(1),
                                              cfg.threads, cfg.threads),
        ),
    ]
    spec = deformation.FamilySpec.interleaved(m, 1, q)
    for i in range(cfg.random_planes):
        plane = random_frame(2 * q, 2, stream.split(10 + i))
        est = deformation.interleaved_objective(
            plane, m, q, cfg.samples, stream.split(1000 + i), cfg.threads, cfg.threads
        )
        rows.append(_estimate_row(f"random_{i:02d}", est))
    diag_t = deformation.diagnose_structure(twisted, spec, cfg.tol)
    rows.extend(_structure_rows(diag_t))
    return rows, {"tasaki_product_form": diag_t.product_form,
                  "tasaki_i_prime_complex": diag_t.i_prime_complex}


def _run_transversality(cfg: RunConfig, stream: RandomStream):
    k, l, m = cfg.k or 2, cfg.l or 3, cfg.m or 2
    from .sampling import sample_rotation

    rotations = sample_rotation(l + m, stream.split(0), cfg.samples)
    degenerate = 0
    containment_failures = 0
    min_volume = np.inf
    fixed_cols = np.zeros((l + m, l - k)) if l > k else None
    if fixed_cols is not None:
        fixed_cols[k:l] = np.eye(l - k)
        fixed = intersections.LinearSubspace(fixed_cols)
    for y in rotations:
        min_volume = min(min_volume, intersections.degeneracy_volume(y, k, l))
        meet = intersections.grassmann_meet(y, k, l, m)
        if meet is None:
            degenerate += 1
            continue
        moving = intersections.LinearSubspace(y[:, :k])
        if intersections.intersection_dim(meet, moving) != k:
            containment_failures += 1
        elif fixed_cols is not None and intersections.intersection_dim(meet, fixed) != l - k:
            containment_failures += 1
    swap = intersections.swap_rotation(k, l, m)
    swap_volume = intersections.degeneracy_volume(swap, k, l)
    swap_meet = intersections.grassmann_meet(swap, k, l, m)
    rows = [
        Row("trials", float(cfg.samples), 0.0, cfg.samples, "exact"),
        Row("degenerate_count", float(degenerate), 0.0, cfg.samples),
        Row("containment_failures", float(containment_failures), 0.0, cfg.samples),
        Row("min_degeneracy_volume", float(min_volume)),
        Row("swap_degeneracy_volume", float(swap_volume), 0.0, 0,
            "degenerate" if swap_meet is None else "transversal"),
    ]
    return rows, {"k": k, "l": l, "m": m}


def _run_equidistribution(cfg: RunConfig, stream: RandomStream):
    curve = _curve_for(cfg)
    result = intersections.equidistribution_experiment(
        curve, cfg.samples, stream, cfg.threads, cfg.threads
    )
    rows = [Row(f"hist_{count}", float(tally), 0.0, cfg.samples)
            for count, tally in sorted(result.histogram.items())]
    rows.append(Row("exceptional_fraction", result.exceptional_fraction, 0.0, cfg.samples))
    rows.append(Row("degree", float(curve.degree), 0.0, 0, "exact"))
    return rows, {"rejected": result.rejected}


def _run_sun_example(cfg: RunConfig, stream: RandomStream):
    n = cfg.n or 3
    points, residual = intersections.su_circle_intersections(n)
    root_residual = max(
        float(np.max(np.abs(np.linalg.matrix_power(pt, n) - np.eye(n)))) for pt in points
    )
    det_residual = max(abs(np.linalg.det(pt) - 1.0) for pt in points)
    rows = [
        Row("points", float(len(points)), 0.0, 0, "exact"),
        Row("orthogonality_residual", residual),
        Row("root_residual", root_residual),
        Row("det_residual", float(det_residual)),
    ]
    return rows, {"n": n}


_RUNNERS = {
    "crofton-sphere": _run_crofton_sphere,
    "crofton-cp": _run_crofton_cp,
    "cd-scan": _run_cd_scan,
    "prop34-scan": _run_prop34_scan,
    "tasaki-check": _run_tasaki_check,
    "transversality": _run_transversality,
    "equidistribution": _run_equidistribution,
    "sun-example": _run_sun_example,
    "calibrate": _run_calibrate,
}


def run(config: RunConfig) -> RunReport:
    """Validate, dispatch, and time one command; the report echoes the full
    resolved config."""
    cfg = config.resolved()
    stream = RandomStream(cfg.seed)
    start = time.perf_counter()
    try:
        rows, diagnostics = _RUNNERS[cfg.command](cfg, stream)
    except CroftonLabError:
        raise
    except OSError as exc:
        raise ConfigError(f"i/o failure: {exc}") from exc
    return RunReport(cfg.as_dict(), rows, diagnostics, time.perf_counter() - start)


def emit(report: RunReport, format: str = "csv") -> bytes:
    """Serialize a report; CSV carries the config in '#' header lines, JSON
    mirrors every field."""
    if format == "json":
        payload = {
            "config": report.config,
            "rows": [row.__dict__ for row in report.rows],
            "diagnostics": report.diagnostics,
            "wall_time": report.wall_time,
        }
        return (json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n").encode()
    if format != "csv":
        raise ConfigError(f"unknown report format {format!r}")
    lines = ["# croftonlab-report v1"]
    for key in sorted(report.config):
        lines.append(f"# config.{key}={report.config[key]}")
    for key in sorted(report.diagnostics):
        lines.append(f"# diag.{key}={report.diagnostics[key]}")
    lines.append(f"# wall_time={report.wall_time:.17g}")
    lines.append("name,value,stderr,samples,flag")
    for row in report.rows:
        lines.append(
            f"{row.name},{row.value:.17g},{row.stderr:.17g},{row.samples},{row.flag}"
        )
    return ("\n".join(lines) + "\n").encode()


def parse_report(data: bytes | str, format: str = "csv") -> RunReport:
    """Rebuild a report from its serialized form; CSV numeric fields round-trip
    bit for bit."""
    text = data.decode() if isinstance(data, bytes) else data
    if format == "json":
        payload = json.loads(text)
        rows = [Row(**row) for row in payload["rows"]]
        return RunReport(payload["config"], rows, payload["diagnostics"], payload["wall_time"])
    config: dict = {}
    diagnostics: dict = {}
    rows = []
    wall_time = 0.0
    seen_header = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("config."):
                key, _, value = body[len("config."):].partition("=")
                config[key] = value
            elif body.startswith("diag."):
                key, _, value = body[len("diag."):].partition("=")
                diagnostics[key] = value
            elif body.startswith("wall_time="):
                wall_time = float(body.partition("=")[2])
            continue
        if not seen_header:
            seen_header = True  # the column header line
            continue
        name, value, stderr, samples, flag = line.split(",", 4)
        rows.append(Row(name, float(value), float(stderr), int(samples), flag))
    return RunReport(config, rows, diagnostics, wall_time)


def load_config_file(path: str | Path) -> dict[str, str]:
    """key=value configuration file; '#' starts a comment, flags override."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line (need key=value): {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values
