"""Command-line harness: reproducible bench runs, correlation tables, sweeps.

Subcommands: ``tables`` (interference bench, in/out correlation table),
``erasure`` (polarization bench per analysis basis), ``sweep-discord``
(analytic output correlations against the input discord), and ``validate``
(invariant suite). Every CSV is written with a JSON manifest holding the
fully resolved configuration, which is sufficient to reproduce the CSV
byte-for-byte (see ``run_from_manifest``).

Config files are flat ``key = value`` text with ``[source]``, ``[bench]``,
``[analysis]`` and ``[sweep]`` sections; every key has a default matching the
ideal balanced bench (100 modes, 1e5 frames, unit mean intensity, tau = 1/2,
t = 1/2, eta = 1, seed 42, 99% confidence level). Command-line flags override
single keys.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .info import discord_oracle, entropy, gaussian_discord, mutual_information
from .network import (
    ThreeModeProtocol,
    matched_probe,
    mix_two,
    prepare_discordant_pair,
    run_three_mode,
)
from .speckle import BenchConfig, run_bench
from .states import (
    GaussianState,
    PhysicalityError,
    SingleModeSpec,
    mode_block,
    single_mode_cm,
    thermal_state,
)
from .stats import cm_to_intensity_corr, confidence_interval, corr_coeff

__all__ = [
    "DEFAULTS",
    "V_BASIS_WARNING",
    "RunManifest",
    "load_config",
    "run_tables",
    "run_erasure",
    "run_sweep_discord",
    "run_validate",
    "run_from_manifest",
    "main",
]

DEFAULTS = {
    "source": {"mean_photons": "1.0", "t_split": "0.5"},
    "bench": {
        "modes": "100",
        "frames": "100000",
        "tau_mix": "0.5",
        "eta": "1.0",
        "seed": "42",
        "workers": "1",
    },
    "analysis": {"ci_level": "0.99", "basis": "all"},
    "sweep": {
        "n_source_min": "0.02",
        "n_source_max": "50.0",
        "n_points": "50",
        "taus": "0.15,0.5,0.85",
        "sweep_param": "tau_mix",
    },
}

_SCHEMA = {
    ("source", "mean_photons"): float,
    ("source", "t_split"): float,
    ("bench", "modes"): int,
    ("bench", "frames"): int,
    ("bench", "tau_mix"): float,
    ("bench", "eta"): float,
    ("bench", "seed"): int,
    ("bench", "workers"): int,
    ("analysis", "ci_level"): float,
    ("analysis", "basis"): str,
    ("sweep", "n_source_min"): float,
    ("sweep", "n_source_max"): float,
    ("sweep", "n_points"): int,
    ("sweep", "taus"): str,
    ("sweep", "sweep_param"): str,
}

#: printed whenever the erasure bench is analyzed in the V basis
V_BASIS_WARNING = (
    "basis=V emits this model's prediction: all three pairs near-perfectly "
    "correlated. A reference pattern with c12 ~ 1 and c23 ~ 1 but c13 ~ 0 "
    "cannot arise from any single fixed per-beam projection (near-perfect "
    "correlation is transitive), so such a pattern is not reproduced here."
)

_PAIRS = ((0, 1, "1-2"), (0, 2, "1-3"), (1, 2, "2-3"))


class ConfigError(ValueError):
    """Bad configuration file or value."""


def load_config(path: str | Path | None = None) -> dict:
    """Defaults overlaid with an optional config file; values are typed."""
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULTS)
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                parser.read_file(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except configparser.Error as exc:
            # configparser messages carry the offending line numbers
            raise ConfigError(f"config parse error: {exc}") from exc
    cfg: dict = {}
    for (section, key), typ in _SCHEMA.items():
        raw = parser.get(section, key)
        try:
            cfg.setdefault(section, {})[key] = typ(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {typ.__name__}") from exc
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if (section, key) not in _SCHEMA:
                raise ConfigError(f"unknown config key [{section}] {key}")
    return cfg


@dataclass
class RunManifest:
    """Everything needed to reproduce a CSV byte-for-byte, plus provenance."""

    command: str
    version: str
    seed: int
    config: dict
    outputs: list = field(default_factory=list)
    duration_s: float = 0.0
    created_utc: str = ""

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def _bench_config(cfg: dict, scenario: str, basis: str = "none") -> BenchConfig:
    return BenchConfig(
        modes=cfg["bench"]["modes"],
        frames=cfg["bench"]["frames"],
        mean_photons=cfg["source"]["mean_photons"],
        tau_mix=cfg["bench"]["tau_mix"],
        t_split=cfg["source"]["t_split"],
        eta=cfg["bench"]["eta"],
        seed=cfg["bench"]["seed"],
        scenario=scenario,
        analysis_basis=basis,
        workers=cfg["bench"]["workers"],
    )


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{value:.6f}"


def _write_csv(path: Path, header: tuple, rows: list) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def run_tables(cfg: dict, out_path: Path) -> Path:
    """Interference bench: one row per beam pair with in/out correlations and CIs."""
    batch = run_bench(_bench_config(cfg, "interference"))
    level = cfg["analysis"]["ci_level"]
    n = batch.n_frames
    rows = []
    for i, j, label in _PAIRS:
        c_in = corr_coeff(batch.in_series(i), batch.in_series(j))
        e_in = confidence_interval(c_in, n, level)
        c_out = corr_coeff(batch.out_series(i), batch.out_series(j))
        e_out = confidence_interval(c_out, n, level)
        rows.append((label, c_in, e_in.ci_low, e_in.ci_high, c_out, e_out.ci_low, e_out.ci_high))
    _write_csv(
        out_path,
        ("pair", "c_in", "ci_in_lo", "ci_in_hi", "c_out", "ci_out_lo", "ci_out_hi"),
        rows,
    )
    return out_path


def run_erasure(cfg: dict, out_path: Path) -> Path:
    """Erasure bench: out-correlations per analysis basis, one row per pair.

    basis 'none' (no polarizers) reports only the 1-2 pair, whose beams leave
    the BS with orthogonal polarizations and identical total intensities.
    """
    basis_cfg = cfg["analysis"]["basis"]
    bases = ("none", "deg45", "V") if basis_cfg == "all" else (basis_cfg,)
    for basis in bases:
        if basis not in ("none", "deg45", "V"):
            raise ConfigError(f"erasure basis must be none, deg45, V or all, got {basis!r}")
    level = cfg["analysis"]["ci_level"]
    rows = []
    for basis in bases:
        if basis == "V":
            print(f"warning: {V_BASIS_WARNING}", file=sys.stderr)
        batch = run_bench(_bench_config(cfg, "erasure", basis))
        n = batch.n_frames
        pairs = _PAIRS if basis != "none" else (_PAIRS[0],)
        for i, j, label in pairs:
            c = corr_coeff(batch.out_series(i), batch.out_series(j))
            est = confidence_interval(c, n, level)
            rows.append((basis, label, c, est.ci_low, est.ci_high))
    _write_csv(out_path, ("basis", "pair", "c_out", "ci_lo", "ci_hi"), rows)
    return out_path


def run_sweep_discord(cfg: dict, out_path: Path) -> Path:
    """Analytic sweep: input discord of the 2-3 pair versus output correlations.

    One series per value in ``taus``, interpreted as the mixing transmissivity
    (sweep_param = tau_mix) or as the splitting used to prepare the pair
    (sweep_param = t_split). Correlations use the photon-counting variance:
    with the analog (classical) variance every split-thermal pair has
    intensity correlation exactly 1 and the curves would degenerate.
    """
    sweep = cfg["sweep"]
    taus = [float(x) for x in str(sweep["taus"]).split(",") if x.strip()]
    if not taus:
        raise ConfigError("sweep taus must name at least one transmissivity")
    if sweep["n_points"] < 2:
        raise ConfigError("sweep needs at least 2 grid points")
    if not 0.0 < sweep["n_source_min"] < sweep["n_source_max"]:
        raise ConfigError("sweep photon grid must satisfy 0 < n_source_min < n_source_max")
    if sweep["sweep_param"] not in ("tau_mix", "t_split"):
        raise ConfigError(f"sweep_param must be tau_mix or t_split, got {sweep['sweep_param']!r}")
    grid = np.geomspace(sweep["n_source_min"], sweep["n_source_max"], sweep["n_points"])
    rows = []
    for tau in taus:
        for n_source in grid:
            if sweep["sweep_param"] == "tau_mix":
                t_split, tau_mix = cfg["source"]["t_split"], tau
            else:
                t_split, tau_mix = tau, cfg["bench"]["tau_mix"]
            source = SingleModeSpec(float(n_source))
            pair = prepare_discordant_pair(source, t_split)
            disc = gaussian_discord(pair, side="B").value
            protocol = ThreeModeProtocol(matched_probe(source, t_split), source, t_split, tau_mix)
            _, out_state = run_three_mode(protocol)
            c13 = cm_to_intensity_corr(out_state, 0, 2, shot_noise=True)
            c23 = cm_to_intensity_corr(out_state, 1, 2, shot_noise=True)
            rows.append((tau, float(n_source), disc, c13, c23))
    _write_csv(out_path, ("tau", "n_source", "discord", "c13_out", "c23_out"), rows)
    return out_path


# ---------------------------------------------------------------------------
# validation suite


def _check_physicality(quick: bool) -> None:
    thermal_state(1.0)  # accepts a physical state
    try:
        GaussianState(np.diag([0.4, 0.4]))
    except PhysicalityError:
        return
    raise AssertionError("corrupted CM (variance 0.4 < 1/2) was not rejected")


def _check_purity_identity(quick: bool) -> None:
    rng = np.random.default_rng(1)
    for _ in range(100 if quick else 500):
        spec = SingleModeSpec(rng.uniform(0.0, 8.0), rng.uniform(0.0, 1.0))
        cm = single_mode_cm(spec)
        expected = (0.5 + spec.n_thermal) ** 2
        err = abs(float(np.linalg.det(cm)) - expected)
        if err > 1e-10 * max(1.0, expected):
            raise AssertionError(f"purity identity off by {err:g} at {spec}")


def _check_identity_interference(quick: bool) -> None:
    rng = np.random.default_rng(2)
    for _ in range(20 if quick else 60):
        spec = SingleModeSpec(rng.uniform(0.0, 4.0), rng.uniform(0.0, 1.0))
        sigma = single_mode_cm(spec)
        for tau in (0.15, 0.5, 0.85):
            blocks = mix_two(sigma, sigma, tau)
            if float(np.max(np.abs(blocks.sigma12))) > 1e-12:
                raise AssertionError("identical inputs produced a nonzero off-diagonal block")
            if float(np.max(np.abs(blocks.sigma1 - sigma))) > 1e-12:
                raise AssertionError("identical inputs changed a marginal")


def _check_output_blocks(quick: bool) -> None:
    rng = np.random.default_rng(3)
    for _ in range(10 if quick else 30):
        source = SingleModeSpec(rng.uniform(0.3, 4.0), rng.uniform(0.0, 0.9))
        t_split = rng.uniform(0.15, 0.85)
        tau = rng.uniform(0.1, 0.9)
        delta = mode_block(prepare_discordant_pair(source, t_split), 0, 1)
        protocol = ThreeModeProtocol(matched_probe(source, t_split), source, t_split, tau)
        _, out = run_three_mode(protocol)
        err13 = np.max(np.abs(mode_block(out, 0, 2) - np.sqrt(1 - tau) * delta))
        err23 = np.max(np.abs(mode_block(out, 1, 2) - np.sqrt(tau) * delta))
        err12 = np.max(np.abs(mode_block(out, 0, 1)))
        if max(err13, err23, err12) > 1e-12:
            raise AssertionError(f"output blocks off by {max(err13, err23, err12):g}")


def _check_discord_oracle(quick: bool) -> None:
    rng = np.random.default_rng(4)
    for _ in range(3 if quick else 10):
        source = SingleModeSpec(rng.uniform(0.3, 3.0), rng.uniform(0.0, 0.8))
        pair = prepare_discordant_pair(source, rng.uniform(0.2, 0.8))
        closed = gaussian_discord(pair, side="B").value
        probed = discord_oracle(pair, side="B").value
        if abs(closed - probed) > 1e-6:
            raise AssertionError(f"closed form {closed:.9f} vs oracle {probed:.9f}")


def _check_entropy_identities(quick: bool) -> None:
    import math as _math

    for n in (0.1, 1.0, 10.0):
        expected = (n + 1.0) * _math.log(n + 1.0) - n * _math.log(n)
        if abs(entropy(thermal_state(n)) - expected) > 1e-12:
            raise AssertionError(f"thermal entropy mismatch at N={n}")
    pair = prepare_discordant_pair(SingleModeSpec(2.0), 0.5)
    report = mutual_information(pair)
    expected = 3.0 * _math.log(4.0 / 3.0)  # 2 g(1) - g(2)
    if abs(report.mutual_information - expected) > 1e-9:
        raise AssertionError("split-thermal mutual information mismatch")


def _check_mc_against_cm(quick: bool) -> None:
    frames = 2_000 if quick else 20_000
    bench = BenchConfig(modes=64, frames=frames, mean_photons=1.0, seed=11)
    batch = run_bench(bench)
    protocol = ThreeModeProtocol(SingleModeSpec(1.0), SingleModeSpec(2.0), 0.5, 0.5)
    _, out_state = run_three_mode(protocol)
    for i, j in ((0, 2), (1, 2)):
        c_mc = corr_coeff(batch.out_series(i), batch.out_series(j))
        c_cm = cm_to_intensity_corr(out_state, i, j, shot_noise=False)
        se = (1.0 - c_cm**2) / np.sqrt(frames - 3)
        if abs(c_mc - c_cm) > 3.0 * se:
            raise AssertionError(
                f"pair ({i + 1},{j + 1}): MC {c_mc:.4f} vs CM {c_cm:.4f} beyond 3 SE ({3 * se:.4f})"
            )


_CHECKS = (
    ("physicality-gate", _check_physicality),
    ("purity-identity", _check_purity_identity),
    ("identity-interference", _check_identity_interference),
    ("three-mode-output-blocks", _check_output_blocks),
    ("discord-closed-form-vs-oracle", _check_discord_oracle),
    ("entropy-identities", _check_entropy_identities),
    ("mc-vs-analytic-correlations", _check_mc_against_cm),
)


def run_validate(quick: bool = False) -> int:
    """Run the invariant suite, print one PASS/FAIL line per check, return exit code."""
    failures = 0
    for name, check in _CHECKS:
        try:
            check(quick)
        except Exception as exc:  # a failing check must not stop the others
            print(f"FAIL {name}: {exc}")
            failures += 1
        else:
            print(f"PASS {name}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# argument handling


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="config file (key = value with sections)")
    sub.add_argument("--out", metavar="PATH", help="output CSV path")
    sub.add_argument("--seed", type=int, help="override bench seed")
    sub.add_argument("--frames", type=int, help="override frame count")
    sub.add_argument("--modes", type=int, help="override modes per detector")
    sub.add_argument("--tau", type=float, help="override mixing transmissivity")
    sub.add_argument("--t-split", type=float, dest="t_split", help="override 2/3 splitting")
    sub.add_argument("--eta", type=float, help="override mode-matching efficiency")
    sub.add_argument("--ci-level", type=float, dest="ci_level", help="override CI level")
    sub.add_argument("--workers", type=int, help="override worker count")
    sub.add_argument("--quick", action="store_true", help="halve the frame count")


_OVERRIDES = (
    ("seed", "bench", "seed"),
    ("frames", "bench", "frames"),
    ("modes", "bench", "modes"),
    ("tau", "bench", "tau_mix"),
    ("eta", "bench", "eta"),
    ("workers", "bench", "workers"),
    ("t_split", "source", "t_split"),
    ("ci_level", "analysis", "ci_level"),
    ("basis", "analysis", "basis"),
)


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = load_config(getattr(args, "config", None))
    for attr, section, key in _OVERRIDES:
        value = getattr(args, attr, None)
        if value is not None:
            cfg[section][key] = value
    if getattr(args, "quick", False):
        cfg["bench"]["frames"] = max(1, cfg["bench"]["frames"] // 2)
    return cfg


_COMMANDS = {
    "tables": run_tables,
    "erasure": run_erasure,
    "sweep-discord": run_sweep_discord,
}


def _execute(command: str, cfg: dict, out_path: Path) -> Path:
    return _COMMANDS[command](cfg, out_path)


def run_from_manifest(manifest_path: str | Path, out_path: str | Path | None = None) -> Path:
    """Re-run the command recorded in a manifest; reproduces its CSV byte-for-byte."""
    data = json.loads(Path(manifest_path).read_text())
    target = Path(out_path) if out_path is not None else Path(data["outputs"][0])
    return _execute(data["command"], data["config"], target)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cvbench",
        description="Virtual optical bench: correlation tables, discord sweeps, validation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("tables", "interference bench correlation table (CSV)"),
        ("erasure", "polarization-erasure bench per analysis basis (CSV)"),
        ("sweep-discord", "analytic output correlations vs input discord (CSV)"),
    ):
        p = sub.add_parser(name, help=desc)
        _add_common_flags(p)
        if name == "erasure":
            p.add_argument("--basis", choices=("none", "deg45", "V", "all"), help="analysis basis")
    p_val = sub.add_parser("validate", help="run the invariant suite")
    p_val.add_argument("--quick", action="store_true", help="reduced-size checks")

    args = parser.parse_args(argv)
    if args.command == "validate":
        return run_validate(quick=args.quick)

    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_path = Path(args.out) if args.out else Path(f"{args.command.replace('-', '_')}.csv")
    started = time.perf_counter()
    try:
        _execute(args.command, cfg, out_path)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(
        command=args.command,
        version=__version__,
        seed=cfg["bench"]["seed"],
        config=cfg,
        outputs=[str(out_path)],
        duration_s=round(time.perf_counter() - started, 3),
        created_utc=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    manifest.write(out_path.with_suffix(out_path.suffix + ".manifest.json"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
