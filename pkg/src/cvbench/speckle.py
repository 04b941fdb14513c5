"""Frame-by-frame Monte Carlo of multimode pseudo-thermal beams through the benches.

Beams are classical speckle fields: each spatial mode carries an independent
circular complex Gaussian amplitude, splitting is deterministic, and a
detector integrates |amplitude|^2 over its modes (analog regime, no shot
noise). Mode mismatch is modeled by substituting a fraction (1 - eta) of a
beam's modes with an independent equal-mean field.

Randomness is counter-based. Frames are grouped into fixed chunks of
``CHUNK_FRAMES``; the fields of chunk c of beam b come from the Philox stream
keyed by (seed, b) at counter position c, and frame j occupies row
j mod CHUNK_FRAMES of its chunk. Any frame is therefore reproducible in
isolation by regenerating one chunk (see ``frame_field``), and the output is
bit-identical for any worker count since workers only handle whole chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

#: frames per RNG chunk; fixed, part of the reproducibility contract
CHUNK_FRAMES = 256

SCENARIOS = ("interference", "erasure")
ANALYSIS_BASES = ("none", "deg45", "V", "H")

#: stream ids keying the per-beam Philox streams
BEAM_SOURCE1 = 1
BEAM_SOURCE2 = 2
BEAM_MIX_SUBSTITUTE = 3
BEAM_SPLIT_SUBSTITUTE = 4

__all__ = [
    "CHUNK_FRAMES",
    "SCENARIOS",
    "ANALYSIS_BASES",
    "BEAM_SOURCE1",
    "BEAM_SOURCE2",
    "BEAM_MIX_SUBSTITUTE",
    "BEAM_SPLIT_SUBSTITUTE",
    "BenchConfig",
    "FrameBatch",
    "chunk_rng",
    "field_rng",
    "frame_field",
    "sample_thermal_field",
    "split_field",
    "substitute_modes",
    "mix_fields",
    "polarized",
    "project_jones",
    "detect",
    "run_bench",
]


@dataclass(frozen=True)
class BenchConfig:
    """Configuration of one bench run.

    ``mean_photons`` is the per-mode mean intensity of every detected beam in
    the ideal configuration; the split source is drawn brighter by 1/t_split
    so that beam 2 matches beam 1. All modes of a beam share one mean, which
    is what makes the correlation coefficients independent of ``modes``.
    """

    modes: int = 100
    frames: int = 100_000
    mean_photons: float = 1.0
    tau_mix: float = 0.5
    t_split: float = 0.5
    eta: float = 1.0
    seed: int = 42
    scenario: str = "interference"
    analysis_basis: str = "none"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.modes < 1:
            raise ValueError(f"modes must be >= 1, got {self.modes!r}")
        if self.frames < 1:
            raise ValueError(f"frames must be >= 1, got {self.frames!r}")
        if not self.mean_photons > 0.0:
            raise ValueError(f"mean_photons must be > 0, got {self.mean_photons!r}")
        if not 0.0 <= self.tau_mix <= 1.0:
            raise ValueError(f"tau_mix must lie in [0, 1], got {self.tau_mix!r}")
        if not 0.0 < self.t_split <= 1.0:
            raise ValueError(f"t_split must lie in (0, 1], got {self.t_split!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.analysis_basis not in ANALYSIS_BASES:
            raise ValueError(
                f"analysis_basis must be one of {ANALYSIS_BASES}, got {self.analysis_basis!r}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")


@dataclass(frozen=True, eq=False)
class FrameBatch:
    """Per-frame integrated intensities of beams 1-3, before and after the BS.

    Columns index the beams: (0, 1, 2) <-> (beam 1, beam 2, beam 3). For the
    erasure scenario the 'out' intensities are taken behind the analysis
    projection configured in ``config.analysis_basis``.
    """

    config: BenchConfig
    intensities_in: np.ndarray
    intensities_out: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.intensities_in.shape[0]

    def in_series(self, beam: int) -> np.ndarray:
        return self.intensities_in[:, beam]

    def out_series(self, beam: int) -> np.ndarray:
        return self.intensities_out[:, beam]


def chunk_rng(seed: int, beam: int, chunk: int) -> np.random.Generator:
    """Counter-based stream for one (beam, chunk-of-frames) cell."""
    key = np.array([seed, beam], dtype=np.uint64)
    counter = np.array([0, chunk, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def field_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Stand-alone stream, placed outside the chunk range used by run_bench."""
    return chunk_rng(seed, stream, (1 << 32) + index)


def sample_thermal_field(rng: np.random.Generator, modes: int, mean: float) -> np.ndarray:
    """One frame of a thermal speckle field: M circular complex Gaussians, E|a|^2 = mean."""
    if mean < 0.0:
        raise ValueError(f"mean must be >= 0, got {mean!r}")
    z = rng.standard_normal(2 * modes) * math.sqrt(mean / 2.0)
    return z[0::2] + 1j * z[1::2]


def _chunk_fields(seed: int, beam: int, chunk: int, rows: int, modes: int, mean: float) -> np.ndarray:
    # always draw the full chunk so row content never depends on `rows`
    z = chunk_rng(seed, beam, chunk).standard_normal((CHUNK_FRAMES, 2 * modes))
    z = z[:rows] * math.sqrt(mean / 2.0)
    return z[:, 0::2] + 1j * z[:, 1::2]


def frame_field(seed: int, beam: int, frame: int, modes: int, mean: float) -> np.ndarray:
    """Field of a single bench frame regenerated in isolation.

    Bit-identical to what ``run_bench`` uses internally for that frame.
    """
    chunk, row = divmod(frame, CHUNK_FRAMES)
    return _chunk_fields(seed, beam, chunk, row + 1, modes, mean)[row]


def split_field(field: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic split (sqrt(t) field, sqrt(1 - t) field); outputs share the speckle."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"split ratio must lie in [0, 1], got {t!r}")
    return field * math.sqrt(t), field * math.sqrt(1.0 - t)


def _substituted_count(modes: int, eta: float) -> int:
    return int(round((1.0 - eta) * modes))


def substitute_modes(field: np.ndarray, eta: float, replacement: np.ndarray) -> np.ndarray:
    """Replace the first round((1 - eta) M) modes with the replacement field.

    Models mode mismatch: replaced modes lose all correlation with their
    partner beams while the marginal statistics keep the same thermal mean.
    """
    k = _substituted_count(field.shape[0], eta)
    if k == 0:
        return field
    out = field.copy()
    out[:k] = replacement[:k]
    return out


def mix_fields(
    field_a: np.ndarray,
    field_b: np.ndarray,
    tau: float,
    eta: float = 1.0,
    substitute: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude-level beam splitter on one frame (scalar or Jones fields).

    out_a = sqrt(tau) a + sqrt(1 - tau) b and out_b = sqrt(tau) b -
    sqrt(1 - tau) a, matching the covariance-level sign convention. With
    eta < 1 a fraction (1 - eta) of b's modes is first replaced by the
    independent equal-mean ``substitute`` field. Energy is conserved per mode
    pair when eta = 1.
    """
    a = np.asarray(field_a)
    b = np.asarray(field_b)
    if a.shape != b.shape:
        raise ValueError(f"mode-count mismatch: {a.shape} vs {b.shape}")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {tau!r}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    if eta < 1.0:
        if substitute is None:
            raise ValueError("eta < 1 requires a substitute field")
        b = substitute_modes(b, eta, np.asarray(substitute))
    t = math.sqrt(tau)
    r = math.sqrt(1.0 - tau)
    return t * a + r * b, t * b - r * a


def polarized(field: np.ndarray, axis: str) -> np.ndarray:
    """Lift a scalar speckle field to a Jones field along 'H' or 'V'."""
    if axis not in ("H", "V"):
        raise ValueError(f"axis must be 'H' or 'V', got {axis!r}")
    out = np.zeros(field.shape + (2,), dtype=complex)
    out[..., 0 if axis == "H" else 1] = field
    return out


def project_jones(field: np.ndarray, basis: str) -> np.ndarray:
    """Project a Jones field on an analysis axis; 'none' keeps both components."""
    if basis == "none":
        return field
    if basis == "H":
        return field[..., 0]
    if basis == "V":
        return field[..., 1]
    if basis == "deg45":
        return (field[..., 0] + field[..., 1]) / math.sqrt(2.0)
    raise ValueError(f"unknown analysis basis {basis!r}")


def detect(field: np.ndarray) -> float:
    """Integrated intensity: sum of |amplitude|^2 over modes (and Jones components)."""
    f = np.asarray(field)
    return float(np.sum(f.real * f.real + f.imag * f.imag))


def _row_intensity(field: np.ndarray) -> np.ndarray:
    # per-frame detect for a (rows, modes[, 2]) chunk
    power = field.real * field.real + field.imag * field.imag
    return power.reshape(power.shape[0], -1).sum(axis=1)


def _degraded(cfg: BenchConfig, chunk: int, rows: int, beam2: np.ndarray, beam3: np.ndarray):
    """Beam 3 and the BS-facing copy of beam 2 with (1 - eta) of modes substituted."""
    if cfg.eta >= 1.0:
        return beam2, beam3
    k = _substituted_count(cfg.modes, cfg.eta)
    if k == 0:
        return beam2, beam3
    source2_mean = cfg.mean_photons / cfg.t_split
    sub_split = _chunk_fields(
        cfg.seed, BEAM_SPLIT_SUBSTITUTE, chunk, rows, cfg.modes,
        (1.0 - cfg.t_split) * source2_mean,
    )
    beam3 = beam3.copy()
    beam3[:, :k] = sub_split[:, :k]
    sub_mix = _chunk_fields(cfg.seed, BEAM_MIX_SUBSTITUTE, chunk, rows, cfg.modes, cfg.mean_photons)
    beam2_mixed = beam2.copy()
    beam2_mixed[:, :k] = sub_mix[:, :k]
    return beam2_mixed, beam3


def _interference_chunk(cfg: BenchConfig, chunk: int, rows: int, ins: np.ndarray, outs: np.ndarray):
    beam1 = _chunk_fields(cfg.seed, BEAM_SOURCE1, chunk, rows, cfg.modes, cfg.mean_photons)
    source2 = _chunk_fields(
        cfg.seed, BEAM_SOURCE2, chunk, rows, cfg.modes, cfg.mean_photons / cfg.t_split
    )
    beam2, beam3 = split_field(source2, cfg.t_split)
    beam2_mixed, beam3 = _degraded(cfg, chunk, rows, beam2, beam3)
    t = math.sqrt(cfg.tau_mix)
    r = math.sqrt(1.0 - cfg.tau_mix)
    out1 = t * beam1 + r * beam2_mixed
    out2 = t * beam2_mixed - r * beam1
    lo = chunk * CHUNK_FRAMES
    sl = slice(lo, lo + rows)
    ins[sl, 0] = _row_intensity(beam1)
    ins[sl, 1] = _row_intensity(beam2)
    ins[sl, 2] = _row_intensity(beam3)
    outs[sl, 0] = _row_intensity(out1)
    outs[sl, 1] = _row_intensity(out2)
    outs[sl, 2] = ins[sl, 2]


def _erasure_chunk(cfg: BenchConfig, chunk: int, rows: int, ins: np.ndarray, outs: np.ndarray):
    # beam 1 is H polarized, beams 2 and 3 V polarized; orthogonal components
    # never interfere, so the Jones fields are carried as separate planes
    beam1_h = _chunk_fields(cfg.seed, BEAM_SOURCE1, chunk, rows, cfg.modes, cfg.mean_photons)
    source2 = _chunk_fields(
        cfg.seed, BEAM_SOURCE2, chunk, rows, cfg.modes, cfg.mean_photons / cfg.t_split
    )
    beam2_v, beam3_v = split_field(source2, cfg.t_split)
    beam2_mixed, beam3_v = _degraded(cfg, chunk, rows, beam2_v, beam3_v)
    t = math.sqrt(cfg.tau_mix)
    r = math.sqrt(1.0 - cfg.tau_mix)
    # the BS acts on each polarization plane independently
    out1_h, out2_h = t * beam1_h, -r * beam1_h
    out1_v, out2_v = r * beam2_mixed, t * beam2_mixed
    basis = cfg.analysis_basis
    if basis == "none":
        o1 = _row_intensity(out1_h) + _row_intensity(out1_v)
        o2 = _row_intensity(out2_h) + _row_intensity(out2_v)
        o3 = _row_intensity(beam3_v)
    elif basis == "deg45":
        o1 = _row_intensity((out1_h + out1_v) / math.sqrt(2.0))
        o2 = _row_intensity((out2_h + out2_v) / math.sqrt(2.0))
        o3 = _row_intensity(beam3_v / math.sqrt(2.0))
    elif basis == "V":
        o1 = _row_intensity(out1_v)
        o2 = _row_intensity(out2_v)
        o3 = _row_intensity(beam3_v)
    else:  # "H": beams 2 and 3 carry no H component
        o1 = _row_intensity(out1_h)
        o2 = _row_intensity(out2_h)
        o3 = np.zeros(rows)
    lo = chunk * CHUNK_FRAMES
    sl = slice(lo, lo + rows)
    ins[sl, 0] = _row_intensity(beam1_h)
    ins[sl, 1] = _row_intensity(beam2_v)
    ins[sl, 2] = _row_intensity(beam3_v)
    outs[sl, 0] = o1
    outs[sl, 1] = o2
    outs[sl, 2] = o3


def run_bench(config: BenchConfig) -> FrameBatch:
    """Simulate the configured bench and record per-frame intensities.

    interference: beam 1 is source 1; source 2 splits into beams 2 and 3 at
    t_split; beams 1 and 2 mix at tau_mix. The three intensities are recorded
    before and after the beam splitter (beam 3 is untouched by it).

    erasure: beam 1 (H) and beam 2 (V) meet the beam splitter without
    interfering; the 'out' intensities are taken behind the analysis_basis
    projection applied to every beam, 'none' meaning total intensity.

    Identical (seed, config) produce bit-identical batches for any worker
    count; frame j depends only on (seed, beam ids, j).
    """
    ins = np.empty((config.frames, 3))
    outs = np.empty((config.frames, 3))
    fill = _interference_chunk if config.scenario == "interference" else _erasure_chunk
    n_chunks = (config.frames + CHUNK_FRAMES - 1) // CHUNK_FRAMES

    def rows_of(c: int) -> int:
        return min(CHUNK_FRAMES, config.frames - c * CHUNK_FRAMES)

    if config.workers == 1 or n_chunks == 1:
        for c in range(n_chunks):
            fill(config, c, rows_of(c), ins, outs)
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            jobs = [pool.submit(fill, config, c, rows_of(c), ins, outs) for c in range(n_chunks)]
            for job in jobs:
                job.result()
    ins.flags.writeable = False
    outs.flags.writeable = False
    return FrameBatch(config, ins, outs)
