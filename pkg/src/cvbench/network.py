"""Beam-splitter circuits on labeled modes and the two bench protocols at CM level.

All transformations are computed by explicit symplectic congruence; the
closed-form block expressions (tau sigma1 + (1 - tau) sigma2 and friends)
appear only in the tests, as independent oracles.

Sign convention: the beam splitter is
S = [[sqrt(tau) I, sqrt(1-tau) I], [-sqrt(1-tau) I, sqrt(tau) I]],
i.e. the reflection of the first input mode carries the minus sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import (
    GaussianState,
    SingleModeSpec,
    SymplecticOp,
    apply_symplectic,
    mode_block,
    single_mode_cm,
    single_mode_state,
    tensor,
    vacuum_state,
)

#: largest tolerated deviation between the probe marginal and the mode-2 marginal
MARGINAL_TOL = 1e-10

__all__ = [
    "MarginalMismatchError",
    "BeamSplitterSpec",
    "TwoModeBlocks",
    "ThreeModeProtocol",
    "bs_symplectic",
    "mix_two",
    "prepare_discordant_pair",
    "matched_probe",
    "run_three_mode",
    "polarization_filtered_cms",
]


class MarginalMismatchError(ValueError):
    """Probe and mode-2 marginals differ, breaking the identical-inputs premise."""


def bs_symplectic(tau: float) -> SymplecticOp:
    """4x4 beam-splitter symplectic with transmissivity tau (see module docstring)."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {tau!r}")
    t = math.sqrt(tau)
    r = math.sqrt(1.0 - tau)
    eye = np.eye(2)
    return SymplecticOp(np.block([[t * eye, r * eye], [-r * eye, t * eye]]))


@dataclass(frozen=True)
class BeamSplitterSpec:
    """A beam splitter of transmissivity tau between two labeled modes."""

    tau: float
    mode_a: int
    mode_b: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.tau!r}")
        if self.mode_a == self.mode_b:
            raise ValueError("mode_a and mode_b must differ")
        if min(self.mode_a, self.mode_b) < 0:
            raise ValueError("mode indices must be non-negative")

    def operator(self, n_modes: int) -> SymplecticOp:
        """Embed the 4x4 beam splitter into an identity on the remaining modes."""
        if max(self.mode_a, self.mode_b) >= n_modes:
            raise IndexError("beam-splitter mode index out of range")
        core = bs_symplectic(self.tau).matrix
        full = np.eye(2 * n_modes)
        placement = ((self.mode_a, 0), (self.mode_b, 1))
        for mi, bi in placement:
            for mj, bj in placement:
                full[2 * mi : 2 * mi + 2, 2 * mj : 2 * mj + 2] = core[
                    2 * bi : 2 * bi + 2, 2 * bj : 2 * bj + 2
                ]
        return SymplecticOp(full)


@dataclass(frozen=True, eq=False)
class TwoModeBlocks:
    """(Sigma1, Sigma2, Sigma12) decomposition of a two-mode covariance matrix."""

    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma12: np.ndarray

    @classmethod
    def from_state(cls, state: GaussianState) -> "TwoModeBlocks":
        if state.n_modes != 2:
            raise ValueError(f"need a two-mode state, got {state.n_modes} modes")
        return cls(mode_block(state, 0, 0), mode_block(state, 1, 1), mode_block(state, 0, 1))

    def as_state(self) -> GaussianState:
        """Assemble the 4x4 CM; raises unless it is symmetric and physical."""
        top = np.hstack([self.sigma1, self.sigma12])
        bottom = np.hstack([self.sigma12.T, self.sigma2])
        return GaussianState(np.vstack([top, bottom]))


def mix_two(sigma1, sigma2, tau: float) -> TwoModeBlocks:
    """Mix two single-mode CMs at a beam splitter of transmissivity tau.

    Computed by congruence with ``bs_symplectic(tau)``. Identical inputs are
    returned unchanged with an exactly zero off-diagonal block: the two
    interference contributions cancel and the interaction leaves the pair
    unchanged, a statement that holds exactly, not only to rounding.
    """
    state1 = GaussianState(np.asarray(sigma1, dtype=float))
    state2 = GaussianState(np.asarray(sigma2, dtype=float))
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {tau!r}")
    if np.array_equal(state1.cm, state2.cm):
        return TwoModeBlocks(state1.cm.copy(), state1.cm.copy(), np.zeros((2, 2)))
    out = apply_symplectic(tensor([state1, state2]), bs_symplectic(tau))
    return TwoModeBlocks.from_state(out)


def prepare_discordant_pair(source: SingleModeSpec, t_split: float) -> GaussianState:
    """Split a source mode into correlated beams 2 and 3 (modes 0 and 1 here).

    Beam 2 carries the fraction ``t_split`` of the source photons and beam 3
    the remainder; for a thermal source the off-diagonal block is
    sqrt(t (1 - t)) N_source I. Realized as a single beam-splitter congruence
    with the vacuum entering the free port, so the output is correlated (and
    discordant) unless t_split is 0 or 1 or the source is the vacuum.
    """
    if not 0.0 <= t_split <= 1.0:
        raise ValueError(f"t_split must lie in [0, 1], got {t_split!r}")
    pair = tensor([vacuum_state(), single_mode_state(source)])
    return apply_symplectic(pair, bs_symplectic(1.0 - t_split))


def matched_probe(source: SingleModeSpec, t_split: float) -> SingleModeSpec:
    """Probe parameters whose CM equals the beam-2 marginal of the split source.

    Splitting maps diag(f+, f-) to diag(g+, g-) with g = t f + (1 - t)/2; the
    (n_tot, beta) pair is recovered by inverting the f+/f- parametrization
    (smaller root of the beta quadratic, clamped into [0, 1]).
    """
    cm = single_mode_cm(source)
    g_plus = t_split * cm[0, 0] + (1.0 - t_split) * 0.5
    g_minus = t_split * cm[1, 1] + (1.0 - t_split) * 0.5
    n = (g_plus + g_minus - 1.0) / 2.0
    if n <= 0.0:
        return SingleModeSpec(max(n, 0.0), 0.0)
    delta = (g_plus - g_minus) / 2.0
    b = n + 2.0 * n * n
    disc = b * b - 4.0 * (n * n) * (delta * delta)
    beta = (b - math.sqrt(max(disc, 0.0))) / (2.0 * n * n)
    return SingleModeSpec(n, min(1.0, max(0.0, beta)))


@dataclass(frozen=True)
class ThreeModeProtocol:
    """Probe (mode 1) interfering with the near arm of a split source (modes 2, 3).

    ``t_split`` prepares the discordant pair feeding modes 2 and 3;
    ``tau_mix`` is the transmissivity of the beam splitter mixing modes 1 and 2.
    The probe marginal must equal the mode-2 marginal (checked when run).
    """

    probe: SingleModeSpec
    source: SingleModeSpec
    t_split: float
    tau_mix: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.t_split <= 1.0:
            raise ValueError(f"t_split must lie in [0, 1], got {self.t_split!r}")
        if not 0.0 <= self.tau_mix <= 1.0:
            raise ValueError(f"tau_mix must lie in [0, 1], got {self.tau_mix!r}")


def run_three_mode(protocol: ThreeModeProtocol) -> tuple[GaussianState, GaussianState]:
    """Input and output three-mode states of the probe/pair mixing protocol.

    The output keeps both mixed marginals and leaves modes 1 and 2 mutually
    uncorrelated, while the 2-3 correlation block shrinks by sqrt(tau) and a
    1-3 block of sqrt(1 - tau) times the input block appears.
    """
    pair = prepare_discordant_pair(protocol.source, protocol.t_split)
    probe = single_mode_state(protocol.probe)
    mismatch = float(np.max(np.abs(mode_block(pair, 0, 0) - probe.cm)))
    if mismatch > MARGINAL_TOL:
        raise MarginalMismatchError(
            f"mode-2 marginal deviates from the probe by {mismatch:g}; "
            "identical interfering states are required"
        )
    state_in = tensor([probe, pair])
    op = BeamSplitterSpec(protocol.tau_mix, 0, 1).operator(3)
    return state_in, apply_symplectic(state_in, op)


def polarization_filtered_cms(
    spec1: SingleModeSpec, spec2: SingleModeSpec
) -> tuple[GaussianState, GaussianState]:
    """Two-mode output states behind the H and V polarization filters (tau = 1/2).

    With orthogonally polarized inputs the beams do not interfere: each input
    mixes with the vacuum entering the other port. The H pair is beam 1 plus
    vacuum, giving off-diagonal block (sigma0 - sigma1)/2; the V pair is
    vacuum plus beam 2, giving the opposite-sign block (sigma2 - sigma0)/2.
    """
    half = bs_symplectic(0.5)
    h_state = apply_symplectic(tensor([single_mode_state(spec1), vacuum_state()]), half)
    v_state = apply_symplectic(tensor([vacuum_state(), single_mode_state(spec2)]), half)
    return h_state, v_state
