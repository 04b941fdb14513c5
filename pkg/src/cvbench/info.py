"""Entropic quantities and Gaussian discord for covariance matrices.

All entropies are in nats. Two conventions meet here: the package-wide
vacuum-variance-1/2 CMs, and the vacuum-equals-identity convention in which
the discord literature states its invariants. ``unit_vacuum_cm`` is the one
bridge between them; the entropy term of a symplectic eigenvalue d in the 1/2
convention equals ``_h(2 d)`` in the rescaled one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .states import GaussianState, partial_trace, symplectic_eigenvalues

#: symplectic eigenvalues within this distance of the pure limit contribute 0
PURE_GUARD = 1e-12
#: discord values in [-DISCORD_CLAMP, 0) are clamped to 0; below is an error
DISCORD_CLAMP = 1e-9
#: relative margin within which both branches of the discord formula are taken
_BRANCH_MARGIN = 1e-12

__all__ = [
    "EntropyReport",
    "GaussianMeasurement",
    "DiscordResult",
    "entropy",
    "mutual_information",
    "gaussian_discord",
    "discord_oracle",
    "unit_vacuum_cm",
]


def _entropy_term(d: float) -> float:
    # (d + 1/2) ln(d + 1/2) - (d - 1/2) ln(d - 1/2), exactly 0 at the pure limit
    x = d - 0.5
    if x <= PURE_GUARD:
        return 0.0
    return (d + 0.5) * math.log(d + 0.5) - x * math.log(x)


def entropy(state: GaussianState) -> float:
    """Von Neumann entropy in nats; >= 0, and 0 iff the state is pure."""
    return float(sum(_entropy_term(float(d)) for d in symplectic_eigenvalues(state)))


@dataclass(frozen=True)
class EntropyReport:
    """Entropies of a two-mode state and the mutual information they imply.

    ``delta_s1``/``delta_s2`` are the marginal entropy increases relative to a
    supplied pre-interaction state; they are ``None`` when no input was given.
    For a product input their sum equals the mutual information.
    """

    s1: float
    s2: float
    s12: float
    mutual_information: float
    delta_s1: Optional[float] = None
    delta_s2: Optional[float] = None


def mutual_information(
    state: GaussianState, input_state: Optional[GaussianState] = None
) -> EntropyReport:
    """Total correlations I = S1 + S2 - S12 of a two-mode state, in nats."""
    if state.n_modes != 2:
        raise ValueError(f"mutual information needs a two-mode state, got {state.n_modes} modes")
    s1 = entropy(partial_trace(state, {0}))
    s2 = entropy(partial_trace(state, {1}))
    s12 = entropy(state)
    mi = s1 + s2 - s12
    if mi < 0.0:
        if mi < -1e-12:
            raise ArithmeticError(f"subadditivity violated numerically: I = {mi:g}")
        mi = 0.0
    delta_s1 = delta_s2 = None
    if input_state is not None:
        if input_state.n_modes != 2:
            raise ValueError("input_state must be a two-mode state")
        delta_s1 = s1 - entropy(partial_trace(input_state, {0}))
        delta_s2 = s2 - entropy(partial_trace(input_state, {1}))
    return EntropyReport(s1, s2, s12, mi, delta_s1, delta_s2)


@dataclass(frozen=True)
class GaussianMeasurement:
    """Pure single-mode Gaussian measurement: squeezing s >= 1 at angle phi."""

    s: float
    phi: float


@dataclass(frozen=True)
class DiscordResult:
    """Gaussian discord value with the measured side and, when known, the minimizer."""

    value: float
    side: str
    minimizer: Optional[GaussianMeasurement] = None


def unit_vacuum_cm(state: GaussianState) -> np.ndarray:
    """CM rescaled to the vacuum-equals-identity convention (2x the 1/2-convention)."""
    return 2.0 * state.cm


def _h(x: float) -> float:
    # entropy term in the vacuum-=-identity convention; h(1) = 0, h(2 d) = f(d)
    y = (x - 1.0) / 2.0
    if y <= PURE_GUARD:
        return 0.0
    return (x + 1.0) / 2.0 * math.log((x + 1.0) / 2.0) - y * math.log(y)


def _h_vec(x: np.ndarray) -> np.ndarray:
    y = (x - 1.0) / 2.0
    safe = y > PURE_GUARD
    yp = np.where(safe, y, 1.0)
    xp = (x + 1.0) / 2.0
    return np.where(safe, xp * np.log(xp) - yp * np.log(yp), 0.0)


def _ordered_blocks(state: GaussianState, side: str):
    # rescaled CM with the measured mode second ("B" position)
    cm = unit_vacuum_cm(state)
    if side == "A":
        perm = np.array([2, 3, 0, 1])
        cm = cm[np.ix_(perm, perm)]
    return cm[0:2, 0:2], cm[2:4, 2:4], cm[0:2, 2:4], cm


def _symplectic_pair(ia: float, ib: float, ic: float, id_: float) -> tuple[float, float]:
    delta = ia + ib + 2.0 * ic
    root = math.sqrt(max(delta * delta - 4.0 * id_, 0.0))
    nu_minus = math.sqrt(max((delta - root) / 2.0, 0.0))
    nu_plus = math.sqrt(max((delta + root) / 2.0, 0.0))
    return nu_minus, nu_plus


def _minimal_conditional_det(
    ia: float, ib: float, ic: float, id_: float
) -> tuple[float, Optional[GaussianMeasurement]]:
    """Minimal conditional determinant over Gaussian measurements on mode B.

    Piecewise in the symplectic invariants. In the first branch the optimum is
    the heterodyne measurement (s = 1); near the branch boundary both
    expressions are evaluated and the smaller one wins. States with a
    near-pure measured mode (det B -> 1) are routed to the second branch,
    whose expression has no (det B - 1) denominator.
    """
    lhs = (id_ - ia * ib) ** 2
    rhs = (1.0 + ib) * ic * ic * (ia + id_)
    margin = _BRANCH_MARGIN * max(abs(lhs), abs(rhs), 1.0)
    denom = (ib - 1.0) ** 2
    candidates: list[tuple[float, Optional[GaussianMeasurement]]] = []
    if denom > 1e-12 and lhs <= rhs + margin:
        inner = max(ic * ic + (ib - 1.0) * (id_ - ia), 0.0)
        e_het = (
            2.0 * ic * ic + (ib - 1.0) * (id_ - ia) + 2.0 * abs(ic) * math.sqrt(inner)
        ) / denom
        candidates.append((e_het, GaussianMeasurement(1.0, 0.0)))
    if lhs >= rhs - margin or not candidates:
        inner = max(ic**4 + (id_ - ia * ib) ** 2 - 2.0 * ic * ic * (id_ + ia * ib), 0.0)
        e_gen = (ia * ib - ic * ic + id_ - math.sqrt(inner)) / (2.0 * ib)
        candidates.append((e_gen, None))
    e_min, minimizer = min(candidates, key=lambda pair: pair[0])
    return max(e_min, 1.0), minimizer


def _validate_two_mode(state: GaussianState, side: str) -> None:
    if state.n_modes != 2:
        raise ValueError(f"discord needs a two-mode state, got {state.n_modes} modes")
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def gaussian_discord(state: GaussianState, side: str = "B") -> DiscordResult:
    """Gaussian discord of a two-mode state with the measurement on ``side``.

    Closed form in the symplectic invariants (det A, det B, det C, det CM) of
    the rescaled CM with the piecewise minimal conditional determinant; zero
    exactly for product states, and strictly positive otherwise. Values in
    [-1e-9, 0) are clamped to 0.
    """
    _validate_two_mode(state, side)
    a_blk, b_blk, c_blk, cm = _ordered_blocks(state, side)
    if float(np.max(np.abs(c_blk))) == 0.0:
        return DiscordResult(0.0, side, GaussianMeasurement(1.0, 0.0))
    ia = float(np.linalg.det(a_blk))
    ib = float(np.linalg.det(b_blk))
    ic = float(np.linalg.det(c_blk))
    id_ = float(np.linalg.det(cm))
    nu_minus, nu_plus = _symplectic_pair(ia, ib, ic, id_)
    e_min, minimizer = _minimal_conditional_det(ia, ib, ic, id_)
    value = _h(math.sqrt(ib)) - _h(nu_minus) - _h(nu_plus) + _h(math.sqrt(e_min))
    if value < 0.0:
        if value < -DISCORD_CLAMP:
            raise ArithmeticError(f"discord evaluated to {value:g}")
        value = 0.0
    return DiscordResult(value, side, minimizer)


def _conditional_entropies(a, b, c, q_vals, phi_vals) -> np.ndarray:
    """Post-measurement entropy of mode A on a (q, phi) measurement grid.

    The measurement squeezing is parametrized as s = 1/q with q in [0, 1] so
    the domain is compact; q = 1 is the heterodyne, q = 0 the exact homodyne
    limit along v = (-sin phi, cos phi). The conditional CM is the Schur
    complement a - c (b + m)^-1 c^T with m = R(phi) diag(1/q, q) R(phi)^T;
    the inverse is evaluated in the measurement eigenframe with numerator and
    denominator scaled by q, so every entry is polynomial in q and no
    cancellation occurs even at q = 0. Only the determinant of the
    conditional CM matters for the entropy.
    """
    q = np.asarray(q_vals, dtype=float)[:, None]
    phi = np.asarray(phi_vals, dtype=float)[None, :]
    cos = np.cos(phi)
    sin = np.sin(phi)
    # b in the (u, v) frame of the measurement, u = (cos, sin)
    b_uu = cos * cos * b[0, 0] + 2.0 * cos * sin * b[0, 1] + sin * sin * b[1, 1]
    b_vv = sin * sin * b[0, 0] - 2.0 * cos * sin * b[0, 1] + cos * cos * b[1, 1]
    b_uv = cos * sin * (b[1, 1] - b[0, 0]) + (cos * cos - sin * sin) * b[0, 1]
    # q-scaled inverse of (b + m) in the (u, v) frame
    det_q = (1.0 + q * b_uu) * (b_vv + q) - q * b_uv * b_uv
    i_uu = q * (b_vv + q) / det_q
    i_vv = (1.0 + q * b_uu) / det_q
    i_uv = -q * b_uv / det_q
    # g = c R rotates the coupling block into the same frame
    c00, c01, c10, c11 = c[0, 0], c[0, 1], c[1, 0], c[1, 1]
    g11 = c00 * cos + c01 * sin
    g12 = -c00 * sin + c01 * cos
    g21 = c10 * cos + c11 * sin
    g22 = -c10 * sin + c11 * cos
    w11 = g11 * g11 * i_uu + 2.0 * g11 * g12 * i_uv + g12 * g12 * i_vv
    w12 = g11 * g21 * i_uu + (g11 * g22 + g12 * g21) * i_uv + g12 * g22 * i_vv
    w22 = g21 * g21 * i_uu + 2.0 * g21 * g22 * i_uv + g22 * g22 * i_vv
    e11 = a[0, 0] - w11
    e12 = a[0, 1] - w12
    e22 = a[1, 1] - w22
    det_eps = np.maximum(e11 * e22 - e12 * e12, 1.0)
    return _h_vec(np.sqrt(det_eps))


def discord_oracle(
    state: GaussianState,
    side: str = "B",
    grid: tuple[int, int] = (64, 64),
    refinement: int = 40,
) -> DiscordResult:
    """Brute-force Gaussian discord: scan measurements, then refine locally.

    Scans the compact measurement domain q = 1/s in [0, 1] (q = 0 being the
    exact homodyne limit, q = 1 the heterodyne) crossed with angles phi in
    [0, pi), then shrinks a local grid around the best point. The result is
    an upper bound that converges to the closed form. Fully deterministic:
    fixed enumeration order, ties resolved toward smaller s, then smaller
    phi. Non-convergence of the refinement is reported as a warning carrying
    the best value found.
    """
    _validate_two_mode(state, side)
    a_blk, b_blk, c_blk, cm = _ordered_blocks(state, side)
    ia = float(np.linalg.det(a_blk))
    ib = float(np.linalg.det(b_blk))
    ic = float(np.linalg.det(c_blk))
    id_ = float(np.linalg.det(cm))
    nu_minus, nu_plus = _symplectic_pair(ia, ib, ic, id_)
    fixed = _h(math.sqrt(ib)) - _h(nu_minus) - _h(nu_plus)

    n_q, n_phi = grid
    q_vals = np.linspace(1.0, 0.0, n_q)  # descending so ties pick the smaller s
    phi_vals = np.linspace(0.0, math.pi, n_phi, endpoint=False)
    values = _conditional_entropies(a_blk, b_blk, c_blk, q_vals, phi_vals)
    flat = int(np.argmin(values))  # first occurrence: smallest s, then smallest phi
    best_q = float(q_vals[flat // n_phi])
    best_phi = float(phi_vals[flat % n_phi])
    best_val = float(values.flat[flat])

    # pattern search: walk at a fixed step while improving (valleys can be
    # long), shrink only when the 9x9 neighborhood offers no improvement
    step_q = 1.0 / (n_q - 1)
    step_phi = math.pi / n_phi
    for _ in range(refinement * 8):
        if max(step_q, step_phi) < 1e-13:
            break
        q_loc = np.clip(best_q + np.linspace(step_q, -step_q, 9), 0.0, 1.0)
        phi_loc = best_phi + np.linspace(-step_phi, step_phi, 9)
        local = _conditional_entropies(a_blk, b_blk, c_blk, q_loc, phi_loc)
        flat = int(np.argmin(local))
        candidate = float(local.flat[flat])
        if candidate < best_val:
            best_val = candidate
            best_q = float(q_loc[flat // 9])
            best_phi = float(phi_loc[flat % 9])
            if not (flat // 9 in (0, 8) or flat % 9 in (0, 8)):
                step_q *= 0.5
                step_phi *= 0.5
        else:
            step_q *= 0.5
            step_phi *= 0.5
    else:
        warnings.warn(
            f"discord oracle did not settle (steps {step_q:g}, {step_phi:g}); "
            f"best value {fixed + best_val:.9g}",
            RuntimeWarning,
            stacklevel=2,
        )

    value = fixed + best_val
    if value < 0.0:
        if value < -DISCORD_CLAMP:
            raise ArithmeticError(f"oracle discord evaluated to {value:g}")
        value = 0.0
    best_s = math.inf if best_q == 0.0 else 1.0 / best_q
    return DiscordResult(value, side, GaussianMeasurement(best_s, best_phi % math.pi))
