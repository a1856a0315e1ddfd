"""Time evolution of the conditional Gaussian state.

Closed-form propagation of the covariance matrix for both the unconditional
(linear drift plus diffusion) flow and the conditional (matrix Riccati) flow,
their asymptotic states, a fixed-step RK4 integrator used as an internal
cross-check, and stochastic conditional-mean trajectories driven by the
measurement record.

The covariance never needs a stochastic integrator: it evolves
deterministically, so every trajectory shares one exactly-propagated
covariance path and only the means are stepped with Euler-Maruyama.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import (
    SingularDeltaInversion,
    SingularMatrix,
    SqueezeError,
    StepTooLarge,
)
from .linalg import (
    Mat2,
    SymMat2,
    _balance_factor,
    congruence,
    eigenvalues,
    gram,
    is_hurwitz,
    mat2_exp,
    solve_care,
    solve_lyapunov,
    solve_riccati_dual,
)

__all__ = [
    "GaussianState",
    "PropagationResult",
    "TrajectoryEnsemble",
    "lyapunov_propagate",
    "lyapunov_propagate_info",
    "lyapunov_asymptote",
    "riccati_propagate",
    "riccati_propagate_info",
    "riccati_asymptote",
    "rk4_covariance",
    "conditional_mean_step",
    "simulate_trajectories",
    "write_trajectory_csv",
    "child_seed",
]

# relative scale below which sigma0 counts as sitting on the fixed point
FIXED_POINT_RTOL = 1e-12
# relative determinant threshold for the delta-inversion regularization
SINGULAR_DELTA_RTOL = 1e-12
# diagonal perturbation applied when sigma0 - X1 is singular, relative to
# the state scale (an absolute shift would be meaningless at SI magnitudes)
PERTURBATION_RTOL = 1e-9
# fraction of the fastest dynamical period used as a default RK4 step
STEP_DIVISOR = 2000.0
# refuse fallback integrations that would need more steps than this
MAX_FALLBACK_STEPS = 5_000_000
# halving depth when propagation lands on an offset-inversion crossing
MAX_SPLIT_DEPTH = 12


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of the oscillator at a given time."""

    mean_x: float
    mean_p: float
    cov: SymMat2
    time: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mean_x", "mean_p", "time"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PropagationResult:
    """Propagated state plus diagnostics about the branch that produced it.

    ``residual`` is the relative algebraic defect of the steady matrices the
    closed form relied on (zero for branches that use none), ``branch_used``
    names the code path, and ``step_count`` counts integrator steps (zero for
    closed forms).
    """

    state: GaussianState
    residual: float
    branch_used: str
    step_count: int

    def __post_init__(self) -> None:
        if not self.residual >= 0.0:
            raise ValueError("residual must be nonnegative")


def child_seed(master_seed: int, index: int) -> int:
    """Derive a 64-bit per-trajectory seed from the master seed.

    Hash-based so that trajectory ``index`` reproduces bit-for-bit no matter
    how large the surrounding batch is.
    """
    digest = hashlib.sha256(f"{master_seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _sym_inverse(s: SymMat2) -> SymMat2:
    # scaled 2x2 inverse: safe when the entries themselves are near the
    # floating-point range limits (exponentially grown delta matrices)
    scale = s.norm()
    if scale == 0.0:
        raise SingularMatrix("cannot invert the zero matrix")
    n_xx, n_xp, n_pp = s.xx / scale, s.xp / scale, s.pp / scale
    det = n_xx * n_pp - n_xp * n_xp
    if abs(det) <= 1e-14:
        raise SingularMatrix(f"matrix is singular to working precision: {s}")
    factor = 1.0 / (det * scale)
    return SymMat2(n_pp * factor, -n_xp * factor, n_xx * factor)


def _balance_sym(s: SymMat2, bal: float) -> SymMat2:
    return SymMat2(s.xx, bal * s.xp, bal * bal * s.pp)


def _unbalance_sym(s: SymMat2, bal: float) -> SymMat2:
    return SymMat2(s.xx, s.xp / bal, s.pp / (bal * bal))


def _balance_drift(a: Mat2, bal: float) -> Mat2:
    return Mat2(a.m11, a.m12 / bal, a.m21 * bal, a.m22)


def _balance_meas(b: Mat2, bal: float) -> Mat2:
    return Mat2(b.m11, b.m12, b.m21 / bal, b.m22 / bal)


def _steady_defect(x: SymMat2, a: Mat2, d: SymMat2, w: SymMat2 | None) -> float:
    ax = a @ x.as_mat2()
    defect = ax + ax.transpose() + d.as_mat2()
    if w is not None:
        xm = x.as_mat2()
        defect = defect - (xm @ w.as_mat2() @ xm)
    scale = max(d.norm(), x.norm(), 1e-300)
    return defect.norm() / scale


def _default_step(a: Mat2, contraction_rate: float) -> float:
    osc = math.sqrt(max(-(a.m12 * a.m21), 0.0))
    damp = max(abs(a.m11), abs(a.m22), contraction_rate)
    candidates = []
    if osc > 0.0:
        candidates.append(2.0 * math.pi / osc)
    if damp > 0.0:
        candidates.append(1.0 / damp)
    dt = (min(candidates) if candidates else 1.0) / STEP_DIVISOR
    norm = a.norm()
    if norm > 0.0:
        dt = min(dt, 0.05 / norm)
    return dt


def _rhs(
    xx, xp, pp, a11, a12, a21, a22, dxx, dxp, dpp, w11, w12, w22
):
    q_xx = w11 * xx * xx + 2.0 * w12 * xx * xp + w22 * xp * xp
    q_xp = w11 * xx * xp + w12 * (xx * pp + xp * xp) + w22 * xp * pp
    q_pp = w11 * xp * xp + 2.0 * w12 * xp * pp + w22 * pp * pp
    return (
        2.0 * (a11 * xx + a12 * xp) + dxx - q_xx,
        a21 * xx + (a11 + a22) * xp + a12 * pp + dxp - q_xp,
        2.0 * (a21 * xp + a22 * pp) + dpp - q_pp,
    )


def _rk4_run(
    sigma0: SymMat2, a: Mat2, d: SymMat2, w: SymMat2, t: float, dt: float
) -> tuple[SymMat2, int]:
    steps = max(1, int(round(t / dt)))
    h = t / steps
    xx, xp, pp = sigma0.xx, sigma0.xp, sigma0.pp
    args = (
        a.m11, a.m12, a.m21, a.m22, d.xx, d.xp, d.pp, w.xx, w.xp, w.pp
    )
    for _ in range(steps):
        k1 = _rhs(xx, xp, pp, *args)
        k2 = _rhs(
            xx + 0.5 * h * k1[0], xp + 0.5 * h * k1[1], pp + 0.5 * h * k1[2], *args
        )
        k3 = _rhs(
            xx + 0.5 * h * k2[0], xp + 0.5 * h * k2[1], pp + 0.5 * h * k2[2], *args
        )
        k4 = _rhs(xx + h * k3[0], xp + h * k3[1], pp + h * k3[2], *args)
        xx += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        xp += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        pp += (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    return SymMat2(xx, xp, pp), steps


def _rk4_fallback(
    sigma0: SymMat2, a: Mat2, d: SymMat2, w: SymMat2, t: float
) -> tuple[SymMat2, int]:
    # integrate in frequency-balanced coordinates (x, p/(m omega)): the raw
    # entries of A and sigma span many decades in SI units, which would
    # drive the default step rule to absurdly small values
    bal = _balance_factor(a)
    a_b = _balance_drift(a, bal)
    d_b = _balance_sym(d, bal)
    w_b = SymMat2(w.xx, w.xp / bal, w.pp / (bal * bal))
    s_b = _balance_sym(sigma0, bal)
    dt = _default_step(a_b, w_b.norm() * s_b.norm())
    if t / dt > MAX_FALLBACK_STEPS:
        raise StepTooLarge(
            f"fallback integration over t = {t:.3g} would need {t / dt:.3g} "
            "steps; the closed forms do not apply and the span is too long"
        )
    out, steps = _rk4_run(s_b, a_b, d_b, w_b, t, dt)
    return _unbalance_sym(out, bal), steps


def rk4_covariance(
    sigma0: SymMat2,
    a: Mat2,
    d: SymMat2,
    b: Mat2,
    t: float,
    dt: float | None = None,
) -> SymMat2:
    """Integrate the covariance flow with classic fixed-step RK4.

    Serves as the in-package numerical cross-check for the closed forms.
    ``dt`` defaults to a small fraction of the fastest dynamical timescale
    (oscillation period, damping time, or measurement contraction time).

    Raises
    ------
    StepTooLarge
        If ``dt * norm(A) > 0.1``, where the local truncation error can no
        longer be trusted.
    """
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"propagation time must be finite and nonnegative, got {t!r}")
    if t == 0.0:
        return sigma0
    w = gram(b)
    if dt is None:
        dt = _default_step(a, w.norm() * max(sigma0.norm(), 1.0))
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"step size must be positive, got {dt!r}")
    if dt * a.norm() > 0.1:
        raise StepTooLarge(
            f"dt*norm(A) = {dt * a.norm():.3g} exceeds 0.1; reduce the step"
        )
    if t / dt > MAX_FALLBACK_STEPS:
        raise StepTooLarge(
            f"integration over t = {t:.3g} at dt = {dt:.3g} would need "
            f"{t / dt:.3g} steps"
        )
    sigma, _ = _rk4_run(sigma0, a, d, w, t, dt)
    return sigma


@lru_cache(maxsize=1024)
def _exp_cached(m: Mat2, t: float) -> Mat2:
    # dataclass inputs hash by value, so repeated cycle/step applications of
    # identical dynamics reuse one exponential
    return mat2_exp(m, t)


@lru_cache(maxsize=512)
def _steady_cached(a: Mat2, d: SymMat2) -> SymMat2:
    return solve_lyapunov(a, d)


@lru_cache(maxsize=512)
def _riccati_plan(
    a: Mat2, d: SymMat2, b: Mat2
) -> tuple[float, SymMat2, Mat2, SymMat2, float, float]:
    """Balanced per-dynamics data shared by every propagation call."""
    bal = _balance_factor(a)
    a_b = _balance_drift(a, bal)
    d_b = _balance_sym(d, bal)
    b_b = _balance_meas(b, bal)
    w_b = gram(b_b)
    x1 = solve_care(a_b, d_b, b_b)
    residual = _steady_defect(x1, a_b, d_b, w_b)
    loop = a_b - (x1.as_mat2() @ w_b.as_mat2())
    x2 = solve_riccati_dual(loop, b_b)
    rate = max(-ev.real for ev in eigenvalues(loop))
    return bal, x1, loop, x2, rate, residual


def _result(
    cov: SymMat2,
    mean: tuple[float, float],
    a: Mat2,
    t: float,
    residual: float,
    branch: str,
    steps: int,
) -> PropagationResult:
    if mean == (0.0, 0.0):
        return PropagationResult(
            state=GaussianState(mean_x=0.0, mean_p=0.0, cov=cov, time=t),
            residual=residual,
            branch_used=branch,
            step_count=steps,
        )
    # first moments obey the deterministic linear drift exactly
    propagator = _exp_cached(a, t)
    mean_x = propagator.m11 * mean[0] + propagator.m12 * mean[1]
    mean_p = propagator.m21 * mean[0] + propagator.m22 * mean[1]
    state = GaussianState(mean_x=mean_x, mean_p=mean_p, cov=cov, time=t)
    return PropagationResult(
        state=state, residual=residual, branch_used=branch, step_count=steps
    )


def lyapunov_propagate_info(
    sigma0: SymMat2,
    a: Mat2,
    d: SymMat2,
    t: float,
    mean: tuple[float, float] = (0.0, 0.0),
) -> PropagationResult:
    """Propagate the unconditional covariance, with diagnostics.

    Uses the exact offset form ``e^{tA}(sigma0 - X)e^{tA^T} + X`` around the
    steady state ``X`` when the drift is Hurwitz, the exact congruence when
    there is no diffusion, and the RK4 integrator otherwise.
    """
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"propagation time must be finite and nonnegative, got {t!r}")
    if t == 0.0:
        return PropagationResult(
            state=GaussianState(mean[0], mean[1], sigma0, 0.0),
            residual=0.0,
            branch_used="identity",
            step_count=0,
        )
    if d.norm() == 0.0:
        cov = congruence(_exp_cached(a, t), sigma0)
        return _result(cov, mean, a, t, 0.0, "congruence", 0)
    if is_hurwitz(a):
        x = _steady_cached(a, d)
        cov = congruence(_exp_cached(a, t), sigma0 - x) + x
        return _result(cov, mean, a, t, _steady_defect(x, a, d, None), "closed-form", 0)
    cov, steps = _rk4_fallback(sigma0, a, d, SymMat2.zero(), t)
    return _result(cov, mean, a, t, 0.0, "rk4-fallback", steps)


def lyapunov_propagate(sigma0: SymMat2, a: Mat2, d: SymMat2, t: float) -> SymMat2:
    """Covariance of the unconditional dynamics after time ``t``."""
    return lyapunov_propagate_info(sigma0, a, d, t).state.cov


def lyapunov_asymptote(a: Mat2, d: SymMat2) -> SymMat2:
    """Steady covariance of the unconditional dynamics (Hurwitz drift)."""
    return solve_lyapunov(a, d)


def riccati_propagate_info(
    sigma0: SymMat2,
    a: Mat2,
    d: SymMat2,
    b: Mat2,
    t: float,
    mean: tuple[float, float] = (0.0, 0.0),
    _depth: int = 0,
) -> PropagationResult:
    """Propagate the conditional covariance, with diagnostics.

    The closed form linearizes the flow through the inverse offset
    ``delta = (sigma - X1)^{-1}``: with the stabilizing solution ``X1``, the
    closed loop ``A - X1 B B^T`` and its dual solution ``X2``, the offset
    evolves as ``delta_t = X2 + e^{-t L^T}(delta_0 - X2)e^{-t L}``.

    Singular ``sigma0 - X1`` is regularized by a relative diagonal
    perturbation (branch ``perturbed-closed-form``); an exactly stationary
    input short-circuits (branch ``fixed-point``); inputs whose offset has
    decayed beyond floating-point resolution return the asymptote directly
    (branch ``asymptote``).  When the flow lands on one of the isolated
    times where ``sigma - X1`` itself becomes singular (the offset passes
    through infinity), the interval is bisected and each half propagated
    with the closed form (branch ``split-closed-form``).
    """
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"propagation time must be finite and nonnegative, got {t!r}")
    if t == 0.0:
        return PropagationResult(
            state=GaussianState(mean[0], mean[1], sigma0, 0.0),
            residual=0.0,
            branch_used="identity",
            step_count=0,
        )
    w = gram(b)
    if w.norm() == 0.0:
        return lyapunov_propagate_info(sigma0, a, d, t, mean)
    # work in frequency-balanced coordinates (x, p/(m omega)); the raw
    # position/momentum entries sit tens of decades apart in SI units, which
    # makes determinant-versus-norm singularity tests meaningless
    try:
        bal, x1, loop, x2, rate, residual = _riccati_plan(a, d, b)
    except SqueezeError:
        cov, steps = _rk4_fallback(sigma0, a, d, w, t)
        return _result(cov, mean, a, t, 0.0, "rk4-fallback", steps)
    sigma_b = _balance_sym(sigma0, bal)
    scale = max(sigma_b.norm(), x1.norm())
    delta = sigma_b - x1
    if delta.norm() <= FIXED_POINT_RTOL * scale:
        return _result(_unbalance_sym(x1, bal), mean, a, t, residual, "fixed-point", 0)
    growth = t * rate
    perturbed = False
    if abs(delta.det()) < SINGULAR_DELTA_RTOL * delta.norm() ** 2:
        epsilon = PERTURBATION_RTOL * scale
        delta = (sigma_b + SymMat2.diagonal(epsilon, epsilon)) - x1
        perturbed = True
        if abs(delta.det()) < SINGULAR_DELTA_RTOL * delta.norm() ** 2:
            raise SingularDeltaInversion(
                "sigma0 - X1 stayed singular after diagonal regularization"
            )
    delta_inv = _sym_inverse(delta)
    # cap the exponential so the congruence below stays inside float range;
    # beyond it the offset is smaller than any representable correction
    budget = 0.5 * (640.0 - math.log(max((delta_inv - x2).norm(), 1e-300)))
    if growth > budget:
        return _result(_unbalance_sym(x1, bal), mean, a, t, residual, "asymptote", 0)
    decay = _exp_cached(loop.transpose(), -t)
    delta_t = x2 + congruence(decay, delta_inv - x2)
    if not all(
        math.isfinite(v) for v in (delta_t.xx, delta_t.xp, delta_t.pp)
    ):
        return _result(_unbalance_sym(x1, bal), mean, a, t, residual, "asymptote", 0)
    try:
        offset = _sym_inverse(delta_t)
    except SingularMatrix:
        if _depth >= MAX_SPLIT_DEPTH:
            cov, steps = _rk4_fallback(sigma0, a, d, w, t)
            return _result(cov, mean, a, t, 0.0, "rk4-fallback", steps)
        half = riccati_propagate_info(sigma0, a, d, b, 0.5 * t, _depth=_depth + 1)
        rest = riccati_propagate_info(
            half.state.cov, a, d, b, t - 0.5 * t, _depth=_depth + 1
        )
        return _result(
            rest.state.cov,
            mean,
            a,
            t,
            max(half.residual, rest.residual),
            "split-closed-form",
            half.step_count + rest.step_count,
        )
    cov = _unbalance_sym(x1 + offset, bal)
    branch = "perturbed-closed-form" if perturbed else "closed-form"
    return _result(cov, mean, a, t, residual, branch, 0)


def riccati_propagate(
    sigma0: SymMat2, a: Mat2, d: SymMat2, b: Mat2, t: float
) -> SymMat2:
    """Covariance of the conditional dynamics after time ``t``."""
    return riccati_propagate_info(sigma0, a, d, b, t).state.cov


def riccati_asymptote(a: Mat2, d: SymMat2, b: Mat2) -> SymMat2:
    """Steady conditional covariance (the attractor of the Riccati flow)."""
    return solve_care(a, d, b)


def _kick_gain(b: Mat2) -> float:
    if b.m11 != 0.0 or b.m21 != 0.0 or b.m22 != 0.0:
        raise ValueError(
            "measurement matrix must have the single-entry form [[0, b], [0, 0]]"
        )
    return b.m12


def conditional_mean_step(
    state: GaussianState,
    a: Mat2,
    d: SymMat2,
    b: Mat2,
    dW: float,
    dt: float,
) -> GaussianState:
    """One Euler-Maruyama step of the conditional mean.

    The mean drifts with the linear dynamics and receives the innovation
    kick ``b * (sigma_xx, sigma_xp) * dW`` from the measurement record;
    the covariance is advanced with the exact deterministic flow.  ``dW``
    must be drawn externally as N(0, dt).
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    if not math.isfinite(dW):
        raise ValueError(f"dW must be finite, got {dW!r}")
    gain = _kick_gain(b)
    mx, mp = state.mean_x, state.mean_p
    cov = state.cov
    mean_x = mx + dt * (a.m11 * mx + a.m12 * mp) + gain * cov.xx * dW
    mean_p = mp + dt * (a.m21 * mx + a.m22 * mp) + gain * cov.xp * dW
    new_cov = riccati_propagate(cov, a, d, b, dt)
    return GaussianState(
        mean_x=mean_x, mean_p=mean_p, cov=new_cov, time=state.time + dt
    )


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Batch of conditional-mean trajectories over a shared covariance path.

    ``times`` has shape (steps+1,), ``means`` (n_traj, steps+1, 2),
    ``covariances`` (steps+1, 3) as (xx, xp, pp) rows; ``seeds`` holds the
    per-trajectory child seeds derived from ``master_seed``.
    """

    times: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    seeds: tuple[int, ...]
    master_seed: int


def simulate_trajectories(
    a: Mat2,
    d: SymMat2,
    b: Mat2,
    state0: GaussianState,
    *,
    t_final: float,
    steps: int,
    n_traj: int,
    seed: int,
) -> TrajectoryEnsemble:
    """Simulate an ensemble of conditional-mean trajectories.

    The covariance path is deterministic and computed once with the exact
    per-step closed form; each trajectory's mean is integrated with
    Euler-Maruyama using an independent RNG stream seeded by
    ``child_seed(seed, index)``, so any single trajectory is reproducible
    regardless of the ensemble size.
    """
    if not (math.isfinite(t_final) and t_final > 0.0):
        raise ValueError(f"t_final must be positive, got {t_final!r}")
    if steps < 1 or n_traj < 1:
        raise ValueError("steps and n_traj must be at least 1")
    gain = _kick_gain(b)
    h = t_final / steps

    covariances = np.empty((steps + 1, 3), dtype=float)
    sigma = state0.cov
    covariances[0] = sigma.as_vector()
    for n in range(steps):
        sigma = riccati_propagate(sigma, a, d, b, h)
        covariances[n + 1] = sigma.as_vector()

    seeds = tuple(child_seed(seed, index) for index in range(n_traj))
    scale = math.sqrt(h)
    noise = np.stack(
        [np.random.default_rng(s).normal(0.0, scale, steps) for s in seeds]
    )

    means = np.empty((n_traj, steps + 1, 2), dtype=float)
    current = np.tile(
        np.array([state0.mean_x, state0.mean_p], dtype=float), (n_traj, 1)
    )
    means[:, 0] = current
    drift_t = a.as_array().T
    for n in range(steps):
        kick = gain * np.array([covariances[n, 0], covariances[n, 1]])
        current = current + h * (current @ drift_t) + noise[:, n : n + 1] * kick
        means[:, n + 1] = current

    times = state0.time + h * np.arange(steps + 1, dtype=float)
    return TrajectoryEnsemble(
        times=times,
        means=means,
        covariances=covariances,
        seeds=seeds,
        master_seed=seed,
    )


def write_trajectory_csv(path: str | Path, ensemble: TrajectoryEnsemble) -> None:
    """Dump an ensemble as CSV rows of time, means, covariance, and seed.

    Trajectories are concatenated in order; the ``seed`` column identifies
    which trajectory a row belongs to.  Numbers carry 13 significant digits.
    """
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["time", "mean_x", "mean_p", "sxx", "sxp", "spp", "seed"])
        for index, traj_seed in enumerate(ensemble.seeds):
            for n in range(ensemble.times.shape[0]):
                writer.writerow(
                    [
                        f"{ensemble.times[n]:.12e}",
                        f"{ensemble.means[index, n, 0]:.12e}",
                        f"{ensemble.means[index, n, 1]:.12e}",
                        f"{ensemble.covariances[n, 0]:.12e}",
                        f"{ensemble.covariances[n, 1]:.12e}",
                        f"{ensemble.covariances[n, 2]:.12e}",
                        str(traj_seed),
                    ]
                )
