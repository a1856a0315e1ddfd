"""Stroboscopic two-frequency cycling of a damped, monitored oscillator.

The drive alternates between two trap frequencies, holding each for a
quarter period of the damping-shifted oscillation.  Over one full cycle the
noise-averaged covariance transforms affinely, sigma -> F sigma F^T + G,
which makes asymptotics a discrete Lyapunov problem.  The filtered
(measurement-conditioned) covariance is not affine in sigma, so its cycle
map is represented by repeated Riccati propagation instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import ConfigError, NonConverged, Overdamped, SpectralRadiusGEOne
from .linalg import (
    Mat2,
    SymMat2,
    congruence,
    mat2_exp,
    solve_discrete_lyapunov,
    spectral_radius,
)
from .noise import DynamicsCoefficients, build_matrices
from .propagate import lyapunov_propagate, riccati_asymptote, riccati_propagate

CYCLE_KINDS = ("langevin", "riccati")

FIXED_POINT_RTOL = 1e-12
MAX_PROTOCOL_CYCLES = 100_000


class Divergent:
    """Sentinel returned when the cycle map has no bounded asymptote."""

    _instance: Optional["Divergent"] = None

    def __new__(cls) -> "Divergent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"

    def __bool__(self) -> bool:
        return False


DIVERGENT = Divergent()


@dataclass(frozen=True)
class ProtocolSchedule:
    """Timing data for one two-segment cycle.

    ``effective_omega*`` are the damping-shifted oscillation frequencies;
    each segment lasts a quarter period of its shifted frequency.
    """

    omega1: float
    omega2: float
    effective_omega1: float
    effective_omega2: float
    t1: float
    t2: float
    cycles: int

    @property
    def tau(self) -> float:
        return self.t1 + self.t2


@dataclass(frozen=True)
class SqueezeRates:
    """Per-cycle logarithmic growth rates of the covariance entries.

    ``damping_term`` is the common contribution of the damping rates over
    one cycle; it enters every rate.  ``negative_damping_matched`` reports
    whether the negative-sign convention for that term reproduced the
    diffusion-free cycle map on this input (the alternative sign is
    available via ``squeeze_rates(..., positive_damping=True)`` for
    debugging).
    """

    rate_xx: float
    rate_pp: float
    rate_xp: float
    damping_term: float
    damping_gap: float
    negative_damping_matched: bool


@dataclass(frozen=True)
class CycleSegment:
    drift: Mat2
    diffusion: SymMat2
    measurement: Mat2
    duration: float


@dataclass(frozen=True)
class CycleMap:
    """One-cycle covariance update.

    ``kind == "langevin"`` carries the exact affine form: ``linear`` is the
    cycle monodromy matrix and ``affine`` the accumulated diffusion, so
    ``apply`` is a single congruence plus shift.  ``kind == "riccati"``
    keeps only the segment data and applies the nonlinear filtered update
    segment by segment; ``linear``/``affine`` are None.
    """

    kind: str
    segments: Tuple[CycleSegment, CycleSegment]
    linear: Optional[Mat2]
    affine: Optional[SymMat2]

    def _apply_segment(self, sigma: SymMat2, seg: CycleSegment, t: float) -> SymMat2:
        if self.kind == "langevin":
            return lyapunov_propagate(sigma, seg.drift, seg.diffusion, t)
        return riccati_propagate(sigma, seg.drift, seg.diffusion, seg.measurement, t)

    def apply(self, sigma: SymMat2) -> SymMat2:
        """Advance the covariance by one full cycle."""
        if self.kind == "langevin":
            return congruence(self.linear, sigma) + self.affine
        out = sigma
        for seg in self.segments:
            out = self._apply_segment(out, seg, seg.duration)
        return out

    def iterate(
        self, sigma0: SymMat2, cycles: int, samples_per_segment: int = 0
    ) -> List[Tuple[float, SymMat2]]:
        """Run ``cycles`` cycles, returning (time, covariance) samples.

        With ``samples_per_segment == 0`` only cycle boundaries are
        reported; otherwise each segment contributes that many interior
        samples (endpoint included), giving a dense trace.
        """
        if cycles < 0:
            raise ConfigError("cycles must be nonnegative")
        if samples_per_segment < 0:
            raise ConfigError("samples_per_segment must be nonnegative")
        path: List[Tuple[float, SymMat2]] = [(0.0, sigma0)]
        state = sigma0
        now = 0.0
        for _ in range(cycles):
            if samples_per_segment == 0:
                state = self.apply(state)
                now += sum(seg.duration for seg in self.segments)
                path.append((now, state))
                continue
            for seg in self.segments:
                for j in range(1, samples_per_segment + 1):
                    t_sub = seg.duration * j / samples_per_segment
                    path.append((now + t_sub, self._apply_segment(state, seg, t_sub)))
                state = path[-1][1]
                now += seg.duration
        return path


def _check_shared_rates(c1: DynamicsCoefficients, c2: DynamicsCoefficients) -> None:
    for name in ("a1", "a2", "mass", "hbar"):
        v1, v2 = getattr(c1, name), getattr(c2, name)
        if abs(v1 - v2) > 1e-9 * max(1.0, abs(v1)):
            raise ConfigError(
                f"segments must share {name}: got {v1!r} and {v2!r}"
            )


def _effective_omega(omega: float, gap: float) -> float:
    shifted_sq = omega * omega - 0.25 * gap * gap
    if shifted_sq <= 0.0:
        raise Overdamped(
            f"damping gap {gap!r} overdamps the segment at trap frequency {omega!r}"
        )
    return math.sqrt(shifted_sq)


def build_schedule(
    c1: DynamicsCoefficients, c2: DynamicsCoefficients, cycles: int
) -> ProtocolSchedule:
    """Quarter-period timing for the low/high frequency segments."""
    _check_shared_rates(c1, c2)
    if not c1.omega < c2.omega:
        raise ConfigError(
            f"first segment must use the lower trap frequency: "
            f"{c1.omega!r} >= {c2.omega!r}"
        )
    if cycles < 0:
        raise ConfigError("cycles must be nonnegative")
    gap = c1.a1 - c1.a2
    eff1 = _effective_omega(c1.omega, gap)
    eff2 = _effective_omega(c2.omega, gap)
    return ProtocolSchedule(
        omega1=c1.omega,
        omega2=c2.omega,
        effective_omega1=eff1,
        effective_omega2=eff2,
        t1=math.pi / (2.0 * eff1),
        t2=math.pi / (2.0 * eff2),
        cycles=cycles,
    )


def unitary_cycle(sigma0: SymMat2, omega1: float, omega2: float) -> SymMat2:
    """Idealized lossless cycle: a pure squeeze by the frequency ratio.

    One noiseless, undamped cycle maps the covariance through
    diag(-s, -1/s) with s = omega1/omega2, shrinking xx by s^2 and growing
    pp by 1/s^2 while leaving the cross term unchanged.
    """
    if omega1 <= 0.0 or omega2 <= 0.0:
        raise ConfigError("trap frequencies must be positive")
    s = omega1 / omega2
    return SymMat2(sigma0.xx * s * s, sigma0.xp, sigma0.pp / (s * s))


def cycle_map(
    c1: DynamicsCoefficients,
    c2: DynamicsCoefficients,
    sched: ProtocolSchedule,
    kind: str = "langevin",
) -> CycleMap:
    """Build the one-cycle covariance update for the requested dynamics."""
    if kind not in CYCLE_KINDS:
        raise ConfigError(f"kind must be one of {CYCLE_KINDS}, got {kind!r}")
    segments = []
    for c, t in ((c1, sched.t1), (c2, sched.t2)):
        drift, diffusion, measurement = build_matrices(c)
        segments.append(
            CycleSegment(drift=drift, diffusion=diffusion, measurement=measurement, duration=t)
        )
    segments = tuple(segments)
    if kind == "riccati":
        return CycleMap(kind=kind, segments=segments, linear=None, affine=None)
    linear, affine = _segment_monodromy(segments)
    return CycleMap(kind=kind, segments=segments, linear=linear, affine=affine)


def _segment_monodromy(segments: Tuple[CycleSegment, ...]) -> Tuple[Mat2, SymMat2]:
    """Linear and affine parts of the noise-averaged one-cycle update."""
    seg1, seg2 = segments
    e1 = mat2_exp(seg1.drift, seg1.duration)
    e2 = mat2_exp(seg2.drift, seg2.duration)
    h1 = lyapunov_propagate(SymMat2.zero(), seg1.drift, seg1.diffusion, seg1.duration)
    h2 = lyapunov_propagate(SymMat2.zero(), seg2.drift, seg2.diffusion, seg2.duration)
    return e2 @ e1, h2 + congruence(e2, h1)


def _noise_averaged_parts(m: CycleMap) -> Tuple[Mat2, SymMat2]:
    if m.linear is not None:
        return m.linear, m.affine
    return _segment_monodromy(m.segments)


def protocol_asymptote(
    m: CycleMap,
    *,
    tol: float = FIXED_POINT_RTOL,
    max_cycles: int = MAX_PROTOCOL_CYCLES,
):
    """Stroboscopic steady state of the cycle map, or DIVERGENT.

    The noise-averaged map settles iff its monodromy matrix is a strict
    contraction, in which case the fixed point solves the discrete
    Lyapunov equation.  The filtered map is iterated from the steady
    filtered state of the high-frequency segment until the relative update
    drops below ``tol``.
    """
    unmeasured = all(
        seg.measurement.m11 == 0.0
        and seg.measurement.m12 == 0.0
        and seg.measurement.m21 == 0.0
        and seg.measurement.m22 == 0.0
        for seg in m.segments
    )
    if m.kind == "langevin" or unmeasured:
        # without a measurement the filtered map degenerates to the
        # noise-averaged one, so settle it by the contraction test
        linear, affine = _noise_averaged_parts(m)
        try:
            return solve_discrete_lyapunov(linear, affine)
        except SpectralRadiusGEOne:
            return DIVERGENT
    seg2 = m.segments[1]
    state = riccati_asymptote(seg2.drift, seg2.diffusion, seg2.measurement)
    for _ in range(max_cycles):
        nxt = m.apply(state)
        if (nxt - state).norm() <= tol * state.norm():
            return nxt
        state = nxt
    raise NonConverged(
        f"filtered cycle map did not settle within {max_cycles} cycles"
    )


def _diffusion_free_contraction(
    c1: DynamicsCoefficients, c2: DynamicsCoefficients, sched: ProtocolSchedule
) -> float:
    """xx -> xx coefficient of one noiseless cycle, squared monodromy entry."""
    f = mat2_exp(build_matrices(c2)[0], sched.t2) @ mat2_exp(
        build_matrices(c1)[0], sched.t1
    )
    return f.m11 * f.m11


def squeeze_rates(
    c1: DynamicsCoefficients,
    c2: DynamicsCoefficients,
    sched: ProtocolSchedule,
    sigma_ref: Optional[SymMat2] = None,
    *,
    positive_damping: bool = False,
) -> SqueezeRates:
    """Per-cycle log growth rates of xx, pp and xp under the cycling drive.

    Without a reference state the rates use the equal-damping limit forms,
    which drop the corrections proportional to the damping gap a2 - a1.
    Passing ``sigma_ref`` (covariance entering the cycle) restores those
    correction terms, which need the entry ratios of the actual state.

    The common damping contribution is negative by default (damping
    shrinks phase-space volume); ``positive_damping=True`` flips its sign
    for debugging.  ``negative_damping_matched`` records which convention
    agreed with a brute-force diffusion-free cycle map on this input.
    """
    _check_shared_rates(c1, c2)
    a1, a2 = c1.a1, c1.a2
    o1, o2 = sched.effective_omega1, sched.effective_omega2
    gap = a2 - a1
    mass = c1.mass
    base = -math.pi * (a1 + a2) * (o1 + o2) / (2.0 * o1 * o2)

    contraction = _diffusion_free_contraction(c1, c2, sched)
    ratio_sq = (o1 * o1) / (o2 * o2)
    matched = abs(math.exp(base) * ratio_sq - contraction) <= abs(
        math.exp(-base) * ratio_sq - contraction
    )

    f = -base if positive_damping else base
    rate_xx = f + math.log(ratio_sq)
    if sigma_ref is None:
        rate_pp = f + math.log(1.0 / ratio_sq)
        rate_xp = f
    else:
        diff = o2 * o2 - o1 * o1
        pp_arg = (
            (o2 * o2) / (o1 * o1)
            + gap * mass * diff / (o1 * o1) * (sigma_ref.xp / sigma_ref.pp)
            + gap * gap * mass * mass * diff * diff
            / (4.0 * o1 * o1 * o2 * o2)
            * (sigma_ref.xx / sigma_ref.pp)
        )
        xp_arg = 1.0 + gap * mass * diff / (2.0 * o2 * o2) * (
            sigma_ref.xx / sigma_ref.xp
        )
        if pp_arg <= 0.0 or xp_arg <= 0.0:
            raise ValueError(
                "reference-state ratios push a rate argument out of the log domain"
            )
        rate_pp = f + math.log(pp_arg)
        rate_xp = f + math.log(xp_arg)
    return SqueezeRates(
        rate_xx=rate_xx,
        rate_pp=rate_pp,
        rate_xp=rate_xp,
        damping_term=f,
        damping_gap=gap,
        negative_damping_matched=matched,
    )


def squeezing_ratio(
    sigma: SymMat2, omega_ref: float, mass: float, hbar: float = 1.0
) -> float:
    """Position spread relative to the ground state at ``omega_ref``.

    Values below one indicate squeezing beyond the ground-state width.
    """
    if sigma.xx <= 0.0:
        raise ValueError("position variance must be positive")
    if omega_ref <= 0.0 or mass <= 0.0 or hbar <= 0.0:
        raise ValueError("omega_ref, mass and hbar must be positive")
    ground = hbar / (2.0 * mass * omega_ref)
    return math.sqrt(sigma.xx / ground)


def classify_squeezing(zeta: float, thermal_zeta: float) -> str:
    """Band label for a squeezing ratio.

    "squeezed" beats the ground state, "squashed" beats the pre-drive
    thermal spread (``thermal_zeta``) without reaching the ground state,
    "unsqueezed" does neither.
    """
    if zeta < 1.0:
        return "squeezed"
    if zeta < thermal_zeta:
        return "squashed"
    return "unsqueezed"
