"""Exact 2x2 real-matrix kernel.

Closed-form exponentials and inverses, continuous Lyapunov and algebraic
Riccati solvers, and the discrete (Stein-type) solver used for stroboscopic
fixed points.  Everything is specialised to the 2x2 covariance problem:
symmetric equations are solved on the 3-component representation
(xx, xp, pp), so symmetry holds structurally instead of by averaging.

All operations are pure functions on immutable value types and are safe to
call concurrently.  Numerical cutoffs live in :class:`Tolerances`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoStabilizingSolution,
    NotHurwitz,
    SingularMatrix,
    SpectralRadiusGEOne,
)


class Tolerances:
    """Single home for the kernel's numerical cutoffs."""

    # |det| threshold for inversion, relative to the squared Frobenius norm.
    singular_det = 1e-14
    # discriminant magnitude below which the exponential uses its series branch
    degenerate_exp = 1e-12
    # relative margin keeping Hamiltonian eigenvalues off the imaginary axis
    spectral_margin = 1e-9
    # iterative-refinement passes on the 3x3 linear solves
    refine_steps = 3
    # Newton refinement passes after the Riccati subspace extraction
    newton_steps = 3


def _require_finite(name, *vals):
    for v in vals:
        if not math.isfinite(v):
            raise ValueError(f"{name} entries must be finite, got {vals}")


@dataclass(frozen=True)
class Mat2:
    """Dense 2x2 real matrix; the caller tracks any units."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        _require_finite("Mat2", self.m11, self.m12, self.m21, self.m22)

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def zero() -> "Mat2":
        return Mat2(0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def diagonal(d1: float, d2: float) -> "Mat2":
        return Mat2(float(d1), 0.0, 0.0, float(d2))

    @staticmethod
    def from_array(a) -> "Mat2":
        a = np.asarray(a, dtype=float)
        return Mat2(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def transpose(self) -> "Mat2":
        return Mat2(self.m11, self.m21, self.m12, self.m22)

    def trace(self) -> float:
        return self.m11 + self.m22

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def norm(self) -> float:
        # hypot scales internally, so huge entries give inf-free results
        return math.hypot(self.m11, self.m12, self.m21, self.m22)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 + other.m11,
            self.m12 + other.m12,
            self.m21 + other.m21,
            self.m22 + other.m22,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.m11, -self.m12, -self.m21, -self.m22)

    def __rmul__(self, c: float) -> "Mat2":
        return Mat2(c * self.m11, c * self.m12, c * self.m21, c * self.m22)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )


@dataclass(frozen=True)
class SymMat2:
    """Symmetric 2x2 matrix stored as its three independent components.

    xx carries length^2, pp momentum^2, and xp the cross unit; the type does
    not enforce units, only symmetry and finiteness.
    """

    xx: float
    xp: float
    pp: float

    def __post_init__(self):
        _require_finite("SymMat2", self.xx, self.xp, self.pp)

    @staticmethod
    def zero() -> "SymMat2":
        return SymMat2(0.0, 0.0, 0.0)

    @staticmethod
    def diagonal(xx: float, pp: float) -> "SymMat2":
        return SymMat2(float(xx), 0.0, float(pp))

    @staticmethod
    def from_array(a) -> "SymMat2":
        a = np.asarray(a, dtype=float)
        return SymMat2(a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), a[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]])

    def as_mat2(self) -> Mat2:
        return Mat2(self.xx, self.xp, self.xp, self.pp)

    def as_vector(self) -> np.ndarray:
        return np.array([self.xx, self.xp, self.pp])

    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    def norm(self) -> float:
        return math.hypot(self.xx, self.xp, self.xp, self.pp)

    def is_physical(self, hbar: float = 1.0) -> bool:
        """Positive variances and an uncertainty product at or above the
        quantum floor, with a 1e-9 relative tolerance on the floor."""
        floor = (hbar / 2.0) ** 2 * (1.0 - 1e-9)
        return self.xx > 0.0 and self.pp > 0.0 and self.det() >= floor

    def __add__(self, other: "SymMat2") -> "SymMat2":
        return SymMat2(self.xx + other.xx, self.xp + other.xp, self.pp + other.pp)

    def __sub__(self, other: "SymMat2") -> "SymMat2":
        return SymMat2(self.xx - other.xx, self.xp - other.xp, self.pp - other.pp)

    def __neg__(self) -> "SymMat2":
        return SymMat2(-self.xx, -self.xp, -self.pp)

    def __rmul__(self, c: float) -> "SymMat2":
        return SymMat2(c * self.xx, c * self.xp, c * self.pp)


def _congruence_coefficients(m: Mat2) -> np.ndarray:
    """3x3 matrix acting on (xx, xp, pp) that represents S -> M S M^T."""
    return np.array(
        [
            [m.m11 ** 2, 2.0 * m.m11 * m.m12, m.m12 ** 2],
            [
                m.m11 * m.m21,
                m.m11 * m.m22 + m.m12 * m.m21,
                m.m12 * m.m22,
            ],
            [m.m21 ** 2, 2.0 * m.m21 * m.m22, m.m22 ** 2],
        ]
    )


def congruence(m: Mat2, s: SymMat2) -> SymMat2:
    """M S M^T evaluated componentwise, exactly symmetric by construction."""
    v = _congruence_coefficients(m) @ s.as_vector()
    return SymMat2(v[0], v[1], v[2])


def gram(b: Mat2) -> SymMat2:
    """B B^T as a symmetric matrix."""
    return congruence(b, SymMat2(1.0, 0.0, 1.0))


def eigenvalues(a: Mat2) -> tuple[complex, complex]:
    """Eigenvalues from the characteristic polynomial (exact for 2x2)."""
    half_tr = 0.5 * a.trace()
    disc = half_tr * half_tr - a.det()
    if disc >= 0.0:
        root = math.sqrt(disc)
        return complex(half_tr + root), complex(half_tr - root)
    root = math.sqrt(-disc)
    return complex(half_tr, root), complex(half_tr, -root)


def is_hurwitz(a: Mat2) -> bool:
    """Exact algebraic stability test: both eigenvalue real parts negative
    iff trace < 0 and det > 0."""
    return a.trace() < 0.0 and a.det() > 0.0


def spectral_radius(a: Mat2) -> float:
    l1, l2 = eigenvalues(a)
    return max(abs(l1), abs(l2))


def mat2_exp(a: Mat2, t: float) -> Mat2:
    """e^{tA} by the closed 2x2 formula.

    Split tA into trace and traceless parts; the traceless square is a
    multiple of the identity, giving cosh/sinhc, cos/sinc, or (near the
    degenerate repeated-eigenvalue point) truncated-series branches on the
    discriminant delta = t^2 (n11^2 + n12 n21).
    """
    if not math.isfinite(t):
        raise ValueError("time must be finite")
    mu = 0.5 * t * a.trace()
    n11 = 0.5 * (a.m11 - a.m22)
    delta = t * t * (n11 * n11 + a.m12 * a.m21)
    if delta > Tolerances.degenerate_exp:
        s = math.sqrt(delta)
        # evaluate e^mu cosh(s) and e^mu sinh(s)/s through e^{mu +- s} to
        # keep large-exponent cases stable
        ep = math.exp(mu + s)
        em = math.exp(mu - s)
        ec = 0.5 * (ep + em)
        es = 0.5 * (ep - em) / s
    elif delta < -Tolerances.degenerate_exp:
        s = math.sqrt(-delta)
        scale = math.exp(mu)
        ec = scale * math.cos(s)
        es = scale * math.sin(s) / s
    else:
        scale = math.exp(mu)
        ec = scale * (1.0 + delta / 2.0 + delta * delta / 24.0)
        es = scale * (1.0 + delta / 6.0 + delta * delta / 120.0)
    return Mat2(
        ec + es * t * n11,
        es * t * a.m12,
        es * t * a.m21,
        ec - es * t * n11,
    )


def mat2_inverse(m: Mat2) -> Mat2:
    det = m.det()
    norm2 = m.m11 ** 2 + m.m12 ** 2 + m.m21 ** 2 + m.m22 ** 2
    if abs(det) <= Tolerances.singular_det * norm2 or norm2 == 0.0:
        raise SingularMatrix(
            f"det {det:.3e} below tolerance {Tolerances.singular_det:.0e} * |M|^2"
        )
    return Mat2(m.m22 / det, -m.m12 / det, -m.m21 / det, m.m11 / det)


def _lyapunov_coefficients(a: Mat2) -> np.ndarray:
    """3x3 matrix L with L (xx,xp,pp) = components of A S + S A^T."""
    p, q, r, s = a.m11, a.m12, a.m21, a.m22
    return np.array(
        [
            [2.0 * p, 2.0 * q, 0.0],
            [r, p + s, q],
            [0.0, 2.0 * r, 2.0 * s],
        ]
    )


def _solve3_refined(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """3x3 solve with a few passes of iterative refinement."""
    try:
        x = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"3x3 solve failed: {exc}") from exc
    for _ in range(Tolerances.refine_steps):
        res = rhs - lhs @ x
        if not np.all(np.isfinite(res)):
            break
        scale = np.max(np.abs(rhs)) or 1.0
        if np.max(np.abs(res)) <= 1e-16 * scale:
            break
        x = x + np.linalg.solve(lhs, res)
    return x


def _balance_factor(a: Mat2) -> float:
    """Diagonal scaling diag(1, delta) equalising the off-diagonal drift
    entries; essential at SI scales where 1/m and m w^2 differ by ~25
    orders of magnitude."""
    if a.m12 != 0.0 and a.m21 != 0.0:
        return math.sqrt(abs(a.m12 / a.m21))
    return 1.0


def _scaled_lyapunov_solve(a: Mat2, d: SymMat2) -> SymMat2:
    """Solve A S + S A^T + D = 0 on the balanced 3-component system.

    Assumes the spectrum of A is solvable (no eigenvalue pair summing to
    zero); callers enforce their own stability preconditions.
    """
    delta = _balance_factor(a)
    a_s = Mat2(a.m11, a.m12 / delta, a.m21 * delta, a.m22)
    rhs = -np.array([d.xx, delta * d.xp, delta * delta * d.pp])
    v = _solve3_refined(_lyapunov_coefficients(a_s), rhs)
    return SymMat2(v[0], v[1] / delta, v[2] / (delta * delta))


def solve_lyapunov(a: Mat2, d: SymMat2) -> SymMat2:
    """Steady state of the linear covariance flow: A X + X A^T + D = 0.

    Raises NotHurwitz for drifts without a decaying spectrum (for example an
    undamped rotation), for which no steady state exists.
    """
    if not is_hurwitz(a):
        raise NotHurwitz(
            f"drift trace {a.trace():.6g}, det {a.det():.6g}; need trace<0, det>0"
        )
    if d.norm() == 0.0:
        return SymMat2.zero()
    return _scaled_lyapunov_solve(a, d)


def _sign_definite_spectrum(a: Mat2) -> bool:
    """True when both eigenvalue real parts share a strict sign, the
    condition under which the Lyapunov operator is invertible for either
    orientation of the flow."""
    return a.det() > 0.0 and a.trace() != 0.0


def solve_riccati_dual(closed_loop: Mat2, b: Mat2) -> SymMat2:
    """Solve M^T Y + Y M = B B^T for symmetric Y.

    This is the companion equation whose solution, combined with the
    algebraic Riccati solution, yields the measurement-conditioned
    asymptote.  The closed-loop matrix may be Hurwitz or anti-Hurwitz; a
    spectrum touching the imaginary axis has no unique solution.
    """
    if not _sign_definite_spectrum(closed_loop):
        raise NotHurwitz(
            "closed-loop spectrum touches the imaginary axis; "
            f"trace {closed_loop.trace():.6g}, det {closed_loop.det():.6g}"
        )
    w = gram(b)
    if w.norm() == 0.0:
        return SymMat2.zero()
    # M^T Y + Y M - W = 0 is the generic solve with drift M^T and
    # inhomogeneity -W
    return _scaled_lyapunov_solve(closed_loop.transpose(), -1.0 * w)


def _hamiltonian_subspace(
    a: Mat2, d: SymMat2, w: SymMat2, amp: float, unstable: bool
) -> SymMat2:
    """Riccati solution from the invariant subspace of the 4x4 block matrix
    [[-A^T, W],[D, A]]; the unstable subspace yields the stabilizing root."""
    at = a.as_array()
    h = np.zeros((4, 4))
    h[:2, :2] = -at.T
    h[:2, 2:] = amp * w.as_array()
    h[2:, :2] = d.as_array() / amp
    h[2:, 2:] = at
    vals, vecs = np.linalg.eig(h)
    scale = np.max(np.abs(vals))
    if scale == 0.0 or np.min(np.abs(vals.real)) <= Tolerances.spectral_margin * scale:
        raise NoStabilizingSolution(
            "invariant-subspace eigenvalues touch the imaginary axis"
        )
    order = np.argsort(vals.real)
    idx = order[2:] if unstable else order[:2]
    u = vecs[:2, idx]
    v = vecs[2:, idx]
    det_u = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    if abs(det_u) <= 1e-13 * max(np.max(np.abs(u)) ** 2, 1e-300):
        raise NoStabilizingSolution("invariant-subspace basis block is singular")
    x = v @ np.linalg.inv(u)
    x = x.real
    return amp * SymMat2.from_array(x)


def _newton_refine(a: Mat2, d: SymMat2, w: SymMat2, x: SymMat2) -> SymMat2:
    """Newton steps for A X + X A^T + D - X W X = 0; each step is one
    structurally symmetric Lyapunov solve with the current closed loop."""
    for _ in range(Tolerances.newton_steps):
        xw = x.as_mat2() @ w.as_mat2()
        loop = a - xw
        if not _sign_definite_spectrum(loop):
            break
        rhs = d + congruence(x.as_mat2(), w)
        try:
            x_new = _scaled_lyapunov_solve(loop, rhs)
        except SingularMatrix:
            break
        if (x_new - x).norm() <= 1e-15 * max(x.norm(), 1e-300):
            return x_new
        x = x_new
    return x


def _solve_care_branch(a: Mat2, d: SymMat2, b: Mat2, unstable: bool) -> SymMat2:
    w = gram(b)
    if w.norm() == 0.0:
        if not is_hurwitz(a):
            raise NoStabilizingSolution(
                "no backaction and the drift is not Hurwitz"
            )
        return solve_lyapunov(a, d)
    delta = _balance_factor(a)
    a_s = Mat2(a.m11, a.m12 / delta, a.m21 * delta, a.m22)
    d_s = SymMat2(d.xx, delta * d.xp, delta * delta * d.pp)
    w_s = SymMat2(w.xx, w.xp / delta, w.pp / (delta * delta))
    amp = 1.0
    if d_s.norm() > 0.0:
        amp = math.sqrt(d_s.norm() / w_s.norm())
    x_s = _hamiltonian_subspace(a_s, d_s, w_s, amp, unstable)
    x_s = _newton_refine(a_s, d_s, w_s, x_s)
    return SymMat2(x_s.xx, x_s.xp / delta, x_s.pp / (delta * delta))


def solve_care(a: Mat2, d: SymMat2, b: Mat2) -> SymMat2:
    """Stabilizing solution of A X + X A^T + D - X B B^T X = 0.

    The returned X makes the closed loop A - X B B^T Hurwitz; it is the
    long-time attractor of the measurement-conditioned covariance flow.
    Solved by extracting the unstable invariant subspace of the associated
    4x4 block matrix, then polished with Newton steps (each a structurally
    symmetric Lyapunov solve).  Inputs are balanced twice first: a diagonal
    similarity equalising the drift off-diagonals and an amplitude scale
    equalising diffusion against backaction.
    """
    return _solve_care_branch(a, d, b, unstable=True)


def _solve_care_antistabilizing(a: Mat2, d: SymMat2, b: Mat2) -> SymMat2:
    """The opposite-branch root, whose closed loop is anti-Hurwitz.

    Exposed for tests and diagnostics: composed with the dual solution it
    reproduces the stabilizing root, which is the identity behind the
    conditioned asymptote's textbook two-term form.
    """
    return _solve_care_branch(a, d, b, unstable=False)


def solve_discrete_lyapunov(f: Mat2, rhs: SymMat2) -> SymMat2:
    """Fixed point of the affine cycle map: solve S - F S F^T = RHS.

    Only defined when the map contracts (spectral radius of F below one);
    otherwise the stroboscopic dynamics has no bounded fixed point and
    SpectralRadiusGEOne is raised so callers can report divergence.
    """
    rho = spectral_radius(f)
    if rho >= 1.0:
        raise SpectralRadiusGEOne(f"cycle-matrix spectral radius {rho:.6g} >= 1")
    delta = _balance_factor(f)
    f_s = Mat2(f.m11, f.m12 / delta, f.m21 * delta, f.m22)
    rhs_v = np.array([rhs.xx, delta * rhs.xp, delta * delta * rhs.pp])
    lhs = np.eye(3) - _congruence_coefficients(f_s)
    v = _solve3_refined(lhs, rhs_v)
    return SymMat2(v[0], v[1] / delta, v[2] / (delta * delta))
