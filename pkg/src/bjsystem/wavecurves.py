"""Shock (Hugoniot) and rarefaction curves for the three wave families.

Families 1 and 3 run along the straight lines through (1, 0, v) and
(1, 0, v-2) in the plane v = const, for every admissible eta.  The family-2
curve is parametrized by the v-jump s: at eta = 0 the shock branch has the
closed form

    S2[s, Ub] = Ub + E(vb, s) Ub   on the (u, w) components, v -> vb + s,

with shock speed gamma = 2 vb + s, and E singular at |2 vb + s| = 4.  For
eta > 0 the shock branch is continued by Newton on the Rankine-Hugoniot
system; the rarefaction branch integrates the middle eigenvector field.

Sign conventions: shocks sit at s < 0 for families 1 and 2 and at s > 0 for
family 3 (reversed orientation of the third field).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SingularCurveError
from .flux import (
    ModelParams,
    as_state,
    eigenvalues,
    jacobian,
    r2_direction,
)
from .flux import flux as flux_fn

ODE_STEP = 1e-3
SPEED_WARN = 3.0
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
TOL_LAX = 1e-9

_SHOCK_SIDE = {1: -1.0, 2: -1.0, 3: 1.0}


@dataclass(frozen=True)
class CurvePoint:
    """A point on a wave curve: reached state, propagation speed, parameter."""

    state: np.ndarray
    speed: float
    param: float
    residual: float = 0.0
    warnings: tuple = ()


def r1_direction(v: float) -> np.ndarray:
    return np.array([1.0, 0.0, v])


def r3_direction(v: float) -> np.ndarray:
    return np.array([1.0, 0.0, v - 2.0])


def _check_family(fam: int):
    if fam not in (1, 2, 3):
        raise DomainError(f"wave family must be 1, 2 or 3, got {fam!r}")


def _curve_warnings(base, s, state):
    notes = []
    if abs(2.0 * base[1] + s) >= SPEED_WARN:
        notes.append("2-shock speed |2v+s| >= 3: approaching the singular locus at 4")
    if np.linalg.norm(state) >= 1.0:
        notes.append("curve point left the unit ball |U| < 1")
    return tuple(notes)


def hugoniot_matrix(vbar: float, s: float) -> np.ndarray:
    """The 2x2 matrix E(vbar, s) mapping (u, w) across a 2-shock at eta = 0."""
    gamma = 2.0 * vbar + s
    if abs(gamma) >= 4.0:
        raise SingularCurveError(
            f"2-Hugoniot matrix singular: |2 vbar + s| = {abs(gamma)} >= 4"
        )
    den = gamma * gamma - 16.0
    return (4.0 * s / den) * np.array(
        [
            [s + 4.0 - 2.0 * vbar, 4.0],
            [(s + 4.0) * (s - 2.0) + 4.0 * vbar, 3.0 * s - 4.0 + 2.0 * vbar],
        ]
    )


def rh_speed(left, right, params: ModelParams):
    """Least-squares Rankine-Hugoniot speed and residual for a jump.

    gamma minimizes |F(right) - F(left) - gamma (right - left)| over all three
    components; robust when one component of the jump vanishes.
    """
    left = as_state(left)
    right = as_state(right)
    dU = right - left
    den = float(dU @ dU)
    if den == 0.0:
        return 0.0, 0.0
    dF = flux_fn(right, params) - flux_fn(left, params)
    gamma = float(dF @ dU) / den
    residual = float(np.linalg.norm(dF - gamma * dU))
    return gamma, residual


def hugoniot2_closed_form(base, s: float) -> CurvePoint:
    """Closed-form family-2 Hugoniot point at eta = 0.

    v-component becomes vb + s, (u, w) pick up E(vb, s), and the shock speed
    is exactly 2 vb + s.  Raises SingularCurveError when |2 vb + s| >= 4.
    """
    base = as_state(base)
    if s == 0.0:
        return CurvePoint(state=base.copy(), speed=2.0 * base[1], param=0.0)
    E = hugoniot_matrix(base[1], s)
    uw = base[[0, 2]] + E @ base[[0, 2]]
    state = np.array([uw[0], base[1] + s, uw[1]])
    gamma = 2.0 * base[1] + s
    p0 = ModelParams(0.0)
    residual = float(np.linalg.norm(flux_fn(state, p0) - flux_fn(base, p0) - gamma * (state - base)))
    return CurvePoint(
        state=state,
        speed=gamma,
        param=s,
        residual=residual,
        warnings=_curve_warnings(base, s, state),
    )


def _hugoniot2_newton(base, s, params, tol, max_iter):
    """Family-2 RH solve for eta > 0: unknowns (u, w, gamma), v pinned to vb + s."""
    base = as_state(base)
    v_new = base[1] + s
    try:
        init = hugoniot2_closed_form(base, s)
        z = np.array([init.state[0], init.state[2], 2.0 * base[1] + s])
    except SingularCurveError:
        z = np.array([base[0], base[2], 2.0 * base[1] + s])
    F_base = flux_fn(base, params)
    scale = 1.0 + float(np.linalg.norm(F_base))

    def residual_vec(z):
        state = np.array([z[0], v_new, z[1]])
        return state, flux_fn(state, params) - F_base - z[2] * (state - base)

    state, R = residual_vec(z)
    r_norm = float(np.linalg.norm(R))
    e_u = np.array([1.0, 0.0, 0.0])
    e_w = np.array([0.0, 0.0, 1.0])
    for _ in range(max_iter):
        if r_norm <= 1e-15 * scale:
            break
        J = jacobian(state, params)
        Jz = np.column_stack([J[:, 0] - z[2] * e_u, J[:, 2] - z[2] * e_w, -(state - base)])
        try:
            step = np.linalg.solve(Jz, R)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                "singular Jacobian in 2-Hugoniot Newton solve", iterate=z, residual=r_norm
            ) from exc
        improved = False
        damping = 1.0
        for _ in range(30):
            z_try = z - damping * step
            state_try, R_try = residual_vec(z_try)
            r_try = float(np.linalg.norm(R_try))
            if r_try < r_norm:
                z, state, R, r_norm = z_try, state_try, R_try, r_try
                improved = True
                break
            damping *= 0.5
        if not improved:
            break
    if r_norm > tol * scale:
        raise ConvergenceError(
            f"2-Hugoniot Newton residual {r_norm:.3e} above tolerance", iterate=z, residual=r_norm
        )
    return CurvePoint(
        state=state,
        speed=float(z[2]),
        param=s,
        residual=r_norm,
        warnings=_curve_warnings(base, s, state),
    )


def hugoniot(fam: int, base, s: float, params: ModelParams,
             tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER) -> CurvePoint:
    """Point at parameter s on the family-`fam` Hugoniot locus through `base`."""
    _check_family(fam)
    base = as_state(base)
    if fam == 2:
        if s == 0.0:
            return CurvePoint(state=base.copy(), speed=2.0 * base[1], param=0.0)
        if params.eta == 0.0:
            return hugoniot2_closed_form(base, s)
        return _hugoniot2_newton(base, s, params, tol, max_iter)
    direction = r1_direction(base[1]) if fam == 1 else r3_direction(base[1])
    state = base + s * direction
    speed, residual = rh_speed(base, state, params)
    if s == 0.0:
        speed = float(eigenvalues(base, params)[fam - 1])
    return CurvePoint(
        state=state,
        speed=speed,
        param=s,
        residual=residual,
        warnings=_curve_warnings(base, 0.0, state),
    )


def rarefaction(fam: int, base, s: float, params: ModelParams) -> CurvePoint:
    """Point at parameter s on the family-`fam` rarefaction curve through `base`.

    Families 1 and 3 coincide with the Hugoniot lines; family 2 integrates
    the middle eigenvector field (v-component normalized to 1) with fixed-step
    RK4, so the v-component of the result is exactly vb + s.
    """
    _check_family(fam)
    base = as_state(base)
    if s == 0.0:
        return CurvePoint(state=base.copy(), speed=float(eigenvalues(base, params)[fam - 1]), param=0.0)
    if fam in (1, 3):
        direction = r1_direction(base[1]) if fam == 1 else r3_direction(base[1])
        state = base + s * direction
        speed = float(eigenvalues(state, params)[fam - 1])
        return CurvePoint(state=state, speed=speed, param=s,
                          warnings=_curve_warnings(base, 0.0, state))
    n_steps = max(64, int(np.ceil(abs(s) / ODE_STEP)))
    h = s / n_steps
    y = base.copy()
    for _ in range(n_steps):
        k1 = r2_direction(y, params)
        k2 = r2_direction(y + 0.5 * h * k1, params)
        k3 = r2_direction(y + 0.5 * h * k2, params)
        k4 = r2_direction(y + h * k3, params)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    y[1] = base[1] + s  # the field has v-component exactly 1; pin the endpoint
    speed = 2.0 * y[1]  # middle eigenvalue is exactly 2v
    return CurvePoint(state=y, speed=speed, param=s,
                      warnings=_curve_warnings(base, s, y))


def wave_fan_curve(fam: int, base, s: float, params: ModelParams) -> CurvePoint:
    """Wave-fan curve D_fam: shock branch on the admissible-shock side, else rarefaction."""
    _check_family(fam)
    if s == 0.0:
        base = as_state(base)
        return CurvePoint(state=base.copy(), speed=float(eigenvalues(base, params)[fam - 1]), param=0.0)
    if s * _SHOCK_SIDE[fam] > 0.0:
        return hugoniot(fam, base, s, params)
    return rarefaction(fam, base, s, params)


def shock_side(fam: int, s: float) -> bool:
    """True when strength s lies on the admissible-shock side of family fam."""
    _check_family(fam)
    return s * _SHOCK_SIDE[fam] > 0.0


@dataclass(frozen=True)
class LaxCheck:
    admissible: bool
    left_margin: float
    right_margin: float
    crossing_left_margin: float | None = None
    crossing_right_margin: float | None = None

    def __bool__(self):
        return self.admissible


def lax_admissible(fam: int, left, right, speed: float, params: ModelParams,
                   tol: float = TOL_LAX) -> LaxCheck:
    """Lax admissibility of a family-`fam` discontinuity of the given speed.

    Requires lambda_fam(right) <= speed <= lambda_fam(left) up to `tol`, plus
    the crossing conditions with the neighboring families.  Margins are
    returned signed; a contact discontinuity passes with zero margins.
    """
    _check_family(fam)
    lam_left = eigenvalues(left, params)
    lam_right = eigenvalues(right, params)
    left_margin = float(lam_left[fam - 1] - speed)
    right_margin = float(speed - lam_right[fam - 1])
    margins = [left_margin, right_margin]
    crossing_left = None
    crossing_right = None
    if fam > 1:
        crossing_left = float(speed - lam_left[fam - 2])
        margins.append(crossing_left)
    if fam < 3:
        crossing_right = float(lam_right[fam] - speed)
        margins.append(crossing_right)
    return LaxCheck(
        admissible=bool(min(margins) >= -tol),
        left_margin=left_margin,
        right_margin=right_margin,
        crossing_left_margin=crossing_left,
        crossing_right_margin=crossing_right,
    )
