"""Flux, Jacobian and eigenstructure of the Baiti-Jenssen 3x3 system.

The conserved state is U = (u, v, w) and the flux family is

    F(U) = ( 4[(v-1)u - w]       + eta * p1(U),
             v^2,
             4[v(v-2)u - (v-1)w] + eta * p3(U) ),

    p1(U) = 2uw - 2u^2(v-1),     p3(U) = w^2 - u^2(v-2)v,

with perturbation parameter 0 <= eta < 1/4.  On the unit ball the system is
strictly hyperbolic; for eta > 0 all three characteristic fields are
genuinely nonlinear (the third with the reversed orientation, so that
grad(lambda_3) . r_3 < 0).

Useful structure exploited throughout the package: (1, 0, v) and
(1, 0, v - 2) are eigenvectors of DF(U) for *every* eta, with eigenvalues
-4 + eta(2w - 2uv + 4u) and 4 + eta(2w - 2uv); the trace then forces the
middle eigenvalue to be exactly 2v.  The public eigensystem path still
computes the roots of the characteristic cubic and only uses the closed
forms after checking them against the eigenpair residual.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HyperbolicityError

ETA_MAX = 0.25
TOL_EIG = 1e-10
H_GNL = 1e-5
GNL_MARGIN = 1e-6

_TWO_PI_THIRDS = 2.0 * np.pi / 3.0


@dataclass(frozen=True)
class ModelParams:
    """Model selector: the perturbation strength eta in [0, 1/4)."""

    eta: float = 0.0

    def __post_init__(self):
        eta = float(self.eta)
        if not np.isfinite(eta) or not 0.0 <= eta < ETA_MAX:
            raise ValueError(f"eta must lie in [0, 1/4), got {self.eta!r}")
        object.__setattr__(self, "eta", eta)


def as_state(U) -> np.ndarray:
    """Coerce to a finite (3,) float array."""
    arr = np.asarray(U, dtype=float)
    if arr.shape != (3,):
        raise DomainError(f"state must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"state has non-finite components: {arr}")
    return arr


def in_unit_ball(U, radius: float = 1.0) -> bool:
    return bool(np.linalg.norm(U) < radius)


def p1(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    u, v, w = U[..., 0], U[..., 1], U[..., 2]
    return 2.0 * u * w - 2.0 * u * u * (v - 1.0)


def p3(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    u, v, w = U[..., 0], U[..., 1], U[..., 2]
    return w * w - u * u * (v - 2.0) * v


def flux(U, params: ModelParams) -> np.ndarray:
    """Evaluate F(U).  Accepts a single state (3,) or a batch (..., 3)."""
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != 3:
        raise DomainError(f"state array must end in axis of size 3, got {U.shape}")
    if not np.all(np.isfinite(U)):
        raise DomainError("non-finite state passed to flux")
    u, v, w = U[..., 0], U[..., 1], U[..., 2]
    eta = params.eta
    out = np.empty_like(U)
    out[..., 0] = 4.0 * ((v - 1.0) * u - w) + eta * (2.0 * u * w - 2.0 * u * u * (v - 1.0))
    out[..., 1] = v * v
    out[..., 2] = 4.0 * (v * (v - 2.0) * u - (v - 1.0) * w) + eta * (w * w - u * u * (v - 2.0) * v)
    return out


def jacobian(U, params: ModelParams) -> np.ndarray:
    """Analytic Jacobian DF(U), shape (..., 3, 3)."""
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != 3:
        raise DomainError(f"state array must end in axis of size 3, got {U.shape}")
    if not np.all(np.isfinite(U)):
        raise DomainError("non-finite state passed to jacobian")
    u, v, w = U[..., 0], U[..., 1], U[..., 2]
    eta = params.eta
    J = np.zeros(U.shape[:-1] + (3, 3), dtype=float)
    J[..., 0, 0] = 4.0 * (v - 1.0) + eta * (2.0 * w - 4.0 * u * (v - 1.0))
    J[..., 0, 1] = 4.0 * u - eta * 2.0 * u * u
    J[..., 0, 2] = -4.0 + eta * 2.0 * u
    J[..., 1, 1] = 2.0 * v
    J[..., 2, 0] = 4.0 * v * (v - 2.0) - eta * 2.0 * u * v * (v - 2.0)
    J[..., 2, 1] = 4.0 * ((2.0 * v - 2.0) * u - w) - eta * u * u * (2.0 * v - 2.0)
    J[..., 2, 2] = 4.0 * (1.0 - v) + eta * 2.0 * w
    return J


def uw_block(v) -> np.ndarray:
    """The 2x2 matrix acting on (u, w) at eta = 0:  4[[v-1, -1], [v(v-2), 1-v]]."""
    v = np.asarray(v, dtype=float)
    out = np.empty(v.shape + (2, 2), dtype=float)
    out[..., 0, 0] = 4.0 * (v - 1.0)
    out[..., 0, 1] = -4.0
    out[..., 1, 0] = 4.0 * v * (v - 2.0)
    out[..., 1, 1] = 4.0 * (1.0 - v)
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial and eigen machinery


def _char_coeffs(J):
    """Coefficients (c2, c1, c0) of det(lam I - J) = lam^3 + c2 lam^2 + c1 lam + c0."""
    a, b, c = J[..., 0, 0], J[..., 0, 1], J[..., 0, 2]
    d, e, f = J[..., 1, 0], J[..., 1, 1], J[..., 1, 2]
    g, h, i = J[..., 2, 0], J[..., 2, 1], J[..., 2, 2]
    tr = a + e + i
    minors = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return -tr, minors, -det


def _cubic_roots_sorted(c2, c1, c0):
    """Real roots of lam^3 + c2 lam^2 + c1 lam + c0, ascending.

    Trigonometric closed form for the three-real-root branch, followed by two
    Newton polish sweeps on the original cubic.  Returns (roots, ok) where ok
    flags entries whose discriminant is consistent with three real roots.
    """
    c2 = np.atleast_1d(np.asarray(c2, dtype=float))
    c1 = np.atleast_1d(np.asarray(c1, dtype=float))
    c0 = np.atleast_1d(np.asarray(c0, dtype=float))
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = 4.0 * p ** 3 + 27.0 * q * q
    scale = np.maximum(np.abs(p) ** 3, 27.0 * q * q) + 1e-300
    ok = disc <= 1e-9 * scale
    p_safe = np.minimum(p, -1e-300)
    m = 2.0 * np.sqrt(-p_safe / 3.0)
    arg = np.clip(3.0 * q / (p_safe * m), -1.0, 1.0)
    theta = np.arccos(arg) / 3.0
    k = np.arange(3.0)
    lam = m[..., None] * np.cos(theta[..., None] - _TWO_PI_THIRDS * k) - (c2 / 3.0)[..., None]
    for _ in range(2):
        f = ((lam + c2[..., None]) * lam + c1[..., None]) * lam + c0[..., None]
        fp = (3.0 * lam + 2.0 * c2[..., None]) * lam + c1[..., None]
        fp = np.where(np.abs(fp) > 1e-300, fp, 1.0)
        lam = lam - f / fp
    lam.sort(axis=-1)
    return lam, ok


def eigenvalues_batch(U, params: ModelParams):
    """Sorted eigenvalues for a batch of states.  Returns (lam, ok_mask)."""
    J = jacobian(U, params)
    return _cubic_roots_sorted(*_char_coeffs(J))


def eigenvalues(U, params: ModelParams) -> np.ndarray:
    """Sorted eigenvalues of DF at a single state; raises on failure."""
    U = as_state(U)
    lam, ok = eigenvalues_batch(U[None, :], params)
    lam = lam[0]
    if not ok[0] or not (lam[0] < lam[1] < lam[2]):
        raise HyperbolicityError(
            f"eigenvalues not real and distinct at U={U.tolist()}, eta={params.eta}",
            state=U,
        )
    return lam


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigenvalues with right eigenvectors (rows of rvec)."""

    lam: np.ndarray
    rvec: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(3))


def _null_vector(M):
    """Unit right null vector of a (near) singular 3x3 matrix."""
    _, _, vt = np.linalg.svd(M)
    return vt[-1]


def _r2_uw(J, lam2):
    """(u, w) components of the middle eigenvector normalized to v-component 1.

    Solves rows 1 and 3 of (J - lam2 I) r = 0 with r_v = 1.
    """
    a = J[..., 0, 0] - lam2
    b = J[..., 0, 2]
    c = J[..., 2, 0]
    d = J[..., 2, 2] - lam2
    det = a * d - b * c
    ru = (-J[..., 0, 1] * d + J[..., 2, 1] * b) / det
    rw = (-J[..., 2, 1] * a + J[..., 0, 1] * c) / det
    return ru, rw


def r2_direction(U, params: ModelParams) -> np.ndarray:
    """Middle-field eigenvector with v-component exactly 1.

    Uses the exact middle eigenvalue 2v (trace identity; the outer eigenpairs
    are closed-form for every eta).
    """
    U = as_state(U)
    J = jacobian(U, params)
    ru, rw = _r2_uw(J, 2.0 * U[1])
    return np.array([ru, 1.0, rw])


def eigensystem(U, params: ModelParams, tol: float = TOL_EIG) -> EigenSystem:
    """Full eigensystem at a state.

    Families 1 and 3 return the straight-line eigenvectors (1, 0, v) and
    (1, 0, v-2) whenever their eigenpair residual is below `tol` (it always
    is for this flux family); the middle eigenvector is normalized to
    v-component 1.  A numerical null-space solve is the fallback.
    """
    U = as_state(U)
    lam = eigenvalues(U, params)
    J = jacobian(U, params)
    v = U[1]

    def resid(r, l):
        return float(np.linalg.norm(J @ r - l * r))

    r1 = np.array([1.0, 0.0, v])
    if resid(r1, lam[0]) > tol:
        r1 = _null_vector(J - lam[0] * np.eye(3))
        if abs(r1[0]) < 1e-12:
            raise HyperbolicityError("family-1 eigenvector has vanishing u-component", state=U)
        r1 = r1 / r1[0]

    r3 = np.array([1.0, 0.0, v - 2.0])
    if resid(r3, lam[2]) > tol:
        r3 = _null_vector(J - lam[2] * np.eye(3))
        if abs(r3[0]) < 1e-12:
            raise HyperbolicityError("family-3 eigenvector has vanishing u-component", state=U)
        r3 = r3 / r3[0]

    ru, rw = _r2_uw(J, lam[1])
    r2 = np.array([ru, 1.0, rw])
    if resid(r2, lam[1]) > tol:
        r2 = _null_vector(J - lam[1] * np.eye(3))
        if abs(r2[1]) < 1e-12:
            raise HyperbolicityError("family-2 eigenvector has vanishing v-component", state=U)
        r2 = r2 / r2[1]

    rvec = np.vstack([r1, r2, r3])
    residuals = np.array([resid(rvec[i], lam[i]) for i in range(3)])
    if residuals.max() > tol:
        raise HyperbolicityError(
            f"eigenpair residual {residuals.max():.3e} above tolerance {tol:.1e}", state=U
        )
    return EigenSystem(lam=lam, rvec=rvec, residuals=residuals)


# ---------------------------------------------------------------------------
# sampling and whole-ball probes


def halton(n: int, dim: int = 3, start: int = 1) -> np.ndarray:
    """First n points of the Halton sequence (bases 2, 3, 5), offset by start."""
    bases = (2, 3, 5)[:dim]
    idx = np.arange(start, start + n)
    out = np.empty((n, dim))
    for d, b in enumerate(bases):
        x = np.zeros(n)
        f = 1.0
        i = idx.copy()
        while np.any(i > 0):
            f /= b
            x += f * (i % b)
            i //= b
        out[:, d] = x
    return out


def sample_ball(n: int, radius: float, seed: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy sample of the closed ball |U| <= radius.

    The seed offsets the underlying Halton index block, so distinct seeds give
    disjoint, reproducible point sets.
    """
    if n <= 0:
        return np.empty((0, 3))
    t = halton(n, 3, start=1 + seed * n)
    r = radius * t[:, 0] ** (1.0 / 3.0)
    cos_th = 1.0 - 2.0 * t[:, 1]
    sin_th = np.sqrt(np.maximum(0.0, 1.0 - cos_th ** 2))
    phi = 2.0 * np.pi * t[:, 2]
    return np.column_stack(
        [r * sin_th * np.cos(phi), r * sin_th * np.sin(phi), r * cos_th]
    )


@dataclass(frozen=True)
class HyperbolicityReport:
    eta: float
    radius: float
    n_samples: int
    seed: int
    min_gap_12: float
    min_gap_23: float
    lambda1_range: tuple
    lambda2_range: tuple
    lambda3_range: tuple
    all_real: bool
    passed: bool


def check_strict_hyperbolicity(
    params: ModelParams, radius: float = 0.9, n_samples: int = 10000, seed: int = 0
) -> HyperbolicityReport:
    """Sample the ball |U| <= radius and report the minimal eigenvalue gaps.

    Passes iff both gaps are strictly positive on every sample.
    """
    if not 0.0 <= radius < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {radius}")
    U = sample_ball(n_samples, radius, seed)
    if len(U) == 0:
        U = np.zeros((1, 3))
    lam, ok = eigenvalues_batch(U, params)
    gap12 = lam[:, 1] - lam[:, 0]
    gap23 = lam[:, 2] - lam[:, 1]
    all_real = bool(np.all(ok))
    return HyperbolicityReport(
        eta=params.eta,
        radius=radius,
        n_samples=len(U),
        seed=seed,
        min_gap_12=float(gap12.min()),
        min_gap_23=float(gap23.min()),
        lambda1_range=(float(lam[:, 0].min()), float(lam[:, 0].max())),
        lambda2_range=(float(lam[:, 1].min()), float(lam[:, 1].max())),
        lambda3_range=(float(lam[:, 2].min()), float(lam[:, 2].max())),
        all_real=all_real,
        passed=all_real and gap12.min() > 0.0 and gap23.min() > 0.0,
    )


@dataclass(frozen=True)
class GenuineNonlinearityReport:
    eta: float
    radius: float
    n_samples: int
    seed: int
    step: float
    family1: tuple
    family2: tuple
    family3: tuple
    family3_sign_reversed: bool
    margin: float
    degenerate_families: tuple
    passed: bool


def check_genuine_nonlinearity(
    params: ModelParams,
    radius: float = 0.5,
    n_samples: int = 2000,
    seed: int = 0,
    step: float = H_GNL,
) -> GenuineNonlinearityReport:
    """Report min/max of grad(lambda_i) . r_i per family over a ball sample.

    Gradients use central finite differences with the given step.  Family 3
    carries the reversed orientation, so genuine nonlinearity shows up there
    as values bounded away from zero *below*.  At eta = 0 families 1 and 3
    are linearly degenerate and are reported as such.
    """
    if not 0.0 <= radius < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {radius}")
    U = sample_ball(n_samples, radius, seed)
    n = len(U)
    lam, _ = eigenvalues_batch(U, params)
    grad = np.empty((n, 3, 3))
    for k in range(3):
        Up = U.copy()
        Up[:, k] += step
        Um = U.copy()
        Um[:, k] -= step
        lp, _ = eigenvalues_batch(Up, params)
        lm, _ = eigenvalues_batch(Um, params)
        grad[:, :, k] = (lp - lm) / (2.0 * step)

    v = U[:, 1]
    r1 = np.column_stack([np.ones(n), np.zeros(n), v])
    r3 = np.column_stack([np.ones(n), np.zeros(n), v - 2.0])
    J = jacobian(U, params)
    ru, rw = _r2_uw(J, lam[:, 1])
    r2 = np.column_stack([ru, np.ones(n), rw])

    g1 = np.einsum("nk,nk->n", grad[:, 0, :], r1)
    g2 = np.einsum("nk,nk->n", grad[:, 1, :], r2)
    g3 = np.einsum("nk,nk->n", grad[:, 2, :], r3)

    f1 = (float(g1.min()), float(g1.max()))
    f2 = (float(g2.min()), float(g2.max()))
    f3 = (float(g3.min()), float(g3.max()))
    if params.eta > 0.0:
        degenerate = ()
        passed = f1[0] > GNL_MARGIN and f2[0] > GNL_MARGIN and f3[1] < -GNL_MARGIN
    else:
        degenerate = (1, 3)
        passed = f2[0] > GNL_MARGIN
    return GenuineNonlinearityReport(
        eta=params.eta,
        radius=radius,
        n_samples=n,
        seed=seed,
        step=step,
        family1=f1,
        family2=f2,
        family3=f3,
        family3_sign_reversed=True,
        margin=GNL_MARGIN,
        degenerate_families=degenerate,
        passed=passed,
    )
