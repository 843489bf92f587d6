"""Sine-Gordon systems on the lattice: schemes, Backlund extension, checks.

The continuous system for a = phi_x and b = phi is

    a_y = sin b,     b_x = a.

Two discretizations are provided as right-hand sides for the Goursat solver:

* naive: the continuous right-hand sides frozen on the lattice (first order
  accurate, but with no further structure), and
* hirota: the integrable discretization.  In the variables a = delta_x phi,
  b = (phi(x, y+eps) + phi(x, y))/2 the scheme reads

      delta_y a = f(a, b, eps),   delta_x b = a + (eps/2) f(a, b, eps),

  where f is a complex-logarithm expression that is real for real inputs
  (the two log arguments are complex conjugates; see hirota_rhs).

The Backlund transformation adds a third lattice direction (step 1): an
auxiliary angle theta propagates in x and y, and the transformed fields on the
next layer are read off from theta.  The six right-hand sides form a
compatible three-dimensional system exactly when the Hirota scheme is used;
check_compatibility_3d measures the defect of the three closure identities,
which is what fails for the naive scheme.

Angles are stored as unwrapped real numbers; circle semantics enter only
through trigonometric evaluation, so difference quotients of angle fields are
meaningful.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .goursat import (
    BlowUpError,
    CompatibilityError,
    EdgeField2,
    GoursatData2,
    LatticeDomain2,
    Rhs2,
    solve_goursat_2d,
)


class SchemeKind(enum.Enum):
    NAIVE = "naive"
    HIROTA = "hirota"


# ---------------------------------------------------------------------------
# right-hand sides


def continuous_rhs(a, b):
    """Continuous system right-hand sides: (a_y, b_x) = (sin b, a)."""
    return np.sin(b), np.asarray(a) + 0.0


def naive_rhs(a, b, eps):
    """Naive scheme: the continuous right-hand sides, independent of eps."""
    return np.sin(b), np.asarray(a) + 0.0


def hirota_rhs(a, b, eps):
    """Hirota scheme right-hand sides (f, g).

    f = (2/(i eps^2)) log[(1 - (eps^2/4) e^{-ib - i eps a/2})
                          / (1 - (eps^2/4) e^{+ib + i eps a/2})]

    and g = a + (eps/2) f.  The two log arguments are complex conjugates with
    positive real part (|w| = eps^2/4 < 1), so the ratio has modulus one and
    f is real: f = -(4/eps^2) Im log(1 - w) with w = (eps^2/4) e^{i(b+eps a/2)}.
    That real form is what is evaluated here; hirota_f_complex keeps the
    literal complex expression for cross-checking.
    """
    _require_hirota_eps(eps)
    w = (0.25 * eps * eps) * np.exp(1j * (np.asarray(b) + 0.5 * eps * np.asarray(a)))
    f = (-4.0 / (eps * eps)) * np.log(1.0 - w).imag
    return f, a + (0.5 * eps) * f


def hirota_f_complex(a, b, eps):
    """Literal complex-ratio form of the Hirota f (test oracle).

    Returns the complex value of (2/(i eps^2)) log(num/den); its imaginary
    part measures how exactly the conjugate-pair structure survives floating
    point.
    """
    _require_hirota_eps(eps)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = 0.25 * eps * eps
    num = 1.0 - q * np.exp(-1j * b - 0.5j * eps * a)
    den = 1.0 - q * np.exp(1j * b + 0.5j * eps * a)
    return (2.0 / (1j * eps * eps)) * np.log(num / den)


def _require_hirota_eps(eps):
    if not 0.0 < eps < 2.0:
        raise ValueError(
            f"Hirota scheme needs 0 < eps < 2 (log arguments must stay in the "
            f"right half-plane); got eps = {eps}"
        )


def naive_system() -> Rhs2:
    return Rhs2(
        f=lambda a, b, eps: np.sin(b),
        g=lambda a, b, eps: np.asarray(a) + 0.0,
        eps0=np.inf,
        name="naive",
    )


def hirota_system() -> Rhs2:
    def f(a, b, eps):
        return hirota_rhs(a, b, eps)[0]

    def g(a, b, eps):
        return hirota_rhs(a, b, eps)[1]

    return Rhs2(f=f, g=g, eps0=2.0, name="hirota")


def system_for(scheme: SchemeKind) -> Rhs2:
    return hirota_system() if scheme is SchemeKind.HIROTA else naive_system()


# ---------------------------------------------------------------------------
# angle reconstruction


@dataclass
class PhiField:
    """Angle field on lattice sites, shape (n+1) x (n+1)."""

    phi: np.ndarray
    domain: LatticeDomain2
    scheme: SchemeKind


def reconstruct_phi(fields: EdgeField2, phi00: float, scheme: SchemeKind) -> PhiField:
    """Recover the angle phi from solved (a, b) fields.

    Hirota: phi(x+eps, 0) = phi(x, 0) + eps*a(x, 0) seeds the bottom row from
    phi00, then phi(x, y+eps) = 2 b(x, y) - phi(x, y) fills upward (b is the
    vertical-edge midpoint value).  The relation a = delta_x phi then holds on
    every row as a consequence of the solved system.

    Naive: b IS phi at its sites, so rows j <= n-1 are read off directly;
    phi00 must agree with b(0,0).  The top row is only reachable through
    a = delta_x phi, whose seed phi(0, n) no field value constrains; it is
    fixed by linear extension in y, which leaves every defining-relation and
    second-order residual unchanged.
    """
    n = fields.domain.n
    eps = fields.domain.eps
    a, b = fields.a, fields.b
    phi = np.empty((n + 1, n + 1), dtype=float)
    if scheme is SchemeKind.HIROTA:
        phi[0, 0] = phi00
        for i in range(n):
            phi[i + 1, 0] = phi[i, 0] + eps * a[i, 0]
        for j in range(n):
            phi[:, j + 1] = 2.0 * b[:, j] - phi[:, j]
    else:
        if abs(phi00 - b[0, 0]) > 1e-12 * max(1.0, abs(b[0, 0])):
            raise ValueError(
                f"naive scheme identifies phi with b: phi00 = {phi00} "
                f"contradicts b(0,0) = {b[0, 0]}"
            )
        phi[:, :n] = b
        if n >= 2:
            phi[0, n] = 2.0 * phi[0, n - 1] - phi[0, n - 2]
        else:
            phi[0, n] = phi[0, n - 1]
        for i in range(n):
            phi[i + 1, n] = phi[i, n] + eps * a[i, n]
    return PhiField(phi, fields.domain, scheme)


def phi_defining_residual(fields: EdgeField2, field: PhiField) -> float:
    """Max residual of the change-of-variables relations defining (a, b)."""
    eps = fields.domain.eps
    phi = field.phi
    da = (phi[1:, :] - phi[:-1, :]) / eps - fields.a
    if field.scheme is SchemeKind.HIROTA:
        db = 0.5 * (phi[:, 1:] + phi[:, :-1]) - fields.b
    else:
        db = phi[:, :-1] - fields.b
    return max(float(np.max(np.abs(da))), float(np.max(np.abs(db))))


def second_order_residual(field: PhiField) -> float:
    """Residual of the one-field second-order form on every elementary square.

    Naive: delta_x delta_y phi - sin phi evaluated at the lower-left corner.
    Hirota: sin((phi11-phi10-phi01+phi00)/4) - (eps^2/4) sin((sum of four)/4).
    """
    eps = field.domain.eps
    p = field.phi
    p00 = p[:-1, :-1]
    p10 = p[1:, :-1]
    p01 = p[:-1, 1:]
    p11 = p[1:, 1:]
    if field.scheme is SchemeKind.HIROTA:
        res = np.sin(0.25 * (p11 - p10 - p01 + p00)) - (0.25 * eps * eps) * np.sin(
            0.25 * (p11 + p10 + p01 + p00)
        )
    else:
        res = (p11 - p10 - p01 + p00) / (eps * eps) - np.sin(p00)
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# Backlund transformation right-hand sides


def backlund_rhs_continuous(a, b, theta, alpha):
    """Continuous Backlund system: theta_x = u, theta_y = v, and the field
    increments (xi, eta) = (a~ - a, b~ - b)."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    u = -np.asarray(a) + alpha * np.sin(theta)
    v = np.sin(np.asarray(b) + theta) / alpha
    xi = 2.0 * u
    eta = 2.0 * np.asarray(theta)
    return u, v, xi, eta


def backlund_u(a, theta, alpha, eps):
    """Discrete Backlund x-derivative of theta.

    u = -a + (1/(i eps)) log[(1 - (eps alpha/2) e^{-i theta + i eps a/2})
                             / (1 - (eps alpha/2) e^{+i theta - i eps a/2})]
      = -a - (2/eps) Im log(1 - w),  w = (eps alpha/2) e^{i(theta - eps a/2)}.
    """
    w = (0.5 * eps * alpha) * np.exp(
        1j * (np.asarray(theta) - 0.5 * eps * np.asarray(a))
    )
    return -np.asarray(a) - (2.0 / eps) * np.log(1.0 - w).imag


def backlund_v(b, theta, alpha, eps):
    """Discrete Backlund y-derivative of theta.

    v = (1/(i eps)) log[(1 - (eps/(2 alpha)) e^{-i(b + theta)})
                        / (1 - (eps/(2 alpha)) e^{+i(b + theta)})]
      = -(2/eps) Im log(1 - w),  w = (eps/(2 alpha)) e^{i(b + theta)}.
    """
    w = (0.5 * eps / alpha) * np.exp(1j * (np.asarray(b) + np.asarray(theta)))
    return -(2.0 / eps) * np.log(1.0 - w).imag


def backlund_rhs_discrete(a, b, theta, alpha, eps):
    """Discrete Backlund right-hand sides (u, v, xi, eta).

    xi = a~ - a = 2u and eta = b~ - b = 2 theta + eps v.  Requires
    eps*alpha/2 < 1 and eps/(2 alpha) < 1 so both logs stay in the right
    half-plane.
    """
    _require_backlund_eps(alpha, eps)
    u = backlund_u(a, theta, alpha, eps)
    v = backlund_v(b, theta, alpha, eps)
    xi = 2.0 * u
    eta = 2.0 * np.asarray(theta) + eps * v
    return u, v, xi, eta


def _require_backlund_eps(alpha, eps):
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if not (eps * alpha < 2.0 and eps < 2.0 * alpha):
        raise ValueError(
            f"Backlund parameters out of range: need eps*alpha/2 < 1 and "
            f"eps/(2*alpha) < 1, got eps = {eps}, alpha = {alpha}"
        )


def backlund_compat_residual_continuous(samples: np.ndarray, alpha: float) -> float:
    """Closure residual of the continuous Backlund extension of (sin b, a).

    Evaluates the three compatibility identities for the coupled system
    (a_y, b_x, theta_x, theta_y, a~ - a, b~ - b) using closed-form partial
    derivatives of the sine-Gordon instance; returns the max absolute defect.
    """
    s = np.asarray(samples, dtype=float)
    a, b, th = s[..., 0], s[..., 1], s[..., 2]
    u, v, xi, eta = backlund_rhs_continuous(a, b, th, alpha)
    f = np.sin(b)
    g = a
    cos_bt = np.cos(b + th)
    # d/dx theta_y = d/dy theta_x
    id1 = (-1.0) * f + (alpha * np.cos(th)) * v - (cos_bt / alpha) * g - (
        cos_bt / alpha
    ) * u
    # d/dy (a~ - a) closes against f evaluated on the transformed fields
    id2 = (-2.0) * f + (2.0 * alpha * np.cos(th)) * v - (np.sin(b + eta) - f)
    # d/dx (b~ - b) closes against g on the transformed fields
    id3 = 2.0 * u - ((a + xi) - a)
    return float(
        max(np.max(np.abs(id1)), np.max(np.abs(id2)), np.max(np.abs(id3)))
    )


# ---------------------------------------------------------------------------
# the three-dimensional (Backlund-extended) system


@dataclass(frozen=True)
class Rhs3:
    """Six right-hand sides of the Backlund-extended system.

    f, g drive (a, b) within a layer; u, v propagate theta in x and y; xi,
    eta advance (a, b) to the next layer (z-step 1).  All must be
    numpy-vectorized.  eps0 bounds the admissible lattice step.
    """

    f: Callable
    g: Callable
    u: Callable
    v: Callable
    xi: Callable
    eta: Callable
    eps0: float
    name: str
    alpha: float


def hirota_backlund_system(alpha: float) -> Rhs3:
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    base = hirota_system()
    return Rhs3(
        f=base.f,
        g=base.g,
        u=lambda a, th, eps: backlund_u(a, th, alpha, eps),
        v=lambda b, th, eps: backlund_v(b, th, alpha, eps),
        xi=lambda a, th, eps: 2.0 * backlund_u(a, th, alpha, eps),
        eta=lambda b, th, eps: 2.0 * np.asarray(th)
        + eps * backlund_v(b, th, alpha, eps),
        eps0=min(2.0, 2.0 / alpha, 2.0 * alpha),
        name="hirota+backlund",
        alpha=alpha,
    )


def naive_backlund_system(alpha: float) -> Rhs3:
    """Naive in-layer scheme with the discrete Backlund sides attached.

    This combination is NOT compatible; it exists so the failure is
    measurable (check_compatibility_3d returns a residual far above roundoff).
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    base = naive_system()
    return Rhs3(
        f=base.f,
        g=base.g,
        u=lambda a, th, eps: backlund_u(a, th, alpha, eps),
        v=lambda b, th, eps: backlund_v(b, th, alpha, eps),
        xi=lambda a, th, eps: 2.0 * backlund_u(a, th, alpha, eps),
        eta=lambda b, th, eps: 2.0 * np.asarray(th)
        + eps * backlund_v(b, th, alpha, eps),
        eps0=min(2.0 / alpha, 2.0 * alpha),
        name="naive+backlund",
        alpha=alpha,
    )


@dataclass
class LayeredField3:
    """Solution of the layered system: (a, b) on layers 0..R, theta on 0..R-1.

    cross_residual is the maximum observed disagreement between the two
    admissible propagation paths for theta (compatibility in action).
    """

    a: list
    b: list
    theta: list
    domain: LatticeDomain2
    cross_residual: float

    @property
    def layers(self) -> int:
        return len(self.a) - 1


def _propagate_theta(rhs6: Rhs3, a: np.ndarray, b: np.ndarray, theta00: float,
                     eps: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Propagate theta over one layer along both admissible paths.

    Canonical path (returned first): up the y-axis by v, then across rows
    by u; this matches the smallest-direction rule of the general solver.
    Alternative: across the x-axis by u, then up columns by v.
    """
    th = np.empty((n + 1, n + 1), dtype=float)
    th[0, 0] = theta00
    for j in range(n):
        th[0, j + 1] = th[0, j] + eps * rhs6.v(b[0, j], th[0, j], eps)
    for i in range(n):
        th[i + 1, :] = th[i, :] + eps * rhs6.u(a[i, :], th[i, :], eps)

    alt = np.empty_like(th)
    alt[0, 0] = theta00
    for i in range(n):
        alt[i + 1, 0] = alt[i, 0] + eps * rhs6.u(a[i, 0], alt[i, 0], eps)
    for j in range(n):
        alt[:, j + 1] = alt[:, j] + eps * rhs6.v(b[:, j], alt[:, j], eps)
    return th, alt


def solve_goursat_3d(
    rhs6: Rhs3,
    data: GoursatData2,
    theta0: Sequence[float],
    dom: LatticeDomain2,
    layers: int | None = None,
) -> LayeredField3:
    """Solve the Backlund-extended system on layers z = 0..R, R = len(theta0).

    Layer 0 solves the plain 2D Goursat problem.  On each layer, theta
    propagates from theta0[z] at the origin; the next layer's Goursat data is
    advanced through (xi, eta) on the data axes, and the layer interior is
    filled by the in-layer sweep.  Every value has a single defining
    assignment; the redundant equations hold to roundoff by compatibility,
    which is monitored through the theta cross-propagation residual (abort
    above 1e-9).
    """
    R = len(theta0)
    if layers is not None and layers != R:
        raise ValueError(f"layers = {layers} does not match len(theta0) = {R}")
    n, eps = dom.n, dom.eps
    rhs2 = Rhs2(f=rhs6.f, g=rhs6.g, eps0=rhs6.eps0, name=rhs6.name)
    layer0 = solve_goursat_2d(rhs2, data, dom)
    a_layers = [layer0.a]
    b_layers = [layer0.b]
    th_layers: list[np.ndarray] = []
    worst = 0.0
    for z in range(R):
        a, b = a_layers[z], b_layers[z]
        th, alt = _propagate_theta(rhs6, a, b, float(theta0[z]), eps, n)
        mism = np.abs(th - alt)
        worst = max(worst, float(mism.max()))
        if worst > 1e-9:
            i, j = np.unravel_index(int(mism.argmax()), mism.shape)
            raise CompatibilityError(
                float(mism.max()), (i * eps, j * eps),
                detail=f"theta cross-propagation, layer {z}",
            )
        if not np.isfinite(th).all():
            i, j = np.unravel_index(int(np.flatnonzero(~np.isfinite(th))[0]), th.shape)
            raise BlowUpError("theta", (i * eps, j * eps))
        th_layers.append(th)
        a0_next = a[:, 0] + rhs6.xi(a[:, 0], th[:n, 0], eps)
        b0_next = b[0, :] + rhs6.eta(b[0, :], th[0, :n], eps)
        nxt = solve_goursat_2d(rhs2, GoursatData2(a0_next, b0_next), dom)
        a_layers.append(nxt.a)
        b_layers.append(nxt.b)
    return LayeredField3(a_layers, b_layers, th_layers, dom, worst)


def check_compatibility_3d(rhs6: Rhs3, samples: np.ndarray, eps: float) -> float:
    """Max defect of the three discrete closure identities at the samples.

    samples has shape (m, 3) holding (a, b, theta) triples.  The identities
    compare the two orders of advancing each field around an elementary
    lattice square in the three direction pairs; they hold to roundoff
    exactly when the six right-hand sides are mutually compatible.
    """
    s = np.asarray(samples, dtype=float)
    a, b, th = s[..., 0], s[..., 1], s[..., 2]
    f = rhs6.f(a, b, eps)
    g = rhs6.g(a, b, eps)
    u = rhs6.u(a, th, eps)
    v = rhs6.v(b, th, eps)
    xi = rhs6.xi(a, th, eps)
    eta = rhs6.eta(b, th, eps)
    id1 = (rhs6.u(a + eps * f, th + eps * v, eps) - u) - (
        rhs6.v(b + eps * g, th + eps * u, eps) - v
    )
    id2 = (rhs6.xi(a + eps * f, th + eps * v, eps) - xi) - eps * (
        rhs6.f(a + xi, b + eta, eps) - f
    )
    id3 = (rhs6.eta(b + eps * g, th + eps * u, eps) - eta) - eps * (
        rhs6.g(a + xi, b + eta, eps) - g
    )
    return float(
        max(np.max(np.abs(id1)), np.max(np.abs(id2)), np.max(np.abs(id3)))
    )


# ---------------------------------------------------------------------------
# Backlund chain parameters


@dataclass(frozen=True)
class BacklundParam:
    """One Backlund step: transformation parameter and origin angle."""

    alpha: float
    theta0: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")


def load_backlund_chain(path) -> list[BacklundParam]:
    """Read a chain from a text file: one 'alpha theta0' pair per line.

    Blank lines and lines starting with # are skipped.
    """
    chain = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{ln}: expected 'alpha theta0', got {line!r}")
            chain.append(BacklundParam(float(parts[0]), float(parts[1])))
    return chain
