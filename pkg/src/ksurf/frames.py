"""Lax representation, frames, and the Sym formula.

Transition matrices (lambda real and positive):

    U(a; lam)       = (i/2) [[a, -lam], [-lam, -a]]
    V(b; lam)       = (i/2) lam^-1 [[0, e^{ib}], [e^{-ib}, 0]]
    Ud(a; lam, eps) = (1 + eps^2 lam^2 / 4)^{-1/2}
                      [[e^{i eps a/2}, -i eps lam/2], [-i eps lam/2, e^{-i eps a/2}]]
    Vd(b; lam, eps) = (1 + eps^2 lam^-2 / 4)^{-1/2}
                      [[1, (i eps/(2 lam)) e^{ib}], [(i eps/(2 lam)) e^{-ib}, 1]]

The discrete zero-curvature condition Ud(x, y+eps) Vd(x, y) =
Vd(x+eps, y) Ud(x, y) holds to roundoff exactly on Hirota solutions; frame
propagation refuses to run when it fails.  Frames carry the lambda-derivative
dPsi alongside Psi (joint product-rule recursion), so the Sym formula needs
no numerical differentiation.  propagate_frame output is unitary; frames
dressed by backlund_W are scalar multiples of unitary matrices, which is why
sym_point inverts by adjugate rather than conjugate transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .goursat import EdgeField2, LatticeDomain2
from .linalg2 import IDENTITY2, frobenius, inv2, mat_mul, su2_project


class ZeroCurvatureError(RuntimeError):
    """Fields fail the discrete zero-curvature condition."""

    def __init__(self, residual: float, cell: tuple[float, float], lam: float):
        self.residual = residual
        self.cell = cell
        self.lam = lam
        super().__init__(
            f"zero-curvature residual {residual:.3e} at cell "
            f"(x={cell[0]:.6g}, y={cell[1]:.6g}), lambda={lam:.6g}; "
            f"only integrable-scheme fields admit a frame"
        )


# ---------------------------------------------------------------------------
# transition matrices (all builders accept scalar or array a/b and return
# matrices stacked over the input shape)


def _mat22(m00, m01, m10, m11, shape) -> np.ndarray:
    out = np.empty(shape + (2, 2), dtype=complex)
    out[..., 0, 0] = m00
    out[..., 0, 1] = m01
    out[..., 1, 0] = m10
    out[..., 1, 1] = m11
    return out


def _require_lam(lam: float) -> None:
    if lam == 0 or not np.isfinite(lam):
        raise ValueError("spectral parameter lambda must be nonzero and finite")


def lax_U_cont(a, lam: float) -> np.ndarray:
    _require_lam(lam)
    a = np.asarray(a, dtype=float)
    return _mat22(0.5j * a, -0.5j * lam, -0.5j * lam, -0.5j * a, a.shape)


def lax_V_cont(b, lam: float) -> np.ndarray:
    _require_lam(lam)
    b = np.asarray(b, dtype=float)
    e = np.exp(1j * b)
    c = 0.5j / lam
    return _mat22(np.zeros_like(b), c * e, c * np.conj(e), np.zeros_like(b), b.shape)


def lax_U_disc(a, lam: float, eps: float) -> np.ndarray:
    _require_lam(lam)
    a = np.asarray(a, dtype=float)
    p = (1.0 + 0.25 * eps * eps * lam * lam) ** -0.5
    e = np.exp(0.5j * eps * a)
    off = -0.5j * eps * lam
    return p * _mat22(e, off, off, np.conj(e), a.shape)


def lax_V_disc(b, lam: float, eps: float) -> np.ndarray:
    _require_lam(lam)
    b = np.asarray(b, dtype=float)
    q = (1.0 + 0.25 * eps * eps / (lam * lam)) ** -0.5
    c = 0.5j * eps / lam
    e = np.exp(1j * b)
    return q * _mat22(np.ones_like(b), c * e, c * np.conj(e), np.ones_like(b), b.shape)


def lax_dlambda(kind: str, value, lam: float, eps: float | None = None) -> np.ndarray:
    """Closed-form lambda-derivative of a transition matrix.

    kind is one of 'Ucont', 'Vcont', 'Udisc', 'Vdisc'; value is the attached
    field value (a or b).  The discrete derivatives differentiate both the
    normalizing prefactor and the matrix entries.
    """
    _require_lam(lam)
    v = np.asarray(value, dtype=float)
    if kind == "Ucont":
        out = np.zeros(v.shape + (2, 2), dtype=complex)
        out[..., 0, 1] = -0.5j
        out[..., 1, 0] = -0.5j
        return out
    if kind == "Vcont":
        e = np.exp(1j * v)
        c = -0.5j / (lam * lam)
        return _mat22(np.zeros_like(v), c * e, c * np.conj(e), np.zeros_like(v), v.shape)
    if eps is None:
        raise ValueError("discrete kinds need eps")
    if kind == "Udisc":
        s = 1.0 + 0.25 * eps * eps * lam * lam
        p = s**-0.5
        dp = -(0.25 * eps * eps * lam) * s**-1.5
        e = np.exp(0.5j * eps * v)
        off = -0.5j * eps * lam
        m = _mat22(e, off, off, np.conj(e), v.shape)
        dm = np.zeros(v.shape + (2, 2), dtype=complex)
        dm[..., 0, 1] = -0.5j * eps
        dm[..., 1, 0] = -0.5j * eps
        return dp * m + p * dm
    if kind == "Vdisc":
        s = 1.0 + 0.25 * eps * eps / (lam * lam)
        q = s**-0.5
        dq = (0.25 * eps * eps / lam**3) * s**-1.5
        c = 0.5j * eps / lam
        dc = -0.5j * eps / (lam * lam)
        e = np.exp(1j * v)
        m = _mat22(np.ones_like(v), c * e, c * np.conj(e), np.ones_like(v), v.shape)
        dm = _mat22(np.zeros_like(v), dc * e, dc * np.conj(e), np.zeros_like(v), v.shape)
        return dq * m + q * dm
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# zero curvature


def zero_curvature_residual(fields: EdgeField2, lam: float):
    """Max Frobenius residual of Ud(x,y+eps) Vd(x,y) - Vd(x+eps,y) Ud(x,y).

    Returns (residual, cell) with cell the lattice coordinates (x, y) of the
    worst elementary square.
    """
    n, eps = fields.domain.n, fields.domain.eps
    a, b = fields.a, fields.b
    worst = 0.0
    worst_cell = (0.0, 0.0)
    u_low = lax_U_disc(a[:, 0], lam, eps)
    for j in range(n):
        u_high = lax_U_disc(a[:, j + 1], lam, eps)
        v_left = lax_V_disc(b[:n, j], lam, eps)
        v_right = lax_V_disc(b[1 : n + 1, j], lam, eps)
        res = frobenius(mat_mul(u_high, v_left) - mat_mul(v_right, u_low))
        i = int(res.argmax())
        if res[i] > worst:
            worst = float(res[i])
            worst_cell = (i * eps, j * eps)
        u_low = u_high
    return worst, worst_cell


# ---------------------------------------------------------------------------
# frames


@dataclass
class FrameSample:
    """Frame value and its lambda-derivative at one lattice site."""

    psi: np.ndarray
    dpsi: np.ndarray


@dataclass
class FrameField:
    """Frame and lambda-derivative on all sites, shape (n+1, n+1, 2, 2).

    Frames from propagate_frame are unitary with unit determinant;
    Backlund-dressed frames are scalar multiples of unitary matrices.
    """

    psi: np.ndarray
    dpsi: np.ndarray
    lam: float
    domain: LatticeDomain2

    def sample(self, i: int, j: int) -> FrameSample:
        return FrameSample(self.psi[i, j], self.dpsi[i, j])


def propagate_frame(
    fields: EdgeField2,
    lam: float,
    order: str = "xy",
    check: bool = True,
    zcc_tol: float = 1e-10,
) -> FrameField:
    """Integrate the frame equations from Psi(0,0) = I, dPsi(0,0) = 0.

    order 'xy' scans the bottom row by Ud steps and then fills rows upward by
    Vd steps; 'yx' scans the left column first.  Zero curvature makes the two
    agree to roundoff, and is verified up front (set check=False only for
    fields already validated).
    """
    if lam == 0 or not np.isfinite(lam):
        raise ValueError(f"lambda must be real, nonzero, and finite, got {lam}")
    if check:
        res, cell = zero_curvature_residual(fields, lam)
        if res > zcc_tol:
            raise ZeroCurvatureError(res, cell, lam)
    n, eps = fields.domain.n, fields.domain.eps
    a, b = fields.a, fields.b
    psi = np.empty((n + 1, n + 1, 2, 2), dtype=complex)
    dpsi = np.empty_like(psi)
    psi[0, 0] = IDENTITY2
    dpsi[0, 0] = 0.0
    if order == "xy":
        u_row = lax_U_disc(a[:, 0], lam, eps)
        du_row = lax_dlambda("Udisc", a[:, 0], lam, eps)
        for i in range(n):
            psi[i + 1, 0] = u_row[i] @ psi[i, 0]
            dpsi[i + 1, 0] = du_row[i] @ psi[i, 0] + u_row[i] @ dpsi[i, 0]
        for j in range(n):
            v_col = lax_V_disc(b[:, j], lam, eps)
            dv_col = lax_dlambda("Vdisc", b[:, j], lam, eps)
            psi[:, j + 1] = mat_mul(v_col, psi[:, j])
            dpsi[:, j + 1] = mat_mul(dv_col, psi[:, j]) + mat_mul(v_col, dpsi[:, j])
    elif order == "yx":
        v_col = lax_V_disc(b[0, :], lam, eps)
        dv_col = lax_dlambda("Vdisc", b[0, :], lam, eps)
        for j in range(n):
            psi[0, j + 1] = v_col[j] @ psi[0, j]
            dpsi[0, j + 1] = dv_col[j] @ psi[0, j] + v_col[j] @ dpsi[0, j]
        for i in range(n):
            u_row = lax_U_disc(a[i, :], lam, eps)
            du_row = lax_dlambda("Udisc", a[i, :], lam, eps)
            psi[i + 1, :] = mat_mul(u_row, psi[i, :])
            dpsi[i + 1, :] = mat_mul(du_row, psi[i, :]) + mat_mul(u_row, dpsi[i, :])
    else:
        raise ValueError(f"order must be 'xy' or 'yx', got {order!r}")
    return FrameField(psi, dpsi, lam, fields.domain)


def frame_rows(fields: EdgeField2, lam: float):
    """Yield (psi_row, dpsi_row) for rows j = 0..n without storing the field.

    Streaming equivalent of propagate_frame(order='xy'): each yielded pair
    has shape (n+1, 2, 2) and is bitwise identical to the corresponding row
    of the full propagation.  No zero-curvature check is performed here.
    """
    n, eps = fields.domain.n, fields.domain.eps
    a, b = fields.a, fields.b
    psi = np.empty((n + 1, 2, 2), dtype=complex)
    dpsi = np.empty_like(psi)
    psi[0] = IDENTITY2
    dpsi[0] = 0.0
    u_row = lax_U_disc(a[:, 0], lam, eps)
    du_row = lax_dlambda("Udisc", a[:, 0], lam, eps)
    for i in range(n):
        psi[i + 1] = u_row[i] @ psi[i]
        dpsi[i + 1] = du_row[i] @ psi[i] + u_row[i] @ dpsi[i]
    yield psi, dpsi
    for j in range(n):
        v_col = lax_V_disc(b[:, j], lam, eps)
        dv_col = lax_dlambda("Vdisc", b[:, j], lam, eps)
        dpsi = mat_mul(dv_col, psi) + mat_mul(v_col, dpsi)
        psi = mat_mul(v_col, psi)
        yield psi, dpsi


# ---------------------------------------------------------------------------
# Sym formula


def sym_matrices(psi: np.ndarray, dpsi: np.ndarray, lam: float) -> np.ndarray:
    """Immersion points for stacked frame samples, shape (..., 3).

    The Sym matrix S = 2 lam Psi^-1 dPsi is anti-Hermitian traceless up to
    roundoff (for dressed frames, up to a removable trace part); the surface
    point is S/2 expressed in the (i/2) sigma basis, equivalently the
    coordinates of S under the identification x -> i (x . sigma).  With this
    normalization lattice edges have length eps/(1 + eps^2/4).
    """
    return su2_project(lam * mat_mul(inv2(psi), dpsi))


def sym_point(sample: FrameSample, lam: float) -> np.ndarray:
    """Immersion point of one frame sample via the Sym formula."""
    return sym_matrices(sample.psi, sample.dpsi, lam)


# ---------------------------------------------------------------------------
# Backlund dressing


def backlund_W(theta, alpha: float, lam: float) -> np.ndarray:
    """Dressing matrix W = [[alpha e^{i theta}, -i lam], [-i lam, alpha e^{-i theta}]].

    det W = alpha^2 + lam^2 and W^dagger W = (alpha^2 + lam^2) I, so W is a
    positive scalar multiple of a unitary matrix.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    th = np.asarray(theta, dtype=float)
    e = alpha * np.exp(1j * th)
    off = np.broadcast_to(-1j * lam, th.shape)
    return _mat22(e, off, off, np.conj(e), th.shape)


def backlund_W_dlambda(theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    out = np.zeros(th.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = -1j
    out[..., 1, 0] = -1j
    return out


def transform_frame(frame: FrameField, theta_field: np.ndarray, alpha: float) -> FrameField:
    """Dress a frame by W(theta): Psi~ = W Psi, dPsi~ = W' Psi + W dPsi.

    theta_field holds the auxiliary angle on all (n+1)^2 sites of the layer.
    The result satisfies the frame recursion of the transformed fields.
    """
    th = np.asarray(theta_field, dtype=float)
    if th.shape != frame.psi.shape[:2]:
        raise ValueError(
            f"theta shape {th.shape} does not match frame sites {frame.psi.shape[:2]}"
        )
    w = backlund_W(th, alpha, frame.lam)
    dw = backlund_W_dlambda(th)
    psi = mat_mul(w, frame.psi)
    dpsi = mat_mul(dw, frame.psi) + mat_mul(w, frame.dpsi)
    return FrameField(psi, dpsi, frame.lam, frame.domain)
