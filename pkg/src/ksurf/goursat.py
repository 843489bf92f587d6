"""Goursat problems for first-order hyperbolic systems on a square lattice.

The domain is the square [0, r]^2 sampled with step eps (r/eps must be an
integer n).  Two real fields live on lattice edges:

    a(x, y)  on the horizontal edge from (x, y) to (x+eps, y),
    b(x, y)  on the vertical edge from (x, y) to (x, y+eps),

stored as arrays of shape (n, n+1) and (n+1, n): index (i, j) is the site
(i*eps, j*eps).  The system

    a(x, y+eps) = a(x, y) + eps * f(a(x, y), b(x, y))
    b(x+eps, y) = b(x, y) + eps * g(a(x, y), b(x, y))

with data a(x, 0) = a0(x), b(0, y) = b0(y) has exactly one solution, filled in
by a single sweep.  Values on one anti-diagonal i+j = d depend only on the
previous anti-diagonal, so the sweep is vectorized along anti-diagonals; each
value is assigned exactly once, making the result identical (bitwise) to the
naive lexicographic double loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class BlowUpError(RuntimeError):
    """A sweep produced a non-finite value; carries the first offending site."""

    def __init__(self, field_name: str, site: tuple):
        self.field_name = field_name
        self.site = site
        super().__init__(
            f"non-finite value in field {field_name!r} at site "
            + "(" + ", ".join(f"{c:.6g}" for c in site) + ")"
        )


class CompatibilityError(RuntimeError):
    """Redundant propagation paths disagreed beyond tolerance.

    Raised when the defining assignment of a lattice value and an alternative
    admissible one differ by more than the solver's bound, i.e. the supplied
    right-hand sides are not mutually compatible.
    """

    def __init__(self, mismatch: float, site: tuple, detail: str = ""):
        self.mismatch = mismatch
        self.site = site
        where = "(" + ", ".join(f"{c:.6g}" for c in site) + ")"
        msg = (
            f"incompatible right-hand sides: propagation mismatch "
            f"{mismatch:.3e} at site {where}"
        )
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class LatticeDomain2:
    """Square lattice domain: sites (i*eps, j*eps), 0 <= i, j <= n = r/eps."""

    r: float
    eps: float
    n: int = field(init=False)

    def __post_init__(self):
        if self.r <= 0 or self.eps <= 0:
            raise ValueError("domain requires r > 0 and eps > 0")
        ratio = self.r / self.eps
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"r/eps = {ratio!r} is not a positive integer")
        object.__setattr__(self, "n", n)

    @classmethod
    def from_k(cls, r: float, k: int) -> "LatticeDomain2":
        """Domain with dyadic step eps = 2**-k."""
        return cls(r, 2.0 ** -k)

    def sites_x(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.eps


@dataclass(frozen=True)
class Rhs2:
    """Right-hand sides of the two-field system.

    f and g take (a, b, eps) and must be numpy-vectorized (they are called on
    whole anti-diagonals).  eps0 is the supremum of admissible steps: the
    functions are defined and finite for 0 < eps < eps0 on real inputs.
    """

    f: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    g: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    eps0: float
    name: str


@dataclass(frozen=True)
class GoursatData2:
    """Characteristic data: a0 on the x-axis, b0 on the y-axis.

    Each entry is either a callable on [0, r] or a tabulated array with
    exactly n entries (values at 0, eps, ..., (n-1)*eps).
    """

    a0: Callable[[float], float] | np.ndarray | Sequence[float]
    b0: Callable[[float], float] | np.ndarray | Sequence[float]

    def sample(self, dom: LatticeDomain2) -> tuple[np.ndarray, np.ndarray]:
        xs = np.arange(dom.n) * dom.eps
        return _sample_axis(self.a0, xs, "a0"), _sample_axis(self.b0, xs, "b0")


def _sample_axis(data, xs: np.ndarray, label: str) -> np.ndarray:
    if callable(data):
        try:
            vals = np.asarray(data(xs), dtype=float)
        except (TypeError, ValueError):
            # scalar-only callable (math.sin and friends)
            vals = np.asarray([data(x) for x in xs], dtype=float)
        if vals.ndim == 0:
            return np.full(xs.shape, float(vals))
        if vals.shape != xs.shape:
            vals = np.asarray([data(x) for x in xs], dtype=float)
        return vals
    vals = np.asarray(data, dtype=float)
    if vals.shape != xs.shape:
        raise ValueError(
            f"tabulated {label} has {vals.size} samples, expected {xs.size}"
        )
    return vals.copy()


@dataclass
class EdgeField2:
    """Solution pair on the edge lattice: a is (n, n+1), b is (n+1, n)."""

    a: np.ndarray
    b: np.ndarray
    domain: LatticeDomain2

    def __post_init__(self):
        n = self.domain.n
        if self.a.shape != (n, n + 1) or self.b.shape != (n + 1, n):
            raise ValueError(
                f"field shapes {self.a.shape}, {self.b.shape} do not match "
                f"n = {n}: expected {(n, n + 1)} and {(n + 1, n)}"
            )


def delta_x(p: np.ndarray, eps: float) -> np.ndarray:
    """Forward difference quotient in the first (x) index."""
    return (p[1:, :] - p[:-1, :]) / eps


def delta_y(p: np.ndarray, eps: float) -> np.ndarray:
    """Forward difference quotient in the second (y) index."""
    return (p[:, 1:] - p[:, :-1]) / eps


def solve_goursat_2d(rhs: Rhs2, data: GoursatData2, dom: LatticeDomain2) -> EdgeField2:
    """Solve the discrete Goursat problem by the anti-diagonal sweep.

    Aborts with BlowUpError naming the first offending site if a non-finite
    value appears (the systems here are nonlinear and can blow up for large
    data on large domains).
    """
    if dom.eps >= rhs.eps0:
        raise ValueError(
            f"step eps = {dom.eps} is not admissible for rhs {rhs.name!r} "
            f"(requires eps < {rhs.eps0})"
        )
    n = dom.n
    eps = dom.eps
    a = np.empty((n, n + 1), dtype=float)
    b = np.empty((n + 1, n), dtype=float)
    a_row, b_col = data.sample(dom)
    a[:, 0] = a_row
    b[0, :] = b_col
    if not (np.isfinite(a_row).all() and np.isfinite(b_col).all()):
        raise BlowUpError("data", (0.0, 0.0))

    for d in range(2 * n - 1):
        ii = np.arange(max(0, d - n + 1), min(d, n - 1) + 1)
        jj = d - ii
        av = a[ii, jj]
        bv = b[ii, jj]
        a_new = av + eps * rhs.f(av, bv, eps)
        b_new = bv + eps * rhs.g(av, bv, eps)
        if not np.isfinite(a_new).all():
            k = int(np.flatnonzero(~np.isfinite(a_new))[0])
            raise BlowUpError("a", (ii[k] * eps, (jj[k] + 1) * eps))
        if not np.isfinite(b_new).all():
            k = int(np.flatnonzero(~np.isfinite(b_new))[0])
            raise BlowUpError("b", ((ii[k] + 1) * eps, jj[k] * eps))
        a[ii, jj + 1] = a_new
        b[ii + 1, jj] = b_new

    return EdgeField2(a, b, dom)


def discrete_ck_norm(p: np.ndarray, order: int, dom: LatticeDomain2) -> float:
    """Discrete C^K norm: max over k+l <= K of sup |delta_x^k delta_y^l p|.

    The sup runs over the domain shrunk by K = order steps in each direction,
    so every quotient of total order up to K is evaluated on a common set of
    sites.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if order * dom.eps > dom.r * (1 + 1e-12):
        raise ValueError(f"order {order} shrinks the domain below zero extent")
    eps = dom.eps
    s0, s1 = p.shape
    if order >= s0 or order >= s1:
        raise ValueError(f"order {order} too large for array of shape {p.shape}")
    best = 0.0
    # quotients[l] holds delta_x^k delta_y^l p for the current k
    quotients = [p]
    for _ in range(order):
        quotients.append(delta_y(quotients[-1], eps))
    for k in range(order + 1):
        for l in range(order + 1 - k):
            block = quotients[l][: s0 - order, : s1 - order]
            if block.size:
                best = max(best, float(np.max(np.abs(block))))
        if k < order:
            quotients = [delta_x(q, eps) for q in quotients[: order - k]]
    return best


def sup_error(p: np.ndarray, eps_p: float, q: np.ndarray, eps_q: float) -> float:
    """Sup-norm distance between grid functions on nested grids.

    p lives on the coarser grid (step eps_p), q on the finer one; eps_p must
    be an integer multiple of eps_q.  Compared at coincident sites, on the
    index range where both arrays are defined.
    """
    ratio = eps_p / eps_q
    s = round(ratio)
    if s < 1 or abs(ratio - s) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"grids are not nested: eps_p/eps_q = {ratio!r}")
    n0 = min(p.shape[0], (q.shape[0] - 1) // s + 1)
    n1 = min(p.shape[1], (q.shape[1] - 1) // s + 1)
    if n0 == 0 or n1 == 0:
        raise ValueError("grids share no sites")
    diff = p[:n0, :n1] - q[: n0 * s : s, : n1 * s : s]
    return float(np.max(np.abs(diff)))


def save_field_csv(path, p: np.ndarray, dom: LatticeDomain2) -> None:
    """Write one grid field as CSV: metadata line, header, then i,j,value."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# eps={dom.eps:.17g} r={dom.r:.17g}\n")
        fh.write("i,j,value\n")
        for i in range(p.shape[0]):
            row = p[i]
            fh.writelines(
                f"{i},{j},{row[j]:.17g}\n" for j in range(p.shape[1])
            )


def load_field_csv(path) -> tuple[np.ndarray, float, float]:
    """Read a field written by save_field_csv; returns (array, eps, r)."""
    with open(path, "r", encoding="ascii") as fh:
        meta = fh.readline().strip()
        if not meta.startswith("# eps="):
            raise ValueError(f"{path}: missing metadata line")
        parts = dict(tok.split("=", 1) for tok in meta[2:].split())
        eps = float(parts["eps"])
        r = float(parts["r"])
        header = fh.readline().strip()
        if header != "i,j,value":
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i_s, j_s, v_s = line.split(",")
            rows.append((int(i_s), int(j_s), float(v_s)))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ni = max(t[0] for t in rows) + 1
    nj = max(t[1] for t in rows) + 1
    out = np.full((ni, nj), np.nan)
    for i, j, v in rows:
        out[i, j] = v
    if np.isnan(out).any():
        raise ValueError(f"{path}: grid has missing entries")
    return out, eps, r


def nested_levels(k_lo: int, k_hi: int) -> list[float]:
    """Dyadic steps 2**-k for k in [k_lo, k_hi], coarse to fine."""
    if k_lo > k_hi:
        raise ValueError("k_lo must be <= k_hi")
    return [2.0 ** -k for k in range(k_lo, k_hi + 1)]
