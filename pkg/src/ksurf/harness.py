"""Convergence experiments on nested lattices.

A sweep solves the same Goursat problem for eps = r/2^k, k = k_min..k_max,
measures each solution against a much finer reference (k_ref >= k_max + 2,
so the reference error is negligible next to the coarse one), and fits a
line to (log eps, log error).  First-order convergence shows up as a slope
near 1.  The reference is compared on common sites only: every coarse
lattice site is a fine lattice site because the lattices are nested.

Measurable quantities: the fields themselves, the reconstructed angle, the
immersed surface, the surface after a Backlund chain, and difference
quotients of the fields up to a chosen order (quotients are formed on each
grid with its own eps and compared at common sites, so the comparison is
between discrete derivatives, not interpolants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .goursat import (
    EdgeField2,
    GoursatData2,
    LatticeDomain2,
    delta_x,
    delta_y,
    solve_goursat_2d,
    sup_error,
)
from .sinegordon import SchemeKind, reconstruct_phi, system_for
from .surfaces import backlund_surface, build_surface

_QUANTITIES = ("fields_ab", "phi", "surface", "surface_bt", "quotients")


def demo_data() -> GoursatData2:
    """Smooth nontrivial Goursat data used across examples and experiments."""
    return GoursatData2(
        a0=lambda x: np.cos(2.0 * x),
        b0=lambda y: 1.0 + np.sin(y),
    )


def zero_data() -> GoursatData2:
    """Zero data: the solution degenerates and all errors sit at roundoff."""
    return GoursatData2(a0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        b0=lambda y: np.zeros_like(np.asarray(y, dtype=float)))


@dataclass(frozen=True)
class SweepConfig:
    """What to sweep: lattice levels, quantity, scheme, spectral parameter.

    quantity is one of 'fields_ab', 'phi', 'surface', 'surface_bt',
    'quotients' ('quotients_order_<m>' is accepted and sets quotient_order).
    """

    r: float = 1.0
    k_min: int = 5
    k_max: int = 10
    k_ref: int = 12
    quantity: str = "fields_ab"
    scheme: SchemeKind = SchemeKind.HIROTA
    lam: float = 1.0
    bt_chain: tuple = ()
    quotient_order: int = 2

    def __post_init__(self):
        q = self.quantity
        if q.startswith("quotients_order_"):
            m = int(q[len("quotients_order_"):])
            object.__setattr__(self, "quantity", "quotients")
            object.__setattr__(self, "quotient_order", m)
            q = "quotients"
        if q not in _QUANTITIES:
            raise ValueError(f"unknown quantity {q!r}; pick one of {_QUANTITIES}")
        if not (1 <= self.k_min <= self.k_max):
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}..{self.k_max}")
        if self.k_ref < self.k_max + 2:
            raise ValueError(
                f"k_ref = {self.k_ref} too close to k_max = {self.k_max}; "
                f"the reference must be at least two levels finer"
            )
        if q == "quotients" and self.quotient_order < 1:
            raise ValueError("quotient_order must be >= 1")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class ConvergenceReport:
    """Sweep result: (eps, error) rows sorted by decreasing eps, plus fit.

    families breaks the error down by component (e.g. per field or per
    quotient order); each entry lists one value per row.  degenerate is set
    when every error is at roundoff (<= 1e-13), in which case no line is fit
    and slope/intercept are NaN.
    """

    quantity: str
    rows: list
    slope: float
    intercept: float
    degenerate: bool
    families: dict = field(default_factory=dict)


def fit_slope(rows: Sequence) -> tuple:
    """Least-squares line through (log eps, log error); returns (slope, intercept)."""
    if len(rows) < 3:
        raise ValueError(f"need at least 3 rows to fit a slope, got {len(rows)}")
    eps = np.array([row[0] for row in rows], dtype=float)
    err = np.array([row[1] for row in rows], dtype=float)
    if np.any(err <= 0) or np.any(eps <= 0):
        raise ValueError("slope fit needs positive eps and errors")
    slope, intercept = np.polyfit(np.log(eps), np.log(err), 1)
    return float(slope), float(intercept)


def _quotient(p: np.ndarray, kx: int, ky: int, eps: float) -> np.ndarray:
    for _ in range(kx):
        p = delta_x(p, eps)
    for _ in range(ky):
        p = delta_y(p, eps)
    return p


def _sup_point_error(p: np.ndarray, eps_p: float, q: np.ndarray, eps_q: float) -> float:
    """Sup of Euclidean point distances on the common (nested) sites."""
    s = round(eps_p / eps_q)
    if s < 1 or abs(eps_p / eps_q - s) > 1e-9:
        raise ValueError(f"lattices are not nested: {eps_p} vs {eps_q}")
    n0 = min(p.shape[0], (q.shape[0] - 1) // s + 1)
    n1 = min(p.shape[1], (q.shape[1] - 1) // s + 1)
    d = p[:n0, :n1] - q[::s, ::s][:n0, :n1]
    return float(np.max(np.sqrt(np.sum(d * d, axis=-1))))


def run_sweep(cfg: SweepConfig, data: GoursatData2) -> ConvergenceReport:
    """Measure the configured quantity against the k_ref reference lattice."""
    levels = list(range(cfg.k_min, cfg.k_max + 1))
    doms = [LatticeDomain2.from_k(cfg.r, k) for k in levels]
    dom_ref = LatticeDomain2.from_k(cfg.r, cfg.k_ref)
    rhs = system_for(cfg.scheme)
    families: dict = {}

    def record(name: str, value: float):
        families.setdefault(name, []).append(value)

    if cfg.quantity in ("fields_ab", "phi", "quotients"):
        ref = solve_goursat_2d(rhs, data, dom_ref)
        if cfg.quantity == "phi":
            phi00 = float(np.asarray(data.sample(dom_ref)[1]).ravel()[0])
            ref_phi = reconstruct_phi(ref, phi00, cfg.scheme).phi
        for dom in doms:
            sol = solve_goursat_2d(rhs, data, dom)
            if cfg.quantity == "fields_ab":
                record("a", sup_error(sol.a, dom.eps, ref.a, dom_ref.eps))
                record("b", sup_error(sol.b, dom.eps, ref.b, dom_ref.eps))
            elif cfg.quantity == "phi":
                p00 = float(np.asarray(data.sample(dom)[1]).ravel()[0])
                phi = reconstruct_phi(sol, p00, cfg.scheme).phi
                record("phi", sup_error(phi, dom.eps, ref_phi, dom_ref.eps))
            else:
                for kx in range(cfg.quotient_order + 1):
                    for ky in range(cfg.quotient_order + 1 - kx):
                        if kx + ky == 0:
                            continue
                        for name, pc, pr in (("a", sol.a, ref.a), ("b", sol.b, ref.b)):
                            record(
                                f"{name}_dx{kx}dy{ky}",
                                sup_error(
                                    _quotient(pc, kx, ky, dom.eps),
                                    dom.eps,
                                    _quotient(pr, kx, ky, dom_ref.eps),
                                    dom_ref.eps,
                                ),
                            )
    elif cfg.quantity == "surface":
        if cfg.scheme is not SchemeKind.HIROTA:
            raise ValueError("surface sweeps require the Hirota scheme")
        ref_pts = build_surface(data, dom_ref, cfg.lam).points
        for dom in doms:
            pts = build_surface(data, dom, cfg.lam).points
            record("surface", _sup_point_error(pts, dom.eps, ref_pts, dom_ref.eps))
    else:
        if cfg.scheme is not SchemeKind.HIROTA:
            raise ValueError("surface sweeps require the Hirota scheme")
        ref_pts = backlund_surface(data, dom_ref, cfg.bt_chain, cfg.lam)[-1].points
        for dom in doms:
            pts = backlund_surface(data, dom, cfg.bt_chain, cfg.lam)[-1].points
            record("surface_bt", _sup_point_error(pts, dom.eps, ref_pts, dom_ref.eps))

    per_row = list(zip(*families.values()))
    rows = [(doms[idx].eps, float(max(vals))) for idx, vals in enumerate(per_row)]
    degenerate = all(err <= 1e-13 for _, err in rows)
    if degenerate:
        slope, intercept = math.nan, math.nan
    else:
        slope, intercept = fit_slope(rows)
    return ConvergenceReport(cfg.quantity, rows, slope, intercept, degenerate, families)


def emit_report(report: ConvergenceReport, path) -> None:
    """Write rows as 'epsilon,error' CSV with the fit in trailing comments."""
    if not report.rows:
        raise ValueError("cannot emit an empty report")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("epsilon,error\n")
        for eps, err in report.rows:
            fh.write(f"{eps:.17g},{err:.17g}\n")
        if report.degenerate:
            fh.write("# degenerate=true\n")
        else:
            fh.write(f"# slope={report.slope:.17g}\n")
            fh.write(f"# intercept={report.intercept:.17g}\n")


def load_report(path) -> ConvergenceReport:
    """Read back an emitted report (rows and fit only; families are not stored)."""
    rows = []
    slope = intercept = math.nan
    degenerate = False
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "epsilon,error":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body == "degenerate=true":
                    degenerate = True
                elif body.startswith("slope="):
                    slope = float(body[len("slope="):])
                elif body.startswith("intercept="):
                    intercept = float(body[len("intercept="):])
                continue
            e, v = line.split(",")
            rows.append((float(e), float(v)))
    return ConvergenceReport("", rows, slope, intercept, degenerate)
