"""General d-dimensional first-order lattice systems of Goursat type.

A system has N real fields a_0..a_{N-1} on the lattice eps_0 Z x ... x
eps_{d-1} Z.  Field k evolves in the directions of its evolution set E_k:

    a_k(x + eps_i e_i) = a_k(x) + eps_i * f_{(k,i)}(a_0(x), ..., a_{N-1}(x))

for each i in E_k; in the complementary data directions D_k the field is
only sampled, never stepped.  On the box with n_i = r_i/eps_i steps per
direction, field k extends to index n_i in its evolution directions and to
n_i - 1 in its data directions (the cell the value is attached to must fit
inside the box).  Goursat data prescribes a_k where all E_k coordinates
vanish.

Two structural conditions make the overdetermined propagation consistent:

* dependency (check_dependency): f_{(k,i)} may only read fields a_l with
  E_k minus {i} contained in E_l, so every value it needs exists wherever
  the step is taken;
* closure (check_identity): advancing a_k around an elementary square in
  directions i, j in either order gives the same value,

      eps_i f_{(k,i)}(s) + eps_j f_{(k,j)}(s + shift_i(s))
    = eps_j f_{(k,j)}(s) + eps_i f_{(k,i)}(s + shift_j(s)),

  where shift_i advances every field that evolves in direction i and leaves
  NaN in the components that do not (the dependency condition guarantees
  those are never read).

The solver assigns each value once, stepping from the smallest admissible
direction index, and verifies the alternative assignments agree to 1e-9
(sampled on large boxes).  Because every value has a unique defining
assignment, any site enumeration compatible with the dependency order gives
bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .goursat import BlowUpError, CompatibilityError


@dataclass(frozen=True)
class SystemSpecND:
    """System description: evolution sets, right-hand sides, steps, reads.

    evol[k] is the set of direction indices field k evolves in; rhs maps
    (k, i) with i in evol[k] to a function of the state vector (a sequence of
    N values, scalars or aligned arrays); deps[(k, i)] declares which field
    indices that function reads (used by the dependency check and honored on
    trust everywhere else).
    """

    num_fields: int
    dim: int
    evol: tuple
    rhs: Mapping
    deps: Mapping
    eps: tuple
    name: str = ""

    def __post_init__(self):
        if self.num_fields < 1 or self.dim < 1:
            raise ValueError("need at least one field and one direction")
        if len(self.evol) != self.num_fields:
            raise ValueError("evol must have one entry per field")
        if len(self.eps) != self.dim:
            raise ValueError("eps must have one entry per direction")
        if any(e <= 0 for e in self.eps):
            raise ValueError("all lattice steps must be positive")
        want = {(k, i) for k in range(self.num_fields) for i in self.evol[k]}
        for k in range(self.num_fields):
            if not all(0 <= i < self.dim for i in self.evol[k]):
                raise ValueError(f"evol[{k}] mentions directions outside 0..{self.dim - 1}")
        if set(self.rhs.keys()) != want:
            raise ValueError("rhs keys must be exactly {(k, i): i in evol[k]}")
        if set(self.deps.keys()) != want:
            raise ValueError("deps keys must be exactly {(k, i): i in evol[k]}")

    def data_dirs(self, k: int) -> tuple:
        return tuple(i for i in range(self.dim) if i not in self.evol[k])


def check_dependency(spec: SystemSpecND) -> bool:
    """True when every f_{(k,i)} reads only fields defined where it steps."""
    for (k, i), reads in spec.deps.items():
        need = set(spec.evol[k]) - {i}
        for l in reads:
            if not need <= set(spec.evol[l]):
                return False
    return True


def _shifted_state(spec: SystemSpecND, state: list, i: int) -> list:
    """State advanced by one step in direction i; NaN where undefined."""
    out = []
    for l in range(spec.num_fields):
        if i in spec.evol[l]:
            out.append(state[l] + spec.eps[i] * spec.rhs[(l, i)](state))
        else:
            out.append(np.full_like(np.asarray(state[l], dtype=float), np.nan))
    return out


def check_identity(spec: SystemSpecND, samples: np.ndarray) -> float:
    """Max closure defect over all fields, direction pairs, and samples.

    samples has shape (m, N).  Functions are evaluated on the whole sample
    batch at once, so the right-hand sides must be numpy-vectorized.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim == 1:
        s = s[None, :]
    state = [s[:, l] for l in range(spec.num_fields)]
    worst = 0.0
    for k in range(spec.num_fields):
        dirs = sorted(spec.evol[k])
        for ai, i in enumerate(dirs):
            for j in dirs[ai + 1 :]:
                lhs = spec.eps[i] * spec.rhs[(k, i)](state) + spec.eps[j] * spec.rhs[
                    (k, j)
                ](_shifted_state(spec, state, i))
                rhs = spec.eps[j] * spec.rhs[(k, j)](state) + spec.eps[i] * spec.rhs[
                    (k, i)
                ](_shifted_state(spec, state, j))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass
class StateND:
    """Solved fields plus the observed alternative-assignment residual."""

    fields: list
    spec: SystemSpecND
    r: tuple
    n: tuple
    alt_residual: float


def solve_goursat_nd(
    spec: SystemSpecND,
    data: Sequence[Callable],
    r,
    site_order: str = "lex",
    check_tol: float = 1e-9,
) -> StateND:
    """Propagate Goursat data through the box prod([0, r_i]).

    data[k] is called with the d site coordinates and must return the value
    of field k there (used on the set where all E_k coordinates vanish).
    site_order 'lex' enumerates sites lexicographically; 'level' by total
    index sum first.  Both respect the dependency order and produce
    bitwise-identical fields.

    Alternative assignments (stepping from a different admissible direction)
    are compared at every site when the box has at most 10^4 sites, else at
    every 100th site; disagreement beyond check_tol raises
    CompatibilityError.
    """
    if not check_dependency(spec):
        raise ValueError("system violates the dependency condition")
    if isinstance(r, (int, float, np.integer, np.floating)):
        r = (float(r),) * spec.dim
    r = tuple(float(v) for v in r)
    if len(r) != spec.dim:
        raise ValueError(f"r must have {spec.dim} entries")
    n = []
    for i, (ri, ei) in enumerate(zip(r, spec.eps)):
        ratio = ri / ei
        ni = round(ratio)
        if ni < 1 or abs(ratio - ni) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"r[{i}]/eps[{i}] = {ratio!r} is not a positive integer")
        n.append(ni)
    n = tuple(n)
    shapes = []
    for k in range(spec.num_fields):
        shapes.append(
            tuple(n[i] + 1 if i in spec.evol[k] else n[i] for i in range(spec.dim))
        )
    fields = [np.full(sh, np.nan) for sh in shapes]

    box = tuple(ni + 1 for ni in n)
    total = int(np.prod(box))
    stride = 1 if total <= 10_000 else 100
    if site_order == "lex":
        sites = np.ndindex(*box)
    elif site_order == "level":
        sites = iter(sorted(np.ndindex(*box), key=lambda t: (sum(t), t)))
    else:
        raise ValueError(f"site_order must be 'lex' or 'level', got {site_order!r}")

    worst = 0.0
    eps = spec.eps
    num = spec.num_fields
    for count, idx in enumerate(sites):
        for k in range(num):
            sh = shapes[k]
            if any(idx[i] >= sh[i] for i in range(spec.dim)):
                continue
            active = [i for i in spec.evol[k] if idx[i] > 0]
            if not active:
                coords = tuple(idx[i] * eps[i] for i in range(spec.dim))
                val = float(data[k](*coords))
            else:
                i0 = min(active)
                base = tuple(idx[i] - (1 if i == i0 else 0) for i in range(spec.dim))
                state = [
                    fields[l][base]
                    if all(base[i] < shapes[l][i] for i in range(spec.dim))
                    else np.nan
                    for l in range(num)
                ]
                val = fields[k][base] + eps[i0] * spec.rhs[(k, i0)](state)
                if count % stride == 0:
                    for i1 in active[1:]:
                        alt_base = tuple(
                            idx[i] - (1 if i == i1 else 0) for i in range(spec.dim)
                        )
                        alt_state = [
                            fields[l][alt_base]
                            if all(alt_base[i] < shapes[l][i] for i in range(spec.dim))
                            else np.nan
                            for l in range(num)
                        ]
                        alt = fields[k][alt_base] + eps[i1] * spec.rhs[(k, i1)](alt_state)
                        diff = abs(alt - val)
                        worst = max(worst, float(diff))
                        if worst > check_tol:
                            site = tuple(idx[i] * eps[i] for i in range(spec.dim))
                            raise CompatibilityError(
                                worst, site, detail=f"field {k}, directions {i0}/{i1}"
                            )
            if not np.isfinite(val):
                site = tuple(idx[i] * eps[i] for i in range(spec.dim))
                raise BlowUpError(f"a_{k}", site)
            fields[k][idx] = val
    return StateND(fields, spec, r, n, worst)


def save_state_csv(state: StateND, path, field_index: int) -> None:
    """Write one field as CSV: metadata line, header i1..id, then values."""
    k = field_index
    arr = state.fields[k]
    eps_s = ",".join(f"{e:.17g}" for e in state.spec.eps)
    r_s = ",".join(f"{v:.17g}" for v in state.r)
    cols = ",".join(f"i{i + 1}" for i in range(state.spec.dim))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# field={k} eps={eps_s} r={r_s}\n")
        fh.write(f"{cols},value\n")
        for idx in np.ndindex(*arr.shape):
            fh.write(",".join(str(i) for i in idx) + f",{arr[idx]:.17g}\n")


def load_state_csv(path) -> tuple:
    """Read back a field CSV; returns (array, eps tuple, r tuple)."""
    with open(path, "r", encoding="ascii") as fh:
        meta = fh.readline().strip()
        if not meta.startswith("# "):
            raise ValueError(f"{path}: missing metadata line")
        parts = dict(p.split("=", 1) for p in meta[2:].split() if "=" in p)
        eps = tuple(float(v) for v in parts["eps"].split(","))
        r = tuple(float(v) for v in parts["r"].split(","))
        header = fh.readline().strip().split(",")
        d = len(header) - 1
        if d != len(eps):
            raise ValueError(f"{path}: header dimension does not match metadata")
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append(line.split(","))
    idxs = np.array([[int(v) for v in row[:d]] for row in rows], dtype=int)
    vals = np.array([float(row[d]) for row in rows])
    shape = tuple(idxs.max(axis=0) + 1)
    arr = np.full(shape, np.nan)
    arr[tuple(idxs.T)] = vals
    if not np.isfinite(arr).all():
        raise ValueError(f"{path}: index set does not fill a full box")
    return arr, eps, r


# ---------------------------------------------------------------------------
# canonical encodings of the sine-Gordon systems


def sine_gordon_2d_spec(scheme, eps: float) -> SystemSpecND:
    """The two-field planar system as a SystemSpecND (directions x=0, y=1)."""
    from .sinegordon import SchemeKind, hirota_rhs, naive_rhs

    step = hirota_rhs if scheme is SchemeKind.HIROTA else naive_rhs
    return SystemSpecND(
        num_fields=2,
        dim=2,
        evol=(frozenset({1}), frozenset({0})),
        rhs={
            (0, 1): lambda s: step(s[0], s[1], eps)[0],
            (1, 0): lambda s: step(s[0], s[1], eps)[1],
        },
        deps={(0, 1): frozenset({0, 1}), (1, 0): frozenset({0, 1})},
        eps=(eps, eps),
        name=f"sine-gordon-2d-{'hirota' if scheme is SchemeKind.HIROTA else 'naive'}",
    )


def sine_gordon_3d_spec(alpha: float, eps: float, scheme=None) -> SystemSpecND:
    """The Backlund-extended system (x=0, y=1, layer direction z=2, step 1).

    Fields: a_0 = a with E = {y, z}, a_1 = b with E = {x, z}, a_2 = theta
    with E = {x, y}.  The z-direction right-hand sides are the layer
    increments xi and eta; theta never steps in z (a fresh theta0 seeds each
    layer), so its extent in z counts layers.
    """
    from .sinegordon import (
        SchemeKind,
        backlund_u,
        backlund_v,
        hirota_rhs,
        naive_rhs,
    )

    if scheme is None:
        scheme = SchemeKind.HIROTA
    step = hirota_rhs if scheme is SchemeKind.HIROTA else naive_rhs
    return SystemSpecND(
        num_fields=3,
        dim=3,
        evol=(frozenset({1, 2}), frozenset({0, 2}), frozenset({0, 1})),
        rhs={
            (0, 1): lambda s: step(s[0], s[1], eps)[0],
            (0, 2): lambda s: 2.0 * backlund_u(s[0], s[2], alpha, eps),
            (1, 0): lambda s: step(s[0], s[1], eps)[1],
            (1, 2): lambda s: 2.0 * np.asarray(s[2])
            + eps * backlund_v(s[1], s[2], alpha, eps),
            (2, 0): lambda s: backlund_u(s[0], s[2], alpha, eps),
            (2, 1): lambda s: backlund_v(s[1], s[2], alpha, eps),
        },
        deps={
            (0, 1): frozenset({0, 1}),
            (0, 2): frozenset({0, 2}),
            (1, 0): frozenset({0, 1}),
            (1, 2): frozenset({1, 2}),
            (2, 0): frozenset({0, 2}),
            (2, 1): frozenset({1, 2}),
        },
        eps=(eps, eps, 1.0),
        name="sine-gordon-backlund-3d",
    )
