"""Tests for the general d-dimensional Goursat solver and its checks."""

from dataclasses import replace

import numpy as np
import pytest

from ksurf.goursat import (
    BlowUpError,
    CompatibilityError,
    GoursatData2,
    LatticeDomain2,
    solve_goursat_2d,
)
from ksurf.harness import demo_data
from ksurf.ndsys import (
    SystemSpecND,
    check_dependency,
    check_identity,
    load_state_csv,
    save_state_csv,
    sine_gordon_2d_spec,
    sine_gordon_3d_spec,
    solve_goursat_nd,
)
from ksurf.sinegordon import (
    SchemeKind,
    check_compatibility_3d,
    hirota_backlund_system,
    hirota_system,
    solve_goursat_3d,
)

RNG = np.random.default_rng(20240820)

A0 = lambda x, y=None, z=None: np.cos(2.0 * x)  # noqa: E731
B0 = lambda x, y=None, z=None: 1.0 + np.sin(y)  # noqa: E731


def theta0_layers(values):
    return lambda x, y, z: values[int(round(z))]


def test_spec_validation():
    good = sine_gordon_2d_spec(SchemeKind.HIROTA, 0.125)
    assert good.num_fields == 2 and good.dim == 2
    assert good.data_dirs(0) == (0,) and good.data_dirs(1) == (1,)
    with pytest.raises(ValueError, match="one entry per field"):
        replace(good, evol=(frozenset({1}),))
    with pytest.raises(ValueError, match="per direction"):
        replace(good, eps=(0.125,))
    with pytest.raises(ValueError, match="positive"):
        replace(good, eps=(0.125, -0.125))
    with pytest.raises(ValueError, match="rhs keys"):
        replace(good, rhs={(0, 1): good.rhs[(0, 1)]})
    with pytest.raises(ValueError, match="deps keys"):
        replace(good, deps={(0, 1): frozenset({0})})
    with pytest.raises(ValueError, match="outside"):
        replace(
            good,
            evol=(frozenset({5}), frozenset({0})),
            rhs={(0, 5): good.rhs[(0, 1)], (1, 0): good.rhs[(1, 0)]},
            deps={(0, 5): frozenset({0, 1}), (1, 0): frozenset({0, 1})},
        )
    with pytest.raises(ValueError):
        replace(good, num_fields=0, evol=())


def test_dependency_check():
    assert check_dependency(sine_gordon_2d_spec(SchemeKind.HIROTA, 0.125))
    assert check_dependency(sine_gordon_3d_spec(1.0, 0.125))
    # let f_{(0,1)} (field a stepping in y, E_a = {1, 2}) read theta, whose
    # evolution set {0, 1} misses the required direction z = 2
    spec = sine_gordon_3d_spec(1.0, 0.125)
    deps = dict(spec.deps)
    deps[(0, 1)] = frozenset({0, 1, 2})
    assert not check_dependency(replace(spec, deps=deps))


def test_identity_hirota_closes():
    samples = RNG.uniform(-3.0, 3.0, size=(2000, 3))
    for alpha in (0.5, 1.0, 2.0):
        for eps in (2.0**-3, 2.0**-6):
            spec = sine_gordon_3d_spec(alpha, eps)
            assert check_identity(spec, samples) <= 1e-11
            # agrees with the dedicated three-identity check
            direct = check_compatibility_3d(hirota_backlund_system(alpha), samples, eps)
            assert direct <= 1e-11


def test_identity_naive_fails():
    samples = RNG.uniform(-3.0, 3.0, size=(2000, 3))
    spec = sine_gordon_3d_spec(1.0, 2.0**-4, scheme=SchemeKind.NAIVE)
    assert check_identity(spec, samples) > 1e-3  # measured ~1.5e-2


def test_identity_constant_rhs_is_exact():
    # constant right-hand sides close identically: the square contributions
    # commute as plain float additions
    spec = SystemSpecND(
        num_fields=1,
        dim=2,
        evol=(frozenset({0, 1}),),
        rhs={(0, 0): lambda s: 0.7, (0, 1): lambda s: -1.3},
        deps={(0, 0): frozenset(), (0, 1): frozenset()},
        eps=(0.25, 0.5),
    )
    assert check_identity(spec, RNG.normal(size=(100, 1))) == 0.0


def test_identity_broken_rhs():
    spec = sine_gordon_3d_spec(1.0, 2.0**-4)
    rhs = dict(spec.rhs)
    orig = rhs[(2, 1)]
    rhs[(2, 1)] = lambda s: -orig(s)
    broken = replace(spec, rhs=rhs)
    samples = RNG.uniform(-3.0, 3.0, size=(2000, 3))
    assert check_identity(broken, samples) > 1e-3  # measured ~0.26


def test_identity_2d_is_vacuous():
    # both planar fields evolve in a single direction: no squares to close
    spec = sine_gordon_2d_spec(SchemeKind.HIROTA, 0.125)
    assert check_identity(spec, RNG.uniform(-3, 3, (50, 2))) == 0.0


def test_solve_2d_matches_dedicated_solver():
    eps = 2.0**-4
    dom = LatticeDomain2(1.0, eps)
    ref = solve_goursat_2d(hirota_system(), demo_data(), dom)
    spec = sine_gordon_2d_spec(SchemeKind.HIROTA, eps)
    st = solve_goursat_nd(spec, [A0, lambda x, y: B0(x, y)], 1.0)
    assert st.n == (dom.n, dom.n)
    assert np.array_equal(st.fields[0], ref.a)
    assert np.array_equal(st.fields[1], ref.b)
    assert st.alt_residual == 0.0  # no field has two admissible directions


def test_solve_3d_matches_dedicated_solver():
    eps = 2.0**-4
    dom = LatticeDomain2(1.0, eps)
    theta0 = [0.5, -0.3]
    ref = solve_goursat_3d(hirota_backlund_system(1.0), demo_data(), theta0, dom)
    spec = sine_gordon_3d_spec(1.0, eps)
    st = solve_goursat_nd(
        spec, [A0, B0, theta0_layers(theta0)], (1.0, 1.0, 2.0)
    )
    n = dom.n
    assert st.fields[0].shape == (n, n + 1, 3)
    assert st.fields[1].shape == (n + 1, n, 3)
    assert st.fields[2].shape == (n + 1, n + 1, 2)
    for z in range(3):
        assert np.abs(st.fields[0][:, :, z] - ref.a[z]).max() <= 1e-13  # measured 0
        assert np.abs(st.fields[1][:, :, z] - ref.b[z]).max() <= 1e-13
    for z in range(2):
        assert np.abs(st.fields[2][:, :, z] - ref.theta[z]).max() <= 1e-13
    assert st.alt_residual <= 1e-13  # measured 1.8e-15


def test_site_order_is_immaterial():
    eps = 2.0**-3
    spec = sine_gordon_3d_spec(1.0, eps)
    args = (spec, [A0, B0, theta0_layers([0.5])], (1.0, 1.0, 1.0))
    lex = solve_goursat_nd(*args, site_order="lex")
    lev = solve_goursat_nd(*args, site_order="level")
    for fl, fv in zip(lex.fields, lev.fields):
        assert np.array_equal(fl, fv)
    with pytest.raises(ValueError, match="site_order"):
        solve_goursat_nd(*args, site_order="spiral")


def test_solve_rejects_incompatible_system():
    spec = sine_gordon_3d_spec(1.0, 2.0**-4, scheme=SchemeKind.NAIVE)
    with pytest.raises(CompatibilityError) as exc:
        solve_goursat_nd(spec, [A0, B0, theta0_layers([0.5])], (1.0, 1.0, 1.0))
    assert exc.value.mismatch > 1e-9  # measured ~1.2e-3
    assert "directions" in str(exc.value)


def test_solve_rejects_dependency_violation():
    spec = sine_gordon_3d_spec(1.0, 0.125)
    deps = dict(spec.deps)
    deps[(0, 1)] = frozenset({0, 1, 2})
    with pytest.raises(ValueError, match="dependency"):
        solve_goursat_nd(replace(spec, deps=deps), [A0, B0, theta0_layers([0.5])], 1.0)


def test_solve_domain_validation():
    spec = sine_gordon_2d_spec(SchemeKind.HIROTA, 0.125)
    data = [A0, lambda x, y: B0(x, y)]
    with pytest.raises(ValueError, match="entries"):
        solve_goursat_nd(spec, data, (1.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="integer"):
        solve_goursat_nd(spec, data, (1.0, 0.3))


def test_single_field_full_evolution():
    # one field evolving in all three directions with zero right-hand sides
    # stays constant on the whole box
    spec = SystemSpecND(
        num_fields=1,
        dim=3,
        evol=(frozenset({0, 1, 2}),),
        rhs={(0, i): (lambda s: 0.0) for i in range(3)},
        deps={(0, i): frozenset({0}) for i in range(3)},
        eps=(0.5, 0.5, 1.0),
    )
    st = solve_goursat_nd(spec, [lambda x, y, z: 4.25], (1.0, 1.0, 2.0))
    assert st.fields[0].shape == (3, 3, 3)
    assert np.all(st.fields[0] == 4.25)
    assert st.alt_residual == 0.0


def test_solve_blowup_detection():
    spec = SystemSpecND(
        num_fields=1,
        dim=2,
        evol=(frozenset({0}),),
        rhs={(0, 0): lambda s: np.where(np.asarray(s[0]) > 1.5, np.inf, 1.0)},
        deps={(0, 0): frozenset({0})},
        eps=(0.5, 0.5),
    )
    with pytest.raises(BlowUpError) as exc:
        solve_goursat_nd(spec, [lambda x, y: 1.2], (2.0, 2.0))
    assert exc.value.field_name == "a_0"
    assert exc.value.site == (1.0, 0.0)


def test_state_csv_roundtrip(tmp_path):
    spec = sine_gordon_3d_spec(1.0, 2.0**-3)
    st = solve_goursat_nd(spec, [A0, B0, theta0_layers([0.5])], (1.0, 1.0, 1.0))
    for k in range(3):
        path = tmp_path / f"field{k}.csv"
        save_state_csv(st, path, k)
        arr, eps, r = load_state_csv(path)
        assert np.array_equal(arr, st.fields[k])
        assert eps == spec.eps
        assert r == (1.0, 1.0, 1.0)


def test_state_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope\n")
    with pytest.raises(ValueError, match="metadata"):
        load_state_csv(path)
    path.write_text("# field=0 eps=0.5,0.5 r=1,1\ni1,value\n0,1.0\n")
    with pytest.raises(ValueError, match="dimension"):
        load_state_csv(path)
    path.write_text("# field=0 eps=0.5,0.5 r=1,1\ni1,i2,value\n0,0,1.0\n1,1,2.0\n")
    with pytest.raises(ValueError, match="box"):
        load_state_csv(path)
