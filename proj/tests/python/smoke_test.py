"""Python smoke tests for the _flatlab module (run by ctest)."""

import math
import sys

import flatlab as fl


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    # flows
    g = fl.geodesic(2 * math.log(2))
    approx(g[0], 2.0)
    approx(g[3], 0.5)
    v = fl.act(g, 3, 4)
    approx(v[0], 6.0)
    approx(v[1], 2.0)
    f, s = fl.factor_rotation(math.pi / 4)
    approx(s, -1.0)
    approx(fl.conj_orbit_bound(fl.lower(2, 3), 10), 3.0)

    # surfaces
    torus = fl.make_torus()
    assert torus.genus == 1
    approx(torus.area, 1.0)
    sq3 = fl.make_square_tiled([1, 2, 0], [1, 0, 2])
    assert sq3.genus == 2
    sings = sq3.singularities()
    assert sings == [(0, 6, True)]
    uf = fl.unfold([(0, 0), (1, 0), (1, 1), (0, 1)], [(1, 2)] * 4)
    approx(uf.area, 4.0)
    assert uf.genus == 1

    # saddles
    conns = fl.enumerate_saddles(torus, 2)
    assert len(conns) == 8
    value, witness = fl.systole(torus, fl.geodesic(2 * math.log(2)))
    approx(value, 0.5)
    approx(witness[1], 0.5)
    bound = fl.systole_lower_bound_on_interval(torus, 0.0, 0.0, 0.1)
    approx(bound, 1.0, 1e-6)

    # continued fractions and lattice reduction
    e = fl.cf_expand("(1+sqrt 5)/2", 20)
    assert e["a0"] == 1 and all(a == 1 for a in e["partial_quotients"])
    assert fl.is_badly_approximable("(1+sqrt 5)/2", 1)
    assert not fl.is_badly_approximable("355/113", 1000)
    vec, maxnorm, eucnorm = fl.shortest_vector((2.0, 0.0, 0.0, 0.5))
    approx(maxnorm, 0.5)

    # oracle equivalence on a couple of random-ish matrices
    for t, s, th in [(0.7, 0.3, 0.2), (1.9, -0.4, 1.1)]:
        A = fl.matmul(fl.matmul(fl.geodesic(t), fl.horocycle(s)), fl.rotation(th))
        mine = fl.systole(torus, A)[0]
        oracle = fl.shortest_vector(A)[1]
        approx(mine, oracle, 1e-10)

    # nondivergence measurement
    assert fl.check_hypothesis(torus, 0.0, 1.0, 0.5)
    approx(fl.bad_measure(torus, 0.0, 1.0, 0.5, 1000), 0.0)
    m = fl.bad_measure(torus, 0.0, 1.0, 0.1, 20000, post_geodesic=6.0)
    assert 0.005 < m < 0.03

    # construction
    params = fl.derive_params(torus, 0.1, 0.5, 1.0, 0.1)
    assert params["N"] == 16
    tree = fl.cantor_construct(torus, 0.1, 0.5, 0.3, 0.025, 3)
    assert not tree["extinct"]
    assert tree["counts"][0] == 1
    assert tree["box_dim_fit"] > 0.9
    ok, min_sys = fl.bounded_direction_check(
        torus, fl.rotation_angle_for_slope((1 + 5 ** 0.5) / 2), 20, 0.15, "rotation")
    assert ok and min_sys > 0.15

    # billiards
    rec = fl.billiard_recurrence(fl.unit_square_json(), 0.5, 0.5, math.pi / 4, 3.5)
    assert not rec["singular"]
    approx(rec["min_t_times_d"], 0.0, 1e-9)
    approx(rec["argmin_t"], 2 * math.sqrt(2), 1e-9)

    print("python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
