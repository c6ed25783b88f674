"""Smoke test for the pushsplit extension module.

Build with `maturin develop -m crates/python/Cargo.toml`, or copy
`target/debug/libpushsplit.so` next to this file as `pushsplit.so`.
"""

import pushsplit


def main():
    assert pushsplit.delta(4, 2, 0) == 2
    assert pushsplit.splitting_universal(4, 2, 0) == {0: 1, 1: 10, 2: 5}
    assert pushsplit.rank([[1, 2], [2, 4]]) == 1
    assert pushsplit.rank([[1, 2], [3, 4]], exact=True) == 2

    e = pushsplit.Endomorphism.power_map(2, 2)
    assert e.validate_finite()["finite"]
    assert e.splitting(1) == pushsplit.splitting_universal(2, 2, 1)

    bad = pushsplit.Endomorphism(1, 2, ["y0^2", "y0*y1"])
    assert not bad.validate_finite()["finite"]

    r = pushsplit.Endomorphism.random(2, 2, seed=3)
    assert r.splitting(0) == {0: 1, 1: 3}

    m = pushsplit.Model("ci:2,2@4")
    assert m.pushforward_cohomology(2, 0, 2) == 35
    assert m.dualizing_cohomology(2, 1, 0) == 15
    assert m.euler_characteristic(2, 0) == 36
    assert m.hyperplane_section(2)["h0_oy_prime_1"] == 4
    assert m.surface_adjunction(2)["k_squared"] == 144
    report = m.pullback_report(2, lmin=-1, lmax=2)
    assert report["degree"] == 16

    plane = pushsplit.Model("plane@4")
    assert plane.surface_adjunction(2)["del_pezzo_exception"]

    try:
        plane.pushforward_cohomology(2, 40, 0)
    except pushsplit.RangeError:
        pass
    else:
        raise AssertionError("expected RangeError")

    try:
        pushsplit.Model("q7")
    except pushsplit.PushsplitError:
        pass
    else:
        raise AssertionError("expected PushsplitError")

    print("pushsplit smoke test ok")


if __name__ == "__main__":
    main()
