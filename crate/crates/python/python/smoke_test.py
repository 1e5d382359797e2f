"""Smoke test for the compiled extension: run after `maturin develop` or `pip install`."""

import math

import meanmotion as mm


def main():
    s = mm.OscillatorSum([1.0, 2.5, 3.0], [math.sqrt(2), 3.0, math.sqrt(3)])
    res = mm.mean_motion(s)
    assert abs(res["omega"] - 2.0614) < 5e-3, res
    assert abs(res["weight_sum"] - 1.0) < 1e-9, res
    print(f"omega = {res['omega']:.6f}, weights = {[round(w, 6) for w in res['weights']]}")

    emp = mm.empirical_mean_motion(s, 1000.0)
    assert abs(emp - res["omega"]) < 0.05, emp

    zeros, tangencies = mm.count_zeros(mm.OscillatorSum([2.0, 1.0], [3.0, math.sqrt(2)]), 50.0)
    assert len(zeros) == 48 and not tangencies
    lo, hi = mm.two_oscillator_bounds(2.0, 3.0, 1.0, math.sqrt(2), 50.0)
    assert lo <= len(zeros) <= hi

    closed = mm.torus_volume(1.0, [2.5, 3.0])
    q = (1.0 - 2.5**2 - 3.0**2) / (2 * 2.5 * 3.0)
    assert abs(closed["value"] - (1 - math.acos(q) / math.pi)) < 1e-14
    bww = mm.torus_volume(1.0, [2.5, 3.0], method="bww")
    assert abs(bww["value"] - closed["value"]) < 1e-6
    mc = mm.torus_volume(2.0, [1.0, 2.5, 3.0], method="mc", seed=1, samples=200_000)
    quad = mm.torus_volume(2.0, [1.0, 2.5, 3.0])
    assert abs(mc["value"] - quad["value"]) < 4 * mc["error_estimate"], (mc, quad)

    sys = mm.LinearSystem.from_blocks([2.0, 1.0], [0.0, 1.0, 0.0, 1.0], [1.0, 0.0, 1.0, 0.0])
    controllable, rank, det = sys.controllability()
    assert controllable and rank == 4 and abs(abs(det) - 18.0) < 1e-9
    osc = sys.oscillator_sum()
    for t in (0.0, 0.7, 3.1):
        assert abs(osc.m(t) - sys.m(t)) < 1e-9

    try:
        mm.LinearSystem([[0.0, 1.0], [1.0, 0.0]], [0.0, 1.0], [1.0, 0.0]).oscillator_sum()
    except ValueError as e:
        assert "purely imaginary" in str(e)
    else:
        raise AssertionError("real spectrum accepted")

    assert mm.j0(0.0) == 1.0 and abs(mm.j1(1.0) - 0.44005058574493355) < 1e-14
    print("python smoke test passed")


if __name__ == "__main__":
    main()
