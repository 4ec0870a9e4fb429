"""Smoke test of the monowave Python bindings."""

import math

import monowave_py as mw


def main() -> None:
    sch = mw.VarianceSchedule.default_scattering(2)
    converges, *_ = sch.check_convergence()
    assert converges, sch

    a = sch.sample(42)
    assert a.values == sch.sample(42).values
    assert mw.CoefficientSet.from_text(a.to_text()).values == a.values
    label, min_modulus, threshold = a.classify()
    assert label in {"nonvanishing", "vanishing", "undetermined"}

    # u is a Helmholtz solution: check Δu + u ≈ 0 by central differences
    u = mw.WaveField(a)
    x, y, d = 3.1, -1.7, 1e-3
    lap = (u([x + d, y]) + u([x - d, y]) + u([x, y + d]) + u([x, y - d]) - 4 * u([x, y])) / d**2
    assert abs(lap + u([x, y])) < 1e-4 * (1 + abs(u([x, y]))), lap

    # f constant in three dimensions gives u ∝ sin(r)/r with spheres at kπ
    sinc = mw.WaveField(mw.CoefficientSet.isotropic(3))
    r = 2.3
    assert abs(sinc([r, 0, 0]) / sinc([0, 0, 1.0]) - math.sin(r) / r / math.sin(1.0)) < 1e-10
    nodal = sinc.nodal_set(3.5 * math.pi, math.pi / 10)
    assert nodal.count(3.5 * math.pi) == (3, 3, 0, 0), nodal.count(3.5 * math.pi)

    assert abs(mw.bessel_j(0.5, 2.0) - math.sqrt(2 / (math.pi * 2.0)) * math.sin(2.0)) < 1e-13
    assert mw.multiplicity(3, 3) == 7

    verdict, sums, _ = mw.kakutani(3, "unit_perturbation", 1.0, 2.0, l_probe=500)
    assert verdict == "equivalent", verdict
    verdict, _, _ = mw.kakutani(3, "unit_perturbation", 1.0, 1.0, l_probe=500)
    assert verdict == "singular", verdict

    try:
        mw.VarianceSchedule.power_law(4, 1.0, 3.0)
    except ValueError:
        pass
    else:
        raise AssertionError("dimension 4 accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
