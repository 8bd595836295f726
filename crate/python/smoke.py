"""Smoke test for the pythermowitness extension module."""

import math

import pythermowitness as tw


def main():
    model = tw.SpinModel("heisenberg", 2)
    assert [round(e, 9) for e in model.spectrum()] == [-3.0, 1.0, 1.0, 1.0]

    result = model.sweep([0.5, 1.0, 3.0, 4.0, 8.0])
    assert [r.eq2_fires for r in result.reports] == [True, True, True, False, False]
    assert abs(result.t_star_eq2 - 4.0 / math.log(3.0)) < 1e-6
    assert result.ground_energy == -3.0

    lower, upper = model.ree_bounds(restarts=4)
    assert abs(lower - math.log(2.0)) < 1e-12 and lower - 1e-6 <= upper < lower + 1e-3

    sep_min, entangled = model.energy_witness(-3.0)
    assert entangled and abs(sep_min + 1.0) < 1e-6

    s, neg_ln_p, _, _ = tw.canonical_scalars([-3.0, 1.0, 1.0, 1.0], 2.0)
    assert neg_ln_p <= s

    gas = tw.GasSpectrum([0.01 * k for k in range(1, 201)], "bose", mu=0.0)
    fit = gas.fit()
    assert abs(fit.exponent - 1.0) < 0.1 and fit.r_squared > 0.99

    fermi = tw.GasSpectrum([0.1 * k for k in range(1, 11)], "fermi", particles=4.0)
    assert abs(fermi.state(0.3).n_actual - 4.0) < 1e-8

    try:
        tw.SpinModel("xy", 14)
    except RuntimeError:
        pass
    else:
        raise AssertionError("dimension cap not enforced")

    try:
        tw.GasSpectrum([1.0, 2.0], "fermi", particles=2.0).state(1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("Pauli bound not enforced")

    passed, report = tw.selfcheck()
    assert passed, report
    print("smoke ok")


if __name__ == "__main__":
    main()
