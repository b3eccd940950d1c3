"""Smoke test for the kpztail extension module.

Build and install first, e.g.
    maturin build --release -m crates/python/Cargo.toml -o dist && pip install dist/kpztail-*.whl
"""

import math

import kpztail


def main():
    ai, aip = kpztail.airy_ai(0.0)
    assert abs(ai - 0.3550280538878172) < 1e-14, ai
    assert abs(aip + 0.2588194037928068) < 1e-14, aip

    a = kpztail.log_q(2.0, 1.0, rep="sigma")
    b = kpztail.log_q(2.0, 1.0, rep="finite-t")
    assert abs(a.log_det - b.log_det) < 1e-8, (a, b)
    print(a)

    tw = kpztail.tracy_widom_log_cdf(-6.0)
    tail = kpztail.tw_tail_expansion(6.0)
    assert abs(tw - tail.total) < 0.15
    print("log F_TW(-6) =", tw, "tail expansion =", tail.total)

    fixed = kpztail.log_q_expansion_fixed_t(6.0, 1.0)
    assert fixed.term("s52") == kpztail.naive_estimate(6.0, 1.0)
    assert abs(sum(v for _, v in fixed.terms) - fixed.total) < 1e-12

    eq = kpztail.Equilibrium(100.0, 1.0)
    assert abs(eq.residual) < 1e-10
    assert eq.w(eq.lambda0) >= 1.0
    assert eq.psi(eq.lambda0 - 1.0) >= 2.0
    print(eq)

    br = kpztail.kpz_tail_bracket(10.0, 1.0)
    assert br.lower_a <= br.upper_b

    try:
        kpztail.kpz_tail_bracket(1.01, 1.0, q_eval="numeric")
    except kpztail.NumericalError as e:
        print("expected failure:", e)
    else:
        raise AssertionError("bracket at s = 1.01 should not be established")

    try:
        kpztail.rate_phi(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("rate_phi(-1) should raise")

    assert math.isclose(kpztail.rate_phi(0.0), 0.0)
    print("smoke test passed")


if __name__ == "__main__":
    main()
