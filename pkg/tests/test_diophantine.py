import math
from fractions import Fraction

import mpmath
import pytest

from sectorexp.diophantine import (DiophantineError, LiouvilleCertificate, classify, continued_fraction,
                                   resonance_distance, sin_series_radius)
from sectorexp.geometry import Opening


def test_rational_terminates():
    cf = continued_fraction(Fraction(355, 113), depth=10)
    assert cf.quotients == (3, 7, 16)
    assert cf.terminated
    assert cf.convergents[-1] == (355, 113)


def test_golden_ratio_quotients_and_fibonacci_convergents():
    mpmath.mp.dps = 60
    cf = continued_fraction((1 + mpmath.sqrt(5)) / 2, depth=10)
    assert cf.quotients == (1,) * 10
    fib = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    assert cf.convergents == tuple((fib[i + 1], fib[i]) for i in range(10))


def test_pi_quotients():
    mpmath.mp.dps = 60
    assert continued_fraction(mpmath.pi, depth=5).quotients == (3, 7, 15, 1, 292)


def test_convergent_error_bound():
    mpmath.mp.dps = 80
    x = mpmath.sqrt(2) + mpmath.e
    cf = continued_fraction(x, depth=15)
    for (p, q), (_, q1) in zip(cf.convergents[:-1], cf.convergents[1:]):
        assert abs(x - mpmath.mpf(p) / q) < mpmath.mpf(1) / (q * q1)


def test_float_input_is_never_certified():
    res = classify(1 / math.pi, depth=30)
    assert not res.certified
    assert res.verdict == "InconclusiveEvidence"


def test_exact_rational_is_certified():
    res = classify(Fraction(2, 3))
    assert res.verdict == "Rational" and res.certified


def test_golden_certificate():
    res = classify(LiouvilleCertificate.golden())
    assert res.verdict == "NotLiouville" and res.certified
    assert res.liouville is False


def test_liouville_constant_certificate():
    res = classify(LiouvilleCertificate.liouville_constant())
    assert res.verdict == "Liouville"
    assert res.liouville is True
    assert res.exp_liouville is False


def test_tower_certificate_errors_are_exactly_exponential():
    # partial sums p/q with q = 2**b_n leave an error of about 2**(-q) = exp(-q log 2)
    res = classify(LiouvilleCertificate.tower())
    assert res.verdict == "ExpLiouville"
    assert res.exp_liouville is True and res.super_exp_liouville is False


def test_faster_tower_is_super_exponential():
    res = classify(LiouvilleCertificate.tower_times())
    assert res.verdict == "SuperExpLiouville"
    assert res.implications_hold()


@pytest.mark.parametrize("cert", [LiouvilleCertificate.golden(), LiouvilleCertificate.liouville_constant(),
                                  LiouvilleCertificate.tower(), LiouvilleCertificate.tower_times(),
                                  LiouvilleCertificate.rational(3, 7)])
def test_certificate_record_round_trip(cert):
    assert LiouvilleCertificate.from_record(cert.to_record()) == cert
    assert classify(cert).implications_hold()


def test_certificate_rejects_unknown_keys():
    with pytest.raises(DiophantineError):
        LiouvilleCertificate.from_record({"kind": "rational", "p": 1, "q": 2, "z": 0})


def test_radius_for_omega_one():
    res = sin_series_radius(1.0, 100_000)
    assert 0.98 <= res.estimate <= 1.0


def test_radius_for_golden_kappa():
    res = sin_series_radius(math.pi / ((1 + math.sqrt(5)) / 2), 10_000)
    assert abs(res.estimate - 1.0) <= 0.02


def test_radius_records_hit_convergent_denominators():
    a = sum(Fraction(1, 10 ** math.factorial(n)) for n in range(1, 5))
    mpmath.mp.dps = 40
    omega = float(mpmath.pi * a.denominator / a.numerator)
    res = sin_series_radius(omega, 120_000)
    records = {int(r[0]) for r in res.records}
    denominators = [q for _, q in continued_fraction(1 / a, depth=40).convergents if q <= 120_000]
    assert denominators == [1, 11, 1090, 1101, 12100, 110001]
    assert set(denominators) <= records
    assert res.estimate < 1.0


def test_rational_opening_has_vanishing_denominators():
    with pytest.raises(DiophantineError):
        sin_series_radius(Opening.pi_multiple(Fraction(1, 3)), 100)


def test_resonance_distance():
    k, d = resonance_distance(math.pi / 2, [1, 2, 3, 4])
    assert list(k) == [0, 1, 2, 2] or list(k) == [1, 1, 2, 2]
    assert d[1] == pytest.approx(0.0, abs=1e-15)
