"""Continued fractions, Liouville-type classification of pi/omega, and the radius of
convergence of sum x**l / sin(l*omega)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .geometry import Opening


class DiophantineError(ValueError):
    pass


# --------------------------------------------------------------------------- continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    quotients: tuple
    convergents: tuple
    terminated: bool
    tolerance: float

    @property
    def a0(self) -> int:
        return self.quotients[0]

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def determinant_identity(self) -> bool:
        """p_n q_{n-1} - p_{n-1} q_n = (-1)**(n-1) for every n >= 1 (exact integers)."""
        ok = True
        for n in range(1, len(self.convergents)):
            p, q = self.convergents[n]
            pp, qq = self.convergents[n - 1]
            ok &= p * qq - pp * q == (-1) ** (n - 1)
        return ok

    def to_record(self) -> dict:
        return {"quotients": list(self.quotients),
                "convergents": [[str(p), str(q)] for p, q in self.convergents],
                "terminated": self.terminated}


def exact_value(x) -> tuple[Fraction, float]:
    """Exact rational value of a number and the relative precision it carries."""
    if isinstance(x, Fraction):
        return x, 0.0
    if isinstance(x, int):
        return Fraction(x), 0.0
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        value = Fraction(int(man)) * (Fraction(2) ** int(exp) if exp >= 0 else Fraction(1, 2 ** int(-exp)))
        return value, 2.0 ** (-mpmath.mp.prec)
    x = float(x)
    if not math.isfinite(x):
        raise DiophantineError("continued fraction of a non-finite number")
    return Fraction(x), 2.0**-52


def continued_fraction(x, depth: int = 20) -> ContinuedFraction:
    """Euclidean algorithm on the exact value of ``x``.

    Stops at ``depth`` quotients, at an exact rational, or once the convergent reproduces
    ``x`` to the precision of its representation (flagged as rational detection).
    """
    if depth < 1:
        raise DiophantineError("depth must be at least 1")
    value, tol = exact_value(x)
    quotients: list[int] = []
    conv: list[tuple[int, int]] = []
    p_prev, q_prev, p, q = 0, 1, 1, 0
    r = value
    terminated = False
    while len(quotients) < depth:
        a = math.floor(r)
        quotients.append(int(a))
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        conv.append((int(p), int(q)))
        frac = r - a
        if frac == 0:
            terminated = True
            break
        if tol > 0 and abs(value - Fraction(p, q)) <= tol * max(1, abs(value)):
            terminated = True
            break
        r = 1 / frac
    return ContinuedFraction(tuple(quotients), tuple(conv), terminated, tol)


# --------------------------------------------------------------------------- certificates


GROWTH_RULES: dict[str, Callable[[int, int], int]] = {
    "tower": lambda b, n: 2**b,
    "tower_times": lambda b, n: b * 2**b,
    "factorial": lambda b, n: b * (n + 1),
    "double": lambda b, n: 2 * b,
}

_COMPUTABLE = 2**22


@dataclass(frozen=True)
class LiouvilleCertificate:
    """Exact description of a number: a rational, an irrational with bounded quotients,
    or a lacunary series sum_n base**(-b_n) with a growth rule b_{n+1} = rule(b_n, n)."""

    kind: str
    p: int = 0
    q: int = 1
    quotients: tuple = ()
    a0: int = 0
    base: int = 2
    b0: int = 1
    start: int = 0
    rule: str = ""

    def __post_init__(self):
        if self.kind not in ("rational", "bounded", "lacunary"):
            raise DiophantineError(f"unknown certificate kind {self.kind!r}")
        if self.kind == "rational" and self.q < 1:
            raise DiophantineError("rational certificate needs q >= 1")
        if self.kind == "bounded" and (not self.quotients or min(self.quotients) < 1):
            raise DiophantineError("bounded certificate needs a periodic block of positive quotients")
        if self.kind == "lacunary":
            if self.rule not in GROWTH_RULES:
                raise DiophantineError(f"unknown growth rule {self.rule!r}")
            if self.base < 2 or self.b0 < 1:
                raise DiophantineError("lacunary certificate needs base >= 2 and b0 >= 1")
            nxt = GROWTH_RULES[self.rule](self.b0, self.start)
            if nxt <= self.b0:
                raise DiophantineError("growth rule must be increasing")

    @classmethod
    def rational(cls, p: int, q: int) -> "LiouvilleCertificate":
        return cls("rational", p=int(p), q=int(q))

    @classmethod
    def golden(cls) -> "LiouvilleCertificate":
        return cls("bounded", quotients=(1,), a0=1)

    @classmethod
    def liouville_constant(cls) -> "LiouvilleCertificate":
        """sum_{n >= 1} 10**(-n!)."""
        return cls("lacunary", base=10, b0=1, start=1, rule="factorial")

    @classmethod
    def tower(cls, b0: int = 2) -> "LiouvilleCertificate":
        """sum_n 2**(-b_n) with b_{n+1} = 2**b_n."""
        return cls("lacunary", base=2, b0=b0, rule="tower")

    @classmethod
    def tower_times(cls, b0: int = 2) -> "LiouvilleCertificate":
        """sum_n 2**(-b_n) with b_{n+1} = b_n * 2**b_n."""
        return cls("lacunary", base=2, b0=b0, rule="tower_times")

    @property
    def bound(self) -> int:
        return max(self.quotients)

    def exponents(self) -> list[int]:
        """Terms b_n of a lacunary series, generated while the rule stays computable."""
        out = [self.b0]
        n = self.start
        fn = GROWTH_RULES[self.rule]
        while out[-1] <= _COMPUTABLE and len(out) < 64:
            out.append(fn(out[-1], n))
            n += 1
        return out

    def bounded_convergents(self, depth: int) -> list[tuple[int, int]]:
        p_prev, q_prev, p, q = 1, 0, self.a0, 1
        conv = [(p, q)]
        for i in range(depth - 1):
            a = self.quotients[i % len(self.quotients)]
            p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
            conv.append((p, q))
        return conv

    def to_record(self) -> dict:
        if self.kind == "rational":
            return {"kind": "rational", "p": self.p, "q": self.q}
        if self.kind == "bounded":
            return {"kind": "bounded", "a0": self.a0, "quotients": list(self.quotients)}
        return {"kind": "lacunary", "base": self.base, "b0": self.b0, "start": self.start, "rule": self.rule}

    @classmethod
    def from_record(cls, rec: dict) -> "LiouvilleCertificate":
        rec = dict(rec)
        kind = rec.pop("kind", None)
        allowed = {"rational": {"p", "q"}, "bounded": {"a0", "quotients"},
                   "lacunary": {"base", "b0", "start", "rule"}}
        if kind not in allowed:
            raise DiophantineError(f"unknown certificate kind {kind!r}")
        extra = set(rec) - allowed[kind]
        if extra:
            raise DiophantineError(f"unknown certificate keys {sorted(extra)}")
        if "quotients" in rec:
            rec["quotients"] = tuple(int(a) for a in rec["quotients"])
        return cls(kind, **rec)


VERDICTS = ("Rational", "NotLiouville", "Liouville", "ExpLiouville", "SuperExpLiouville",
            "InconclusiveEvidence")


@dataclass(frozen=True)
class AngleClass:
    verdict: str
    certified: bool
    evidence: tuple = ()
    liouville: bool | None = None
    exp_liouville: bool | None = None
    super_exp_liouville: bool | None = None
    notes: str = ""

    def implications_hold(self) -> bool:
        """SuperExp => Exp => Liouville on the recorded flags."""
        if self.super_exp_liouville and not self.exp_liouville:
            return False
        if self.exp_liouville and not self.liouville:
            return False
        return True

    def to_record(self) -> dict:
        return {"verdict": self.verdict, "certified": self.certified,
                "liouville": self.liouville, "exp_liouville": self.exp_liouville,
                "super_exp_liouville": self.super_exp_liouville,
                "evidence": [[float(a), float(b)] for a, b in self.evidence], "notes": self.notes}


def _trend(values: Sequence[float]) -> str:
    """'up', 'down', 'flat' or 'unknown' for the tail of a sequence."""
    v = list(values)[-4:]
    if len(v) < 3:
        return "unknown"
    d = np.diff(v)
    if np.all(np.abs(d) <= 1e-9 * (1 + np.abs(np.asarray(v[1:])))):
        return "flat"
    if np.all(d > 0) and np.all(np.diff(d) >= 0):
        return "up"
    if np.all(d < 0) and np.all(np.diff(d) <= 0):
        return "down"
    return "unknown"


def _scaled(b: int, factor: float) -> float:
    """b * factor as a float, infinite when it overflows."""
    log = math.log(b) + math.log(factor)
    return math.exp(log) if log < 709 else math.inf


def _classify_lacunary(cert: LiouvilleCertificate, m_max: int) -> AngleClass:
    b = cert.exponents()
    ln_base = math.log(cert.base)
    # log q_n = b_n ln B and -log|a - p_n/q_n| = b_{n+1} ln B up to a factor in (1, 2)
    evidence = tuple((_scaled(bn, ln_base), _scaled(bnext, ln_base)) for bn, bnext in zip(b[:-1], b[1:]))
    log_ratios = [math.log(bnext) - math.log(bn) for bn, bnext in zip(b[:-1], b[1:])]
    tail = log_ratios[-3:]
    increasing = len(tail) >= 2 and all(y > x for x, y in zip(tail[:-1], tail[1:]))
    ratio_trend = "up" if increasing else _trend(log_ratios)
    liouville = increasing and log_ratios[-1] > math.log(m_max)
    # effective constant L_n: the error beats exp(-c q_n) iff L_n >= log c
    eff = [math.log(bnext) + math.log(ln_base) - bn * ln_base for bn, bnext in zip(b[:-1], b[1:])]
    trend = _trend(eff)
    if not liouville:
        if ratio_trend in ("flat", "down") or max(log_ratios) <= math.log(m_max):
            return AngleClass("InconclusiveEvidence", False, evidence, None, False, False,
                              "bounded exponent ratios: no Liouville certificate from truncations")
        return AngleClass("InconclusiveEvidence", False, evidence, notes="exponent ratios undecided")
    if trend == "up":
        return AngleClass("SuperExpLiouville", True, evidence, True, True, True,
                          "effective exponential constant diverges to +inf")
    if trend == "flat":
        return AngleClass("ExpLiouville", True, evidence, True, True, False,
                          f"effective exponential constant stays at {eff[-1]:.6g}")
    if trend == "down":
        return AngleClass("Liouville", True, evidence, True, False, False,
                          "effective exponential constant diverges to -inf")
    return AngleClass("Liouville", True, evidence, True, None, None,
                      "exponential behaviour undecided on the computable range")


def classify(x, depth: int = 30, *, m_max: int = 10) -> AngleClass:
    """Verdict on the Liouville class of a number.

    Certificates give certified verdicts; plain numbers only give approximation evidence.
    """
    if isinstance(x, LiouvilleCertificate):
        if x.kind == "rational":
            return AngleClass("Rational", True, (), False, False, False)
        if x.kind == "bounded":
            conv = x.bounded_convergents(min(depth, 40))
            ref_p, ref_q = x.bounded_convergents(min(depth, 40) + 20)[-1]
            ref = Fraction(ref_p, ref_q)
            ev = tuple((math.log(q), -math.log(abs(float(ref - Fraction(p, q))))) for p, q in conv[1:]
                       if ref != Fraction(p, q))
            return AngleClass("NotLiouville", True, ev, False, False, False,
                              f"partial quotients bounded by {x.bound}")
        return _classify_lacunary(x, m_max)
    cf = continued_fraction(x, depth)
    value, _ = exact_value(x)
    ev = []
    for p, q in cf.convergents[:-1]:
        err = abs(value - Fraction(p, q))
        if err > 0:
            ev.append((math.log(q), -math.log(float(err)) if float(err) > 0 else math.inf))
    exact = isinstance(x, (Fraction, int))
    if cf.terminated and Fraction(*cf.convergents[-1]) == value:
        return AngleClass("Rational", exact, tuple(ev), notes="" if exact else "exactly representable rational")
    if cf.terminated:
        return AngleClass("InconclusiveEvidence", False, tuple(ev),
                          notes="a convergent matches to working precision; rationality is not decidable")
    return AngleClass("InconclusiveEvidence", False, tuple(ev),
                      notes="asymptotic classes cannot be decided from finite data")


# --------------------------------------------------------------------------- resonance scans


def resonance_distance(omega: float, ell) -> tuple[np.ndarray, np.ndarray]:
    """(k, |l*omega - k*pi|) with k = round(l*omega/pi)."""
    ell = np.asarray(ell, dtype=float)
    k = np.round(ell * omega / math.pi)
    return k.astype(np.int64), np.abs(ell * omega - k * math.pi)


@dataclass(frozen=True)
class SinSeriesRadius:
    estimate: float
    records: tuple
    tail_start: int
    l_max: int

    def to_record(self) -> dict:
        return {"rho_s_estimate": self.estimate, "tail_start": self.tail_start, "l_max": self.l_max,
                "records": [{"ell": int(l), "k": int(k), "distance": float(d), "abs_sin": float(s)}
                            for l, k, d, s in self.records]}


def sin_series_radius(omega, l_max: int, *, tail_start: int = 1000) -> SinSeriesRadius:
    """Estimate of 1 / limsup |sin(l omega)|**(-1/l) from l in [tail_start, l_max].

    Records are the l where |sin(l omega)| reaches a new minimum over 1..l_max.
    """
    if isinstance(omega, Opening) and omega.is_rational:
        raise DiophantineError("denominator vanishes: pi/omega declared rational")
    w = omega.value if isinstance(omega, Opening) else float(omega)
    if l_max < 1:
        raise DiophantineError("l_max must be positive")
    start = tail_start if l_max >= tail_start else 1
    ell = np.arange(1, l_max + 1)
    k, d = resonance_distance(w, ell)
    s = np.abs(np.sin(d))
    if np.any(s == 0):
        raise DiophantineError("denominator vanishes at a scanned degree")
    tail = slice(start - 1, l_max)
    worst = float(np.max(s[tail] ** (-1.0 / ell[tail])))
    running = np.minimum.accumulate(s)
    is_record = np.concatenate([[True], running[1:] < running[:-1]])
    recs = tuple((int(l), int(kk), float(dd), float(ss))
                 for l, kk, dd, ss in zip(ell[is_record], k[is_record], d[is_record], s[is_record]))
    return SinSeriesRadius(1.0 / worst, recs, start, int(l_max))
