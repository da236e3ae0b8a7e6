"""Convergent expansion of the unperturbed solution at the corner of a sector.

The solution of Delta u0 = f in the pie slice, u0 = 0 on its boundary, is written
near the vertex as Im sum_gamma a_gamma Z_gamma(zeta), where gamma runs over pairs
(p, q) of non-negative integers and over the multiples k*kappa of kappa = pi/omega.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy import fft

from .geometry import Opening, as_complex, branch_angle


class CornerSeriesError(ValueError):
    """Invalid input to a corner-series computation."""


# --------------------------------------------------------------------------- helpers


def exprel(z):
    """(exp(z) - 1) / z, equal to 1 at z = 0; accepts complex input."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-5
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z / 2 + z * z / 6, np.expm1(safe) / safe)


def sector_log(zeta) -> np.ndarray:
    """log zeta with the argument taken in [0, 2*pi)."""
    z = np.asarray(as_complex(zeta), dtype=complex)
    if np.any(z == 0):
        raise CornerSeriesError("logarithmic terms are singular at the vertex")
    return np.log(np.abs(z)) + 1j * branch_angle(z)


def sector_power(zeta, exponent: float) -> np.ndarray:
    z = np.asarray(as_complex(zeta), dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    nz = z != 0
    out[nz] = np.exp(exponent * (np.log(np.abs(z[nz])) + 1j * branch_angle(z[nz])))
    return out


def fit_growth(magnitudes, values) -> tuple[float, float]:
    """(C, M) with |value| <= C * M**magnitude: least-squares slope, envelope constant."""
    m = np.asarray(magnitudes, dtype=float)
    v = np.abs(np.asarray(values))
    # rounding-level coefficients would dominate a log-linear fit
    keep = v > max(1e-300, 1e-12 * float(np.max(v, initial=0.0)))
    m, v = m[keep], v[keep]
    if v.size == 0:
        return 0.0, 1.0
    if np.unique(m).size < 2:
        slope = 0.0
    else:
        slope = float(np.polyfit(m, np.log(v), 1)[0])
    growth = math.exp(slope)
    const = float(np.max(v / growth**m))
    return const, growth


# --------------------------------------------------------------------------- right-hand sides


def _gauss_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _binomial_row(n: int):
    return [math.comb(n, i) for i in range(n + 1)]


def real_to_zeta_basis(coeffs: Mapping[tuple[int, int], float]) -> dict:
    """Coefficients of sum f_a t1**a1 t2**a2 in the basis zeta**p conj(zeta)**q (exact)."""
    out: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
    for (a1, a2), value in coeffs.items():
        c = Fraction(value)
        if c == 0:
            continue
        # t1 = (z + zb)/2, t2 = (z - zb)/(2i) = -i (z - zb)/2
        scale = (c / Fraction(2) ** (a1 + a2), Fraction(0))
        unit = (Fraction(1), Fraction(0))
        for _ in range(a2):
            unit = _gauss_mul(unit, (Fraction(0), Fraction(-1)))
        scale = _gauss_mul(scale, unit)
        for i, bi in enumerate(_binomial_row(a1)):
            for j, bj in enumerate(_binomial_row(a2)):
                sign = (-1) ** (a2 - j)
                key = (i + j, a1 - i + a2 - j)
                term = (scale[0] * bi * bj * sign, scale[1] * bi * bj * sign)
                prev = out.get(key, (Fraction(0), Fraction(0)))
                out[key] = (prev[0] + term[0], prev[1] + term[1])
    return {k: complex(float(v[0]), float(v[1])) for k, v in out.items() if v != (0, 0)}


def zeta_to_real_basis(coeffs: Mapping[tuple[int, int], complex]) -> dict:
    """Inverse of :func:`real_to_zeta_basis` (real parts; exact on rational input)."""
    out: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
    for (p, q), value in coeffs.items():
        c = (Fraction(complex(value).real), Fraction(complex(value).imag))
        # zeta = t1 + i t2, conj(zeta) = t1 - i t2
        for i, bi in enumerate(_binomial_row(p)):
            for j, bj in enumerate(_binomial_row(q)):
                n_t2 = (p - i) + (q - j)
                unit = (Fraction(1), Fraction(0))
                for _ in range(p - i):
                    unit = _gauss_mul(unit, (Fraction(0), Fraction(1)))
                for _ in range(q - j):
                    unit = _gauss_mul(unit, (Fraction(0), Fraction(-1)))
                term = _gauss_mul(c, (unit[0] * bi * bj, unit[1] * bi * bj))
                key = (i + j, n_t2)
                prev = out.get(key, (Fraction(0), Fraction(0)))
                out[key] = (prev[0] + term[0], prev[1] + term[1])
    return {k: float(v[0]) for k, v in out.items() if v[0] != 0}


class AnalyticRHS:
    """Polynomial right-hand side f stored in both the real and the zeta basis."""

    def __init__(self, taylor: Mapping[tuple[int, int], complex] | None = None, *,
                 real: Mapping[tuple[int, int], float] | None = None,
                 majorant: tuple[float, float] | None = None,
                 truncation_radius: float | None = None):
        if (taylor is None) == (real is None):
            raise CornerSeriesError("give exactly one of the zeta-basis or real-basis coefficients")
        if real is not None:
            self.real = {tuple(map(int, k)): float(v) for k, v in real.items() if v != 0}
            self.taylor = real_to_zeta_basis(self.real)
        else:
            self.taylor = {tuple(map(int, k)): complex(v) for k, v in taylor.items() if v != 0}
            for (p, q), v in self.taylor.items():
                mirror = self.taylor.get((q, p), 0j)
                if abs(mirror - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
                    raise CornerSeriesError("zeta-basis coefficients do not describe a real function")
            self.real = zeta_to_real_basis(self.taylor)
        self.truncation_radius = truncation_radius
        if majorant is None:
            majorant = self._default_majorant()
        self.majorant = (float(majorant[0]), float(majorant[1]))
        C, M = self.majorant
        for (p, q), v in self.taylor.items():
            if abs(v) > C * M ** (p + q) * (1 + 1e-12):
                raise CornerSeriesError(f"coefficient {(p, q)} violates the majorant bound")

    def _default_majorant(self) -> tuple[float, float]:
        if not self.taylor:
            return 1.0, 1.0
        grow = max([1.0] + [abs(v) ** (1.0 / (p + q)) for (p, q), v in self.taylor.items() if p + q > 0])
        const = max(abs(v) / grow ** (p + q) for (p, q), v in self.taylor.items())
        return max(const, 1e-300), grow

    @classmethod
    def constant(cls, value: float) -> "AnalyticRHS":
        return cls(real={(0, 0): value})

    @classmethod
    def zero(cls) -> "AnalyticRHS":
        return cls(real={})

    @property
    def degree(self) -> int:
        return max((p + q for p, q in self.taylor), default=-1)

    @property
    def vanishes_near_corner(self) -> bool:
        return not self.taylor

    @property
    def analyticity_radius(self) -> float:
        return math.inf if self.truncation_radius is None else self.truncation_radius

    def evaluate(self, points) -> np.ndarray:
        z = as_complex(points)
        out = np.zeros(np.shape(z))
        for (a1, a2), v in self.real.items():
            out = out + v * z.real**a1 * z.imag**a2
        return out

    def particular(self) -> "ZetaPolynomial":
        return particular_interior(self)

    def particular_value(self, points) -> np.ndarray:
        return self.particular().evaluate(points)

    def to_record(self) -> dict:
        return {"kind": "polynomial",
                "real": [[a1, a2, v] for (a1, a2), v in sorted(self.real.items())]}


class RadialStepRHS:
    """f = value where rho > radius and 0 closer to the vertex."""

    def __init__(self, value: float, radius: float):
        if radius <= 0:
            raise CornerSeriesError("step radius must be positive")
        self.value = float(value)
        self.radius = float(radius)
        self.taylor: dict = {}
        self.real: dict = {}
        self.majorant = (1.0, 1.0)

    vanishes_near_corner = True
    degree = -1

    @property
    def analyticity_radius(self) -> float:
        return self.radius

    def evaluate(self, points) -> np.ndarray:
        rho = np.abs(as_complex(points))
        return np.where(rho > self.radius, self.value, 0.0)

    def particular(self) -> "ZetaPolynomial":
        return ZetaPolynomial({})

    def particular_value(self, points) -> np.ndarray:
        """Radial solution of Delta u = f, vanishing with its gradient inside the step radius."""
        rho = np.abs(as_complex(points))
        r = self.radius
        outside = rho > r
        safe = np.where(outside, rho, r)
        val = self.value * (safe**2 / 4 - r**2 / 4 - 0.5 * r**2 * np.log(safe / r))
        return np.where(outside, val, 0.0)

    def to_record(self) -> dict:
        return {"kind": "step", "value": self.value, "radius": self.radius}


# --------------------------------------------------------------------------- particular solutions


@dataclass(frozen=True)
class ZetaPolynomial:
    """Real function sum b_pq zeta**p conj(zeta)**q."""

    coeffs: Mapping[tuple[int, int], complex]

    def evaluate(self, points) -> np.ndarray:
        z = as_complex(points)
        out = np.zeros(np.shape(z), dtype=complex)
        for (p, q), b in self.coeffs.items():
            out = out + b * z**p * np.conj(z) ** q
        return out.real

    def ray_coefficients(self, theta: float, degree: int | None = None) -> np.ndarray:
        """Coefficients of rho**l in the restriction to the ray of angle theta."""
        top = max((p + q for p, q in self.coeffs), default=0)
        degree = top if degree is None else degree
        out = np.zeros(degree + 1)
        for (p, q), b in self.coeffs.items():
            if p + q <= degree:
                out[p + q] += (b * np.exp(1j * (p - q) * theta)).real
        return out

    def laplacian(self) -> dict:
        """Coefficients of Delta = 4 d^2/(dzeta dzetabar)."""
        out = {}
        for (p, q), b in self.coeffs.items():
            if p and q:
                out[(p - 1, q - 1)] = out.get((p - 1, q - 1), 0) + 4 * p * q * b
        return out


def particular_interior(f) -> ZetaPolynomial:
    """Polynomial u_f with Delta u_f = f obtained by integrating each monomial twice."""
    return ZetaPolynomial({(a1 + 1, a2 + 1): v / (4.0 * (a1 + 1) * (a2 + 1))
                           for (a1, a2), v in f.taylor.items()})


@dataclass(frozen=True)
class LateralData:
    """Taylor coefficients of the side traces -u_f(rho, 0) and -u_f(rho, omega)."""

    g0: np.ndarray
    gw: np.ndarray
    rho1: float
    rho1p: float

    def __post_init__(self):
        if not (0 < self.rho1p < self.rho1):
            raise CornerSeriesError("need 0 < rho1' < rho1")

    @property
    def growth_constant(self) -> float:
        ell = np.arange(self.g0.size)
        if not np.isfinite(self.rho1):
            return float(np.max(np.abs(self.g0) + np.abs(self.gw), initial=0.0))
        return float(np.max((np.abs(self.g0) + np.abs(self.gw)) * self.rho1**ell, initial=0.0))


def lateral_traces(uf: ZetaPolynomial, omega, rho1: float = 1.0, rho1p: float | None = None) -> LateralData:
    omega = Opening.coerce(omega)
    rho1p = 0.5 * rho1 if rho1p is None else rho1p
    g0 = -uf.ray_coefficients(0.0)
    gw = -uf.ray_coefficients(omega.value)
    g0[0] = gw[0] = 0.0
    return LateralData(g0, gw, rho1, rho1p)


# --------------------------------------------------------------------------- index sets


@dataclass(frozen=True, order=True)
class CornerIndex:
    """Element of the index set: a pair (p, q) or a multiple k of kappa."""

    magnitude: float
    kind: str
    alpha: tuple = (0, 0)
    k: int = 0

    @classmethod
    def pair(cls, p: int, q: int) -> "CornerIndex":
        return cls(float(p + q), "pair", (int(p), int(q)), 0)

    @classmethod
    def power(cls, k: int, kappa: float) -> "CornerIndex":
        return cls(float(k * kappa), "power", (0, 0), int(k))

    @property
    def is_power(self) -> bool:
        return self.kind == "power"

    @property
    def level(self) -> int:
        return self.alpha[0] + self.alpha[1]

    def label(self) -> str:
        if self.is_power:
            return f"{self.k}*kappa"
        return f"({self.alpha[0]},{self.alpha[1]})"


def default_threshold(omega) -> float:
    omega = Opening.coerce(omega)
    return 0.4 * min(omega.value, math.pi)


@dataclass(frozen=True)
class IndexSet:
    """Index set up to a magnitude cutoff, with its near-resonant subset."""

    omega: Opening
    delta: float
    gamma_max: float
    entries: tuple
    exceptional: Mapping[int, int]
    exact: frozenset

    @property
    def kappa(self) -> float:
        return self.omega.kappa

    def is_exceptional(self, gamma: CornerIndex) -> bool:
        return gamma.kind == "pair" and gamma.alpha[1] == 0 and gamma.alpha[0] in self.exceptional

    def paired_k(self, ell: int) -> int:
        return self.exceptional[ell]

    def gamma_prime(self, ell: int) -> float:
        return self.exceptional[ell] * self.kappa

    def term_kind(self, gamma: CornerIndex) -> str:
        if gamma.is_power:
            return "power"
        if self.is_exceptional(gamma):
            return "log" if gamma.alpha[0] in self.exact else "divided"
        return "plain"

    def resonance_gap(self, ell: int) -> float:
        """ell - k*kappa for an exceptional index (exactly 0 at exact resonances)."""
        if ell in self.exact:
            return 0.0
        return ell - self.gamma_prime(ell)

    def exponents(self, horizon: float) -> list[tuple[float, int]]:
        """(exponent, multiplicity) pairs of the full index set up to ``horizon``."""
        out = [(float(level), level + 1) for level in range(1, int(math.floor(horizon)) + 1)]
        k = 1
        while k * self.kappa <= horizon:
            out.append((k * self.kappa, 1))
            k += 1
        return sorted(out)


def _resonance(omega: Opening, ell: int) -> tuple[int, float, bool]:
    """(k, |ell*omega - k*pi|, exact) with k = round(ell*omega/pi)."""
    if omega.pi_ratio is not None:
        r = ell * omega.pi_ratio
        k = round(r)
        return int(k), abs(float(r - k)) * math.pi, r == k
    x = ell * omega.value / math.pi
    k = round(x)
    return int(k), abs(ell * omega.value - k * math.pi), False


def build_index_set(omega, delta: float | None = None, gamma_max: float = 8.0) -> IndexSet:
    """Enumerate indices with magnitude <= gamma_max and the near-resonant pairs (l, 0).

    ``delta = 0`` keeps only exact resonances, which are present only for openings
    declared as rational multiples of pi.
    """
    omega = Opening.coerce(omega)
    if delta is None:
        delta = default_threshold(omega)
    limit = 0.5 * min(omega.value, math.pi)
    if not (0.0 <= delta < limit):
        raise CornerSeriesError(f"threshold must lie in [0, {limit:.6g}), got {delta}")
    if gamma_max < 0:
        raise CornerSeriesError("cutoff must be non-negative")
    kappa = omega.kappa
    tol = 1e-12 * max(1.0, gamma_max)
    entries = [CornerIndex.pair(p, level - p) for level in range(1, int(math.floor(gamma_max + tol)) + 1)
               for p in range(level + 1)]
    k = 1
    while k * kappa <= gamma_max + tol:
        entries.append(CornerIndex.power(k, kappa))
        k += 1
    exceptional, exact = {}, set()
    for ell in range(1, int(math.floor(gamma_max + tol)) + 1):
        kk, dist, is_exact = _resonance(omega, ell)
        if kk >= 1 and (is_exact or dist <= delta and delta > 0):
            exceptional[ell] = kk
            if is_exact:
                exact.add(ell)
    if len(set(exceptional.values())) != len(exceptional):
        raise CornerSeriesError("near-resonant pairing is not injective; decrease the threshold")
    return IndexSet(omega, float(delta), float(gamma_max), tuple(sorted(entries)),
                    dict(exceptional), frozenset(exact))


# --------------------------------------------------------------------------- terms


def eval_Z(gamma: CornerIndex, zeta, idx: IndexSet) -> np.ndarray:
    """Basis function Z_gamma on the sector (power, monomial, logarithmic or divided difference)."""
    z = np.asarray(as_complex(zeta), dtype=complex)
    if gamma.is_power:
        return sector_power(z, gamma.magnitude)
    p, q = gamma.alpha
    if idx.is_exceptional(gamma):
        ell = p
        gp = idx.gamma_prime(ell)
        log = sector_log(z)
        return sector_power(z, gp) * log * exprel(idx.resonance_gap(ell) * log)
    return z**p * np.conj(z) ** q


def eval_Z_prime(gamma: CornerIndex, zeta, idx: IndexSet) -> np.ndarray:
    """zeta**gamma' for an exceptional index."""
    return sector_power(zeta, idx.gamma_prime(gamma.alpha[0]))


def eval_E(gamma: CornerIndex, eps: float, idx: IndexSet) -> float:
    """Scale factor: eps**|gamma|, eps**l log eps, or the divided difference of two powers."""
    if eps <= 0:
        raise CornerSeriesError("scale factor needs eps > 0")
    if idx.is_exceptional(gamma):
        ell = gamma.alpha[0]
        gp = idx.gamma_prime(ell)
        le = math.log(eps)
        return float((eps**gp * le * exprel(idx.resonance_gap(ell) * le)).real)
    return float(eps**gamma.magnitude)


@dataclass(frozen=True)
class LateralTerm:
    """Harmonic w_l of degree l with prescribed traces g0 rho**l and gw rho**l on the sides."""

    ell: int
    kind: str
    a: float
    b: float
    k: int = 0
    gamma_prime: float = 0.0

    def evaluate(self, zeta, idx: IndexSet) -> np.ndarray:
        z = as_complex(zeta)
        main = (self.a * eval_Z(CornerIndex.pair(self.ell, 0), z, idx)).imag
        return main + self.b * (z**self.ell).real


def lateral_term(ell: int, g0: float, gw: float, omega, idx: IndexSet) -> LateralTerm:
    """Coefficients of w_l; near resonance the stable divided-difference form is used."""
    omega = Opening.coerce(omega)
    if ell < 1:
        raise CornerSeriesError("lateral terms start at degree 1")
    c = math.cos(ell * omega.value)
    mismatch = gw - g0 * c
    if ell in idx.exceptional:
        k = idx.exceptional[ell]
        if ell in idx.exact:
            x = 0.0
            kind = "log"
        else:
            x = ell * omega.value - k * math.pi
            kind = "divided"
        a = mismatch * (-1) ** k / (omega.value * float(np.sinc(x / math.pi)))
        return LateralTerm(ell, kind, a, g0, k, k * idx.kappa)
    s = math.sin(ell * omega.value)
    if abs(s) < 1e-300:
        raise CornerSeriesError(f"sin({ell}*omega) vanishes; degree {ell} must be treated as resonant")
    return LateralTerm(ell, "plain", mismatch / s, g0)


# --------------------------------------------------------------------------- remainder


@dataclass(frozen=True)
class RemainderCoefficients:
    c: np.ndarray
    g: np.ndarray
    rho1p: float
    kappa: float
    samples: int

    @property
    def growth(self) -> tuple[float, float]:
        k = np.arange(1, self.c.size + 1)
        return fit_growth(k * self.kappa, self.c)


def remainder_coeffs(arc_trace, omega, k_max: int, rho1p: float, *, samples: int | None = None,
                     tol: float = 1e-8) -> RemainderCoefficients:
    """Sine coefficients of a trace on the arc rho = rho1', rescaled to series coefficients.

    ``arc_trace`` is a callable of the angle, or samples at j*omega/N for j = 0..N.
    """
    omega = Opening.coerce(omega)
    kappa = omega.kappa
    if callable(arc_trace):
        n = samples or max(4 * k_max, 128)
        theta = omega.value * np.arange(n + 1) / n
        vals = np.asarray(arc_trace(theta), dtype=float)
    else:
        vals = np.asarray(arc_trace, dtype=float)
        n = vals.size - 1
    if k_max > n - 1:
        raise CornerSeriesError("too few samples for the requested number of modes")
    scale = max(1.0, float(np.max(np.abs(vals))))
    if abs(vals[0]) > tol * scale or abs(vals[-1]) > tol * scale:
        raise CornerSeriesError("arc trace does not vanish at the sides of the sector")
    coeffs = fft.dst(vals[1:-1], type=1) / n if n > 1 else np.zeros(0)
    g = np.zeros(k_max)
    g[:min(k_max, coeffs.size)] = coeffs[:k_max]
    k = np.arange(1, k_max + 1)
    c = g * rho1p ** (-k * kappa)
    return RemainderCoefficients(c, g, float(rho1p), kappa, n)


# --------------------------------------------------------------------------- expansion


@dataclass
class CornerExpansion:
    """Coefficients a_gamma of the corner expansion, with their growth fit."""

    idx: IndexSet
    coeffs: dict
    lateral: dict
    particular: ZetaPolynomial
    remainder: RemainderCoefficients | None
    rho1: float
    rho1p: float
    growth: tuple = field(default=(0.0, 1.0))

    def __post_init__(self):
        mags = [g.magnitude for g, a in self.coeffs.items()]
        self.growth = fit_growth(mags, [abs(a) for a in self.coeffs.values()])

    @property
    def omega(self) -> Opening:
        return self.idx.omega

    @property
    def kappa(self) -> float:
        return self.idx.kappa

    @property
    def validity_radius(self) -> float:
        return self.rho1p

    def coefficient(self, gamma: CornerIndex) -> complex:
        return self.coeffs.get(gamma, 0j)

    def kind(self, gamma: CornerIndex) -> str:
        return self.idx.term_kind(gamma)

    def nonzero(self, tol: float = 0.0) -> list:
        return [g for g in self.idx.entries if abs(self.coefficient(g)) > tol]

    def _check_radius(self, z: np.ndarray) -> None:
        if np.any(np.abs(z) > self.validity_radius * (1 + 1e-12)):
            warnings.warn("corner expansion evaluated beyond its validity radius", UserWarning)

    def evaluate(self, points, cutoff: float | None = None) -> np.ndarray:
        """Im sum_{|gamma| <= cutoff} a_gamma Z_gamma(zeta)."""
        z = np.atleast_1d(as_complex(points)).astype(complex)
        self._check_radius(z)
        cutoff = self.idx.gamma_max if cutoff is None else cutoff
        out = np.zeros(z.shape)
        for g in self.idx.entries:
            a = self.coefficient(g)
            if a != 0 and g.magnitude <= cutoff + 1e-12:
                out = out + (a * eval_Z(g, z, self.idx)).imag
        return out

    def packet(self, level: int, T) -> np.ndarray:
        """Im sum_{|gamma| = level, gamma a pair} a_gamma Z_gamma(T)."""
        z = np.atleast_1d(as_complex(T)).astype(complex)
        out = np.zeros(z.shape)
        for p in range(level + 1):
            g = CornerIndex.pair(p, level - p)
            a = self.coefficient(g)
            if a != 0:
                out = out + (a * eval_Z(g, z, self.idx)).imag
        return out

    def phi(self, gamma: CornerIndex, T) -> np.ndarray:
        """Profile Phi_gamma with u0(eps T) = sum_gamma E_gamma(eps) Phi_gamma(T)."""
        z = np.atleast_1d(as_complex(T)).astype(complex)
        if gamma.is_power:
            return (self.coefficient(gamma) * eval_Z(gamma, z, self.idx)).imag
        p, q = gamma.alpha
        if p == 0:
            return self.packet(q, z)
        if q == 0 and self.idx.is_exceptional(gamma):
            return (self.coefficient(gamma) * eval_Z_prime(gamma, z, self.idx)).imag
        return np.zeros(z.shape)

    def active_profiles(self, cutoff: float | None = None) -> list:
        """Indices whose profile Phi_gamma is not identically zero."""
        cutoff = self.idx.gamma_max if cutoff is None else cutoff
        out = []
        for g in self.idx.entries:
            if g.magnitude > cutoff + 1e-12:
                continue
            if g.is_power or (g.alpha[1] == 0 and self.idx.is_exceptional(g)):
                if self.coefficient(g) != 0:
                    out.append(g)
            elif g.alpha[0] == 0:
                if any(self.coefficient(CornerIndex.pair(p, g.level - p)) != 0 for p in range(g.level + 1)):
                    out.append(g)
        return out

    def evaluate_scaled(self, eps: float, T, cutoff: float | None = None) -> np.ndarray:
        """u0(eps T) in packet form; every packet vanishes on the sides of the sector."""
        z = np.atleast_1d(as_complex(T)).astype(complex)
        self._check_radius(eps * z)
        out = np.zeros(z.shape)
        for g in self.active_profiles(cutoff):
            out = out + eval_E(g, eps, self.idx) * self.phi(g, z)
        return out

    def tail_bound(self, radius: float, cutoff: float, horizon: float = 80.0) -> float:
        C, M = self.growth
        q = M * radius
        if q >= 1:
            return math.inf
        return float(sum(mult * C * q**e for e, mult in self.idx.exponents(cutoff + horizon) if e > cutoff + 1e-12))

    def to_record(self) -> dict:
        terms = []
        for g in self.idx.entries:
            a = self.coefficient(g)
            if a == 0:
                continue
            k = self.idx.exceptional.get(g.alpha[0]) if self.idx.is_exceptional(g) else None
            terms.append({"gamma": g.label(), "magnitude": g.magnitude, "kind": self.kind(g),
                          "a_re": float(a.real), "a_im": float(a.imag), "k_paired": k})
        return {"omega": self.omega.value, "omega_declared": self.omega.describe(),
                "delta_omega": self.idx.delta, "gamma_max": self.idx.gamma_max,
                "rho1": self.rho1, "rho1p": self.rho1p,
                "growth": {"C": self.growth[0], "M": self.growth[1]}, "terms": terms}


def boundary_part(f, omega, idx: IndexSet, rho1: float = 1.0, rho1p: float | None = None):
    """Particular solution u_f and the lateral terms w_l correcting its side traces."""
    uf = f.particular()
    lat = lateral_traces(uf, omega, rho1, rho1p)
    terms = {}
    for ell in range(1, lat.g0.size):
        if lat.g0[ell] != 0 or lat.gw[ell] != 0:
            terms[ell] = lateral_term(ell, float(lat.g0[ell]), float(lat.gw[ell]), omega, idx)
    return uf, lat, terms


def corner_expansion(f, omega, u0_arc: Callable | None, *, rho1: float = 1.0, rho1p: float | None = None,
                     delta: float | None = None, gamma_max: float = 8.0,
                     samples: int | None = None) -> CornerExpansion:
    """Assemble a_gamma from u_f, the lateral terms and the sine series of the remainder.

    ``u0_arc`` returns u0 at rho1' e^{i theta}; ``None`` means u0 is unavailable and the
    remainder is omitted.
    """
    omega = Opening.coerce(omega)
    rho1p = 0.5 * rho1 if rho1p is None else float(rho1p)
    idx = build_index_set(omega, delta, gamma_max)
    uf, lat, terms = boundary_part(f, omega, idx, rho1, rho1p)
    coeffs: dict = {}
    for (p, q), b in uf.coeffs.items():
        if p + q <= gamma_max + 1e-12:
            coeffs[CornerIndex.pair(p, q)] = 1j * complex(b)
    for ell, term in terms.items():
        if ell > gamma_max + 1e-12:
            continue
        if term.a != 0:
            coeffs[CornerIndex.pair(ell, 0)] = complex(term.a)
        if term.b != 0:
            coeffs[CornerIndex.pair(0, ell)] = 1j * term.b

    def boundary_value(z):
        val = uf.evaluate(z)
        for term in terms.values():
            val = val + term.evaluate(z, idx)
        return val

    remainder = None
    k_max = int(math.floor(gamma_max / idx.kappa + 1e-12))
    if u0_arc is not None and k_max >= 1:
        def arc(theta):
            z = rho1p * np.exp(1j * np.asarray(theta))
            return np.asarray(u0_arc(theta), dtype=float) - boundary_value(z)

        remainder = remainder_coeffs(arc, omega, k_max, rho1p, samples=samples)
        for k, c in enumerate(remainder.c, start=1):
            if c != 0:
                coeffs[CornerIndex.power(k, idx.kappa)] = complex(c)
    return CornerExpansion(idx, coeffs, terms, uf, remainder, float(rho1), rho1p)
