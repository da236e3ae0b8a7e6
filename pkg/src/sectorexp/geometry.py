"""Plane sectors with holes, the power map z = zeta**kappa, reflection and odd extension.

Curves are chains of smooth parametrised segments (parameter s in [0, 1]).  Images of
segments under the power map are kept as exact parametric segments, so the mapped
geometry carries no fitting error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """A curve or scene violates a geometric requirement."""


# --------------------------------------------------------------------------- points


@dataclass(frozen=True)
class PlanePoint:
    """Point of the plane with Cartesian and polar views."""

    re: float
    im: float

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        z = complex(z)
        return cls(z.real, z.imag)

    @classmethod
    def from_polar(cls, rho: float, theta: float) -> "PlanePoint":
        return cls(rho * math.cos(theta), rho * math.sin(theta))

    @property
    def rho(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def theta(self) -> float:
        """Polar angle in (-pi, pi]."""
        angle = math.atan2(self.im, self.re)
        return math.pi if angle == -math.pi else angle

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def as_complex(points) -> np.ndarray:
    """Convert points (complex, PlanePoint, (n, 2) arrays) to a complex array."""
    if isinstance(points, PlanePoint):
        return np.asarray(complex(points))
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], PlanePoint):
        return np.array([complex(p) for p in points])
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        return arr.astype(complex)
    if arr.ndim >= 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def branch_angle(z) -> np.ndarray:
    """Polar angle on the branch [0, 2*pi) used for points of a sector."""
    z = np.asarray(z, dtype=complex)
    theta = np.arctan2(z.imag, z.real)
    theta = np.where(theta < 0.0, theta + TWO_PI, theta)
    return np.where(theta >= TWO_PI - 1e-13, 0.0, theta)


# --------------------------------------------------------------------------- openings


@dataclass(frozen=True)
class Opening:
    """Opening angle omega of the sector.

    ``pi_ratio`` holds omega / pi when the angle was declared as an exact rational
    multiple of pi; floating declarations leave it ``None`` and are never promoted.
    """

    value: float
    pi_ratio: Fraction | None = None

    def __post_init__(self):
        if not (0.0 < self.value < TWO_PI):
            raise GeometryError(f"opening must lie in (0, 2*pi), got {self.value}")

    @classmethod
    def pi_multiple(cls, ratio) -> "Opening":
        ratio = Fraction(ratio)
        return cls(float(ratio) * math.pi, ratio)

    @classmethod
    def coerce(cls, omega) -> "Opening":
        if isinstance(omega, Opening):
            return omega
        if isinstance(omega, str):
            return parse_opening(omega)
        return cls(float(omega))

    @property
    def is_rational(self) -> bool:
        return self.pi_ratio is not None

    @property
    def kappa(self) -> float:
        """pi / omega."""
        if self.pi_ratio is not None:
            return float(1 / self.pi_ratio)
        return math.pi / self.value

    @property
    def kappa_fraction(self) -> Fraction | None:
        return None if self.pi_ratio is None else 1 / self.pi_ratio

    def describe(self) -> str:
        if self.pi_ratio is None:
            return repr(self.value)
        return f"{self.pi_ratio}*pi"


def parse_opening(text: str) -> Opening:
    """Parse ``'pi/2'``, ``'3*pi/4'``, ``'2/3*pi'``, ``'pi'`` or a plain float."""
    s = text.replace(" ", "").lower()
    if "pi" not in s:
        return Opening(float(s))
    num, _, den = s.partition("/")
    if "pi" in den:
        raise GeometryError(f"cannot parse opening {text!r}")
    coeff = num.replace("*pi", "").replace("pi*", "").replace("pi", "")
    ratio = Fraction(coeff) if coeff else Fraction(1)
    if den:
        ratio /= Fraction(den)
    return Opening.pi_multiple(ratio)


def conformal_power_map(p, kappa: float, *, check: bool = True):
    """Map zeta -> zeta**kappa on the sector branch (r = rho**kappa, theta = kappa*vartheta)."""
    scalar_point = isinstance(p, PlanePoint)
    z = as_complex(p)
    rho = np.abs(z)
    theta = branch_angle(z)
    if check:
        if kappa <= 0 and np.any(rho == 0):
            raise GeometryError("the origin has no image for kappa <= 0")
        if np.any(kappa * theta >= TWO_PI * (1 - 1e-14)):
            raise GeometryError("image angle leaves the admissible range [0, 2*pi)")
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(rho == 0, 0.0, rho**kappa) * np.exp(1j * kappa * theta)
    if scalar_point:
        return PlanePoint.from_complex(complex(w))
    return w if w.ndim else complex(w)


def reflect(z):
    """Reflection across the real axis."""
    if isinstance(z, PlanePoint):
        return PlanePoint(z.re, -z.im)
    return np.conj(z)


# --------------------------------------------------------------------------- segments


class Segment:
    """Smooth piece of boundary, parametrised on s in [0, 1]."""

    def point(self, s):
        raise NotImplementedError

    def derivative(self, s):
        raise NotImplementedError

    def second_derivative(self, s):
        raise NotImplementedError

    @property
    def start(self) -> complex:
        return complex(self.point(np.array(0.0)))

    @property
    def end(self) -> complex:
        return complex(self.point(np.array(1.0)))

    def length(self) -> float:
        x, w = np.polynomial.legendre.leggauss(32)
        total = 0.0
        for a in np.linspace(0.0, 1.0, 9)[:-1]:
            s = a + (x + 1) / 16
            total += float(np.sum(w * np.abs(self.derivative(s)))) / 16
        return total

    def mapped(self, kappa: float) -> "Segment":
        return PowerImage(self, kappa)

    def reflected(self) -> "Segment":
        return Mirror(self)


@dataclass(frozen=True)
class LineSegment(Segment):
    a: complex
    b: complex

    def __post_init__(self):
        if abs(self.b - self.a) == 0:
            raise GeometryError("degenerate line segment")

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return self.a + (self.b - self.a) * s

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        return np.full(s.shape, self.b - self.a, dtype=complex)

    def second_derivative(self, s):
        s = np.asarray(s, dtype=float)
        return np.zeros(s.shape, dtype=complex)

    @property
    def start(self) -> complex:
        return complex(self.a)

    @property
    def end(self) -> complex:
        return complex(self.b)

    def length(self) -> float:
        return abs(self.b - self.a)

    def is_radial(self) -> bool:
        if self.a == 0 or self.b == 0:
            return True
        return abs((np.conj(self.a) * self.b).imag) <= 1e-15 * abs(self.a) * abs(self.b) and (
            (np.conj(self.a) * self.b).real > 0
        )

    def mapped(self, kappa: float) -> Segment:
        if self.is_radial():
            return LineSegment(complex(conformal_power_map(self.a, kappa)),
                               complex(conformal_power_map(self.b, kappa)))
        return PowerImage(self, kappa)

    def reflected(self) -> Segment:
        return LineSegment(np.conj(self.b), np.conj(self.a))


@dataclass(frozen=True)
class CircularArc(Segment):
    """Arc c + r*exp(i*theta), theta running from theta0 to theta1."""

    center: complex
    radius: float
    theta0: float
    theta1: float

    def __post_init__(self):
        if self.radius <= 0 or self.theta0 == self.theta1:
            raise GeometryError("degenerate circular arc")

    def _theta(self, s):
        return self.theta0 + (self.theta1 - self.theta0) * np.asarray(s, dtype=float)

    def point(self, s):
        return self.center + self.radius * np.exp(1j * self._theta(s))

    def derivative(self, s):
        d = self.theta1 - self.theta0
        return 1j * d * self.radius * np.exp(1j * self._theta(s))

    def second_derivative(self, s):
        d = self.theta1 - self.theta0
        return -(d**2) * self.radius * np.exp(1j * self._theta(s))

    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def mapped(self, kappa: float) -> Segment:
        if self.center == 0:
            return CircularArc(0j, self.radius**kappa, kappa * self.theta0, kappa * self.theta1)
        return PowerImage(self, kappa)

    def reflected(self) -> Segment:
        return CircularArc(np.conj(self.center), self.radius, -self.theta1, -self.theta0)


@dataclass(frozen=True)
class PowerImage(Segment):
    """Image of a segment avoiding the origin under zeta -> zeta**kappa."""

    base: Segment
    kappa: float

    def point(self, s):
        return conformal_power_map(self.base.point(s), self.kappa, check=False)

    def derivative(self, s):
        zeta = self.base.point(s)
        return self.kappa * self.point(s) / zeta * self.base.derivative(s)

    def second_derivative(self, s):
        zeta = self.base.point(s)
        z = self.point(s)
        d1 = self.base.derivative(s)
        d2 = self.base.second_derivative(s)
        k = self.kappa
        return k * (k - 1) * z / zeta**2 * d1**2 + k * z / zeta * d2


@dataclass(frozen=True)
class Mirror(Segment):
    """Reflection of a segment across the real axis, traversed backwards."""

    base: Segment

    def point(self, s):
        return np.conj(self.base.point(1.0 - np.asarray(s, dtype=float)))

    def derivative(self, s):
        return -np.conj(self.base.derivative(1.0 - np.asarray(s, dtype=float)))

    def second_derivative(self, s):
        return np.conj(self.base.second_derivative(1.0 - np.asarray(s, dtype=float)))

    def length(self) -> float:
        return self.base.length()

    def reflected(self) -> Segment:
        return self.base


# --------------------------------------------------------------------------- curves


@dataclass(frozen=True)
class BoundaryCurve:
    """Chain of segments; closed curves are oriented counterclockwise."""

    segments: tuple
    closed: bool = True

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise GeometryError("empty curve")
        scale = max(1.0, max(abs(s.start) for s in segs))
        for a, b in zip(segs[:-1], segs[1:]):
            if abs(a.end - b.start) > 1e-9 * scale:
                raise GeometryError("segments do not join")
        if self.closed and abs(segs[-1].end - segs[0].start) > 1e-9 * scale:
            raise GeometryError("closed curve does not close")

    # constructors
    @classmethod
    def circle(cls, center: complex, radius: float) -> "BoundaryCurve":
        return cls((CircularArc(complex(center), float(radius), 0.0, TWO_PI),))

    @classmethod
    def polygon(cls, vertices: Sequence) -> "BoundaryCurve":
        v = [complex(z) for z in as_complex(vertices).ravel()]
        if len(v) < 3:
            raise GeometryError("a polygon needs at least three vertices")
        area = 0.5 * sum((np.conj(a) * b).imag for a, b in zip(v, v[1:] + v[:1]))
        if area < 0:
            v = v[::-1]
        return cls(tuple(LineSegment(a, b) for a, b in zip(v, v[1:] + v[:1])))

    @classmethod
    def half_disk(cls, center: complex, radius: float, direction: float) -> "BoundaryCurve":
        """Half disk whose flat edge is a diameter along the given direction."""
        u = np.exp(1j * direction)
        c = complex(center)
        return cls((LineSegment(c - radius * u, c + radius * u),
                    CircularArc(c, radius, direction, direction + math.pi)))

    @classmethod
    def pie_slice(cls, radius: float, omega: float) -> "BoundaryCurve":
        tip = radius * np.exp(1j * omega)
        return cls((LineSegment(0j, complex(radius)),
                    CircularArc(0j, radius, 0.0, omega),
                    LineSegment(complex(tip), 0j)))

    # views
    def sample(self, per_segment: int = 64) -> np.ndarray:
        s = np.linspace(0.0, 1.0, per_segment + 1)[:-1]
        pts = [seg.point(s) for seg in self.segments]
        if not self.closed:
            pts.append(np.array([self.segments[-1].end]))
        return np.concatenate(pts)

    def length(self) -> float:
        return sum(seg.length() for seg in self.segments)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    def bounding_radius(self) -> float:
        return float(np.max(np.abs(self.sample(128))))

    def signed_area(self) -> float:
        z = self.sample(256)
        return 0.5 * float(np.sum((np.conj(z) * np.roll(z, -1)).imag))

    def reflected(self) -> "BoundaryCurve":
        return BoundaryCurve(tuple(seg.reflected() for seg in reversed(self.segments)), self.closed)

    def mapped(self, kappa: float) -> "BoundaryCurve":
        return BoundaryCurve(tuple(seg.mapped(kappa) for seg in self.segments), self.closed)

    def corners(self, tol: float = 1e-8) -> list[int]:
        """Indices i of junctions (start of segment i) where the tangent turns."""
        out = []
        n = len(self.segments)
        first = 0 if self.closed else 1
        for i in range(first, n):
            t_in = complex(self.segments[i - 1].derivative(np.array(1.0)))
            t_out = complex(self.segments[i].derivative(np.array(0.0)))
            if abs(np.angle(t_out / t_in)) > tol:
                out.append(i)
        return out

    def is_simple(self, tol: float) -> bool:
        return not _polyline_self_intersects(self.sample(48), self.closed, tol)

    def contains(self, z) -> np.ndarray:
        """Point-in-curve test by winding number of the sampled polygon."""
        poly = self.sample(256)
        z = np.atleast_1d(as_complex(z))
        d = poly[None, :] - z[:, None]
        winding = np.sum(np.angle(np.roll(d, -1, axis=1) / d), axis=1) / TWO_PI
        return np.abs(winding) > 0.5

    def interior_point(self) -> complex:
        """A point well inside a closed curve (largest clearance on a grid)."""
        poly = self.sample(128)
        lo, hi = poly.real.min(), poly.real.max()
        blo, bhi = poly.imag.min(), poly.imag.max()
        gx, gy = np.meshgrid(np.linspace(lo, hi, 41)[1:-1], np.linspace(blo, bhi, 41)[1:-1])
        cand = (gx + 1j * gy).ravel()
        cand = cand[self.contains(cand)]
        if cand.size == 0:
            raise GeometryError("could not locate an interior point")
        clearance = np.min(np.abs(cand[:, None] - poly[None, :]), axis=1)
        return complex(cand[np.argmax(clearance)])


def _polyline_self_intersects(p: np.ndarray, closed: bool, tol: float) -> bool:
    a = p if closed else p[:-1]
    b = np.roll(p, -1) if closed else p[1:]
    n = a.size
    if n < 4:
        return False

    def cross(u, v):
        return (np.conj(u) * v).imag

    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1)) if closed else np.ones(i.size, bool)
    i, j = i[keep], j[keep]
    a1, b1, a2, b2 = a[i], b[i], a[j], b[j]
    d1 = cross(b1 - a1, a2 - a1)
    d2 = cross(b1 - a1, b2 - a1)
    d3 = cross(b2 - a2, a1 - a2)
    d4 = cross(b2 - a2, b1 - a2)
    hit = (d1 * d2 < -tol**2) & (d3 * d4 < -tol**2)
    return bool(np.any(hit))


# --------------------------------------------------------------------------- contact helpers


def _min_on_segment(seg: Segment, fn: Callable[[np.ndarray], np.ndarray], lo=0.0, hi=1.0):
    """Minimum of fn(point(s)) over s in [lo, hi]: dense sampling plus local refinement."""
    s = np.linspace(lo, hi, 257)
    vals = fn(seg.point(s))
    k = int(np.argmin(vals))
    a, b = s[max(k - 1, 0)], s[min(k + 1, s.size - 1)]
    best_s, best = s[k], float(vals[k])
    if b > a:
        res = minimize_scalar(lambda x: float(fn(seg.point(np.array(x)))), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-13})
        if res.fun < best:
            best_s, best = float(res.x), float(res.fun)
    return best, best_s


def _ray_distance(angle: float):
    u = np.exp(-1j * angle)

    def dist(z):
        w = np.asarray(z) * u
        return np.where(w.real >= 0, np.abs(w.imag), np.abs(w))

    return dist


def _side_runs(on: Sequence[bool], closed: bool) -> list[list[int]]:
    """Maximal runs of consecutive True flags (cyclic for closed chains)."""
    n = len(on)
    if all(on):
        return [list(range(n))]
    runs: list[list[int]] = []
    start = 0
    if closed:
        start = next(i for i in range(n) if not on[i])
    current: list[int] = []
    for step in range(n):
        i = (start + step) % n if closed else step
        if on[i]:
            current.append(i)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _contact_segments(curve: BoundaryCurve, dist, tol: float):
    """Classify segments lying on a line and report isolated contacts with it."""
    segs = curve.segments
    on = []
    for seg in segs:
        vals = dist(seg.point(np.linspace(0, 1, 65)))
        on.append(bool(np.max(vals) <= tol))
    isolated = False
    n = len(segs)
    for i, seg in enumerate(segs):
        if on[i]:
            continue
        m_inner, _ = _min_on_segment(seg, dist, 1e-6, 1 - 1e-6)
        if m_inner <= tol:
            isolated = True
            continue
        prev_on = on[i - 1] if (curve.closed or i > 0) else False
        next_on = on[(i + 1) % n] if (curve.closed or i < n - 1) else False
        if dist(np.array(seg.start)) <= tol and not prev_on:
            isolated = True
        if dist(np.array(seg.end)) <= tol and not next_on:
            isolated = True
    return on, isolated


# --------------------------------------------------------------------------- odd extension


@dataclass(frozen=True)
class SymmetricComponent:
    """Reflection-symmetric piece of a transformed scene.

    ``chain`` lies in the closed upper half plane.  For an axis-crossing component it
    is the open chain running from the right axis point to the left one; the full
    boundary is the chain followed by its mirror image.  For a mirror pair it is the
    closed boundary of the upper member; the lower member is its reflection.
    """

    chain: BoundaryCurve
    crossing: bool

    def curves(self) -> list[BoundaryCurve]:
        mirror = self.chain.reflected()
        if self.crossing:
            return [BoundaryCurve(self.chain.segments + mirror.segments, closed=True)]
        return [self.chain, mirror]

    @property
    def curve(self) -> BoundaryCurve:
        """Full closed boundary (axis-crossing components only)."""
        if not self.crossing:
            raise GeometryError("a mirror pair has two boundary curves")
        return self.curves()[0]

    def bounding_radius(self) -> float:
        return self.chain.bounding_radius()


def odd_extend_domain(curve: BoundaryCurve, tol: float | None = None) -> SymmetricComponent:
    """Symmetric extension of a domain of the closed upper half plane across the axis."""
    if not curve.closed:
        raise GeometryError("odd extension needs a closed curve")
    scale = max(curve.bounding_radius(), 1e-300)
    tol = 1e-12 * scale if tol is None else tol
    lowest, _ = min(_min_on_segment(seg, lambda z: np.asarray(z).imag) for seg in curve.segments)
    if lowest < -tol:
        raise GeometryError("curve leaves the closed upper half plane")
    on, isolated = _contact_segments(curve, lambda z: np.abs(np.asarray(z).imag), tol)
    if isolated:
        raise GeometryError("curve meets the axis at an isolated point")
    if not any(on):
        if not curve.is_simple(tol):
            raise GeometryError("curve is not simple")
        return SymmetricComponent(curve, crossing=False)
    runs = _side_runs(on, closed=True)
    if len(runs) > 1:
        raise GeometryError("axis contact is not connected; the extension is not simple")
    run = runs[0]
    n = len(curve.segments)
    if len(run) == n:
        raise GeometryError("curve lies entirely on the axis")
    left, right = curve.segments[run[0]].start, curve.segments[run[-1]].end
    if not right.real > left.real:
        raise GeometryError("domain lies below its axis edge")
    order = [(run[-1] + 1 + k) % n for k in range(n - len(run))]
    chain = BoundaryCurve(tuple(curve.segments[i] for i in order), closed=False)
    ext = SymmetricComponent(chain, crossing=True)
    if not ext.curve.is_simple(tol):
        raise GeometryError("extended curve is not simple")
    return ext


# --------------------------------------------------------------------------- scenes


@dataclass(frozen=True)
class SectorScene:
    """Pie slice {rho < outer_radius, 0 < vartheta < omega} with a hole pattern P."""

    omega: Opening
    outer_radius: float
    holes: tuple = ()
    rho0: float | None = None
    rho0p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "omega", Opening.coerce(self.omega))
        object.__setattr__(self, "holes", tuple(self.holes))
        if self.outer_radius <= 0:
            raise GeometryError("outer radius must be positive")
        if self.rho0 is None:
            object.__setattr__(self, "rho0", float(self.outer_radius))
        if self.rho0p is None:
            r = max((h.bounding_radius() for h in self.holes), default=0.5 * self.outer_radius)
            object.__setattr__(self, "rho0p", float(1.05 * r))
        if self.rho0 <= 0 or self.rho0p <= 0:
            raise GeometryError("scale bounds must be positive")

    @property
    def kappa(self) -> float:
        return self.omega.kappa

    @property
    def eps0(self) -> float:
        return self.rho0 / self.rho0p

    def outer_curve(self) -> BoundaryCurve:
        return BoundaryCurve.pie_slice(self.outer_radius, self.omega.value)

    def diameter(self) -> float:
        return 2.0 * self.outer_radius

    def hole_hull(self) -> float:
        return max((h.bounding_radius() for h in self.holes), default=0.0)


@dataclass
class ValidityReport:
    checks: dict = field(default_factory=dict)
    messages: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, passed: bool, message: str = "") -> None:
        self.checks[name] = self.checks.get(name, True) and bool(passed)
        if message and not passed:
            self.messages.setdefault(name, []).append(message)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks),
                "messages": {k: list(v) for k, v in self.messages.items()}}


def _curve_distance(c1: BoundaryCurve, c2: BoundaryCurve) -> float:
    best = math.inf
    for s1 in c1.segments:
        for s2 in c2.segments:
            grid = np.linspace(0, 1, 97)
            p1, p2 = s1.point(grid), s2.point(grid)
            d = np.abs(p1[:, None] - p2[None, :])
            i, j = np.unravel_index(np.argmin(d), d.shape)
            x0 = np.array([grid[i], grid[j]])
            res = minimize(lambda x: float(abs(s1.point(x[0]) - s2.point(x[1]))), x0,
                           bounds=[(0, 1), (0, 1)], method="L-BFGS-B",
                           options={"ftol": 1e-15, "gtol": 1e-12})
            best = min(best, float(d[i, j]), float(res.fun))
    return best


def validate_pattern(scene: SectorScene) -> ValidityReport:
    """Check the geometric hypotheses on the sector, outer domain and hole pattern."""
    report = ValidityReport()
    omega = scene.omega.value
    tol = 1e-12 * scene.diameter()
    for name in ("scale_bounds", "inside_sector_ball", "simple_components",
                 "lipschitz_complement", "connected_side_contact"):
        report.record(name, True)
    report.record("scale_bounds", scene.rho0 <= scene.outer_radius * (1 + 1e-14),
                  "rho0 exceeds the outer radius")
    report.record("scale_bounds", scene.eps0 > 0, "eps0 must be positive")
    sides = (_ray_distance(0.0), _ray_distance(omega))
    for j, hole in enumerate(scene.holes):
        tag = f"hole {j}"
        if not hole.closed:
            report.record("simple_components", False, f"{tag}: not closed")
            continue
        report.record("simple_components", hole.is_simple(tol), f"{tag}: self-intersecting")
        pts = hole.sample(128)
        ang = branch_angle(pts)
        radius_ok = bool(np.all(np.abs(pts) < scene.rho0p * (1 + 1e-12)))
        ang_ok = bool(np.all((ang <= omega + 1e-10) | (np.abs(pts) <= tol)))
        report.record("inside_sector_ball", radius_ok and ang_ok,
                      f"{tag}: outside the sector or beyond rho0p")
        on_any = [False] * len(hole.segments)
        for side in sides:
            on, isolated = _contact_segments(hole, side, tol)
            report.record("lipschitz_complement", not isolated,
                          f"{tag}: touches a side of the sector at an isolated point")
            on_any = [a or b for a, b in zip(on_any, on)]
        if any(on_any):
            runs = _side_runs(on_any, closed=True)
            report.record("connected_side_contact", len(runs) == 1,
                          f"{tag}: contact with the sector sides is not connected")
    for i in range(len(scene.holes)):
        for j in range(i + 1, len(scene.holes)):
            d = _curve_distance(scene.holes[i], scene.holes[j])
            report.record("lipschitz_complement", d > tol, f"holes {i} and {j} touch")
    return report


@dataclass(frozen=True)
class TransformedScene:
    """Image (B, Q) of the scene under the power map followed by odd extension."""

    outer: SymmetricComponent
    holes: tuple
    kappa: float

    @property
    def m_cross(self) -> int:
        return sum(1 for h in self.holes if h.crossing)

    @property
    def m_pair(self) -> int:
        return sum(1 for h in self.holes if not h.crossing)

    @property
    def m(self) -> int:
        return self.m_cross + 2 * self.m_pair

    def eta(self, eps: float) -> float:
        return float(eps) ** self.kappa

    def eps(self, eta: float) -> float:
        return float(eta) ** (1.0 / self.kappa)

    def outer_radius_min(self) -> float:
        return float(np.min(np.abs(self.outer.curve.sample(256))))

    def hole_hull(self) -> float:
        return max((h.bounding_radius() for h in self.holes), default=0.0)

    def eta_radius(self) -> float:
        """Operational radius for the eta series: half of the geometric one."""
        hull = self.hole_hull()
        return math.inf if hull == 0 else 0.5 * self.outer_radius_min() / hull

    def hole_curves(self) -> list[BoundaryCurve]:
        return [c for h in self.holes for c in h.curves()]


def transform_scene(scene: SectorScene, *, check: bool = True) -> TransformedScene:
    """Apply z = zeta**(pi/omega) to every curve and extend oddly across the axis."""
    if check:
        report = validate_pattern(scene)
        if not report.ok:
            raise GeometryError(f"invalid scene: {report.messages}")
    kappa = scene.kappa
    outer = odd_extend_domain(scene.outer_curve().mapped(kappa))
    holes = tuple(odd_extend_domain(h.mapped(kappa)) for h in scene.holes)
    return TransformedScene(outer, holes, kappa)


def symmetric_scene(outer: BoundaryCurve, crossing: Iterable[BoundaryCurve] = (),
                    pairs: Iterable[BoundaryCurve] = (), kappa: float = 1.0) -> TransformedScene:
    """Transformed scene assembled directly from curves in the transformed plane.

    ``outer`` and ``crossing`` are full symmetric curves; ``pairs`` lists the upper
    member of each mirror pair.
    """
    holes = [odd_extend_domain_full(c) for c in crossing]
    for c in pairs:
        if np.any(c.sample(64).imag <= 0):
            raise GeometryError("the upper member of a mirror pair must avoid the axis")
        holes.append(SymmetricComponent(c, crossing=False))
    return TransformedScene(odd_extend_domain_full(outer), tuple(holes), kappa)


def odd_extend_domain_full(curve: BoundaryCurve) -> SymmetricComponent:
    """Recover the symmetric description of a curve that is already symmetric.

    Curves strictly in the upper half plane become mirror pairs; curves crossing the
    axis are cut at the axis and described by their upper chain.
    """
    pts = curve.sample(64)
    if np.all(pts.imag > 0):
        return SymmetricComponent(curve, crossing=False)
    segs = _split_at_axis(curve)
    upper = [s for s in segs if float(np.mean(s.point(np.linspace(0.05, 0.95, 7)).imag)) > 0]
    n = len(segs)
    idx = [i for i, s in enumerate(segs) if s in upper]
    # rotate so the chain runs from its right axis point to its left one
    start = next(i for i in idx if segs[i - 1] not in upper)
    chain = []
    i = start
    while segs[i % n] in upper:
        chain.append(segs[i % n])
        i += 1
        if len(chain) == n:
            break
    return SymmetricComponent(BoundaryCurve(tuple(chain), closed=False), crossing=True)


def _split_at_axis(curve: BoundaryCurve) -> list[Segment]:
    out: list[Segment] = []
    for seg in curve.segments:
        if isinstance(seg, CircularArc) and seg.center.imag == 0:
            lo, hi = sorted((seg.theta0, seg.theta1))
            cuts = [k * math.pi for k in range(math.ceil(lo / math.pi), math.floor(hi / math.pi) + 1)
                    if lo < k * math.pi < hi]
            bounds = [seg.theta0] + (cuts if seg.theta1 > seg.theta0 else cuts[::-1]) + [seg.theta1]
            out.extend(CircularArc(seg.center, seg.radius, a, b) for a, b in zip(bounds[:-1], bounds[1:]))
        elif isinstance(seg, LineSegment) and (seg.a.imag < 0 < seg.b.imag or seg.b.imag < 0 < seg.a.imag):
            t = seg.a.imag / (seg.a.imag - seg.b.imag)
            m = complex(seg.point(np.array(t)).real, 0.0)
            out.extend([LineSegment(seg.a, m), LineSegment(m, seg.b)])
        else:
            out.append(seg)
    return out
