"""Two-scale expansion of the solution in a sector perforated by eps * P.

u_eps(t) = u0(t) + sum_{n, gamma} eps**(n kappa) E_gamma(eps) [v_{n gamma}(t) + V_{n gamma}(t / eps)],
where (v, V) solve the transformed coupled problem with hole data -Psi_gamma, the pull
back of the corner profile Phi_gamma of u0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .bie_system import (BlockSystemError, SolutionPair, SystemMeshes, assemble_M, build_meshes, data_vector,
                         neumann_series, solve_direct, taylor_blocks)
from .cornerseries import (AnalyticRHS, CornerExpansion, CornerIndex, RadialStepRHS, corner_expansion, eval_E,
                           fit_growth, sector_power)
from .geometry import BoundaryCurve, SectorScene, TransformedScene, as_complex, branch_angle, transform_scene
from .potential import Density, PanelMesh, assemble_K, discretize, dlp_eval, solve_interior_dirichlet


class TwoScaleError(ValueError):
    pass


# --------------------------------------------------------------------------- unperturbed problem


@dataclass
class UnperturbedSolution:
    """u0 = u_p + D[mu] on the pie slice, u_p a particular solution of Delta u = f."""

    scene: SectorScene
    rhs: object
    mesh: PanelMesh
    density: Density

    def particular(self, points) -> np.ndarray:
        return np.asarray(self.rhs.particular_value(points), dtype=float)

    def evaluate(self, points) -> np.ndarray:
        t = np.atleast_1d(as_complex(points)).ravel()
        return self.particular(t) + dlp_eval(self.mesh, self.density.values, t)

    __call__ = evaluate

    def boundary_residual(self) -> float:
        """max |u0| on the boundary nodes, with traces from the operator form."""
        K = assemble_K(self.mesh)
        trace = -0.5 * self.density.values + K @ self.density.values
        return float(np.max(np.abs(trace + self.particular(self.mesh.points)), initial=0.0))

    def arc_trace(self, radius: float):
        """theta -> u0(radius e^{i theta}); the sides of the sector return the boundary value 0."""
        omega = self.scene.omega.value

        def trace(theta):
            theta = np.asarray(theta, dtype=float)
            out = np.zeros(theta.shape)
            inner = (theta > 0) & (theta < omega)
            if np.any(inner):
                out[inner] = self.evaluate(radius * np.exp(1j * theta[inner]))
            return out

        return trace

    def laplacian(self, points, h: float = 1e-3) -> np.ndarray:
        """Five-point discrete Laplacian at interior points."""
        t = np.atleast_1d(as_complex(points)).ravel()
        stencil = [t + h, t - h, t + 1j * h, t - 1j * h]
        vals = [self.evaluate(s) for s in stencil]
        return (sum(vals) - 4 * self.evaluate(t)) / h**2


def solve_unperturbed(scene: SectorScene, f, *, panels_per_unit: float = 6.0, grading: float = 3.0,
                      order: int = 16) -> UnperturbedSolution:
    """Solve Delta u0 = f in the pie slice with u0 = 0 on its boundary."""
    mesh = discretize([scene.outer_curve()], panels_per_unit, grading, order=order)
    data = -np.asarray(f.particular_value(mesh.points), dtype=float)
    if not np.any(data):
        density = Density(mesh, np.zeros(mesh.size), 1.0)
    else:
        density = solve_interior_dirichlet(mesh, data)
    return UnperturbedSolution(scene, f, mesh, density)


def analyticity_radius(scene: SectorScene, f) -> float:
    return float(min(scene.rho0, getattr(f, "analyticity_radius", math.inf)))


def build_corner_expansion(scene: SectorScene, f, u0: UnperturbedSolution | None = None, *,
                           gamma_max: float = 8.0, delta: float | None = None,
                           rho1p: float | None = None, samples: int | None = None) -> CornerExpansion:
    rho1 = analyticity_radius(scene, f)
    rho1p = 0.5 * rho1 if rho1p is None else rho1p
    u0 = solve_unperturbed(scene, f) if u0 is None else u0
    return corner_expansion(f, scene.omega, u0.arc_trace(rho1p), rho1=rho1, rho1p=rho1p,
                            delta=delta, gamma_max=gamma_max, samples=samples)


# --------------------------------------------------------------------------- traces on the holes


@dataclass
class TraceFamily:
    """Psi_gamma at the primary nodes of the transformed hole boundary."""

    indices: list
    values: np.ndarray
    growth: tuple = (0.0, 1.0)

    def column(self, gamma: CornerIndex) -> np.ndarray:
        return self.values[:, self.indices.index(gamma)]


def pull_back(X, kappa: float) -> np.ndarray:
    """zeta = X**(1/kappa) for X in the closed upper half plane."""
    return sector_power(X, 1.0 / kappa)


def push_traces(expansion: CornerExpansion, meshes: SystemMeshes, cutoff: float | None = None) -> TraceFamily:
    """Profiles Phi_gamma evaluated at the pulled-back hole nodes (odd by construction)."""
    if meshes.holes is None:
        raise TwoScaleError("the transformed scene has no holes")
    X = meshes.holes.points[meshes.holes.primary]
    zeta = pull_back(X, expansion.kappa)
    indices = expansion.active_profiles(cutoff)
    if not indices:
        return TraceFamily([], np.zeros((X.size, 0)))
    values = np.column_stack([expansion.phi(g, zeta) for g in indices])
    growth = fit_growth([g.magnitude for g in indices], np.max(np.abs(values), axis=0))
    return TraceFamily(indices, values, growth)


# --------------------------------------------------------------------------- two-scale expansion


@dataclass(frozen=True, order=True)
class TermKey:
    exponent: float
    n: int
    gamma: CornerIndex


@dataclass
class TwoScaleExpansion:
    scene: SectorScene
    transformed: TransformedScene
    meshes: SystemMeshes
    expansion: CornerExpansion
    traces: TraceFamily
    series: object
    u0: UnperturbedSolution | None
    terms: list = field(default_factory=list)
    growth: tuple = (0.0, 1.0)

    def __post_init__(self):
        kappa = self.kappa
        keys = []
        for n in range(self.series.order + 1 if self.series is not None else 0):
            for g in self.traces.indices:
                keys.append(TermKey(n * kappa + g.magnitude, n, g))
        self.terms = sorted(keys)
        if self.terms:
            norms = [np.max(np.abs(self._vector(k))) for k in self.terms]
            self.growth = fit_growth([k.exponent for k in self.terms], norms)

    @property
    def kappa(self) -> float:
        return self.expansion.kappa

    @property
    def order(self) -> int:
        return -1 if self.series is None else self.series.order

    @property
    def max_cutoff(self) -> float:
        """Largest exponent cutoff for which every contributing term has been computed."""
        if not self.traces.indices:
            return math.inf
        lowest = min(g.magnitude for g in self.traces.indices)
        return min(self.expansion.idx.gamma_max, (self.order + 1) * self.kappa + lowest - 1e-9)

    def _vector(self, key: TermKey) -> np.ndarray:
        return self.series.coefficients[key.n][:, self.traces.indices.index(key.gamma)]

    def weight(self, key: TermKey, eps: float) -> float:
        return eps ** (key.n * self.kappa) * eval_E(key.gamma, eps, self.expansion.idx)

    def selected(self, cutoff: float | None) -> list:
        cutoff = self.max_cutoff if cutoff is None else cutoff
        if cutoff > self.max_cutoff + 1e-9:
            raise TwoScaleError(f"cutoff {cutoff} exceeds the computed range {self.max_cutoff:.6g}")
        return [k for k in self.terms if k.exponent <= cutoff + 1e-9]

    def term_solution(self, key: TermKey) -> SolutionPair:
        return SolutionPair.from_vector(self.meshes, self._vector(key))

    def combined(self, eps: float, cutoff: float | None = None) -> SolutionPair:
        vec = np.zeros(self.meshes.size)
        for key in self.selected(cutoff):
            vec = vec + self.weight(key, eps) * self._vector(key)
        return SolutionPair.from_vector(self.meshes, vec, eps**self.kappa)

    # evaluation frames ---------------------------------------------------

    def _map(self, t) -> np.ndarray:
        t = np.atleast_1d(as_complex(t)).ravel()
        return sector_power(t, self.kappa)

    def correction(self, eps: float, points, cutoff: float | None = None) -> np.ndarray:
        """u_eps - u0 at original points t, truncated at an exponent cutoff."""
        if eps <= 0:
            return np.zeros(np.atleast_1d(as_complex(points)).size)
        return self.combined(eps, cutoff).evaluate(self._map(points), "slow", eps**self.kappa)

    def outer_coefficient(self, key: TermKey, points) -> np.ndarray:
        """u^S_{n gamma} at original points (zero for n = 0)."""
        x = self._map(points)
        out = self.term_solution(key).slow_part(x)
        for m in range(key.n):
            sub = SolutionPair.from_vector(self.meshes, self._vector(TermKey(0, m, key.gamma)))
            C = sub.laurent(key.n - m)
            out = out + (C[key.n - m] * x ** (-(key.n - m))).real
        return out

    def inner_coefficient(self, key: TermKey, T) -> np.ndarray:
        """U^F_{n gamma} at scaled points T, including the profile Phi_gamma when n = 0."""
        T = np.atleast_1d(as_complex(T)).ravel()
        X = self._map(T)
        out = self.term_solution(key).fast_part(X)
        for m in range(key.n):
            sub = SolutionPair.from_vector(self.meshes, self._vector(TermKey(0, m, key.gamma)))
            A = sub.taylor(key.n - m)
            out = out + (A[key.n - m] * X ** (key.n - m)).real
        if key.n == 0:
            out = out + self.expansion.phi(key.gamma, T)
        return out

    def evaluate(self, eps: float, points, frame: str = "global", cutoff: float | None = None) -> np.ndarray:
        """Truncated u_eps: global at t, outer at t (away from the corner), inner at T = t / eps."""
        pts = np.atleast_1d(as_complex(points)).ravel()
        if frame == "global":
            base = self.u0.evaluate(pts) if self.u0 is not None else self.expansion.evaluate(pts)
            return base + self.correction(eps, pts, cutoff)
        if frame == "outer":
            base = self.u0.evaluate(pts) if self.u0 is not None else self.expansion.evaluate(pts)
            if eps <= 0:
                return base
            for key in self.selected(cutoff):
                if key.n >= 1:
                    base = base + self.weight(key, eps) * self.outer_coefficient(key, pts)
            return base
        if frame == "inner":
            if eps <= 0:
                raise TwoScaleError("the inner frame needs eps > 0")
            if np.any(np.abs(eps * pts) > self.expansion.validity_radius):
                raise TwoScaleError("inner-frame points leave the validity disk of the corner expansion")
            out = np.zeros(pts.shape)
            for key in self.selected(cutoff):
                out = out + self.weight(key, eps) * self.inner_coefficient(key, pts)
            return out
        raise TwoScaleError(f"unknown frame {frame!r}")

    def tail_estimate(self, eps: float, cutoff: float, horizon: float = 40.0) -> float:
        C, M = self.growth
        q = M * eps
        if q >= 1:
            return math.inf
        scale = max(1.0, abs(math.log(eps)))
        exps = sorted({k.exponent for k in self.terms if k.exponent > cutoff + 1e-9})
        extra = self.kappa * np.arange(1, int(horizon / self.kappa) + 1)
        pool = set(exps) | {self.max_cutoff + e for e in extra}
        return float(sum(C * scale * q**e for e in pool if e > cutoff + 1e-9))

    # reference -------------------------------------------------------------

    def reference(self, eps: float, points, gamma_high: float | None = None) -> np.ndarray:
        """u_eps - u0 from one direct solve with the hole data -sum_gamma E_gamma(eps) Psi_gamma."""
        eta = eps**self.kappa
        gamma_high = self.expansion.idx.gamma_max if gamma_high is None else gamma_high
        Psi = np.zeros(self.meshes.n_holes)
        for j, g in enumerate(self.traces.indices):
            if g.magnitude <= gamma_high + 1e-9:
                Psi -= eval_E(g, eps, self.expansion.idx) * self.traces.values[:, j]
        sol = solve_direct(assemble_M(self.meshes, eta), None, Psi)
        return sol.evaluate(self._map(points), "slow", eta)

    def coefficient_records(self) -> list:
        return [{"n": k.n, "gamma": k.gamma.label(), "exponent": k.exponent,
                 "sup_density": float(np.max(np.abs(self._vector(k))))} for k in self.terms]

    def manifest(self) -> dict:
        return {"omega": self.scene.omega.value, "omega_declared": self.scene.omega.describe(),
                "kappa": self.kappa, "order": self.order, "max_cutoff": self.max_cutoff,
                "growth": {"C": self.growth[0], "M": self.growth[1]},
                "corner_expansion": self.expansion.to_record(),
                "terms": self.coefficient_records()}


def two_scale_coeffs(scene: SectorScene, meshes: SystemMeshes, expansion: CornerExpansion,
                     u0: UnperturbedSolution | None, order: int) -> TwoScaleExpansion:
    """Neumann coefficients of the transformed problem for every hole trace -Psi_gamma."""
    traces = push_traces(expansion, meshes)
    transformed = meshes.scene
    series = None
    if traces.indices:
        tb = taylor_blocks(meshes, order)
        rhs = np.zeros((meshes.size, len(traces.indices)))
        rhs[meshes.n_outer:meshes.n_outer + meshes.n_holes] = -traces.values
        series = neumann_series(tb, rhs, order)
    return TwoScaleExpansion(scene, transformed, meshes, expansion, traces, series, u0)


def build_two_scale(scene: SectorScene, f, *, cutoff: float = 8.0, gamma_high: float | None = None,
                    delta: float | None = None, panels_per_unit: float = 3.0, grading: float = 3.0,
                    u0_panels_per_unit: float = 6.0) -> TwoScaleExpansion:
    """Full pipeline: u0, corner expansion, hole traces, Neumann coefficients."""
    gamma_high = max(cutoff, gamma_high if gamma_high is not None else cutoff)
    transformed = transform_scene(scene)
    if not transformed.holes:
        raise TwoScaleError("the scene has no holes")
    meshes = build_meshes(transformed, panels_per_unit, grading)
    u0 = solve_unperturbed(scene, f, panels_per_unit=u0_panels_per_unit)
    expansion = build_corner_expansion(scene, f, u0, gamma_max=gamma_high, delta=delta)
    lowest = min((g.magnitude for g in expansion.active_profiles()), default=cutoff)
    order = max(0, int(math.floor((cutoff - lowest) / scene.kappa + 1e-9)))
    return two_scale_coeffs(scene, meshes, expansion, u0, order)


# --------------------------------------------------------------------------- studies


def probe_points(scene: SectorScene, eps: float, count: int = 30, *, inner: float = 1.5,
                 outer: float = 0.8, seed: int = 7) -> np.ndarray:
    """Deterministic Halton points in {inner * eps * hull <= |t| <= outer * rho_A} of the sector."""
    hull = scene.hole_hull()
    r_lo = inner * eps * hull
    r_hi = outer * scene.outer_radius
    if r_lo >= r_hi:
        raise TwoScaleError("probe annulus is empty")
    sample = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
    r = r_lo + (r_hi - r_lo) * sample[:, 0]
    theta = scene.omega.value * (0.05 + 0.9 * sample[:, 1])
    return r * np.exp(1j * theta)


@dataclass
class StudyRow:
    eps: float
    cutoff: float
    frame: str
    sup_error: float
    slope: float = float("nan")

    def as_tuple(self):
        return (self.eps, self.cutoff, self.frame, self.sup_error, self.slope)


def convergence_study(ts: TwoScaleExpansion | None, eps_list, cutoffs, *, probes: int = 30,
                      gamma_high: float | None = None) -> list:
    """Sup errors of truncated two-scale sums against the direct reference at fixed probes."""
    rows: list[StudyRow] = []
    if ts is None or not len(eps_list) or not len(cutoffs):
        return rows
    for eps in eps_list:
        pts = probe_points(ts.scene, eps, probes)
        if ts.series is None:
            for cut in cutoffs:
                rows.append(StudyRow(float(eps), float(cut), "global", 0.0))
            continue
        ref = ts.reference(eps, pts, gamma_high)
        for cut in cutoffs:
            approx = ts.correction(eps, pts, cut)
            rows.append(StudyRow(float(eps), float(cut), "global", float(np.max(np.abs(approx - ref)))))
    for cut in cutoffs:
        sel = [r for r in rows if r.cutoff == float(cut)]
        e = np.array([r.eps for r in sel])
        err = np.array([r.sup_error for r in sel])
        if e.size >= 2 and np.all(err > 0):
            slope = float(np.polyfit(np.log(e), np.log(err), 1)[0])
            for r in sel:
                r.slope = slope
    return rows


def errors_decreasing(rows: list) -> dict:
    """Per eps: whether the sup error strictly decreases along increasing cutoffs."""
    out = {}
    for eps in sorted({r.eps for r in rows}):
        errs = [r.sup_error for r in sorted((r for r in rows if r.eps == eps), key=lambda r: r.cutoff)]
        out[eps] = all(b < a for a, b in zip(errs[:-1], errs[1:]))
    return out
