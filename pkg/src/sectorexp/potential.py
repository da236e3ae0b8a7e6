"""Double layer potentials on panel meshes.

Conventions: E(x) = -log|x| / (2 pi); the double layer potential of a density phi is
D[phi](x) = -sum_j phi_j n_j . grad E(x - y_j) w_j, i.e. (1/2pi) Re sum_j w_j phi_j n_j / (x - y_j)
in complex notation, with n the unit normal pointing out of the region a curve encloses.
Interior and exterior traces are -phi/2 + K phi and phi/2 + K phi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import legendre

from .geometry import BoundaryCurve, Segment, SymmetricComponent, as_complex

INV_2PI = 1.0 / (2.0 * math.pi)


class PotentialError(RuntimeError):
    """Numerical failure in a boundary integral computation."""


class NearFieldWarning(UserWarning):
    """A target is so close to a curve that adaptive refinement hit its depth limit."""


# --------------------------------------------------------------------------- kernels


def fundamental(x) -> np.ndarray:
    """E(x) = -log|x| / (2 pi)."""
    z = as_complex(x)
    r = np.abs(z)
    if np.any(r == 0):
        raise PotentialError("fundamental solution is singular at the origin")
    out = -INV_2PI * np.log(r)
    return out if out.ndim else float(out)


def fundamental_gradient(x) -> np.ndarray:
    """grad E(x) = -x / (2 pi |x|^2), returned as complex numbers g1 + i g2."""
    z = as_complex(x)
    if np.any(z == 0):
        raise PotentialError("fundamental solution is singular at the origin")
    out = -INV_2PI / np.conj(z)
    return out if out.ndim else complex(out)


# --------------------------------------------------------------------------- meshes


def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = legendre.leggauss(order)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


@dataclass(frozen=True)
class Panel:
    """Gauss panel on a segment: s = mid + half * t, t in [-1, 1]; mirrored panels are reflected."""

    segment: Segment
    mid: float
    half: float
    mirrored: bool = False

    def geometry(self, t):
        s = self.mid + self.half * np.asarray(t, dtype=float)
        z = self.segment.point(s)
        dz = self.segment.derivative(s) * self.half
        d2z = self.segment.second_derivative(s) * self.half**2
        if self.mirrored:
            return np.conj(z), np.conj(dz), np.conj(d2z)
        return z, dz, d2z


def _grading_map(t: np.ndarray, start: bool, end: bool, q: float) -> np.ndarray:
    if start and end:
        return t**q / (t**q + (1 - t) ** q)
    if start:
        return t**q
    if end:
        return 1 - (1 - t) ** q
    return t


def _segment_panels(seg: Segment, n_panels: int, grade_start: bool, grade_end: bool, q: float):
    t = np.linspace(0.0, 1.0, n_panels + 1)
    s = _grading_map(t, grade_start, grade_end, q)
    s[0], s[-1] = 0.0, 1.0
    return [Panel(seg, 0.5 * (a + b), 0.5 * (b - a)) for a, b in zip(s[:-1], s[1:])]


def _panel_arrays(panels, x, w):
    pts, nrm, wts, curv = [], [], [], []
    for p in panels:
        z, dz, d2z = p.geometry(x)
        speed = np.abs(dz)
        pts.append(z)
        nrm.append(-1j * dz / speed)
        wts.append(w * speed)
        curv.append((np.conj(dz) * d2z).imag / speed**3)
    return (np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts), np.concatenate(curv))


@dataclass
class PanelMesh:
    """Composite Gauss-Legendre discretisation of one or more closed curves."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    curvature: np.ndarray
    component: np.ndarray
    panels: list
    order: int
    grading: float
    tags: list = field(default_factory=list)
    pair_ids: list = field(default_factory=list)
    pairing: np.ndarray | None = None
    primary: np.ndarray | None = None

    def __post_init__(self):
        p = self.order
        centers, lengths = [], []
        x, w = gauss_rule(p)
        for k in range(len(self.panels)):
            sl = slice(k * p, (k + 1) * p)
            centers.append(np.sum(self.points[sl] * self.weights[sl]) / np.sum(self.weights[sl]))
            lengths.append(np.sum(self.weights[sl]))
        self.panel_center = np.array(centers)
        self.panel_length = np.array(lengths)

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def n_components(self) -> int:
        return int(self.component.max()) + 1 if self.size else 0

    @property
    def symmetric(self) -> bool:
        return self.pairing is not None

    def component_nodes(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.component == c)

    def component_length(self, c: int) -> float:
        return float(np.sum(self.weights[self.component == c]))

    def pair_components(self, j: int) -> tuple[int, int]:
        """Component indices (upper, lower) of mirror pair j."""
        up = [c for c, (t, pid) in enumerate(zip(self.tags, self.pair_ids)) if pid == j and t == "upper"]
        lo = [c for c, (t, pid) in enumerate(zip(self.tags, self.pair_ids)) if pid == j and t == "lower"]
        return up[0], lo[0]

    @property
    def n_pairs(self) -> int:
        return len({pid for pid in self.pair_ids if pid is not None})

    def odd_expand(self, reduced: np.ndarray) -> np.ndarray:
        """Full odd density from its values at the primary nodes."""
        full = np.zeros(self.size, dtype=np.result_type(reduced, float))
        full[self.primary] = reduced
        full[self.pairing[self.primary]] = -reduced
        return full

    def odd_part(self, values: np.ndarray) -> np.ndarray:
        return 0.5 * (values - values[self.pairing])

    def odd_reduce(self, matrix: np.ndarray) -> np.ndarray:
        """Columns of an operator restricted to odd densities, parametrised by primary nodes."""
        return matrix[:, self.primary] - matrix[:, self.pairing[self.primary]]

    def submesh(self, components) -> "PanelMesh":
        components = list(components)
        p = self.order
        keep_nodes = np.concatenate([self.component_nodes(c) for c in components])
        keep_panels = sorted({int(i) // p for i in keep_nodes})
        node_idx = np.concatenate([np.arange(k * p, (k + 1) * p) for k in keep_panels])
        remap = {c: i for i, c in enumerate(components)}
        new_of_old = -np.ones(self.size, dtype=int)
        new_of_old[node_idx] = np.arange(node_idx.size)
        pairing = primary = None
        if self.pairing is not None:
            pairing = new_of_old[self.pairing[node_idx]]
            if np.any(pairing < 0):
                raise PotentialError("submesh must be closed under reflection")
            primary = new_of_old[self.primary[np.isin(self.primary, node_idx)]]
        return PanelMesh(self.points[node_idx], self.normals[node_idx], self.weights[node_idx],
                         self.curvature[node_idx],
                         np.array([remap[c] for c in self.component[node_idx]]),
                         [self.panels[k] for k in keep_panels], p, self.grading,
                         [self.tags[c] for c in components], [self.pair_ids[c] for c in components],
                         pairing, primary)

    def to_record(self) -> dict:
        return {"order": self.order, "grading": self.grading, "size": self.size,
                "points": [[float(z.real), float(z.imag)] for z in self.points],
                "weights": self.weights.tolist(), "component": self.component.tolist(),
                "tags": list(self.tags)}


def _chain_corner_flags(chain: BoundaryCurve, *, symmetric_ends: bool, tol: float = 1e-8):
    n = len(chain.segments)
    flags = [[False, False] for _ in range(n)]
    for i in chain.corners(tol):
        flags[i][0] = True
        flags[i - 1][1] = True
    if symmetric_ends:
        for idx, end in ((0, 0), (n - 1, 1)):
            tangent = complex(chain.segments[idx].derivative(np.array(float(end))))
            if abs(tangent.real) > tol * abs(tangent):
                flags[idx][end] = True
    return flags


def _chain_panels(chain: BoundaryCurve, flags, panels_per_unit, min_panels, q):
    panels = []
    for seg, (gs, ge) in zip(chain.segments, flags):
        n = max(min_panels, int(math.ceil(seg.length() * panels_per_unit)))
        if gs or ge:
            n = max(n, 2 * min_panels)
        panels.extend(_segment_panels(seg, n, gs, ge, q))
    return panels


def discretize(curves, panels_per_unit: float = 8.0, grading: float = 3.0, *,
               order: int = 16, min_panels: int = 4) -> PanelMesh:
    """Composite Gauss-Legendre panels on closed curves, graded toward corners.

    ``curves`` mixes plain closed ``BoundaryCurve`` objects and ``SymmetricComponent``
    objects; the latter produce reflection-paired nodes.
    """
    x, w = gauss_rule(order)
    all_panels, blocks, tags, pair_ids = [], [], [], []
    pairing_parts, primary_parts = [], []
    symmetric = all(isinstance(c, SymmetricComponent) for c in curves)
    offset = 0
    comp = 0
    pair_counter = 0
    for item in curves:
        if isinstance(item, SymmetricComponent):
            chain = item.chain
            flags = _chain_corner_flags(chain, symmetric_ends=item.crossing) if item.crossing else \
                _chain_corner_flags(chain, symmetric_ends=False)
            panels = _chain_panels(chain, flags, panels_per_unit, min_panels, grading)
            for seg in chain.segments:
                if seg.length() <= 0:
                    raise PotentialError("degenerate segment")
            arrays = _panel_arrays(panels, x, w)
            n = arrays[0].size
            mirror = [Panel(p.segment, p.mid, -p.half, True) for p in reversed(panels)]
            m_arrays = (np.conj(arrays[0][::-1]), np.conj(arrays[1][::-1]), arrays[2][::-1], arrays[3][::-1])
            local_pair = np.concatenate([n + (n - 1 - np.arange(n)), n - 1 - np.arange(n)])
            pairing_parts.append(local_pair + offset)
            primary_parts.append(np.arange(n) + offset)
            if item.crossing:
                comps = [np.full(2 * n, comp)]
                tags.append("crossing")
                pair_ids.append(None)
                comp += 1
            else:
                comps = [np.full(n, comp), np.full(n, comp + 1)]
                tags.extend(["upper", "lower"])
                pair_ids.extend([pair_counter, pair_counter])
                pair_counter += 1
                comp += 2
            blocks.append(tuple(np.concatenate([a, b]) for a, b in zip(arrays, m_arrays)) + (np.concatenate(comps),))
            all_panels.extend(panels + mirror)
            offset += 2 * n
        else:
            curve: BoundaryCurve = item
            if not curve.closed:
                raise PotentialError("only closed curves can be discretised")
            flags = [[False, False] for _ in curve.segments]
            for i in curve.corners():
                flags[i][0] = True
                flags[i - 1][1] = True
            panels = _chain_panels(curve, flags, panels_per_unit, min_panels, grading)
            arrays = _panel_arrays(panels, x, w)
            blocks.append(arrays + (np.full(arrays[0].size, comp),))
            tags.append("plain")
            pair_ids.append(None)
            all_panels.extend(panels)
            offset += arrays[0].size
            comp += 1
    pts, nrm, wts, curv, cid = (np.concatenate([b[i] for b in blocks]) for i in range(5))
    pairing = primary = None
    if symmetric and pairing_parts:
        pairing = np.concatenate(pairing_parts)
        primary = np.concatenate(primary_parts)
    return PanelMesh(pts, nrm, wts, curv, cid.astype(int), all_panels, order, grading,
                     tags, pair_ids, pairing, primary)


# --------------------------------------------------------------------------- operators


def dlp_matrix(mesh: PanelMesh, targets) -> np.ndarray:
    """Plain quadrature matrix of D at off-curve targets (no near-field correction)."""
    x = np.atleast_1d(as_complex(targets)).ravel()
    return INV_2PI * (mesh.weights * mesh.normals / (x[:, None] - mesh.points[None, :])).real


def assemble_K(mesh: PanelMesh) -> np.ndarray:
    """Nystrom matrix of K; the diagonal holds the smooth limit -curvature/2 of the kernel."""
    diff = mesh.points[:, None] - mesh.points[None, :]
    np.fill_diagonal(diff, 1.0)
    K = INV_2PI * (mesh.weights * mesh.normals / diff).real
    np.fill_diagonal(K, -0.25 * INV_2PI * 2 * mesh.curvature * mesh.weights)
    return K


def row_sum_defect(mesh: PanelMesh, K: np.ndarray | None = None) -> float:
    """max |K[1] + 1/2| over nodes; zero for an exact discretisation."""
    K = assemble_K(mesh) if K is None else K
    return float(np.max(np.abs(K.sum(axis=1) + 0.5)))


class _Interpolator:
    def __init__(self, order: int):
        self.order = order
        self.nodes, self.weights = gauss_rule(order)
        self.inverse = np.linalg.inv(legendre.legvander(self.nodes, order - 1))

    def __call__(self, values: np.ndarray, t: np.ndarray) -> np.ndarray:
        return legendre.legvander(t, self.order - 1) @ (self.inverse @ values)


_INTERP: dict[int, _Interpolator] = {}


def _interp(order: int) -> _Interpolator:
    if order not in _INTERP:
        _INTERP[order] = _Interpolator(order)
    return _INTERP[order]


def _refined_panel_value(panel: Panel, values: np.ndarray, x: complex, near: float, depth: int,
                         max_depth: int, order: int) -> tuple[complex, bool]:
    """Adaptive dyadic subdivision of one panel for a close target; returns (complex sum, hit_limit)."""
    ip = _interp(order)
    g, gw = ip.nodes, ip.weights
    total = 0j
    hit = False
    stack = [(-1.0, 1.0, 0)]
    while stack:
        a, b, d = stack.pop()
        t = 0.5 * (a + b) + 0.5 * (b - a) * g
        z, dz, _ = panel.geometry(t)
        speed = np.abs(dz)
        length = 0.5 * (b - a) * float(np.sum(gw * speed))
        center = complex(panel.geometry(np.array(0.5 * (a + b)))[0])
        if abs(x - center) >= near * length or d >= max_depth:
            hit = hit or (d >= max_depth and abs(x - center) < near * length)
            phi = ip(values, t)
            nrm = -1j * dz / speed
            total += np.sum(0.5 * (b - a) * gw * speed * phi * nrm / (x - z))
        else:
            m = 0.5 * (a + b)
            stack.append((a, m, d + 1))
            stack.append((m, b, d + 1))
    return total, hit


def dlp_eval(mesh: PanelMesh, density, targets, *, near: float = 1.5, max_depth: int = 24,
             return_flag: bool = False):
    """Double layer potential at off-curve targets with adaptive near-field refinement."""
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    x = np.atleast_1d(as_complex(targets)).ravel()
    coef = mesh.weights * phi * mesh.normals
    vals = np.empty(x.size, dtype=complex)
    chunk = max(1, 4_000_000 // max(mesh.size, 1))
    for i0 in range(0, x.size, chunk):
        xs = x[i0:i0 + chunk]
        vals[i0:i0 + chunk] = np.sum(coef[None, :] / (xs[:, None] - mesh.points[None, :]), axis=1)
    dist = np.abs(x[:, None] - mesh.panel_center[None, :])
    close_t, close_p = np.nonzero(dist < near * mesh.panel_length[None, :])
    flagged = False
    p = mesh.order
    for i, k in zip(close_t, close_p):
        sl = slice(k * p, (k + 1) * p)
        vals[i] -= np.sum(coef[sl] / (x[i] - mesh.points[sl]))
        refined, hit = _refined_panel_value(mesh.panels[k], phi[sl], x[i], near, 0, max_depth, p)
        vals[i] += refined
        flagged = flagged or hit
    if flagged:
        warnings.warn("target too close to the boundary for reliable quadrature", NearFieldWarning)
    out = INV_2PI * vals.real
    return (out, flagged) if return_flag else out


def dlp_gradient(mesh: PanelMesh, density, targets) -> np.ndarray:
    """Gradient of D[phi] at targets away from the curve (complex g1 + i g2)."""
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    x = np.atleast_1d(as_complex(targets)).ravel()
    coef = mesh.weights * phi * mesh.normals
    deriv = -np.sum(coef[None, :] / (x[:, None] - mesh.points[None, :]) ** 2, axis=1)
    return INV_2PI * np.conj(deriv)


# --------------------------------------------------------------------------- solves


@dataclass
class Density:
    """Density on a mesh, with the condition estimate of the solve that produced it."""

    mesh: PanelMesh
    values: np.ndarray
    condition: float = float("nan")

    def evaluate(self, targets) -> np.ndarray:
        return dlp_eval(self.mesh, self.values, targets)

    def is_odd(self, tol: float = 1e-12) -> bool:
        if self.mesh.pairing is None:
            return False
        return bool(np.max(np.abs(self.values + self.values[self.mesh.pairing])) <= tol * max(1.0, np.max(np.abs(self.values))))


def condition_estimate(lu_piv, anorm: float) -> float:
    lu, _ = lu_piv
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    return math.inf if rcond == 0 else 1.0 / rcond


def dense_solve(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """LU solve with partial pivoting; returns the solution and a 1-norm condition estimate."""
    try:
        lu_piv = sla.lu_factor(A, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise PotentialError(f"factorisation failed: {exc}") from exc
    cond = condition_estimate(lu_piv, float(np.max(np.sum(np.abs(A), axis=0))))
    if not np.isfinite(cond) or cond > 1e14:
        raise PotentialError(f"linear system is numerically singular (condition ~ {cond:.3e})")
    return sla.lu_solve(lu_piv, b), cond


def solve_interior_dirichlet(mesh: PanelMesh, data) -> Density:
    """Density mu with interior trace -mu/2 + K mu = data on a simply connected boundary."""
    g = data(mesh.points) if callable(data) else np.asarray(data, dtype=float)
    A = -0.5 * np.eye(mesh.size) + assemble_K(mesh)
    mu, cond = dense_solve(A, g)
    return Density(mesh, mu, cond)


def interior_trace(mesh: PanelMesh, density, K: np.ndarray | None = None) -> np.ndarray:
    K = assemble_K(mesh) if K is None else K
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    return -0.5 * phi + K @ phi


def exterior_trace(mesh: PanelMesh, density, K: np.ndarray | None = None) -> np.ndarray:
    K = assemble_K(mesh) if K is None else K
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    return 0.5 * phi + K @ phi


# --------------------------------------------------------------------------- exterior fields


def _source_pair(x: np.ndarray, zp: complex) -> np.ndarray:
    zm = np.conj(zp)
    return -INV_2PI * (np.log(np.abs(x - zp)) - np.log(np.abs(x - zm)))


@dataclass
class ExteriorField:
    """Odd field D[mu] + alpha (E(. - z+) - E(. - z-)) outside a mirror pair of holes."""

    mesh: PanelMesh
    mu: np.ndarray
    alpha: float
    z_plus: complex
    trace: np.ndarray
    condition: float = float("nan")

    @property
    def z_minus(self) -> complex:
        return complex(np.conj(self.z_plus))

    def evaluate(self, points) -> np.ndarray:
        x = np.atleast_1d(as_complex(points)).ravel()
        return dlp_eval(self.mesh, self.mu, x) + self.alpha * _source_pair(x, self.z_plus)

    __call__ = evaluate

    def gradient(self, points) -> np.ndarray:
        x = np.atleast_1d(as_complex(points)).ravel()
        g = dlp_gradient(self.mesh, self.mu, x)
        g += self.alpha * (fundamental_gradient(x - self.z_plus) - fundamental_gradient(x - self.z_minus))
        return g

    def laurent(self, k_max: int) -> np.ndarray:
        """Complex C_k (k = 0..k_max, C_0 = 0) with field = Re sum_k C_k X**(-k) outside the hull."""
        return dlp_laurent(self.mesh, self.mu, k_max) + self.alpha * source_pair_laurent(self.z_plus, k_max)

    def flux(self, center: complex, radius: float, n: int = 512) -> float:
        """Outward flux of grad field through a circle (trapezoid rule)."""
        theta = 2 * math.pi * np.arange(n) / n
        nu = np.exp(1j * theta)
        g = self.gradient(center + radius * nu)
        return float(np.sum((np.conj(nu) * g).real) * radius * 2 * math.pi / n)

    @property
    def flux_plus(self) -> float:
        """Flux through the boundary of the upper hole (only the source carries flux)."""
        return -self.alpha


def dlp_laurent(mesh: PanelMesh, density, k_max: int) -> np.ndarray:
    """Complex C_k with D[phi](X) = Re sum_k C_k X**(-k) for |X| beyond the mesh."""
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    coef = INV_2PI * mesh.weights * phi * mesh.normals
    out = np.zeros(k_max + 1, dtype=complex)
    power = np.ones(mesh.size, dtype=complex)
    for k in range(1, k_max + 1):
        out[k] = np.sum(coef * power)
        power = power * mesh.points
    return out


def dlp_taylor(mesh: PanelMesh, density, k_max: int) -> np.ndarray:
    """Complex A_k with D[phi](x) = Re sum_k A_k x**k inside the mesh's inner radius."""
    phi = np.asarray(getattr(density, "values", density), dtype=float)
    coef = -INV_2PI * mesh.weights * phi * mesh.normals
    out = np.zeros(k_max + 1, dtype=complex)
    inv = 1.0 / mesh.points
    power = inv.copy()
    for k in range(k_max + 1):
        out[k] = np.sum(coef * power)
        power = power * inv
    return out


def source_pair_laurent(z_plus: complex, k_max: int) -> np.ndarray:
    out = np.zeros(k_max + 1, dtype=complex)
    zm = np.conj(z_plus)
    for k in range(1, k_max + 1):
        out[k] = INV_2PI * (z_plus**k - zm**k) / k
    return out


def solve_xi(mesh: PanelMesh, pair: int = 0) -> ExteriorField:
    """Bounded odd exterior field equal to +1 / -1 on the upper / lower hole of a mirror pair."""
    up, lo = mesh.pair_components(pair)
    sub = mesh.submesh([up, lo])
    K = assemble_K(sub)
    A = sub.odd_reduce(0.5 * np.eye(sub.size) + K)[sub.primary]
    upper_curve_pts = sub.points[sub.component == 0]
    z_plus = _interior_point(upper_curve_pts)
    s = _source_pair(sub.points[sub.primary], z_plus)
    n = sub.primary.size
    system = np.zeros((n + 1, n + 1))
    system[:n, :n] = A
    system[:n, n] = s
    system[n, :n] = sub.weights[sub.primary]
    rhs = np.concatenate([np.ones(n), [0.0]])
    try:
        sol, cond = dense_solve(system, rhs)
    except PotentialError as exc:
        raise PotentialError(f"auxiliary exterior problem is singular (touching holes?): {exc}") from exc
    mu = sub.odd_expand(sol[:n])
    alpha = float(sol[n])
    trace = 0.5 * mu + K @ mu + alpha * _source_pair(sub.points, z_plus)
    return ExteriorField(sub, mu, alpha, z_plus, trace, cond)


def _interior_point(boundary_pts: np.ndarray) -> complex:
    """Point inside a closed polygon far from its vertices."""
    poly = boundary_pts
    lo, hi = poly.real.min(), poly.real.max()
    blo, bhi = poly.imag.min(), poly.imag.max()
    gx, gy = np.meshgrid(np.linspace(lo, hi, 41)[1:-1], np.linspace(blo, bhi, 41)[1:-1])
    cand = (gx + 1j * gy).ravel()
    d = poly[None, :] - cand[:, None]
    winding = np.sum(np.angle(np.roll(d, -1, axis=1) / d), axis=1) / (2 * math.pi)
    cand = cand[np.abs(winding) > 0.5]
    if cand.size == 0:
        raise PotentialError("no interior point found")
    clearance = np.min(np.abs(cand[:, None] - poly[None, :]), axis=1)
    return complex(cand[np.argmax(clearance)])


# --------------------------------------------------------------------------- multipoles


@dataclass(frozen=True)
class MultipoleExpansion:
    coeffs: np.ndarray
    radius: float
    even_residual: float
    flagged: bool

    def evaluate(self, points) -> np.ndarray:
        x = np.atleast_1d(as_complex(points)).ravel()
        r, th = np.abs(x), np.angle(x)
        k = np.arange(1, self.coeffs.size + 1)
        return np.sum(self.coeffs[None, :] * (self.radius / r[:, None]) ** k * np.sin(k * th[:, None]), axis=1)


def multipole_coeffs(field, radius: float, k_max: int, *, samples: int | None = None,
                     tol: float = 1e-8) -> MultipoleExpansion:
    """Sine coefficients w_k of an odd exterior field sampled on the circle |X| = radius."""
    n = samples or max(4 * k_max, 64)
    theta = 2 * math.pi * np.arange(n) / n
    vals = np.asarray(field(radius * np.exp(1j * theta)), dtype=float)
    spectrum = np.fft.rfft(vals) / n
    sine = -2.0 * spectrum.imag[1:k_max + 1]
    even = np.concatenate([[abs(spectrum[0].real)], 2.0 * np.abs(spectrum.real[1:])])
    scale = max(1.0, float(np.max(np.abs(vals))))
    residual = float(np.max(even)) / scale
    flagged = residual > tol
    if flagged:
        warnings.warn(f"field has an even component of relative size {residual:.2e}", UserWarning)
    return MultipoleExpansion(sine, float(radius), residual, flagged)
