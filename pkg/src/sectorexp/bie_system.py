"""Coupled boundary integral system for a disk-like domain B with a small hole pattern eta*Q.

Unknowns are odd densities phi on the boundary of B, Phi on the boundary of Q, and one
constant c_j per mirror pair of holes.  The solution is u(x) = w(x) + W(x / eta) with
w = D_B[phi] and W = -D_Q[Phi] + sum_j c_j Xi_j.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .geometry import TransformedScene, as_complex
from .potential import (INV_2PI, ExteriorField, PanelMesh, PotentialError, assemble_K, condition_estimate,
                        discretize, dlp_eval, dlp_laurent, dlp_taylor, solve_xi)


class BlockSystemError(RuntimeError):
    """Failure while assembling or solving the coupled system."""


@dataclass
class SystemMeshes:
    outer: PanelMesh
    holes: PanelMesh | None
    xi: list
    scene: TransformedScene | None = None

    @property
    def n_outer(self) -> int:
        return self.outer.primary.size

    @property
    def n_holes(self) -> int:
        return 0 if self.holes is None else self.holes.primary.size

    @property
    def n_pairs(self) -> int:
        return len(self.xi)

    @property
    def size(self) -> int:
        return self.n_outer + self.n_holes + self.n_pairs

    @property
    def outer_radius_min(self) -> float:
        return float(np.min(np.abs(self.outer.points)))

    @property
    def hole_hull(self) -> float:
        return 0.0 if self.holes is None else float(np.max(np.abs(self.holes.points)))

    @property
    def eta_geometric(self) -> float:
        hull = self.hole_hull
        return math.inf if hull == 0 else self.outer_radius_min / hull

    @property
    def eta_operational(self) -> float:
        return 0.5 * self.eta_geometric

    def split(self, vector: np.ndarray):
        a, b = self.n_outer, self.n_outer + self.n_holes
        return vector[:a], vector[a:b], vector[b:]


def build_meshes(scene: TransformedScene, panels_per_unit: float = 3.0, grading: float = 3.0,
                 order: int = 16, min_panels: int = 4) -> SystemMeshes:
    """Panel meshes of the outer boundary and of the holes, plus Xi_j for every mirror pair."""
    outer = discretize([scene.outer], panels_per_unit, grading, order=order, min_panels=min_panels)
    holes = None
    xi = []
    if scene.holes:
        holes = discretize(list(scene.holes), panels_per_unit, grading, order=order, min_panels=min_panels)
        xi = [solve_xi(holes, j) for j in range(holes.n_pairs)]
    return SystemMeshes(outer, holes, xi, scene)


def _pair_nodes(mesh: PanelMesh, j: int) -> np.ndarray:
    """Primary nodes of the upper hole of mirror pair j."""
    up, _ = mesh.pair_components(j)
    return np.flatnonzero(mesh.component[mesh.primary] == up)


@dataclass
class BlockSystem:
    meshes: SystemMeshes
    eta: float
    matrix: np.ndarray
    blocks: dict

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def solve(self, psi=None, Psi=None) -> "SolutionPair":
        return solve_direct(self, psi, Psi)


def _static_blocks(meshes: SystemMeshes) -> dict:
    B, Q = meshes.outer, meshes.holes
    out = {"M11": B.odd_reduce(-0.5 * np.eye(B.size) + assemble_K(B))[B.primary]}
    if Q is not None:
        out["M22"] = -Q.odd_reduce(0.5 * np.eye(Q.size) + assemble_K(Q))[Q.primary]
        M23 = np.zeros((meshes.n_holes, meshes.n_pairs))
        X = Q.points[Q.primary]
        for j, xi in enumerate(meshes.xi):
            own = _pair_nodes(Q, j)
            others = np.setdiff1d(np.arange(X.size), own)
            M23[own, j] = 1.0
            if others.size:
                M23[others, j] = xi.evaluate(X[others])
        out["M23"] = M23
        side = np.zeros((meshes.n_pairs, meshes.n_holes))
        for j in range(meshes.n_pairs):
            own = _pair_nodes(Q, j)
            side[j, own] = Q.weights[Q.primary][own]
        out["side"] = side
    return out


def _assemble(meshes: SystemMeshes, static: dict, M12, M13, M21) -> np.ndarray:
    nB, nQ, mp = meshes.n_outer, meshes.n_holes, meshes.n_pairs
    M = np.zeros((meshes.size, meshes.size))
    M[:nB, :nB] = static["M11"]
    if nQ:
        M[:nB, nB:nB + nQ] = M12
        M[:nB, nB + nQ:] = M13
        M[nB:nB + nQ, :nB] = M21
        M[nB:nB + nQ, nB:nB + nQ] = static["M22"]
        M[nB:nB + nQ, nB + nQ:] = static["M23"]
        M[nB + nQ:, nB:nB + nQ] = static["side"]
    return M


def assemble_M(meshes: SystemMeshes, eta: float, *, _static: dict | None = None) -> BlockSystem:
    """Discrete M(eta): odd-reduced couplings at the primary nodes plus side conditions."""
    eta = float(eta)
    static = _static_blocks(meshes) if _static is None else _static
    B, Q = meshes.outer, meshes.holes
    blocks = dict(static)
    if Q is None:
        return BlockSystem(meshes, eta, _assemble(meshes, static, None, None, None), blocks)
    if abs(eta) * meshes.hole_hull >= meshes.outer_radius_min:
        raise BlockSystemError(f"eta = {eta} makes the scaled holes overlap the outer boundary")
    x = B.points[B.primary]
    X = Q.points[Q.primary]
    if eta == 0:
        M12 = np.zeros((x.size, X.size))
        M21 = np.zeros((X.size, x.size))
        M13 = np.zeros((x.size, meshes.n_pairs))
    else:
        M12 = Q.odd_reduce(-eta * INV_2PI * (Q.weights * Q.normals / (x[:, None] - eta * Q.points[None, :])).real)
        M21 = B.odd_reduce(INV_2PI * (B.weights * B.normals / (eta * X[:, None] - B.points[None, :])).real)
        M13 = np.column_stack([xi.evaluate(x / eta) for xi in meshes.xi]) if meshes.xi else \
            np.zeros((x.size, 0))
    blocks.update(M12=M12, M13=M13, M21=M21)
    return BlockSystem(meshes, eta, _assemble(meshes, static, M12, M13, M21), blocks)


# --------------------------------------------------------------------------- data and solutions


def _data_vector(mesh: PanelMesh | None, data, name: str) -> np.ndarray:
    if mesh is None:
        return np.zeros(0)
    n = mesh.primary.size
    if data is None:
        return np.zeros(n)
    if callable(data):
        full = np.asarray(data(mesh.points), dtype=float)
    else:
        full = np.asarray(data, dtype=float)
        if full.shape[0] == n:
            return full
    if full.shape[0] != mesh.size:
        raise BlockSystemError(f"{name} has {full.shape[0]} values; expected {n} or {mesh.size}")
    even = 0.5 * (full + full[mesh.pairing])
    scale = max(1.0, float(np.max(np.abs(full))))
    if np.max(np.abs(even)) > 1e-10 * scale:
        warnings.warn(f"{name} is not odd; its odd part is used", UserWarning)
    return mesh.odd_part(full)[mesh.primary]


def data_vector(meshes: SystemMeshes, psi=None, Psi=None) -> np.ndarray:
    """Right-hand side (psi, Psi, 0) at the primary nodes."""
    return np.concatenate([_data_vector(meshes.outer, psi, "psi"),
                           _data_vector(meshes.holes, Psi, "Psi"), np.zeros(meshes.n_pairs)])


def _lu(matrix: np.ndarray):
    try:
        lu = sla.lu_factor(matrix)
    except (ValueError, sla.LinAlgError) as exc:
        raise BlockSystemError(f"factorisation failed: {exc}") from exc
    cond = condition_estimate(lu, float(np.max(np.sum(np.abs(matrix), axis=0))))
    if not np.isfinite(cond) or cond > 1e14:
        raise BlockSystemError(f"system matrix is numerically singular (condition ~ {cond:.3e})")
    return lu, cond


@dataclass
class SolutionPair:
    """Densities (phi, Phi) and pair constants c, with evaluators of w and W."""

    meshes: SystemMeshes
    phi: np.ndarray
    Phi: np.ndarray
    c: np.ndarray
    eta: float | None = None
    condition: float = float("nan")

    @classmethod
    def from_vector(cls, meshes: SystemMeshes, vector: np.ndarray, eta=None, condition=float("nan")):
        a, b, c = meshes.split(np.asarray(vector, dtype=float))
        return cls(meshes, a, b, c, eta, condition)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.phi, self.Phi, self.c])

    @property
    def phi_full(self) -> np.ndarray:
        return self.meshes.outer.odd_expand(self.phi)

    @property
    def Phi_full(self) -> np.ndarray:
        return np.zeros(0) if self.meshes.holes is None else self.meshes.holes.odd_expand(self.Phi)

    def slow_part(self, x) -> np.ndarray:
        """w(x) = D_B[phi](x)."""
        return dlp_eval(self.meshes.outer, self.phi_full, x)

    def fast_part(self, X) -> np.ndarray:
        """W(X) = -D_Q[Phi](X) + sum_j c_j Xi_j(X)."""
        X = np.atleast_1d(as_complex(X)).ravel()
        if self.meshes.holes is None:
            return np.zeros(X.shape)
        out = -dlp_eval(self.meshes.holes, self.Phi_full, X)
        for cj, xi in zip(self.c, self.meshes.xi):
            if cj != 0:
                out = out + cj * xi.evaluate(X)
        return out

    def taylor(self, k_max: int) -> np.ndarray:
        """A_k with w(x) = Re sum_k A_k x**k near the origin."""
        return dlp_taylor(self.meshes.outer, self.phi_full, k_max)

    def laurent(self, k_max: int) -> np.ndarray:
        """C_k with W(X) = Re sum_k C_k X**(-k) outside the hole hull."""
        if self.meshes.holes is None:
            return np.zeros(k_max + 1, dtype=complex)
        out = -dlp_laurent(self.meshes.holes, self.Phi_full, k_max)
        for cj, xi in zip(self.c, self.meshes.xi):
            out = out + cj * xi.laurent(k_max)
        return out

    def evaluate(self, points, frame: str = "slow", eta: float | None = None) -> np.ndarray:
        """u = w(x) + W(x/eta) in the slow frame, or W(X) + w(eta X) in the fast frame."""
        eta = self.eta if eta is None else eta
        if eta is None or eta <= 0:
            raise BlockSystemError("evaluation needs a positive eta")
        pts = np.atleast_1d(as_complex(points)).ravel()
        if frame == "slow":
            x, X = pts, pts / eta
        elif frame == "fast":
            x, X = eta * pts, pts
        else:
            raise BlockSystemError(f"unknown frame {frame!r}")
        check_admissible(self.meshes, x, X)
        return self.slow_part(x) + self.fast_part(X)


def _inside(mesh: PanelMesh, pts: np.ndarray) -> np.ndarray:
    """True where a point lies inside some component of the mesh (winding number)."""
    inside = np.zeros(pts.shape, dtype=bool)
    for comp in range(mesh.n_components):
        poly = mesh.points[mesh.component == comp]
        d = poly[None, :] - pts[:, None]
        wind = np.sum(np.angle(np.roll(d, -1, axis=1) / d), axis=1) / (2 * math.pi)
        inside |= np.abs(wind) > 0.5
    return inside


def check_admissible(meshes: SystemMeshes, x: np.ndarray, X: np.ndarray) -> None:
    if np.any(~_inside(meshes.outer, x)):
        raise BlockSystemError("evaluation point outside the outer domain")
    if meshes.holes is not None and np.any(_inside(meshes.holes, X)):
        raise BlockSystemError("evaluation point inside a hole")


def solve_direct(system: BlockSystem, psi=None, Psi=None) -> SolutionPair:
    """Solve M(eta) (phi, Phi, c) = (psi, Psi, 0)."""
    meshes = system.meshes
    rhs = data_vector(meshes, psi, Psi)
    lu, cond = _lu(system.matrix)
    sol = sla.lu_solve(lu, rhs)
    return SolutionPair.from_vector(meshes, sol, system.eta, cond)


# --------------------------------------------------------------------------- eta series


@dataclass
class TaylorBlocks:
    """Matrices M_k with M(eta) = sum_k eta**k M_k."""

    meshes: SystemMeshes
    matrices: list
    norms: np.ndarray = field(default=None)
    decay_ratio: float = float("nan")
    flagged: bool = False

    def __post_init__(self):
        self.norms = np.array([np.max(np.abs(M)) for M in self.matrices])
        k = np.arange(1, len(self.matrices))
        nz = self.norms[1:] > 1e-300
        if np.count_nonzero(nz) >= 2:
            slope = np.polyfit(k[nz], np.log(self.norms[1:][nz]), 1)[0]
            self.decay_ratio = float(math.exp(slope))
            expected = 1.0 / self.meshes.eta_geometric
            self.flagged = self.decay_ratio > 1.5 * expected + 1e-12
            if self.flagged:
                warnings.warn("Taylor block norms grow faster than the geometric radius allows", UserWarning)

    @property
    def order(self) -> int:
        return len(self.matrices) - 1

    def matrix(self, eta: float, order: int | None = None) -> np.ndarray:
        order = self.order if order is None else order
        out = np.zeros_like(self.matrices[0])
        for k in range(order, -1, -1):
            out = out * eta + self.matrices[k]
        return out


def taylor_blocks(meshes: SystemMeshes, order: int) -> TaylorBlocks:
    """Exact eta-Taylor coefficients of the discrete M(eta) up to ``order``."""
    static = _static_blocks(meshes)
    B, Q = meshes.outer, meshes.holes
    M0 = _assemble(meshes, static, np.zeros((meshes.n_outer, meshes.n_holes)),
                   np.zeros((meshes.n_outer, meshes.n_pairs)), np.zeros((meshes.n_holes, meshes.n_outer)))
    mats = [M0]
    if Q is None:
        mats.extend(np.zeros_like(M0) for _ in range(order))
        return TaylorBlocks(meshes, mats)
    x = B.points[B.primary]
    X = Q.points[Q.primary]
    laurents = [xi.laurent(order) for xi in meshes.xi]
    for k in range(1, order + 1):
        M12 = Q.odd_reduce(-INV_2PI * (Q.weights * Q.normals * Q.points ** (k - 1) / x[:, None] ** k).real)
        M21 = B.odd_reduce(-INV_2PI * (B.weights * B.normals * X[:, None] ** k / B.points ** (k + 1)).real)
        M13 = np.column_stack([(C[k] * x ** (-k)).real for C in laurents]) if laurents else \
            np.zeros((x.size, 0))
        mats.append(_assemble(meshes, {"M11": np.zeros_like(static["M11"]),
                                       "M22": np.zeros_like(static["M22"]),
                                       "M23": np.zeros_like(static["M23"]),
                                       "side": np.zeros_like(static["side"])}, M12, M13, M21))
    return TaylorBlocks(meshes, mats)


@dataclass
class SolutionSeries:
    """Coefficient vectors x_n with M(eta)^{-1} b = sum_n eta**n x_n (columns per right-hand side)."""

    meshes: SystemMeshes
    coefficients: list
    condition: float
    growth_ratio: float = float("nan")
    flagged: bool = False

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def term(self, n: int, column: int | None = None) -> SolutionPair:
        v = self.coefficients[n]
        if v.ndim == 2:
            v = v[:, 0 if column is None else column]
        return SolutionPair.from_vector(self.meshes, v)

    def partial_vector(self, eta: float, order: int | None = None) -> np.ndarray:
        order = self.order if order is None else order
        out = np.zeros_like(self.coefficients[0])
        for n in range(order, -1, -1):
            out = out * eta + self.coefficients[n]
        return out

    def partial_sum(self, eta: float, order: int | None = None, column: int | None = None) -> SolutionPair:
        v = self.partial_vector(eta, order)
        if v.ndim == 2:
            v = v[:, 0 if column is None else column]
        return SolutionPair.from_vector(self.meshes, v, eta)

    def outer_coefficient(self, n: int, x, column: int | None = None) -> np.ndarray:
        """Coefficient of eta**n in u(x) = w(x) + W(x/eta) at fixed x."""
        x = np.atleast_1d(as_complex(x)).ravel()
        out = self.term(n, column).slow_part(x)
        for m in range(n):
            C = self.term(m, column).laurent(n - m)
            out = out + (C[n - m] * x ** (-(n - m))).real
        return out

    def inner_coefficient(self, n: int, X, column: int | None = None) -> np.ndarray:
        """Coefficient of eta**n in u(eta X) = W(X) + w(eta X) at fixed X."""
        X = np.atleast_1d(as_complex(X)).ravel()
        out = self.term(n, column).fast_part(X)
        for m in range(n):
            A = self.term(m, column).taylor(n - m)
            out = out + (A[n - m] * X ** (n - m)).real
        return out


def neumann_series(tb: TaylorBlocks, rhs, order: int | None = None) -> SolutionSeries:
    """x_0 = M_0^{-1} b, x_n = -M_0^{-1} sum_{k=1}^{n} M_k x_{n-k}."""
    order = tb.order if order is None else order
    if order > tb.order:
        raise BlockSystemError("not enough Taylor blocks for the requested order")
    lu, cond = _lu(tb.matrices[0])
    b = np.asarray(rhs, dtype=float)
    coeffs = [sla.lu_solve(lu, b)]
    for n in range(1, order + 1):
        acc = np.zeros_like(b)
        for k in range(1, n + 1):
            acc = acc + tb.matrices[k] @ coeffs[n - k]
        coeffs.append(-sla.lu_solve(lu, acc))
    norms = np.array([np.max(np.abs(c)) for c in coeffs])
    series = SolutionSeries(tb.meshes, coeffs, cond)
    nz = norms[1:] > 1e-300
    if np.count_nonzero(nz) >= 2:
        k = np.arange(1, order + 1)[nz]
        series.growth_ratio = float(math.exp(np.polyfit(k, np.log(norms[1:][nz]), 1)[0]))
        limit = 1.0 / min(tb.meshes.eta_operational, 1e300)
        series.flagged = series.growth_ratio > 4.0 * max(limit, 1e-300)
        if series.flagged:
            warnings.warn("Neumann recursion grows faster than the operational radius predicts", UserWarning)
    return series


def chebyshev_coefficients(meshes: SystemMeshes, rhs, degree: int, eta_max: float,
                           nodes: int | None = None) -> list:
    """Cross-check: eta-polynomial fitted to direct solves at Chebyshev nodes on [-eta_max, eta_max]."""
    nodes = nodes or 2 * degree + 8
    t = np.cos(math.pi * (np.arange(nodes) + 0.5) / nodes)
    etas = eta_max * t
    static = _static_blocks(meshes)
    b = np.asarray(rhs, dtype=float)
    sols = []
    for eta in etas:
        lu, _ = _lu(assemble_M(meshes, eta, _static=static).matrix)
        sols.append(sla.lu_solve(lu, b))
    sols = np.array(sols)
    cheb = np.polynomial.chebyshev.chebfit(t, sols.reshape(nodes, -1), nodes - 1)
    mono = np.array([np.polynomial.chebyshev.cheb2poly(cheb[:, j]) for j in range(cheb.shape[1])]).T
    out = []
    for n in range(degree + 1):
        out.append((mono[n] / eta_max**n).reshape(b.shape) if n < mono.shape[0] else np.zeros_like(b))
    return out
