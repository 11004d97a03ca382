"""Pseudo-resolvent, S-resolvents, spectrum scans and bisectoriality reports.

A paravector s is in the numerical S-spectrum of T when the pseudo-resolvent
Q_s[T] = T^2 - 2 s0 T + |s|^2 has smallest singular value (in the real
representation) at most 1e-10 times its largest.  Q_s depends on s only
through (s0, |s|), so scanning the half-plane y = |Im s| >= 0 determines the
whole axially symmetric spectrum; scans report sigma_min heatmaps in the
pseudospectra style rather than running root finders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import DoubleSector, Paravector, unit_imag
from .errors import ArgumentError, DimensionMismatchError
from .module import (
    INVERTIBILITY_RTOL,
    CliffordOperator,
    OperatorSolver,
    operator_from_real,
    operator_norm,
    rho_matrix,
)

SPECTRUM_RTOL = INVERTIBILITY_RTOL


def q_operator(s: Paravector, T: CliffordOperator) -> CliffordOperator:
    """Pseudo-resolvent polynomial T^2 - 2 s0 T + |s|^2, a function of (s0, |s|) only."""
    if s.n != T.n:
        raise DimensionMismatchError("paravector and operator in different algebras")
    qc = (T @ T).coeffs - (2.0 * s.s0) * T.coeffs
    qc = qc.copy()
    abs2 = s.abs2()
    for i in range(T.m):
        qc[i, i, 0] += abs2
    return CliffordOperator(T.n, T.m, qc)


@dataclass(frozen=True)
class PseudoResolventPoint:
    s: Paravector
    Q: CliffordOperator
    sigma_min: float


def pseudo_resolvent_point(s: Paravector, T: CliffordOperator) -> PseudoResolventPoint:
    Q = q_operator(s, T)
    svals = np.linalg.svd(rho_matrix(Q), compute_uv=False)
    return PseudoResolventPoint(s, Q, float(svals[-1]))


def _imag_left_matrix_full(s: Paravector, m):
    """rho of left multiplication by Im(s) on the whole module."""
    L = Paravector(0.0, s.svec).left_matrix()
    return np.kron(np.eye(m), L)


def _resolvent_real(s: Paravector, T: CliffordOperator, solver=None):
    """Real representations (left, right) of the two S-resolvents at s."""
    Q = q_operator(s, T)
    qsolver = OperatorSolver(Q)
    qsolver.require_invertible(SPECTRUM_RTOL, what=f"Q_s[T] at s={s!r}")
    D = qsolver.rho.shape[0]
    qinv = qsolver.solve_real(np.eye(D))
    rho_t = rho_matrix(T)
    msbar = s.s0 * np.eye(D) - _imag_left_matrix_full(s, T.m)
    left = qinv @ msbar - rho_t @ qinv
    right = (msbar - rho_t) @ qinv
    return left, right


def left_s_resolvent(s: Paravector, T: CliffordOperator) -> CliffordOperator:
    """Left S-resolvent Q_s[T]^{-1} sbar - T Q_s[T]^{-1} (sbar acting by left multiplication)."""
    left, _ = _resolvent_real(s, T)
    return operator_from_real(left, T.n, T.m)


def right_s_resolvent(s: Paravector, T: CliffordOperator) -> CliffordOperator:
    """Right S-resolvent (sbar - T) Q_s[T]^{-1}."""
    _, right = _resolvent_real(s, T)
    return operator_from_real(right, T.n, T.m)


@dataclass(frozen=True)
class GridSpec:
    """Rectangle in the (x, y) half-plane with node counts, y = |Im s| >= 0."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ArgumentError("grid needs at least one node per axis")
        if self.y_min < 0.0:
            raise ArgumentError("grid must satisfy y >= 0")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ArgumentError("grid bounds out of order")

    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self):
        return np.linspace(self.y_min, self.y_max, self.ny)

    def step(self):
        hx = (self.x_max - self.x_min) / max(self.nx - 1, 1)
        hy = (self.y_max - self.y_min) / max(self.ny - 1, 1)
        return max(hx, hy)


@dataclass(frozen=True)
class Detection:
    x: float
    y: float
    sigma_min: float
    kind: str  # "real" for y = 0, else "sphere" [x + S y]


@dataclass(frozen=True)
class SpectrumScan:
    grid: GridSpec
    values: np.ndarray      # sigma_min per node, shape (ny, nx)
    sigma_max: np.ndarray   # sigma_max per node, shape (ny, nx)
    detections: tuple
    tol: float


def _batched_sigma(rho_t, xs, ys):
    """sigma_min and sigma_max of rho(Q_s) on the grid, batched over nodes."""
    D = rho_t.shape[0]
    rho_t2 = rho_t @ rho_t
    X, Y = np.meshgrid(xs, ys)
    x = X.ravel()
    y = Y.ravel()
    Q = (
        rho_t2[None, :, :]
        - 2.0 * x[:, None, None] * rho_t[None, :, :]
        + (x * x + y * y)[:, None, None] * np.eye(D)[None, :, :]
    )
    svals = np.linalg.svd(Q, compute_uv=False)
    shape = X.shape
    return svals[:, -1].reshape(shape), svals[:, 0].reshape(shape)


def scan_spectrum_slice(T: CliffordOperator, grid: GridSpec, tol=SPECTRUM_RTOL) -> SpectrumScan:
    """sigma_min heatmap of Q_s over the grid with local-minimum detections.

    A node is flagged when it is a local minimum of sigma_min (8-neighborhood,
    non-strict) and sigma_min <= tol * sigma_max at that node.
    """
    rho_t = rho_matrix(T)
    smin, smax = _batched_sigma(rho_t, grid.xs(), grid.ys())
    ny, nx = smin.shape
    padded = np.full((ny + 2, nx + 2), np.inf)
    padded[1:-1, 1:-1] = smin
    is_min = np.ones_like(smin, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_min &= smin <= padded[1 + dy:1 + dy + ny, 1 + dx:1 + dx + nx]
    flagged = is_min & (smin <= tol * smax)
    xs, ys = grid.xs(), grid.ys()
    detections = []
    for iy, ix in np.argwhere(flagged):
        y = float(ys[iy])
        detections.append(
            Detection(float(xs[ix]), y, float(smin[iy, ix]), "real" if y == 0.0 else "sphere")
        )
    return SpectrumScan(grid, smin, smax, tuple(detections), tol)


def default_scan_grid(T: CliffordOperator, per_unit=8) -> GridSpec:
    """Half-plane grid covering 1.25 * max(1, ||T||) with binary-exact steps.

    The step is a power of two over ``per_unit`` so that integer and
    half-integer spectra land exactly on nodes.
    """
    radius = 1.25 * max(1.0, operator_norm(T))
    h = 1.0 / per_unit
    k = int(math.ceil(radius / h))
    r = k * h
    return GridSpec(-r, r, 0.0, r, 2 * k + 1, k + 1)


@dataclass(frozen=True)
class RaySampling:
    """Sampling plan for resolvent-bound estimation on sector boundary rays."""

    phis: tuple = ()
    radii_per_ray: int = 200
    radius_span: tuple = (1e-4, 1e4)   # relative to max(1, ||T||)
    axis: int = 0

    def resolved_phis(self, omega):
        if self.phis:
            return tuple(sorted(self.phis))
        return tuple(omega + k * (math.pi / 2 - omega) / 6.0 for k in range(1, 6))


@dataclass(frozen=True)
class BisectorReport:
    omega: float
    injective: bool
    c_phi_table: tuple          # pairs (phi, estimated C_phi)
    spectrum_in_sector: bool
    detections: tuple = ()
    sigma_min_T: float = 0.0
    sigma_max_T: float = 0.0

    @property
    def certified(self) -> bool:
        """Bisectoriality certificate: spectrum containment plus finite resolvent bounds."""
        finite = all(np.isfinite(c) for _, c in self.c_phi_table)
        return bool(self.spectrum_in_sector and finite)

    def c_at(self, phi) -> float:
        """Conservative C constant usable at angle phi (table is decreasing in phi)."""
        best = None
        for p, c in self.c_phi_table:
            if p <= phi + 1e-12:
                best = c
        if best is None:
            best = self.c_phi_table[0][1] if self.c_phi_table else math.inf
        return best


def _ray_resolvent_bound(T, rho_t, rho_t2, phi, radii, axis_vec, m):
    """max over the four boundary rays of |s| * ||S_L^{-1}(s, T)||, batched."""
    D = rho_t.shape[0]
    J_full = np.kron(np.eye(m), axis_vec)
    eye = np.eye(D)
    worst = 0.0
    for branch in (1.0, -1.0):
        for sign in (1.0, -1.0):
            s0 = sign * radii * math.cos(phi)
            simag = branch * sign * radii * math.sin(phi)
            r2 = radii * radii
            Q = (
                rho_t2[None]
                - 2.0 * s0[:, None, None] * rho_t[None]
                + r2[:, None, None] * eye[None]
            )
            try:
                qinv = np.linalg.inv(Q)
            except np.linalg.LinAlgError:
                return math.inf
            msbar = s0[:, None, None] * eye[None] - simag[:, None, None] * J_full[None]
            left = np.einsum("kab,kbc->kac", qinv, msbar) - np.einsum(
                "ab,kbc->kac", rho_t, qinv
            )
            norms = np.linalg.svd(left, compute_uv=False)[:, 0]
            if not np.all(np.isfinite(norms)):
                return math.inf
            worst = max(worst, float(np.max(radii * norms)))
    return worst


def check_bisectorial(
    T: CliffordOperator,
    omega: float,
    sampling: RaySampling | None = None,
    scan_grid: GridSpec | None = None,
) -> BisectorReport:
    """Certify or refute bisectoriality of angle omega for the user's candidate.

    Checks injectivity of rho(T), containment of all scan detections in the
    closed double sector, and estimates C_phi on the boundary rays of each
    requested larger sector.  The result is a numerical certificate; failures
    are carried in the report rather than raised.
    """
    if not 0.0 < omega < math.pi / 2:
        raise ArgumentError(f"omega={omega} outside (0, pi/2)")
    sampling = sampling or RaySampling()
    rho_t = rho_matrix(T)
    svals = np.linalg.svd(rho_t, compute_uv=False)
    sigma_max, sigma_min = float(svals[0]), float(svals[-1])
    injective = sigma_min > INVERTIBILITY_RTOL * sigma_max

    grid = scan_grid or default_scan_grid(T)
    scan = scan_spectrum_slice(T, grid)
    sector = DoubleSector(omega)
    contained = all(
        sector.contains_closed(Paravector(d.x, d.y * unit_imag(T.n, sampling.axis).svec), tol=1e-9)
        for d in scan.detections
    )

    scale = max(1.0, sigma_max)
    radii = scale * np.logspace(
        math.log10(sampling.radius_span[0]),
        math.log10(sampling.radius_span[1]),
        sampling.radii_per_ray,
    )
    rho_t2 = rho_t @ rho_t
    axis_vec = unit_imag(T.n, sampling.axis).left_matrix()
    table = []
    for phi in sampling.resolved_phis(omega):
        if not omega < phi < math.pi / 2:
            raise ArgumentError(f"sampled phi={phi} outside (omega, pi/2)")
        c = _ray_resolvent_bound(T, rho_t, rho_t2, phi, radii, axis_vec, T.m)
        table.append((float(phi), float(c)))
    return BisectorReport(
        omega=float(omega),
        injective=bool(injective),
        c_phi_table=tuple(table),
        spectrum_in_sector=bool(contained),
        detections=scan.detections,
        sigma_min_T=sigma_min,
        sigma_max_T=sigma_max,
    )
