"""Closed-form dynamic copula families for coupled Brownian motions.

The central objects are the time-indexed copulas of a Brownian motion
paired with a partner built by mirror coupling: the partner runs as the
negative of the driver until the driver first reaches a barrier and is
glued to it (shifted by twice the barrier) afterwards.  Variations
replace the fixed barrier by a random one, or correlate a second
Brownian motion with the reflected partner.  A static patchwork family
with the same two-state structure and the classical Gaussian and
Frechet reference families round out the catalogue.

Every family evaluates through :class:`CopulaSpec`, which validates
parameters once and dispatches to the ``eval_*`` functions below.
Surfaces are sampled on uniform grids (:func:`make_surface_grid`),
checked against the copula axioms (:func:`check_copula_axioms`) and
estimated from data by rank transforms (:func:`empirical_copula`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import log_ndtr, ndtr, ndtri

from ._util import broadcast_floats, fmt17, maybe_scalar, write_csv
from .errors import DomainError, NumericalError
from .kernels import bivariate_normal_cdf

__all__ = [
    "FAMILIES",
    "CopulaSpec",
    "CopulaSurfaceGrid",
    "AxiomReport",
    "eval_gaussian_copula",
    "eval_reflection_copula",
    "eval_correlated_reflection_copula",
    "eval_exp_barrier_copula",
    "eval_random_barrier_copula",
    "eval_patchwork_copula",
    "copula_h_volume",
    "make_surface_grid",
    "check_copula_axioms",
    "empirical_copula",
    "surface_asymmetry",
]

FAMILIES = frozenset(
    {
        "gaussian",
        "reflection",
        "correlated_reflection",
        "random_barrier_exponential",
        "random_barrier_generic",
        "patchwork",
        "frechet_upper",
        "frechet_lower",
        "independence",
    }
)

# Quadrature window for the generic random-barrier integral; the
# Gaussian weight is below 1e-16 outside 8.5 standard deviations.
_QUAD_LOWER = -8.5
_QUAD_ABS_TOL = 1e-10
_QUAD_ACCEPT = 1e-8

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_positive(name: str, value: float, where: str) -> None:
    if value is None or not np.isfinite(value) or value <= 0.0:
        raise DomainError(f"{where}: {name} must be finite and positive")


def _unit_square_masks(u: np.ndarray, v: np.ndarray):
    """Validate arguments and split off the exact boundary cases."""
    if np.isnan(u).any() or np.isnan(v).any():
        raise DomainError("copula arguments must not be NaN")
    if (u < 0.0).any() or (u > 1.0).any() or (v < 0.0).any() or (v > 1.0).any():
        raise DomainError("copula arguments must lie in [0, 1]")
    zero = (u == 0.0) | (v == 0.0)
    u_one = (u == 1.0) & ~zero
    v_one = (v == 1.0) & ~zero & ~u_one
    interior = ~(zero | u_one | v_one)
    return zero, u_one, v_one, interior


def _eval_with_boundaries(u, v, interior_fn):
    """Evaluate a copula, short-circuiting the grounded/margin cases.

    ``interior_fn`` receives flat arrays of strictly interior (u, v)
    pairs; quantile transforms inside it therefore never see 0 or 1.
    """
    (u, v), scalar = broadcast_floats(u, v)
    zero, u_one, v_one, interior = _unit_square_masks(u, v)
    out = np.empty(u.shape, dtype=float)
    out[zero] = 0.0
    out[u_one] = v[u_one]
    out[v_one] = u[v_one]
    if interior.any():
        out[interior] = interior_fn(u[interior], v[interior])
    return maybe_scalar(out, scalar)


# ---------------------------------------------------------------------------
# Closed-form families
# ---------------------------------------------------------------------------


def eval_gaussian_copula(u, v, rho):
    """Gaussian copula with correlation ``rho`` in [-1, 1].

    ``rho = 1`` and ``rho = -1`` reduce to the upper and lower Frechet
    bounds; ``rho = 0`` to the product copula.
    """
    if not np.isfinite(rho) or abs(rho) > 1.0:
        raise DomainError("eval_gaussian_copula: rho must lie in [-1, 1]")

    def interior(ui, vi):
        return bivariate_normal_cdf(ndtri(ui), ndtri(vi), rho)

    return _eval_with_boundaries(u, v, interior)


def eval_reflection_copula(u, v, t, h):
    """Copula of a Brownian motion and its mirror-coupled partner.

    The partner is the negative of the driver until the driver first
    reaches ``h > 0`` and sticks to ``driver - 2h`` afterwards.  On the
    region where the quantile gap ``Phi^-1(u) - Phi^-1(v)`` is at least
    ``2h/sqrt(t)`` the copula equals ``v``; elsewhere it is the lower
    Frechet bound plus a Gaussian correction term.
    """
    _check_positive("t", t, "eval_reflection_copula")
    _check_positive("h", h, "eval_reflection_copula")
    gap = 2.0 * h / math.sqrt(t)

    def interior(ui, vi):
        a = ndtri(ui)
        b = ndtri(vi)
        lower = np.maximum(ui + vi - 1.0, 0.0)
        corrected = lower + ndtr(np.minimum(a, -b) - gap)
        return np.where(a - b >= gap, vi, corrected)

    return _eval_with_boundaries(u, v, interior)


def eval_correlated_reflection_copula(u, v, t, h, rho):
    """Copula of a Brownian motion and a partner correlated with its
    mirror-coupled reflection.

    ``rho`` must lie strictly inside (0, 1): at 0 the pair is
    independent (use the ``independence`` family) and at 1 the
    reflection copula itself applies.  The first margin belongs to the
    driving Brownian motion, the second to the correlated partner.
    """
    _check_positive("t", t, "eval_correlated_reflection_copula")
    _check_positive("h", h, "eval_correlated_reflection_copula")
    if not np.isfinite(rho) or not 0.0 < rho < 1.0:
        raise DomainError(
            "eval_correlated_reflection_copula: rho must lie strictly in (0, 1);"
            " use the independence family for rho = 0 and the reflection"
            " family for rho = 1"
        )
    sqrt_t = math.sqrt(t)
    gap = 2.0 * h / sqrt_t
    shift = rho * gap
    threshold = h / sqrt_t

    def interior(ui, vi):
        a = ndtri(ui)
        b = ndtri(vi)
        out = np.empty(a.shape, dtype=float)
        hi = a >= threshold
        if hi.any():
            bs = b[hi] + shift
            out[hi] = bivariate_normal_cdf(a[hi], bs, rho) + vi[hi] - ndtr(bs)
        lo = ~hi
        if lo.any():
            al, bl = a[lo], b[lo]
            ashift = al - gap
            out[lo] = (
                bivariate_normal_cdf(al, bl, -rho)
                + bivariate_normal_cdf(ashift, -bl - shift, rho)
                + bivariate_normal_cdf(ashift, bl, rho)
                - ndtr(ashift)
            )
        return np.clip(out, 0.0, 1.0)

    return _eval_with_boundaries(u, v, interior)


def eval_exp_barrier_copula(u, v, t, h, lam):
    """Reflection copula averaged over a shifted exponential barrier.

    The barrier is ``h + E`` with ``E`` exponential of rate
    ``lam > 0``.  Writing ``A = Phi^-1(min(1-u, v))``,
    ``B = Phi^-1(min(u, 1-v))``, ``c = lam sqrt(t)/2`` and
    ``m = min(A, B - 2h/sqrt(t))``, the copula is

        W(u, v) + Phi(m) - exp(lam h + c^2/2 - c B + log Phi(m - c)).

    The exponential factor is evaluated in log space: for large ``lam``
    the terms ``c^2/2`` and ``log Phi(m - c)`` cancel to a moderate
    exponent while either alone overflows.  As ``lam`` grows the
    barrier degenerates to ``h`` and the surface approaches the
    reflection copula; as ``lam`` shrinks the barrier escapes to
    infinity and the surface falls to the lower Frechet bound.
    """
    _check_positive("t", t, "eval_exp_barrier_copula")
    _check_positive("h", h, "eval_exp_barrier_copula")
    _check_positive("lam", lam, "eval_exp_barrier_copula")
    sqrt_t = math.sqrt(t)
    c = 0.5 * lam * sqrt_t
    gap = 2.0 * h / sqrt_t

    def interior(ui, vi):
        a = ndtri(ui)
        b = ndtri(vi)
        big_a = np.minimum(-a, b)
        big_b = np.minimum(a, -b)
        m = np.minimum(big_a, big_b - gap)
        lower = np.maximum(ui + vi - 1.0, 0.0)
        log_term = lam * h + 0.5 * c * c - c * big_b + log_ndtr(m - c)
        val = lower + ndtr(m) - np.exp(log_term)
        return np.clip(val, 0.0, 1.0)

    return _eval_with_boundaries(u, v, interior)


def _probe_survival_fn(survival_fn: Callable[[float], float]) -> None:
    probes = [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0]
    values = []
    for z in probes:
        val = float(survival_fn(z))
        if not 0.0 <= val <= 1.0 or not np.isfinite(val):
            raise DomainError(
                "random barrier survival_fn must map reals into [0, 1];"
                f" got {val!r} at {z}"
            )
        values.append(val)
    if any(b > a + 1e-12 for a, b in zip(values, values[1:])):
        raise DomainError("random barrier survival_fn must be non-increasing")


def eval_random_barrier_copula(u, v, t, survival_fn):
    """Reflection copula averaged over an arbitrary positive barrier.

    ``survival_fn`` is the barrier's survival function; it must be
    non-increasing with values in [0, 1] (checked on a probe grid).
    Each point costs one adaptive quadrature over the Gaussian-weighted
    integrand, so prefer :func:`eval_exp_barrier_copula` when the
    barrier is a shifted exponential.

    Raises
    ------
    NumericalError
        If the quadrature does not reach absolute accuracy 1e-8.
    """
    _check_positive("t", t, "eval_random_barrier_copula")
    if not callable(survival_fn):
        raise DomainError("eval_random_barrier_copula: survival_fn must be callable")
    _probe_survival_fn(survival_fn)
    half_sqrt_t = 0.5 * math.sqrt(t)

    def single(ui: float, vi: float) -> float:
        a = ndtri(ui)
        b = ndtri(vi)
        upper = min(-a, b)
        big_b = min(a, -b)
        if upper <= _QUAD_LOWER:
            return float(vi)

        def integrand(w: float) -> float:
            return (
                math.exp(-0.5 * w * w)
                / _SQRT_2PI
                * float(survival_fn(half_sqrt_t * (big_b - w)))
            )

        result = quad(
            integrand,
            _QUAD_LOWER,
            upper,
            epsabs=_QUAD_ABS_TOL,
            epsrel=0.0,
            limit=200,
            full_output=1,
        )
        integral, abserr = result[0], result[1]
        if len(result) > 3 or abserr > _QUAD_ACCEPT:
            raise NumericalError(
                "random barrier quadrature failed at"
                f" (u={fmt17(ui)}, v={fmt17(vi)}): abserr={fmt17(abserr)}"
                + (f", message={result[3]!r}" if len(result) > 3 else "")
            )
        return min(max(vi - integral, 0.0), 1.0)

    def interior(ui, vi):
        return np.array([single(a, b) for a, b in zip(ui, vi)])

    return _eval_with_boundaries(u, v, interior)


def eval_patchwork_copula(u, v, eta, rho):
    """Countermonotone copula with a Gaussian patch in the coupling corner.

    The lower Frechet copula is overwritten on the rectangle
    ``[1-r, 1] x [0, r]`` with ``r = 2 Phi(-eta/2)`` by a rescaled
    Gaussian copula of correlation ``rho``.  At ``rho = 1`` the patch
    is comonotone and the surface is the static analogue of the
    reflection copula; at ``rho = -1`` the whole square degenerates to
    the lower Frechet bound.
    """
    _check_positive("eta", eta, "eval_patchwork_copula")
    if not np.isfinite(rho) or abs(rho) > 1.0:
        raise DomainError("eval_patchwork_copula: rho must lie in [-1, 1]")
    r = 2.0 * float(ndtr(-0.5 * eta))

    def interior(ui, vi):
        outer = np.where(
            vi >= r,
            np.maximum(ui + vi - 1.0, 0.0) - np.maximum(ui + r - 1.0, 0.0),
            0.0,
        )
        inner_u = np.maximum(ui + r - 1.0, 0.0) / r
        inner_v = np.minimum(vi / r, 1.0)
        return outer + r * eval_gaussian_copula(inner_u, inner_v, rho)

    return _eval_with_boundaries(u, v, interior)


# ---------------------------------------------------------------------------
# Specs, grids, axiom checking
# ---------------------------------------------------------------------------

_REQUIRED_PARAMS = {
    "gaussian": ("rho",),
    "reflection": ("t", "h"),
    "correlated_reflection": ("t", "h", "rho"),
    "random_barrier_exponential": ("t", "h", "lam"),
    "random_barrier_generic": ("t", "survival_fn"),
    "patchwork": ("eta", "rho"),
    "frechet_upper": (),
    "frechet_lower": (),
    "independence": (),
}


@dataclass(frozen=True)
class CopulaSpec:
    """A validated copula family with its parameters.

    Parameters irrelevant to the chosen family are ignored.  Validation
    happens on construction; an invalid combination raises
    :class:`DomainError`.
    """

    family: str
    t: float | None = None
    h: float | None = None
    rho: float | None = None
    lam: float | None = None
    eta: float | None = None
    survival_fn: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(
                f"unknown copula family {self.family!r};"
                f" expected one of {sorted(FAMILIES)}"
            )
        missing = [
            name
            for name in _REQUIRED_PARAMS[self.family]
            if getattr(self, "survival_fn" if name == "survival_fn" else name) is None
        ]
        if missing:
            raise DomainError(
                f"copula family {self.family!r} requires parameters {missing}"
            )
        # Evaluate once at an interior point so bad parameter values
        # surface immediately rather than at first use.
        self.cdf(0.5, 0.5)

    def cdf(self, u, v):
        """Evaluate the copula at (u, v); broadcasts over arrays."""
        fam = self.family
        if fam == "gaussian":
            return eval_gaussian_copula(u, v, self.rho)
        if fam == "reflection":
            return eval_reflection_copula(u, v, self.t, self.h)
        if fam == "correlated_reflection":
            return eval_correlated_reflection_copula(u, v, self.t, self.h, self.rho)
        if fam == "random_barrier_exponential":
            return eval_exp_barrier_copula(u, v, self.t, self.h, self.lam)
        if fam == "random_barrier_generic":
            return eval_random_barrier_copula(u, v, self.t, self.survival_fn)
        if fam == "patchwork":
            return eval_patchwork_copula(u, v, self.eta, self.rho)
        if fam == "frechet_upper":
            return _eval_with_boundaries(u, v, lambda ui, vi: np.minimum(ui, vi))
        if fam == "frechet_lower":
            return _eval_with_boundaries(
                u, v, lambda ui, vi: np.maximum(ui + vi - 1.0, 0.0)
            )
        return _eval_with_boundaries(u, v, lambda ui, vi: ui * vi)

    def describe(self) -> dict:
        """Plain-data summary of the spec (for manifests and reports)."""
        out: dict = {"family": self.family}
        for name in ("t", "h", "rho", "lam", "eta"):
            value = getattr(self, name)
            if value is not None and name in _REQUIRED_PARAMS[self.family]:
                out[name] = value
        if self.survival_fn is not None and self.family == "random_barrier_generic":
            out["survival_fn"] = getattr(
                self.survival_fn, "__name__", repr(self.survival_fn)
            )
        return out


@dataclass(frozen=True)
class CopulaSurfaceGrid:
    """A copula sampled on the uniform (resolution+1)^2 lattice.

    ``values[i, j]`` holds the copula at ``(u[i], v[j])``; the first
    row and column sit on the grounded boundary and the last ones on
    the margins.
    """

    resolution: int
    u: np.ndarray
    v: np.ndarray
    values: np.ndarray

    def cell_volumes(self) -> np.ndarray:
        """Second-order differences: the measure of every grid cell."""
        return np.diff(np.diff(self.values, axis=0), axis=1)

    def write_csv(self, path, value_name: str = "C") -> None:
        """Write rows ``u,v,value`` in row-major order (u outer loop)."""
        rows = (
            (float(self.u[i]), float(self.v[j]), float(self.values[i, j]))
            for i in range(self.resolution + 1)
            for j in range(self.resolution + 1)
        )
        write_csv(path, ("u", "v", value_name), rows)


def make_surface_grid(spec: CopulaSpec, resolution: int) -> CopulaSurfaceGrid:
    """Sample a copula spec on the uniform lattice of a given resolution."""
    if not isinstance(resolution, (int, np.integer)) or resolution < 1:
        raise DomainError("make_surface_grid: resolution must be an integer >= 1")
    pts = np.linspace(0.0, 1.0, resolution + 1)
    uu, vv = np.meshgrid(pts, pts, indexing="ij")
    values = spec.cdf(uu, vv)
    return CopulaSurfaceGrid(int(resolution), pts, pts.copy(), values)


@dataclass
class AxiomReport:
    """Outcome of checking a surface against the copula axioms."""

    passed: bool
    resolution: int
    max_grounded_error: float
    max_margin_error: float
    min_cell_volume: float
    worst_cell: tuple | None
    max_upper_frechet_excess: float
    max_lower_frechet_deficit: float
    boundary_tol: float
    volume_tol: float
    worst_violations: list = field(default_factory=list)

    def summary(self) -> str:
        status = "passed" if self.passed else "FAILED"
        lines = [
            f"copula axiom check {status} (resolution {self.resolution})",
            f"  grounded boundary error: {fmt17(self.max_grounded_error)}",
            f"  margin error:            {fmt17(self.max_margin_error)}",
            f"  min cell volume:         {fmt17(self.min_cell_volume)}",
            f"  Frechet excess/deficit:  {fmt17(self.max_upper_frechet_excess)}"
            f" / {fmt17(self.max_lower_frechet_deficit)}",
        ]
        for msg in self.worst_violations:
            lines.append(f"  violation: {msg}")
        return "\n".join(lines)


def check_copula_axioms(
    target,
    resolution: int = 128,
    boundary_tol: float = 1e-12,
    volume_tol: float = 1e-9,
) -> AxiomReport:
    """Check a copula against groundedness, margins, 2-increasingness
    and the Frechet bounds on a uniform grid.

    ``target`` may be a :class:`CopulaSpec`, an already sampled
    :class:`CopulaSurfaceGrid`, or a callable ``(u, v) -> C``.  The
    report lists the worst violations with their grid locations; the
    ``passed`` flag requires exact boundaries up to ``boundary_tol``
    and cell volumes no smaller than ``-volume_tol``.
    """
    if isinstance(target, CopulaSurfaceGrid):
        grid = target
    elif isinstance(target, CopulaSpec):
        if resolution < 2:
            raise DomainError("check_copula_axioms: resolution must be >= 2")
        grid = make_surface_grid(target, resolution)
    elif callable(target):
        if resolution < 2:
            raise DomainError("check_copula_axioms: resolution must be >= 2")
        pts = np.linspace(0.0, 1.0, resolution + 1)
        uu, vv = np.meshgrid(pts, pts, indexing="ij")
        grid = CopulaSurfaceGrid(
            int(resolution), pts, pts.copy(), np.asarray(target(uu, vv), dtype=float)
        )
    else:
        raise DomainError(
            "check_copula_axioms: target must be a CopulaSpec, a"
            " CopulaSurfaceGrid or a callable"
        )
    if grid.resolution < 2:
        raise DomainError("check_copula_axioms: resolution must be >= 2")

    res = grid.resolution
    vals = grid.values
    u = grid.u
    v = grid.v
    violations: list[str] = []

    grounded = max(
        float(np.max(np.abs(vals[0, :]))), float(np.max(np.abs(vals[:, 0])))
    )
    if grounded > boundary_tol:
        i = int(np.argmax(np.abs(vals[0, :])))
        j = int(np.argmax(np.abs(vals[:, 0])))
        if abs(vals[0, i]) >= abs(vals[j, 0]):
            violations.append(
                f"grounded boundary: C(0, {fmt17(v[i])}) = {fmt17(vals[0, i])}"
            )
        else:
            violations.append(
                f"grounded boundary: C({fmt17(u[j])}, 0) = {fmt17(vals[j, 0])}"
            )

    margin_u = np.abs(vals[:, res] - u)
    margin_v = np.abs(vals[res, :] - v)
    margin = max(float(margin_u.max()), float(margin_v.max()))
    if margin > boundary_tol:
        if margin_u.max() >= margin_v.max():
            i = int(np.argmax(margin_u))
            violations.append(
                f"margin: C({fmt17(u[i])}, 1) = {fmt17(vals[i, res])}"
                f" differs from u by {fmt17(margin_u[i])}"
            )
        else:
            j = int(np.argmax(margin_v))
            violations.append(
                f"margin: C(1, {fmt17(v[j])}) = {fmt17(vals[res, j])}"
                f" differs from v by {fmt17(margin_v[j])}"
            )

    volumes = grid.cell_volumes()
    min_vol = float(volumes.min())
    i, j = np.unravel_index(int(np.argmin(volumes)), volumes.shape)
    worst_cell = (
        float(u[i]),
        float(u[i + 1]),
        float(v[j]),
        float(v[j + 1]),
        min_vol,
    )
    if min_vol < -volume_tol:
        violations.append(
            f"2-increasing: cell [{fmt17(u[i])}, {fmt17(u[i + 1])}] x"
            f" [{fmt17(v[j])}, {fmt17(v[j + 1])}] has volume {fmt17(min_vol)}"
        )

    upper = np.minimum.outer(u, v)
    lower = np.maximum(np.add.outer(u, v) - 1.0, 0.0)
    excess = float(np.max(vals - upper))
    deficit = float(np.max(lower - vals))
    if excess > volume_tol:
        i, j = np.unravel_index(int(np.argmax(vals - upper)), vals.shape)
        violations.append(
            f"upper Frechet bound exceeded by {fmt17(excess)} at"
            f" ({fmt17(u[i])}, {fmt17(v[j])})"
        )
    if deficit > volume_tol:
        i, j = np.unravel_index(int(np.argmax(lower - vals)), vals.shape)
        violations.append(
            f"lower Frechet bound undercut by {fmt17(deficit)} at"
            f" ({fmt17(u[i])}, {fmt17(v[j])})"
        )

    return AxiomReport(
        passed=not violations,
        resolution=res,
        max_grounded_error=grounded,
        max_margin_error=margin,
        min_cell_volume=min_vol,
        worst_cell=worst_cell,
        max_upper_frechet_excess=excess,
        max_lower_frechet_deficit=deficit,
        boundary_tol=boundary_tol,
        volume_tol=volume_tol,
        worst_violations=violations,
    )


def copula_h_volume(copula, rect: Sequence[float]) -> float:
    """Measure a rectangle under a copula.

    ``rect`` is ``(u1, v1, u2, v2)`` with ``u1 <= u2`` and
    ``v1 <= v2``, all inside the unit square.  ``copula`` may be a
    :class:`CopulaSpec` or a callable.
    """
    try:
        u1, v1, u2, v2 = (float(r) for r in rect)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"copula_h_volume: malformed rectangle {rect!r}") from exc
    if not (0.0 <= u1 <= u2 <= 1.0 and 0.0 <= v1 <= v2 <= 1.0):
        raise DomainError(
            "copula_h_volume: rectangle must satisfy 0 <= u1 <= u2 <= 1"
            " and 0 <= v1 <= v2 <= 1"
        )
    cdf = copula.cdf if isinstance(copula, CopulaSpec) else copula
    return float(cdf(u2, v2) - cdf(u1, v2) - cdf(u2, v1) + cdf(u1, v1))


def empirical_copula(x, y, resolution: int) -> CopulaSurfaceGrid:
    """Rank-based empirical copula of paired samples on a uniform grid.

    Pseudo-observations are ``rank/(N+1)``; the surface value at a grid
    node is the fraction of pseudo-observation pairs dominated by it.

    Raises
    ------
    DomainError
        If fewer than 100 sample pairs are supplied, lengths differ, or
        the resolution is below 2.
    """
    from scipy.stats import rankdata

    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError("empirical_copula: samples must have equal length")
    n = x.size
    if n < 100:
        raise DomainError(
            f"empirical_copula: need at least 100 sample pairs, got {n}"
        )
    if np.isnan(x).any() or np.isnan(y).any():
        raise DomainError("empirical_copula: samples must not contain NaN")
    if not isinstance(resolution, (int, np.integer)) or resolution < 2:
        raise DomainError("empirical_copula: resolution must be an integer >= 2")

    pu = rankdata(x) / (n + 1.0)
    pv = rankdata(y) / (n + 1.0)
    # Each pair contributes to every node at or above its cell; ceil
    # maps a pseudo-observation to the first dominating grid index.
    ku = np.ceil(pu * resolution).astype(np.intp)
    kv = np.ceil(pv * resolution).astype(np.intp)
    counts = np.zeros((resolution + 1, resolution + 1), dtype=np.int64)
    np.add.at(counts, (ku, kv), 1)
    values = counts.cumsum(axis=0).cumsum(axis=1) / float(n)
    pts = np.linspace(0.0, 1.0, resolution + 1)
    return CopulaSurfaceGrid(int(resolution), pts, pts.copy(), values)


def surface_asymmetry(grid: CopulaSurfaceGrid) -> float:
    """Largest deviation between C(u, v) and C(v, u) on the grid."""
    return float(np.max(np.abs(grid.values - grid.values.T)))
