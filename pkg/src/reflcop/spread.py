"""Closed-form survival analytics for the spread of two Brownian motions.

All probabilities here concern the terminal spread: the chance that
``B1_t - B2_t`` exceeds a threshold at a fixed time ``t``, as a
functional of the copula coupling the two motions.  The module covers

* the Gaussian-copula value and its achievable range,
* the supremum over all Brownian-admissible copulae, attained by the
  mirror-coupled pair with barrier ``eta/2``,
* the shifted-exponential random-barrier family interpolating between
  those two,
* the multi-barrier correlation model: hitting-time laws, the survival
  recursion in the number of reflections, its limit, and calibration of
  the regime correlation ``rho`` to a target probability.

Thresholds ``x`` broadcast as numpy arrays; model parameters are
scalars validated once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, zeta

from ._util import broadcast_floats, maybe_scalar, write_csv
from .errors import DomainError, NumericalError, RangeError

__all__ = [
    "MultiBarrierParams",
    "gaussian_spread_survival",
    "rbc_spread_survival",
    "exp_barrier_spread_survival",
    "gaussian_rho_for_target",
    "mb_barrier_sequence",
    "mb_hit_time_cdf",
    "mb_survival",
    "mb_survival_limit",
    "mb_survival_upper_bound",
    "calibrate_rho",
    "write_survival_curve",
]


def _check_time(t: float, where: str) -> None:
    if t is None or not np.isfinite(t) or t <= 0.0:
        raise DomainError(f"{where}: t must be finite and positive")


def _check_rho(rho: float, where: str) -> None:
    if rho is None or not np.isfinite(rho) or abs(rho) > 1.0:
        raise DomainError(f"{where}: rho must lie in [-1, 1]")


@dataclass(frozen=True)
class MultiBarrierParams:
    """Parameters of the multi-barrier correlation model.

    The spread of the two unit Brownian motions switches correlation
    regime (between ``-rho`` and ``rho``) each time it reaches the
    alternating barriers: ``eta`` from below, then ``nu`` from above,
    then ``eta`` again, and so on.

    Parameters
    ----------
    nu : float
        Lower barrier; must satisfy ``nu < eta``.
    eta : float
        Upper barrier; must be positive.
    rho : float
        Regime correlation magnitude, in ``[-1, 1]``.
    """

    nu: float
    eta: float
    rho: float

    def __post_init__(self):
        for name in ("nu", "eta", "rho"):
            value = getattr(self, name)
            if value is None or not np.isfinite(value):
                raise DomainError(f"MultiBarrierParams: {name} must be finite")
        if self.eta <= 0.0:
            raise DomainError("MultiBarrierParams: eta must be positive")
        if self.nu >= self.eta:
            raise DomainError("MultiBarrierParams: nu must be smaller than eta")
        _check_rho(self.rho, "MultiBarrierParams")

    def alpha(self, k: int) -> float:
        """Barrier hit at the k-th reflection: eta for odd k, nu for even."""
        if k == 0:
            return 0.0
        return self.eta if k % 2 == 1 else self.nu


def gaussian_spread_survival(eta, t, rho):
    """P(B1_t - B2_t >= eta) under the constant-correlation copula.

    The spread is centred Gaussian with variance ``2(1-rho)t``, giving
    ``Phi(-eta / sqrt(2(1-rho)t))``.  At ``rho = 1`` the spread is
    identically zero and the value degenerates to the indicator of
    ``eta <= 0``.
    """
    _check_time(t, "gaussian_spread_survival")
    _check_rho(rho, "gaussian_spread_survival")
    (eta_arr,), scalar = broadcast_floats(eta)
    if np.isnan(eta_arr).any():
        raise DomainError("gaussian_spread_survival: eta must not be NaN")
    if rho == 1.0:
        out = np.where(eta_arr <= 0.0, 1.0, 0.0)
    else:
        out = ndtr(-eta_arr / math.sqrt(2.0 * (1.0 - rho) * t))
    return maybe_scalar(out, scalar)


def rbc_spread_survival(eta, t):
    """Largest value of P(B1_t - B2_t >= eta) over admissible copulae.

    Equal to ``2 Phi(-eta / (2 sqrt(t)))``, attained by the mirror
    coupling with barrier ``eta/2``: the spread runs as twice a
    Brownian motion until it reaches ``eta`` and stays there.
    """
    _check_time(t, "rbc_spread_survival")
    (eta_arr,), scalar = broadcast_floats(eta)
    if np.isnan(eta_arr).any() or (eta_arr <= 0.0).any():
        raise DomainError("rbc_spread_survival: eta must be positive")
    out = 2.0 * ndtr(-eta_arr / (2.0 * math.sqrt(t)))
    return maybe_scalar(out, scalar)


def exp_barrier_spread_survival(x, t, h, lam):
    """P(B1_t - B2_t >= x) under the shifted-exponential barrier coupling.

    The partner mirrors the driver until the driver first reaches an
    independent barrier ``h + E`` with ``E`` exponential of rate
    ``lam``; the spread then freezes at twice the barrier.  Splitting
    on whether the frozen spread can fall short of ``x``:

    for ``x >= 2h``::

        2 Phi(-x/(2 sqrt(t))) e^(-lam x/2 + lam h)
          - Phi(-x/(2 sqrt(t)) - lam sqrt(t)/2) e^(lam^2 t/8 - lam x/4 + lam h)

    for ``x < 2h``::

        Phi(-x/(2 sqrt(t))) + Phi((x-4h)/(2 sqrt(t)))
          - Phi((x-4h)/(2 sqrt(t)) - lam sqrt(t)/2) e^(lam^2 t/8 - lam x/4 + lam h)

    The exp * Phi products are evaluated in log space; on each branch
    the growing exponent cancels against the Gaussian tail, so the
    result stays finite for arbitrarily large ``lam``.  With
    ``h = eta/2`` the value at ``x = eta`` spans
    ``[Phi(-eta/(2 sqrt(t))), 2 Phi(-eta/(2 sqrt(t)))]`` as ``lam``
    runs from 0 to infinity.
    """
    _check_time(t, "exp_barrier_spread_survival")
    if h is None or not np.isfinite(h) or h <= 0.0:
        raise DomainError("exp_barrier_spread_survival: h must be finite and positive")
    if lam is None or not np.isfinite(lam) or lam <= 0.0:
        raise DomainError(
            "exp_barrier_spread_survival: lam must be finite and positive"
        )
    (x_arr,), scalar = broadcast_floats(x)
    if np.isnan(x_arr).any():
        raise DomainError("exp_barrier_spread_survival: x must not be NaN")

    s = math.sqrt(t)
    out = np.empty(x_arr.shape, dtype=float)
    hi = x_arr >= 2.0 * h
    # For large lam the log-space exponents go far negative; underflow
    # to zero is the correct limit, not an error.
    with np.errstate(under="ignore"):
        if hi.any():
            xh = x_arr[hi]
            out[hi] = 2.0 * np.exp(
                lam * (h - 0.5 * xh) + log_ndtr(-xh / (2.0 * s))
            ) - np.exp(
                lam * lam * t / 8.0
                - lam * xh / 4.0
                + lam * h
                + log_ndtr(-xh / (2.0 * s) - lam * s / 2.0)
            )
        lo = ~hi
        if lo.any():
            xl = x_arr[lo]
            out[lo] = (
                ndtr(-xl / (2.0 * s))
                + ndtr((xl - 4.0 * h) / (2.0 * s))
                - np.exp(
                    lam * lam * t / 8.0
                    - lam * xl / 4.0
                    + lam * h
                    + log_ndtr((xl - 4.0 * h) / (2.0 * s) - lam * s / 2.0)
                )
            )
    return maybe_scalar(np.clip(out, 0.0, 1.0), scalar)


def gaussian_rho_for_target(x, eta, t):
    """Correlation whose Gaussian spread survival at ``eta`` equals ``x``.

    Inverts ``gaussian_spread_survival``: ``rho = 1 - eta^2 /
    (2 t Phi^-1(x)^2)``.  The achievable range under constant
    correlation is ``(0, Phi(-eta/(2 sqrt(t)))]``; targets outside it
    raise :class:`RangeError` carrying the valid interval.
    """
    _check_time(t, "gaussian_rho_for_target")
    if eta is None or not np.isfinite(eta) or eta <= 0.0:
        raise DomainError("gaussian_rho_for_target: eta must be finite and positive")
    upper = float(ndtr(-eta / (2.0 * math.sqrt(t))))
    if x is None or np.isnan(x) or not 0.0 < x <= upper:
        raise RangeError(
            f"gaussian_rho_for_target: target {x!r} is not achievable by a"
            f" constant correlation; valid range is (0, {upper!r}]",
            valid_range=(0.0, upper),
        )
    q = float(ndtri(x))
    return 1.0 - (eta / q) ** 2 / (2.0 * t)


# ---------------------------------------------------------------------------
# Multi-barrier model
# ---------------------------------------------------------------------------


def _u_values(params: MultiBarrierParams, k_max: int) -> np.ndarray:
    """Equivalent single-barrier levels u_0 .. u_k_max, vectorized.

    Degenerate correlations produce infinite levels (the corresponding
    reflection never happens); 0 * inf corners are avoided by guarding
    zero coefficients.
    """
    eta, nu, rho = params.eta, params.nu, params.rho
    k = np.arange(k_max + 1)
    u = np.zeros(k_max + 1, dtype=float)
    if k_max == 0:
        return u
    base = eta / math.sqrt(2.0 * (1.0 + rho)) if rho > -1.0 else math.inf
    half = (eta - nu) / math.sqrt(2.0)
    k2 = k[1:] // 2
    k1 = (k[1:] - 1) // 2
    term = np.zeros(k_max, dtype=float)
    if rho < 1.0:
        term += k2 / math.sqrt(1.0 - rho)
    else:
        term += np.where(k2 > 0, math.inf, 0.0)
    if rho > -1.0:
        term += k1 / math.sqrt(1.0 + rho)
    else:
        term += np.where(k1 > 0, math.inf, 0.0)
    u[1:] = base + half * term
    return u


def mb_barrier_sequence(k: int, params: MultiBarrierParams) -> float:
    """Level u_k whose first passage by a unit Brownian motion has the
    law of the k-th reflection time.

    ``u_0 = 0`` and ``u_1 = eta / sqrt(2(1+rho))``; afterwards each
    regime adds ``(eta-nu)/sqrt(2(1 -/+ rho))``.  Degenerate regimes
    (``rho = -1``, or ``rho = 1`` with ``k >= 2``) return ``inf``: the
    corresponding reflection almost surely never occurs.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError("mb_barrier_sequence: k must be a nonnegative integer")
    return float(_u_values(params, int(k))[int(k)])


def mb_hit_time_cdf(k: int, t, params: MultiBarrierParams):
    """P(k-th reflection happens by time t), equal to 2 Phi(-u_k/sqrt(t))."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError("mb_hit_time_cdf: k must be a positive integer")
    (t_arr,), scalar = broadcast_floats(t)
    if np.isnan(t_arr).any() or (t_arr <= 0.0).any():
        raise DomainError("mb_hit_time_cdf: t must be positive")
    u_k = mb_barrier_sequence(int(k), params)
    out = 2.0 * ndtr(-u_k / np.sqrt(t_arr))
    return maybe_scalar(out, scalar)


def _degenerate_survival(x: np.ndarray, t: float, params: MultiBarrierParams, n: int):
    """Exact spread survival at rho = +/-1 (any number of reflections)."""
    if params.rho == -1.0:
        # The partner equals the driver: the spread is identically zero.
        return np.where(x <= 0.0, 1.0, 0.0)
    if n == 0:
        return ndtr(-x / (2.0 * math.sqrt(t)))
    # rho = 1, at least one reflection allowed: the spread runs as twice
    # a Brownian motion and freezes at eta on first contact.
    s = 2.0 * math.sqrt(t)
    return np.where(
        x <= params.eta, ndtr(-x / s) + ndtr((x - 2.0 * params.eta) / s), 0.0
    )


def _recursion_increments(
    x: np.ndarray, t: float, params: MultiBarrierParams, ks: np.ndarray
) -> np.ndarray:
    """Survival increments a_k for the reflection counts in ``ks``.

    Shape: ``(len(ks),) + x.shape``.  Requires ``|rho| < 1``.
    """
    eta, nu, rho = params.eta, params.nu, params.rho
    sqrt_t = math.sqrt(t)
    u = _u_values(params, int(ks.max()))[ks]
    alpha = np.where(ks % 2 == 1, eta, nu)
    # Regime scales before and after the k-th reflection; (-1)^(k-1)
    # governs the regime in force when the barrier alpha_k is reached.
    scale_prev = np.sqrt(2.0 * (1.0 + np.where(ks % 2 == 1, rho, -rho)) * t)
    scale_next = np.sqrt(2.0 * (1.0 + np.where(ks % 2 == 1, -rho, rho)) * t)
    shape = (len(ks),) + x.shape
    xb = np.broadcast_to(x, shape)
    ub = (u / sqrt_t).reshape((-1,) + (1,) * x.ndim)
    ab = alpha.reshape((-1,) + (1,) * x.ndim)
    sp = scale_prev.reshape((-1,) + (1,) * x.ndim)
    sn = scale_next.reshape((-1,) + (1,) * x.ndim)
    sign = np.where(xb < ab, -1.0, 1.0)
    return ndtr((xb - ab) / sp + sign * ub) - ndtr((xb - ab) / sn + sign * ub)


def mb_survival(n: int, t, x, params: MultiBarrierParams):
    """P(X_t - Y_t >= x) with at most ``n`` reflections allowed.

    Starts from the no-reflection Gaussian value
    ``Phi(-x / sqrt(2(1+rho)t))`` and applies the reflection recursion
    ``n`` times.  For ``x`` between the barriers the sequence is
    monotone in ``n``: increasing for ``rho > 0``, decreasing for
    ``rho < 0``, constant for ``rho = 0``.  Thresholds broadcast.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError("mb_survival: n must be a nonnegative integer")
    _check_time(t, "mb_survival")
    (x_arr,), scalar = broadcast_floats(x)
    if np.isnan(x_arr).any():
        raise DomainError("mb_survival: x must not be NaN")
    if abs(params.rho) == 1.0:
        return maybe_scalar(_degenerate_survival(x_arr, t, params, int(n)), scalar)
    p = ndtr(-x_arr / math.sqrt(2.0 * (1.0 + params.rho) * t))
    if n > 0:
        ks = np.arange(1, int(n) + 1)
        p = p + _recursion_increments(x_arr, float(t), params, ks).sum(axis=0)
    return maybe_scalar(p, scalar)


def _truncation_order(params: MultiBarrierParams, t: float, tol: float) -> int:
    """Smallest K whose analytic tail bound beyond K is below tol.

    The increments satisfy
    ``|a_k| <= 64 (t (1-rho^2))^(3/2) / (sqrt(pi) (eta-nu)^3 (k-1)^3)``
    for ``k >= 2`` (combine ``|a_k| <= 2 Phi^c(u_k / sqrt(t))`` with the
    linear growth of the equivalent levels and the cubic Gaussian tail
    estimate), so the tail after K is at most ``c_bound * zeta(3, K)``
    with the Hurwitz zeta function.
    """
    c_bound = (
        64.0
        * (t * (1.0 - params.rho**2)) ** 1.5
        / (math.sqrt(math.pi) * (params.eta - params.nu) ** 3)
    )
    if c_bound <= tol:
        return 1
    k_est = max(2, int(math.sqrt(c_bound / (2.0 * tol))))
    while c_bound * zeta(3, k_est) > tol:
        k_est = int(1.25 * k_est) + 1
    while k_est > 2 and c_bound * zeta(3, k_est - 1) <= tol:
        k_est -= 1
    return k_est


def mb_survival_limit(t, x, params: MultiBarrierParams, tol: float = 1e-8):
    """P(X_t - Y_t >= x) in the unbounded-reflection model.

    Sums the reflection increments until the analytic cubic tail bound
    falls below ``tol``; the result is within ``tol`` of the true
    limit.  The degenerate correlations use their exact laws: at
    ``rho = -1`` the spread is identically zero; at ``rho = 1`` it is
    twice a Brownian motion frozen at ``eta`` on first contact.
    """
    _check_time(t, "mb_survival_limit")
    if tol is None or not np.isfinite(tol) or tol <= 0.0:
        raise DomainError("mb_survival_limit: tol must be finite and positive")
    (x_arr,), scalar = broadcast_floats(x)
    if np.isnan(x_arr).any():
        raise DomainError("mb_survival_limit: x must not be NaN")
    if abs(params.rho) == 1.0:
        return maybe_scalar(
            _degenerate_survival(x_arr, t, params, 1), scalar
        )
    order = _truncation_order(params, float(t), tol)
    p = ndtr(-x_arr / math.sqrt(2.0 * (1.0 + params.rho) * t))
    chunk = max(1, 2**22 // max(1, x_arr.size))
    for lo in range(1, order + 1, chunk):
        ks = np.arange(lo, min(lo + chunk, order + 1))
        p = p + _recursion_increments(x_arr, float(t), params, ks).sum(axis=0)
    return maybe_scalar(p, scalar)


def mb_survival_upper_bound(z, t, eta):
    """Largest spread survival achievable at threshold z in the model.

    Equals ``Phi(-z/(2 sqrt(t))) + Phi((z - 2 eta)/(2 sqrt(t)))``, the
    ``rho = 1`` value; valid for ``0 < z < eta``.
    """
    _check_time(t, "mb_survival_upper_bound")
    s = 2.0 * math.sqrt(t)
    (z_arr,), scalar = broadcast_floats(z)
    out = ndtr(-z_arr / s) + ndtr((z_arr - 2.0 * eta) / s)
    return maybe_scalar(out, scalar)


def calibrate_rho(
    target: float,
    z: float,
    t: float,
    eta: float,
    nu: float = 0.0,
    tol: float = 1e-6,
    full_output: bool = False,
):
    """Find rho whose unbounded-reflection spread survival at z hits a target.

    The achievable range at threshold ``0 < z < eta`` is
    ``[0, Phi(-z/(2 sqrt(t))) + Phi((z-2 eta)/(2 sqrt(t)))]``; targets
    outside it raise :class:`RangeError` carrying the valid interval.
    The map ``rho -> survival`` is continuous but not provably
    monotone, so the solver scans 41 equispaced correlations for a sign
    change and bisects inside the bracket.

    With ``full_output=True`` returns ``(rho, info)`` where ``info``
    has the achieved survival, the number of model evaluations and the
    valid range.
    """
    _check_time(t, "calibrate_rho")
    if eta is None or not np.isfinite(eta) or eta <= 0.0:
        raise DomainError("calibrate_rho: eta must be finite and positive")
    if nu is None or not np.isfinite(nu) or nu >= eta:
        raise DomainError("calibrate_rho: nu must be finite and smaller than eta")
    if z is None or not np.isfinite(z) or not 0.0 < z < eta or z <= nu:
        raise DomainError(
            "calibrate_rho: threshold z must lie strictly between the barriers"
            " (and above 0); the achievable range is not characterized"
            " elsewhere"
        )
    if tol is None or not np.isfinite(tol) or tol <= 0.0:
        raise DomainError("calibrate_rho: tol must be finite and positive")
    upper = float(mb_survival_upper_bound(z, t, eta))
    if target is None or np.isnan(target) or not 0.0 <= target <= upper:
        raise RangeError(
            f"calibrate_rho: target {target!r} outside the achievable range"
            f" [0, {upper!r}] at z={z!r}, t={t!r}, eta={eta!r}",
            valid_range=(0.0, upper),
        )

    inner_tol = tol / 10.0
    evaluations = 0

    def survival(rho: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return float(
            mb_survival_limit(t, z, MultiBarrierParams(nu, eta, rho), inner_tol)
        )

    def finish(rho: float, achieved: float):
        if full_output:
            return rho, {
                "achieved": achieved,
                "iterations": evaluations,
                "valid_range": (0.0, upper),
            }
        return rho

    # Endpoints are exact closed forms; return them directly.
    if target == 0.0:
        return finish(-1.0, 0.0)
    if target == upper:
        return finish(1.0, upper)

    grid = np.linspace(-1.0, 1.0, 41)
    values = []
    bracket = None
    for i, rho in enumerate(grid):
        val = survival(float(rho))
        values.append(val)
        if abs(val - target) <= tol:
            return finish(float(rho), val)
        if i > 0 and (values[i - 1] - target) * (val - target) < 0.0:
            bracket = (float(grid[i - 1]), float(rho))
            break
    if bracket is None:
        raise NumericalError(
            "calibrate_rho: no sign change found on the correlation grid;"
            f" target={target!r}, range=[0, {upper!r}]"
        )

    lo, hi = bracket
    f_lo = survival(lo) - target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = survival(mid) - target
        if abs(f_mid) <= tol:
            return finish(mid, f_mid + target)
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo < 1e-14:
            break
    raise NumericalError(
        f"calibrate_rho: bisection failed to reach tolerance {tol!r};"
        f" last interval [{lo!r}, {hi!r}]"
    )


def write_survival_curve(path, x, p, lo=None, hi=None, confidence: float = 0.99):
    """Write a survival curve as CSV: ``x,p``, with confidence columns
    ``lo<pct>,hi<pct>`` appended when a band is supplied."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if (lo is None) != (hi is None):
        raise DomainError("write_survival_curve: supply both band edges or neither")
    if lo is None:
        write_csv(path, ("x", "p"), zip(x, p))
    else:
        pct = int(round(confidence * 100.0))
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        write_csv(path, ("x", "p", f"lo{pct}", f"hi{pct}"), zip(x, p, lo, hi))
