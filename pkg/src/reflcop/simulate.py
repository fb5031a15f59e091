"""Seeded Monte Carlo engines for coupled Brownian models.

Four simulators share one discretization contract: states evolve on the
uniform grid ``k * dt``, barrier crossings are detected at grid times
only (the state is snapped exactly onto the barrier at the crossing
step), and every path draws from its own counter-based RNG substream
keyed by ``(seed, stream_id, path_index)``, so results are bit-identical
regardless of how paths are batched or parallelized.

Simulators stream over path blocks and time blocks internally; memory
is bounded by the block size, not by ``n_paths * n_steps``.  Use
``snapshot_times`` to retain only the grid times you need (time 0 is
always included so batches start at the origin).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from ._util import write_csv
from .errors import DomainError, NumericalError
from .spread import MultiBarrierParams

__all__ = [
    "SimConfig",
    "PathBatch",
    "LocalCorrParams",
    "CommodityFactors",
    "TwoFactorParams",
    "ProductSpec",
    "CommodityBatch",
    "SurvivalCurve",
    "gen_normal_increments",
    "simulate_reflection_pair",
    "simulate_multibarrier",
    "simulate_local_correlation",
    "simulate_two_factor",
    "empirical_survival",
]

_DAYS_PER_YEAR = 365.0
_SAFETY_FLIP_CAP = 1_000_000
# Path block width and elements per time block; values only affect
# speed and peak memory, never the simulated numbers.
_PATH_CHUNK = 4096
_BLOCK_ELEMS = 4_194_304


@dataclass(frozen=True)
class SimConfig:
    """Grid and RNG configuration shared by all simulators.

    Parameters
    ----------
    dt : float
        Time step, positive and no larger than the horizon.  The
        horizon must be an integer number of steps (relative slack
        1e-9).
    horizon : float
        Final simulation time.
    n_paths : int
        Number of independent paths.
    seed : int
        Root seed, a 64-bit unsigned integer.  Together with a stream
        id and a path index it pins every draw of the simulation.
    """

    dt: float
    horizon: float
    n_paths: int
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.dt) or self.dt <= 0.0:
            raise DomainError("SimConfig: dt must be finite and positive")
        if not np.isfinite(self.horizon) or self.horizon <= 0.0:
            raise DomainError("SimConfig: horizon must be finite and positive")
        if self.dt > self.horizon * (1.0 + 1e-12):
            raise DomainError("SimConfig: dt must not exceed the horizon")
        n = round(self.horizon / self.dt)
        if n < 1 or abs(n * self.dt - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise DomainError(
                "SimConfig: horizon must be an integer multiple of dt"
            )
        if not isinstance(self.n_paths, (int, np.integer)) or self.n_paths < 1:
            raise DomainError("SimConfig: n_paths must be a positive integer")
        if (
            not isinstance(self.seed, (int, np.integer))
            or not 0 <= int(self.seed) < 2**64
        ):
            raise DomainError("SimConfig: seed must be a 64-bit unsigned integer")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.dt)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)


@dataclass
class PathBatch:
    """Simulated paths of a coupled pair, sampled at ``times``.

    ``X`` and ``Y`` have shape ``(n_paths, len(times))`` with the first
    column identically zero.  ``reflections_per_path`` counts regime
    switches for the multi-barrier model (zero for models without
    reflections).
    """

    times: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    reflections_per_path: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.X.shape[0]

    def write_csv(self, path) -> None:
        """Write the batch in long format with header ``path_id,t,X,Y``."""

        def rows():
            for i in range(self.X.shape[0]):
                for j, t in enumerate(self.times):
                    yield i, float(t), float(self.X[i, j]), float(self.Y[i, j])

        write_csv(path, ("path_id", "t", "X", "Y"), rows())


@dataclass(frozen=True)
class LocalCorrParams:
    """Spread-dependent correlation ramp for the local-correlation SDE.

    The instantaneous correlation is ``rho1`` when the spread is at or
    below ``nu``, ``rho2`` at or above ``eta``, linear in between.
    """

    nu: float
    eta: float
    rho1: float
    rho2: float

    def __post_init__(self):
        for name in ("nu", "eta", "rho1", "rho2"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"LocalCorrParams: {name} must be finite")
        if self.nu >= self.eta:
            raise DomainError("LocalCorrParams: nu must be smaller than eta")
        if abs(self.rho1) >= 1.0 or abs(self.rho2) >= 1.0:
            raise DomainError(
                "LocalCorrParams: endpoint correlations must lie strictly"
                " inside (-1, 1)"
            )

    def rho(self, spread):
        return np.interp(spread, [self.nu, self.eta], [self.rho1, self.rho2])


@dataclass(frozen=True)
class CommodityFactors:
    """Two-factor lognormal parameters of one commodity.

    ``sigma_s`` and ``sigma_l`` are the short and long volatilities per
    square-root year; ``alpha_s`` is the mean-reversion speed of the
    short factor per year.
    """

    sigma_s: float
    alpha_s: float
    sigma_l: float

    def __post_init__(self):
        for name in ("sigma_s", "alpha_s", "sigma_l"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"CommodityFactors: {name} must be finite")
        if self.sigma_s < 0.0 or self.sigma_l < 0.0:
            raise DomainError("CommodityFactors: volatilities must be >= 0")
        if self.alpha_s <= 0.0:
            raise DomainError("CommodityFactors: alpha_s must be positive")


def _as_curve(value, name: str):
    """Normalize an initial forward curve: flat level or (T, f) table."""
    if np.ndim(value) == 0:
        level = float(value)
        if not np.isfinite(level) or level <= 0.0:
            raise DomainError(f"TwoFactorParams: {name} must be positive")
        return level
    table = np.asarray(value, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
        raise DomainError(
            f"TwoFactorParams: {name} table must have rows (maturity, level)"
        )
    if np.any(np.diff(table[:, 0]) <= 0.0):
        raise DomainError(f"TwoFactorParams: {name} maturities must increase")
    if np.any(~np.isfinite(table)) or np.any(table[:, 1] <= 0.0):
        raise DomainError(f"TwoFactorParams: {name} levels must be positive")
    return table


def _curve_value(curve, T):
    if np.ndim(curve) == 0:
        return np.full(np.shape(T), float(curve)) if np.ndim(T) else float(curve)
    return np.interp(T, curve[:, 0], curve[:, 1])


@dataclass(frozen=True)
class TwoFactorParams:
    """Joint two-factor model for power (E) and gas (G) forwards.

    Each commodity follows a lognormal two-factor dynamic driven by a
    mean-reverting short factor and a long factor.  All Brownian
    drivers are independent except the two long factors, whose
    dependence is chosen per simulation.  Initial forward curves are
    flat levels or ``(maturity, level)`` tables; the gas curve defaults
    to ``power_curve / heat_rate`` so the initial spread is zero.
    """

    power: CommodityFactors
    gas: CommodityFactors
    heat_rate: float = 1.0
    power_curve: object = 100.0
    gas_curve: object = None

    def __post_init__(self):
        if not np.isfinite(self.heat_rate) or self.heat_rate <= 0.0:
            raise DomainError("TwoFactorParams: heat_rate must be positive")
        object.__setattr__(
            self, "power_curve", _as_curve(self.power_curve, "power_curve")
        )
        if self.gas_curve is None:
            if np.ndim(self.power_curve) == 0:
                default = self.power_curve / self.heat_rate
            else:
                default = np.column_stack(
                    (self.power_curve[:, 0], self.power_curve[:, 1] / self.heat_rate)
                )
            object.__setattr__(self, "gas_curve", default)
        object.__setattr__(self, "gas_curve", _as_curve(self.gas_curve, "gas_curve"))


_MAH_RE = re.compile(r"([1-9][0-9]*)MAH")


@dataclass(frozen=True)
class ProductSpec:
    """Quoted product: ``spot`` or an n-month-ahead delivery strip.

    ``kind`` is ``"spot"`` or ``"<n>MAH"`` with ``n >= 1``.  A month is
    idealized as ``theta_days`` consecutive days (30 by default): the
    n-month-ahead product observed at time t delivers over
    ``[t + n*theta, t + (n+1)*theta)`` and its forward price averages
    ``f(t, .)`` over the daily grid of that window.
    """

    kind: str
    theta_days: float = 30.0

    def __post_init__(self):
        if self.kind != "spot" and not _MAH_RE.fullmatch(self.kind):
            raise DomainError(
                "ProductSpec: kind must be 'spot' or '<n>MAH' with n >= 1"
            )
        if not np.isfinite(self.theta_days) or self.theta_days <= 0.0:
            raise DomainError("ProductSpec: theta_days must be positive")

    @property
    def months_ahead(self) -> int:
        return 0 if self.kind == "spot" else int(_MAH_RE.fullmatch(self.kind).group(1))

    def delivery_grid(self, t: float) -> np.ndarray:
        """Daily maturities averaged by the product quoted at time t."""
        if self.kind == "spot":
            return np.array([t])
        start = t + self.months_ahead * self.theta_days / _DAYS_PER_YEAR
        days = int(round(self.theta_days))
        return start + np.arange(days) / _DAYS_PER_YEAR


@dataclass
class CommodityBatch:
    """Simulated product prices: power, gas and their heat-rate spread."""

    times: np.ndarray
    fE: np.ndarray
    fG: np.ndarray
    spread: np.ndarray
    reflections_per_path: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.fE.shape[0]

    def write_csv(self, path) -> None:
        """Write prices in long format: ``path_id,t,fE,fG,spread``."""

        def rows():
            for i in range(self.fE.shape[0]):
                for j, t in enumerate(self.times):
                    yield (
                        i,
                        float(t),
                        float(self.fE[i, j]),
                        float(self.fG[i, j]),
                        float(self.spread[i, j]),
                    )

        write_csv(path, ("path_id", "t", "fE", "fG", "spread"), rows())


@dataclass
class SurvivalCurve:
    """Empirical survival estimates with a symmetric confidence band."""

    x: np.ndarray
    p: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    confidence: float

    def write_csv(self, path) -> None:
        from .spread import write_survival_curve

        write_survival_curve(
            path, self.x, self.p, lo=self.lo, hi=self.hi, confidence=self.confidence
        )


# ---------------------------------------------------------------------------
# RNG plumbing
# ---------------------------------------------------------------------------


def _path_generator(seed: int, stream_id: int, path_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(
        entropy=int(seed), spawn_key=(int(stream_id), int(path_index))
    )
    return np.random.Generator(np.random.Philox(ss))


def gen_normal_increments(config: SimConfig, stream_id: int) -> np.ndarray:
    """Brownian increments, one row per path.

    Returns an ``(n_paths, n_steps)`` array of independent
    ``N(0, dt)`` draws.  Row ``j`` depends only on ``(config.seed,
    stream_id, j)``: the counter-based substream makes it bit-stable
    under any batching or parallel schedule.  Materializes the whole
    array; the simulators stream block-wise instead of calling this.
    """
    if not isinstance(stream_id, (int, np.integer)) or stream_id < 0:
        raise DomainError("gen_normal_increments: stream_id must be a"
                          " nonnegative integer")
    sqrt_dt = math.sqrt(config.dt)
    out = np.empty((config.n_paths, config.n_steps))
    for j in range(config.n_paths):
        gen = _path_generator(config.seed, stream_id, j)
        out[j] = gen.standard_normal(config.n_steps)
        out[j] *= sqrt_dt
    return out


def _snapshot_indices(config: SimConfig, snapshot_times) -> np.ndarray:
    """Map requested times onto grid indices; index 0 is always kept."""
    if snapshot_times is None:
        return np.arange(config.n_steps + 1)
    req = np.atleast_1d(np.asarray(snapshot_times, dtype=float))
    if req.size and (np.any(~np.isfinite(req)) or np.any(req < 0.0)):
        raise DomainError("snapshot_times must be finite and nonnegative")
    idx = {0}
    for s in req:
        k = round(s / config.dt)
        if k > config.n_steps or abs(k * config.dt - s) > 1e-9 * max(1.0, s):
            raise DomainError(
                f"snapshot time {s!r} is not a grid time within the horizon"
            )
        idx.add(int(k))
    return np.array(sorted(idx))


def _blocks(n_steps: int, width: int):
    for start in range(0, n_steps, width):
        yield start, min(width, n_steps - start)


def _draw_block(gens, n: int, sqrt_dt: float) -> np.ndarray:
    block = np.empty((len(gens), n))
    for i, g in enumerate(gens):
        block[i] = g.standard_normal(n)
    block *= sqrt_dt
    return block


class _Recorder:
    """Collects per-chunk state snapshots at the requested grid indices."""

    def __init__(self, snap_idx: np.ndarray, n_rows: int, n_cols: int):
        self.snap_idx = snap_idx
        self.arrays = [np.empty((n_rows, len(snap_idx))) for _ in range(n_cols)]
        self.cursor = 0

    def record(self, grid_index: int, *columns) -> None:
        if (
            self.cursor < len(self.snap_idx)
            and self.snap_idx[self.cursor] == grid_index
        ):
            for arr, col in zip(self.arrays, columns):
                arr[:, self.cursor] = col
            self.cursor += 1


def _chunk_bounds(n_paths: int):
    for lo in range(0, n_paths, _PATH_CHUNK):
        yield lo, min(lo + _PATH_CHUNK, n_paths)


def _step_block_width(chunk: int) -> int:
    return max(64, _BLOCK_ELEMS // max(1, chunk))


def simulate_reflection_pair(h: float, config: SimConfig, snapshot_times=None):
    """Simulate a Brownian motion with its mirror-coupled partner.

    The partner follows ``Y = -X`` until the first grid time with
    ``X >= h`` and ``Y = X - 2h`` from that step on, so the spread
    ``X - Y`` is twice the motion until it freezes at ``2h``.
    ``reflections_per_path`` is 1 on coupled paths, else 0.

    Parameters
    ----------
    h : float
        Coupling barrier, positive.
    config : SimConfig
        Grid and seeding; the driver uses stream 0.
    snapshot_times : array_like, optional
        Grid times to retain (time 0 is always included).  Default:
        the full grid.
    """
    if not np.isfinite(h) or h <= 0.0:
        raise DomainError("simulate_reflection_pair: h must be positive")
    snap = _snapshot_indices(config, snapshot_times)
    sqrt_dt = math.sqrt(config.dt)
    out_X = np.empty((config.n_paths, len(snap)))
    out_Y = np.empty((config.n_paths, len(snap)))
    refl = np.empty(config.n_paths, dtype=np.int64)
    for lo, hi in _chunk_bounds(config.n_paths):
        gens = [_path_generator(config.seed, 0, j) for j in range(lo, hi)]
        X = np.zeros(hi - lo)
        crossed = np.zeros(hi - lo, dtype=bool)
        rec = _Recorder(snap, hi - lo, 2)
        rec.record(0, X, -X)
        step = 0
        for _, width in _blocks(config.n_steps, _step_block_width(hi - lo)):
            dB = _draw_block(gens, width, sqrt_dt)
            for s in range(width):
                X += dB[:, s]
                crossed |= X >= h
                step += 1
                # The coupled partner is floored one ulp under the exact
                # mirror so that the recomputed spread X - Y never rounds
                # below 2h: the frozen-spread atom must stay measurable
                # as {X - Y >= 2h} in floating point.
                mirror = np.nextafter(X - 2.0 * h, -np.inf)
                rec.record(step, X, np.where(crossed, mirror, -X))
        out_X[lo:hi] = rec.arrays[0]
        out_Y[lo:hi] = rec.arrays[1]
        refl[lo:hi] = crossed.astype(np.int64)
    return PathBatch(config.grid()[snap], out_X, out_Y, refl)


def simulate_multibarrier(
    params: MultiBarrierParams, cap_n, config: SimConfig, snapshot_times=None
):
    """Simulate the multi-barrier correlation model on the grid.

    The spread ``D = X - Y`` evolves with increments
    ``(1 + (-1)^k rho) dBX - sqrt(1 - rho^2) dBY`` in regime ``k``; when
    it crosses the next barrier (``eta`` from regime 0, ``nu`` from
    regime 1, alternating) at a grid time, ``D`` snaps onto the barrier
    and the regime advances.  ``cap_n`` limits the number of switches;
    pass ``None`` for the unbounded model, which relies on switches
    being almost surely finite and enforces a hard safety cap of 10^6
    per path.

    Streams 0 and 1 drive ``dBX`` and ``dBY``.  Returns a
    :class:`PathBatch` with ``Y = X - D`` and the switch counts in
    ``reflections_per_path``.
    """
    if cap_n is not None and (
        not isinstance(cap_n, (int, np.integer)) or cap_n < 0
    ):
        raise DomainError("simulate_multibarrier: cap_n must be >= 0 or None")
    cap = _SAFETY_FLIP_CAP if cap_n is None else int(cap_n)
    snap = _snapshot_indices(config, snapshot_times)
    sqrt_dt = math.sqrt(config.dt)
    rho = params.rho
    root = math.sqrt(1.0 - rho * rho)
    out_X = np.empty((config.n_paths, len(snap)))
    out_Y = np.empty((config.n_paths, len(snap)))
    refl = np.empty(config.n_paths, dtype=np.int64)
    for lo, hi in _chunk_bounds(config.n_paths):
        gens_x = [_path_generator(config.seed, 0, j) for j in range(lo, hi)]
        gens_y = [_path_generator(config.seed, 1, j) for j in range(lo, hi)]
        X = np.zeros(hi - lo)
        D = np.zeros(hi - lo)
        k = np.zeros(hi - lo, dtype=np.int64)
        rec = _Recorder(snap, hi - lo, 2)
        rec.record(0, X, X - D)
        step = 0
        for _, width in _blocks(config.n_steps, _step_block_width(hi - lo)):
            dBX = _draw_block(gens_x, width, sqrt_dt)
            dBY = _draw_block(gens_y, width, sqrt_dt)
            for s in range(width):
                dx = dBX[:, s]
                even = (k & 1) == 0
                coef = np.where(even, 1.0 + rho, 1.0 - rho)
                D += coef * dx - root * dBY[:, s]
                X += dx
                active = k < cap
                up = active & even & (D >= params.eta)
                down = active & ~even & (D <= params.nu)
                if up.any():
                    D[up] = params.eta
                    k[up] += 1
                if down.any():
                    D[down] = params.nu
                    k[down] += 1
                if cap_n is None and (up.any() or down.any()):
                    if int(k.max()) >= _SAFETY_FLIP_CAP:
                        raise NumericalError(
                            "simulate_multibarrier: a path exceeded the"
                            f" safety cap of {_SAFETY_FLIP_CAP} regime"
                            " switches"
                        )
                step += 1
                rec.record(step, X, X - D)
        out_X[lo:hi] = rec.arrays[0]
        out_Y[lo:hi] = rec.arrays[1]
        refl[lo:hi] = k
    return PathBatch(config.grid()[snap], out_X, out_Y, refl)


def simulate_local_correlation(
    params: LocalCorrParams, config: SimConfig, snapshot_times=None
):
    """Euler scheme for the spread-dependent correlation diffusion.

    ``X`` is a Brownian motion; ``Y`` accrues
    ``rho(X - Y) dBX + sqrt(1 - rho(X - Y)^2) dBY`` with the
    correlation evaluated at the start of each step, so both marginals
    stay exactly Brownian on the grid.  Streams 0 and 1 drive ``dBX``
    and ``dBY``.
    """
    snap = _snapshot_indices(config, snapshot_times)
    sqrt_dt = math.sqrt(config.dt)
    out_X = np.empty((config.n_paths, len(snap)))
    out_Y = np.empty((config.n_paths, len(snap)))
    for lo, hi in _chunk_bounds(config.n_paths):
        gens_x = [_path_generator(config.seed, 0, j) for j in range(lo, hi)]
        gens_y = [_path_generator(config.seed, 1, j) for j in range(lo, hi)]
        X = np.zeros(hi - lo)
        Y = np.zeros(hi - lo)
        rec = _Recorder(snap, hi - lo, 2)
        rec.record(0, X, Y)
        step = 0
        for _, width in _blocks(config.n_steps, _step_block_width(hi - lo)):
            dBX = _draw_block(gens_x, width, sqrt_dt)
            dBY = _draw_block(gens_y, width, sqrt_dt)
            for s in range(width):
                r = params.rho(X - Y)
                Y += r * dBX[:, s] + np.sqrt(1.0 - r * r) * dBY[:, s]
                X += dBX[:, s]
                step += 1
                rec.record(step, X, Y)
        out_X[lo:hi] = rec.arrays[0]
        out_Y[lo:hi] = rec.arrays[1]
    return PathBatch(
        config.grid()[snap], out_X, out_Y, np.zeros(config.n_paths, dtype=np.int64)
    )


def _ou_step_params(alpha: float, dt: float):
    decay = math.exp(-alpha * dt)
    sd = math.sqrt((1.0 - math.exp(-2.0 * alpha * dt)) / (2.0 * alpha))
    return decay, sd


def _forward_factor(fac: CommodityFactors, U, B_l, t: float, T):
    """log f(t,T) - log f(0,T) for one commodity, vectorized over paths.

    ``U`` is the unit-volatility mean-reverting short state; the short
    integral has variance sigma_s^2 I(t,T) with
    ``I = e^{-2 alpha (T-t)} (1 - e^{-2 alpha t}) / (2 alpha)``.
    """
    i_var = (
        math.exp(-2.0 * fac.alpha_s * (T - t))
        * (1.0 - math.exp(-2.0 * fac.alpha_s * t))
        / (2.0 * fac.alpha_s)
    )
    return (
        fac.sigma_s * math.exp(-fac.alpha_s * (T - t)) * U
        - 0.5 * fac.sigma_s**2 * i_var
        + fac.sigma_l * B_l
        - 0.5 * fac.sigma_l**2 * t
    )


def _product_prices(params, product, t, U_e, U_g, B_le, B_lg):
    """Power and gas prices of the product at time t, per path.

    Averages the daily forwards of the delivery window; each daily
    maturity carries its own initial curve level.
    """
    mats = product.delivery_grid(t)
    f_e = np.zeros(U_e.shape)
    f_g = np.zeros(U_g.shape)
    for T in mats:
        T = float(T)
        f_e += _curve_value(params.power_curve, T) * np.exp(
            _forward_factor(params.power, U_e, B_le, t, T)
        )
        f_g += _curve_value(params.gas_curve, T) * np.exp(
            _forward_factor(params.gas, U_g, B_lg, t, T)
        )
    return f_e / len(mats), f_g / len(mats)


def simulate_two_factor(
    params: TwoFactorParams,
    product: ProductSpec,
    dependence,
    config: SimConfig,
    snapshot_times=None,
):
    """Simulate power and gas product prices under the two-factor model.

    Each commodity's forward is lognormal and exact per step: the short
    factor uses the exact mean-reverting update, the long factor is a
    Brownian motion, and drifts make every ``f(t,T)`` a martingale
    regardless of ``dt``.  ``dependence`` couples the two long factors:
    a float gives constant correlation, a
    :class:`~reflcop.spread.MultiBarrierParams` runs the unbounded
    multi-barrier coupling on them.  All other drivers are independent.

    Delivery products average the forward over the daily grid of the
    delivery month; ``spot`` quotes ``f(t, t)``.  The product's
    delivery offset must fit within the horizon.

    Streams: 0 and 1 drive the long pair, 2 and 3 the power and gas
    short factors.  Returns a :class:`CommodityBatch`; the spread
    column is ``fE - heat_rate * fG``.
    """
    offset = product.months_ahead * product.theta_days / _DAYS_PER_YEAR
    if offset > config.horizon * (1.0 + 1e-12):
        raise DomainError(
            "simulate_two_factor: the product's delivery offset"
            f" ({offset!r} years) exceeds the horizon"
        )
    mb = None
    if isinstance(dependence, MultiBarrierParams):
        mb = dependence
    else:
        rho_l = float(dependence)
        if not np.isfinite(rho_l) or abs(rho_l) > 1.0:
            raise DomainError(
                "simulate_two_factor: constant dependence must lie in [-1, 1]"
            )
    snap = _snapshot_indices(config, snapshot_times)
    snap_times = config.grid()[snap]
    sqrt_dt = math.sqrt(config.dt)
    dec_e, sd_e = _ou_step_params(params.power.alpha_s, config.dt)
    dec_g, sd_g = _ou_step_params(params.gas.alpha_s, config.dt)
    out_E = np.empty((config.n_paths, len(snap)))
    out_G = np.empty((config.n_paths, len(snap)))
    refl = np.zeros(config.n_paths, dtype=np.int64)

    for lo, hi in _chunk_bounds(config.n_paths):
        n = hi - lo
        gens = {
            sid: [_path_generator(config.seed, sid, j) for j in range(lo, hi)]
            for sid in (0, 1, 2, 3)
        }
        B_le = np.zeros(n)
        B_lg = np.zeros(n)
        U_e = np.zeros(n)
        U_g = np.zeros(n)
        k = np.zeros(n, dtype=np.int64)
        D = np.zeros(n)
        rec = _Recorder(snap, n, 2)
        rec.record(0, *_product_prices(params, product, 0.0, U_e, U_g, B_le, B_lg))
        step = 0
        for _, width in _blocks(config.n_steps, _step_block_width(n)):
            dB0 = _draw_block(gens[0], width, sqrt_dt)
            dB1 = _draw_block(gens[1], width, sqrt_dt)
            dB2 = _draw_block(gens[2], width, sqrt_dt)
            dB3 = _draw_block(gens[3], width, sqrt_dt)
            for s in range(width):
                dx = dB0[:, s]
                dy = dB1[:, s]
                B_le += dx
                if mb is None:
                    B_lg += rho_l * dx + math.sqrt(1.0 - rho_l * rho_l) * dy
                else:
                    even = (k & 1) == 0
                    coef = np.where(even, 1.0 + mb.rho, 1.0 - mb.rho)
                    D += coef * dx - math.sqrt(1.0 - mb.rho**2) * dy
                    up = even & (D >= mb.eta)
                    down = ~even & (D <= mb.nu)
                    flipped = False
                    if up.any():
                        D[up] = mb.eta
                        k[up] += 1
                        flipped = True
                    if down.any():
                        D[down] = mb.nu
                        k[down] += 1
                        flipped = True
                    if flipped and int(k.max()) >= _SAFETY_FLIP_CAP:
                        raise NumericalError(
                            "simulate_two_factor: a path exceeded the safety"
                            f" cap of {_SAFETY_FLIP_CAP} regime switches"
                        )
                    np.subtract(B_le, D, out=B_lg)
                U_e *= dec_e
                U_e += sd_e * (dB2[:, s] / sqrt_dt)
                U_g *= dec_g
                U_g += sd_g * (dB3[:, s] / sqrt_dt)
                step += 1
                if rec.cursor < len(snap) and snap[rec.cursor] == step:
                    t = float(snap_times[rec.cursor])
                    rec.record(
                        step,
                        *_product_prices(params, product, t, U_e, U_g, B_le, B_lg),
                    )
        out_E[lo:hi] = rec.arrays[0]
        out_G[lo:hi] = rec.arrays[1]
        refl[lo:hi] = k
    spread = out_E - params.heat_rate * out_G
    return CommodityBatch(snap_times, out_E, out_G, spread, refl)


def empirical_survival(samples, x_grid, confidence: float = 0.99) -> SurvivalCurve:
    """Empirical survival probabilities with a normal confidence band.

    For each grid point ``x``, estimates ``P(sample >= x)`` and brackets
    it by ``z * sqrt(p (1-p) / N)`` with ``z`` the two-sided normal
    quantile of ``confidence``; the band is clamped to [0, 1].
    Requires at least 30 samples and a sorted grid; an empty grid gives
    an empty curve.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 30:
        raise DomainError("empirical_survival: need at least 30 samples")
    if np.any(~np.isfinite(samples)):
        raise DomainError("empirical_survival: samples must be finite")
    if not 0.0 < confidence < 1.0:
        raise DomainError("empirical_survival: confidence must be in (0, 1)")
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0:
        empty = np.empty(0)
        return SurvivalCurve(x, empty, empty.copy(), empty.copy(), confidence)
    if np.any(~np.isfinite(x)) or np.any(np.diff(x) < 0.0):
        raise DomainError("empirical_survival: x_grid must be finite and sorted")
    n = samples.size
    # Count samples >= x via the sorted order; searchsorted('left') on
    # the ascending sort gives the number strictly below x.
    order = np.sort(samples)
    below = np.searchsorted(order, x, side="left")
    p = (n - below) / n
    z = float(ndtri(0.5 * (1.0 + confidence)))
    half = z * np.sqrt(p * (1.0 - p) / n)
    return SurvivalCurve(
        x, p, np.clip(p - half, 0.0, 1.0), np.clip(p + half, 0.0, 1.0), confidence
    )
