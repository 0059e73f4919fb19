"""Quality, resource, and utility model for phased-array tracking tasks.

Implements the Van Keuk-Blackman tracking strategy for a horizontally
split aperture: SNR with a cross-talk loss between simultaneous
sub-aperture tasks, the track-sharpness balance equation, Swerling I
detection, the expected number of looks per update, and a linear
utility on the achieved angular accuracy.

All operations are pure functions; angles are radians, times seconds,
ranges meters, cross sections square meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BOLTZMANN = 1.380649e-23  # J/K, exact SI value

LN10_OVER_10 = math.log(10.0) / 10.0


def db_to_linear(db: float) -> float:
    return math.exp(db * LN10_OVER_10)


def linear_to_db(linear: float) -> float:
    return 10.0 * math.log10(linear)


@dataclass(frozen=True)
class RadarConstants:
    """Aggregate radar parameters shared by every task evaluation."""

    k_rad: float = 2.662e21       # radar constant [m^2/s], see derive_k_rad
    n_h_total: int = 48           # total horizontal element count N_hT
    p_fa: float = 1e-4            # false alarm rate
    alpha_bw: float = 0.886       # beamwidth factor [rad*elements]
    snr_floor_db: float = 10.0    # below this SN0 the target is not detected
    snr_cap_db: float = 40.0      # accuracy credit saturates at this SN0

    def __post_init__(self) -> None:
        if self.k_rad <= 0.0:
            raise ValueError("k_rad must be positive")
        if self.n_h_total < 1:
            raise ValueError("n_h_total must be at least 1")
        if not 0.0 < self.p_fa < 1.0:
            raise ValueError("p_fa must lie in (0, 1)")
        if self.alpha_bw <= 0.0:
            raise ValueError("alpha_bw must be positive")
        if self.snr_floor_db >= self.snr_cap_db:
            raise ValueError("snr_floor_db must be below snr_cap_db")

    @property
    def snr_floor(self) -> float:
        return db_to_linear(self.snr_floor_db)

    @property
    def snr_cap(self) -> float:
        return db_to_linear(self.snr_cap_db)


@dataclass(frozen=True)
class ControlPoint:
    """One candidate setting for a tracking task."""

    t_d: float   # coherent integration time [s]
    f_t: float   # track update frequency [Hz]
    n_h: int     # horizontal elements assigned to the task

    def __post_init__(self) -> None:
        if self.t_d <= 0.0:
            raise ValueError("t_d must be positive")
        if self.f_t <= 0.0:
            raise ValueError("f_t must be positive")
        if self.n_h < 1:
            raise ValueError("n_h must be at least 1")


@dataclass(frozen=True)
class Environment:
    """Per-target state as seen by the radar."""

    range: float         # target range [m]
    bearing: float       # bearing off boresight [rad], |bearing| < pi/2
    rcs: float           # radar cross section [m^2]
    maneuver_std: float  # Singer acceleration standard deviation [m/s^2]
    corr_time: float     # Singer correlation time [s]

    def __post_init__(self) -> None:
        if self.range <= 0.0:
            raise ValueError("range must be positive")
        if not abs(self.bearing) < math.pi / 2.0:
            raise ValueError("bearing must lie strictly inside (-pi/2, pi/2)")
        if self.rcs <= 0.0:
            raise ValueError("rcs must be positive")
        if self.maneuver_std <= 0.0:
            raise ValueError("maneuver_std must be positive")
        if self.corr_time <= 0.0:
            raise ValueError("corr_time must be positive")


@dataclass(frozen=True)
class UtilityShape:
    """Linear utility on angular error: 1 at q <= q_max, 0 at q >= q_min."""

    q_min: float = 3e-3  # worst acceptable angular error [rad]
    q_max: float = 1e-3  # best rewarded angular error [rad]

    def __post_init__(self) -> None:
        # Smaller error is better, so the full-reward bound sits below
        # the zero-reward bound.
        if not 0.0 < self.q_max < self.q_min:
            raise ValueError("need 0 < q_max < q_min")


@dataclass(frozen=True)
class TaskEvaluation:
    """Outcome of evaluating one control point against one environment.

    When ``feasible`` is false the SNR fell below the detection floor
    and every other field is None; no NaN is ever produced.
    """

    feasible: bool
    quality: float | None = None          # angular error q [rad]
    resource: float | None = None         # fractional radar time g
    utility: float | None = None          # u in [0, 1]
    snr_linear: float | None = None       # clamped SN0, linear ratio
    track_sharpness: float | None = None  # v0 = q / beamwidth
    p_d: float | None = None              # detection probability
    n_looks: float | None = None          # expected looks per update


def cross_talk_loss(n_h: int, consts: RadarConstants) -> float:
    """SNR loss factor for running tasks on a sub-aperture of n_h elements."""
    if not 1 <= n_h <= consts.n_h_total:
        raise ValueError("n_h must lie in [1, n_h_total]")
    return 0.8 + 0.2 * n_h / consts.n_h_total


def snr0(cp: ControlPoint, env: Environment, consts: RadarConstants) -> float:
    """Unclamped single-look SNR (linear) before the cross-talk loss."""
    cos_b = math.cos(env.bearing)
    return (consts.k_rad * cp.n_h**3 * cp.t_d * cos_b * cos_b * env.rcs
            / env.range**4)


def clamp_snr(snr_linear: float, consts: RadarConstants) -> tuple[float, bool]:
    """Apply the detection floor and the accuracy cap.

    Returns ``(clamped, feasible)``.  Below the floor the value is passed
    through unchanged with ``feasible=False``; above the cap it is clamped
    to exactly the cap.  Every downstream consumer (quality and resource
    paths alike) must use this single clamp site.
    """
    if snr_linear < consts.snr_floor:
        return snr_linear, False
    return min(snr_linear, consts.snr_cap), True


def beamwidth(cp: ControlPoint, env: Environment, consts: RadarConstants) -> float:
    """Scan-broadened half beamwidth [rad] for n_h horizontal elements."""
    if not abs(env.bearing) < math.pi / 2.0:
        raise ValueError("bearing must lie strictly inside (-pi/2, pi/2)")
    return consts.alpha_bw / cp.n_h / math.cos(env.bearing)


def _sharpness_equation(v: float, alpha: float, beta: float) -> float:
    return 1.0 + (0.5 * beta + 2.0) * v * v - alpha * beta * v**2.4


def track_sharpness(alpha: float, beta: float) -> float:
    """Solve the sharpness balance 1 + (beta/2 + 2)v^2 = alpha*beta*v^2.4.

    The left side grows like v^2 and the right like v^2.4, so the
    equation has exactly one positive root; bracketed bisection is
    unconditionally safe here.

    Args:
        alpha: update-rate/beamwidth factor, > 0.
        beta: SNR factor, > 0.

    Returns:
        The unique positive root, to 1e-10 absolute in v (or to the
        spacing of float64 for roots too large for that tolerance).
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    lo, hi = 1e-8, 1.0
    if _sharpness_equation(lo, alpha, beta) <= 0.0:
        raise ValueError("root lies below the supported bracket")
    while _sharpness_equation(hi, alpha, beta) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 2.0**40:
            raise ValueError("no sign change found below 2^40")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break  # interval narrower than float64 spacing
        f_mid = _sharpness_equation(mid, alpha, beta)
        if f_mid > 0.0:
            lo = mid
        elif f_mid < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def track_sharpness_batch(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Vectorized sharpness roots for broadcastable alpha/beta arrays.

    Substituting t = v^0.4 turns the balance into the polynomial
    p(t) = 1 + c1*t^5 - c2*t^6 with c1 = beta/2 + 2 and c2 = alpha*beta.
    p has a single positive root, and t = c1/c2 + c2^(-1/6) is an upper
    bound for it (each summand bounds one of the two balance regimes),
    so Newton from there descends monotonically.  Agrees with
    track_sharpness to the root tolerance; used on large control grids
    where per-point bisection would dominate the runtime.
    """
    c1 = 0.5 * np.asarray(beta, dtype=np.float64) + 2.0
    c2 = np.asarray(alpha, dtype=np.float64) * beta
    c1, c2 = np.broadcast_arrays(c1, c2)
    t = c1 / c2 + c2 ** (-1.0 / 6.0)
    for _ in range(24):
        t4 = t * t * t * t
        p = 1.0 + t4 * t * (c1 - c2 * t)
        dp = t4 * (5.0 * c1 - 6.0 * c2 * t)
        step = p / dp
        t = t - step
        if np.all(np.abs(step) <= 1e-15 * t):
            break
    return t * t * np.sqrt(t)


def alpha_factor(cp: ControlPoint, env: Environment, theta_bw: float) -> float:
    """Maneuverability/update-rate factor of the sharpness balance."""
    return 0.4 * cp.f_t * (env.range * theta_bw * math.sqrt(env.corr_time)
                           / env.maneuver_std) ** 0.4


def beta_factor(snr_clamped: float, xi: float, consts: RadarConstants) -> float:
    """SNR factor of the sharpness balance; positive since p_fa < 1."""
    return xi * snr_clamped - math.log(consts.p_fa)


def detection_probability(snr_clamped: float, xi: float,
                          consts: RadarConstants) -> float:
    """Swerling I detection probability at the cross-talk-degraded SNR."""
    return consts.p_fa ** (1.0 / (1.0 + xi * snr_clamped))


def gamma_factor(snr_clamped: float, xi: float, consts: RadarConstants) -> float:
    """Beam-positioning correction for the expected number of looks."""
    return 1.0 + 14.0 * math.sqrt(-math.log(consts.p_fa) / (xi * snr_clamped))


def expected_looks(v0: float, gamma: float, p_d: float) -> float:
    """Expected looks per track update; at least 1/p_d."""
    gv2 = gamma * v0 * v0
    return math.sqrt(1.0 + gv2 * gv2) / p_d


def utility(q: float, shape: UtilityShape) -> float:
    """Linear utility of angular error q [rad], clamped to [0, 1]."""
    u = (q - shape.q_min) / (shape.q_max - shape.q_min)
    return min(1.0, max(0.0, u))


def _evaluate_chain(cp: ControlPoint, env: Environment,
                    consts: RadarConstants) -> tuple | None:
    """Shared evaluation pipeline; None when the SNR is below the floor.

    quality(), resource() and evaluate() all run through here so their
    outputs are bit-for-bit consistent.
    """
    raw = snr0(cp, env, consts)
    snr, feasible = clamp_snr(raw, consts)
    if not feasible:
        return None
    xi = cross_talk_loss(cp.n_h, consts)
    theta_bw = beamwidth(cp, env, consts)
    alpha = alpha_factor(cp, env, theta_bw)
    beta = beta_factor(snr, xi, consts)
    v0 = track_sharpness(alpha, beta)
    q = theta_bw * v0
    p_d = detection_probability(snr, xi, consts)
    gamma = gamma_factor(snr, xi, consts)
    n_l = expected_looks(v0, gamma, p_d)
    g = n_l * cp.t_d * cp.f_t * (cp.n_h / consts.n_h_total)
    return snr, v0, q, p_d, n_l, g


def quality(cp: ControlPoint, env: Environment,
            consts: RadarConstants) -> float | None:
    """Achievable angular error q [rad], or None when not detectable."""
    chain = _evaluate_chain(cp, env, consts)
    if chain is None:
        return None
    return chain[2]


def resource(cp: ControlPoint, env: Environment,
             consts: RadarConstants) -> float | None:
    """Fractional radar time g consumed, or None when not detectable."""
    chain = _evaluate_chain(cp, env, consts)
    if chain is None:
        return None
    return chain[5]


def evaluate(cp: ControlPoint, env: Environment, consts: RadarConstants,
             shape: UtilityShape) -> TaskEvaluation:
    """Evaluate one control point against one environment.

    Args:
        cp: candidate control setting.
        env: target environment.
        consts: shared radar constants.
        shape: utility bounds on the angular error.

    Returns:
        A fully populated TaskEvaluation; ``feasible=False`` with all
        other fields None when the unclamped SNR falls below the floor.
    """
    chain = _evaluate_chain(cp, env, consts)
    if chain is None:
        return TaskEvaluation(feasible=False)
    snr, v0, q, p_d, n_l, g = chain
    return TaskEvaluation(
        feasible=True,
        quality=q,
        resource=g,
        utility=utility(q, shape),
        snr_linear=snr,
        track_sharpness=v0,
        p_d=p_d,
        n_looks=n_l,
    )


@dataclass(frozen=True)
class GridEvaluation:
    """evaluate() over a full control grid, as arrays.

    All arrays are shaped (len(t_d), len(f_t), len(n_h)).  Entries where
    ``feasible`` is False hold NaN in the value arrays and must be
    consumed through the mask.
    """

    feasible: np.ndarray   # bool
    quality: np.ndarray    # q [rad]
    resource: np.ndarray   # g
    utility: np.ndarray    # u in [0, 1]
    snr_linear: np.ndarray # clamped SN0


def evaluate_grid(t_d: np.ndarray, f_t: np.ndarray, n_h: np.ndarray,
                  env: Environment, consts: RadarConstants,
                  shape: UtilityShape) -> GridEvaluation:
    """Vectorized evaluate() over the cartesian product of control values.

    Matches the scalar pipeline op for op; the only difference is the
    root solver (track_sharpness_batch), which agrees with the scalar
    bisection to its 1e-10 tolerance.

    Args:
        t_d: 1-D array of integration times [s], ascending.
        f_t: 1-D array of update frequencies [Hz], ascending.
        n_h: 1-D integer array of element counts, ascending.
        env, consts, shape: as for evaluate().
    """
    t_d = np.asarray(t_d, dtype=np.float64).reshape(-1, 1, 1)
    f_t = np.asarray(f_t, dtype=np.float64).reshape(1, -1, 1)
    n_h = np.asarray(n_h, dtype=np.float64).reshape(1, 1, -1)
    if np.any(n_h < 1) or np.any(n_h > consts.n_h_total):
        raise ValueError("n_h values must lie in [1, n_h_total]")

    cos_b = math.cos(env.bearing)
    raw = (consts.k_rad * n_h**3 * t_d * cos_b * cos_b * env.rcs
           / env.range**4)                            # (nt, 1, nn)
    feasible = raw >= consts.snr_floor
    snr = np.minimum(raw, consts.snr_cap)
    xi = 0.8 + 0.2 * n_h / consts.n_h_total           # (1, 1, nn)
    xisnr = xi * snr

    theta_bw = consts.alpha_bw / n_h / cos_b          # (1, 1, nn)
    alpha = 0.4 * f_t * (env.range * theta_bw * math.sqrt(env.corr_time)
                         / env.maneuver_std) ** 0.4   # (1, nf, nn)
    beta = xisnr - math.log(consts.p_fa)              # (nt, 1, nn)
    v0 = track_sharpness_batch(alpha, beta)           # (nt, nf, nn)

    q = theta_bw * v0
    u = np.clip((q - shape.q_min) / (shape.q_max - shape.q_min), 0.0, 1.0)
    p_d = consts.p_fa ** (1.0 / (1.0 + xisnr))
    gamma = 1.0 + 14.0 * np.sqrt(-math.log(consts.p_fa) / xisnr)
    gv2 = gamma * v0 * v0
    n_l = np.sqrt(1.0 + gv2 * gv2) / p_d
    g = n_l * t_d * f_t * (n_h / consts.n_h_total)

    shape3 = np.broadcast_shapes(q.shape, g.shape, feasible.shape)
    feasible = np.broadcast_to(feasible, shape3).copy()
    q = np.where(feasible, q, np.nan)
    g = np.where(feasible, np.broadcast_to(g, shape3), np.nan)
    u = np.where(feasible, u, np.nan)
    snr = np.where(feasible, np.broadcast_to(snr, shape3), np.nan)
    return GridEvaluation(feasible=feasible, quality=q, resource=g,
                          utility=u, snr_linear=snr)


def derive_k_rad(p_avg: float, wavelength: float, eta: float, n_vt: float,
                 n_h_total: float, t0: float, noise_figure: float,
                 losses: float) -> float:
    """Radar constant from first-principles link-budget factors.

    Args:
        p_avg: average transmit power with all elements active [W].
        wavelength: carrier wavelength [m].
        eta: aperture efficiency.
        n_vt: total vertical element count.
        n_h_total: total horizontal element count.
        t0: reference temperature [K].
        noise_figure: receiver noise figure, linear ratio.
        losses: system losses, linear ratio.
    """
    if min(p_avg, wavelength, eta, n_vt, n_h_total, t0,
           noise_figure, losses) <= 0.0:
        raise ValueError("all link-budget factors must be positive")
    return (p_avg * wavelength**2 * eta**2 * n_vt**2
            / (64.0 * math.pi * n_h_total * BOLTZMANN * t0
               * noise_figure * losses))
