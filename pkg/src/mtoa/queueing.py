"""Renewal-process analysis of batch service on the collision channel.

Each node's head-of-line (HOL) batch walks a chain with one transmit
state (held for ``batch_size`` slots) and backoff stages 0..cutoff_stage.
A stage-k batch transmits with probability ``tx_probs[k]`` whenever the
channel is not reserved by another node's batch, succeeds iff nobody else
transmits, and moves to the next stage (capped at the cutoff) on failure.
Stages below ``capture_stages`` transmit with probability 1, so a batch
there excludes everyone else from success until it wins.

Two coupled steady-state probabilities close the model: the chance the
channel is unreserved as seen from capture/non-capture stages (beta_c,
beta_nc) and the chance a transmission succeeds given an unreserved
channel (p_c, p_nc), both driven by the average non-capture transmission
probability q_tilde. With a flat non-capture schedule (cutoff ==
capture_stages) everything is closed form; a deeper schedule needs a
damped fixed-point iteration on q_tilde.

Throughput and the short-horizon fairness index both follow from the
service-time distribution of a HOL batch: throughput is batch_size over
the mean service time per node (times n), and fairness over a horizon of
T slots is approximately 1 / (1 + (var/mean)/T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConvergenceError
from .strategy import AccessStrategy

# below this, capture-based formulas switch to their analytic small-q limits
_TINY_Q = 1e-14


@dataclass(frozen=True)
class FixedPoint:
    """Steady-state probabilities for one strategy and population.

    beta_c / beta_nc: channel-not-reserved probability seen from capture /
        non-capture stages (beta_c is 1 by definition).
    p_c / p_nc: success probability given an unreserved channel, from
        capture / non-capture stages.
    q_tilde: average transmission probability over non-capture stages.
    """

    beta_c: float
    beta_nc: float
    p_c: float
    p_nc: float
    q_tilde: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class StateDistribution:
    """Embedded-chain distribution ``pi``, mean holding times ``tau`` and
    time-average (limiting) probabilities ``pi_tilde``.

    Index 0 is the transmit state, index 1+k is backoff stage k.
    """

    pi: np.ndarray
    tau: np.ndarray
    pi_tilde: np.ndarray


@dataclass(frozen=True)
class ServiceMoments:
    """Mean/variance of HOL-batch service time plus the raw PGF derivatives."""

    d_bar: float
    sigma2: float
    gd1: float
    gd2: float


@dataclass(frozen=True)
class EmpiricalMoments:
    """Monte-Carlo service-time moments with standard errors."""

    d_bar: float
    sigma2: float
    d_bar_se: float
    sigma2_se: float
    num_batches: int


def _success_probs(q_tilde: float, n: int, capture_stages: int):
    """(p_c, p_nc, 1 - p_c) at a given average contention probability."""
    if n == 1:
        return 1.0, 1.0, 0.0
    u = (n - 1) * math.log1p(-q_tilde) if q_tilde < 1.0 else -math.inf
    p_c = math.exp(u)
    one_minus_pc = -math.expm1(u) if q_tilde < 1.0 else 1.0
    if capture_stages == 0 or one_minus_pc == 0.0:
        return p_c, p_c, one_minus_pc
    # (1-x)/x for x = (1-p_c)^capture_stages, computed as expm1(-log x)
    lx = capture_stages * math.log(one_minus_pc)
    try:
        correction = (n - 1) * q_tilde * math.expm1(-lx)
    except OverflowError:
        correction = math.inf
    p_nc = p_c / (1.0 + correction) if math.isfinite(correction) else 0.0
    return p_c, p_nc, one_minus_pc


def _channel_free_prob(q_tilde, n, batch_size, capture_stages, p_nc, one_minus_pc):
    """Non-capture channel-not-reserved probability beta_nc."""
    if batch_size == 1 or n == 1 or p_nc == 0.0 or q_tilde == 0.0:
        return 1.0
    load = (n - 1) * (batch_size - 1) * p_nc * q_tilde
    if capture_stages > 0:
        lx = capture_stages * math.log(one_minus_pc)
        log_load = math.log(load) - lx
        if log_load > 700.0:
            return 0.0
        load = math.exp(log_load)
    return 1.0 / (1.0 + load)


def _harmonic_denominator(p_nc, tx_probs, capture_stages, cutoff_stage):
    acc = (1.0 - p_nc) ** (cutoff_stage - capture_stages) / tx_probs[cutoff_stage]
    for k in range(capture_stages, cutoff_stage):
        acc += p_nc * (1.0 - p_nc) ** (k - capture_stages) / tx_probs[k]
    return acc


def solve_fixed_point(strategy: AccessStrategy, n: int, *, damping: float = 0.5,
                      tol: float = 1e-12, max_iter: int = 100_000,
                      initial: float | None = None) -> FixedPoint:
    """Solve the steady-state system for a strategy and population.

    With cutoff == capture_stages the average q_tilde telescopes to the
    single non-capture probability and everything is closed form (zero
    iterations). Deeper schedules iterate q_tilde with damped updates
    from a starting guess (default: the cutoff-stage probability) and
    raise :class:`ConvergenceError` carrying the last residual if the
    defining equations are not met to ``tol``.
    """
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    nc, K = strategy.capture_stages, strategy.cutoff_stage
    qs = strategy.tx_probs
    iterations = 0
    if K == nc:
        q_t = qs[K]
    else:
        q_t = qs[K] if initial is None else float(initial)
        if not 0.0 < q_t <= 1.0:
            raise ConfigurationError("initial q_tilde must lie in (0,1]")
        for iterations in range(1, max_iter + 1):
            _, p_nc, _ = _success_probs(q_t, n, nc)
            denom = _harmonic_denominator(p_nc, qs, nc, K)
            if abs(q_t * denom - 1.0) <= tol:
                break
            q_t = (1.0 - damping) * q_t + damping / denom
        else:
            _, p_nc, _ = _success_probs(q_t, n, nc)
            denom = _harmonic_denominator(p_nc, qs, nc, K)
            raise ConvergenceError(
                f"fixed point not converged after {max_iter} iterations",
                residual=abs(q_t * denom - 1.0), iterations=max_iter,
            )
    p_c, p_nc, one_minus_pc = _success_probs(q_t, n, nc)
    beta_nc = _channel_free_prob(q_t, n, strategy.batch_size, nc, p_nc, one_minus_pc)
    residual = abs(q_t * _harmonic_denominator(p_nc, qs, nc, K) - 1.0)
    return FixedPoint(
        beta_c=1.0, beta_nc=beta_nc, p_c=p_c, p_nc=p_nc, q_tilde=q_t,
        residual=residual, iterations=iterations,
    )


def network_throughput(fp: FixedPoint, strategy: AccessStrategy, n: int) -> float:
    """Packets per slot across the network at the given fixed point.

    Monotone increasing in the batch size; degenerate inputs where no
    success is ever possible (q_tilde = 1 with n >= 2 and no capture)
    return 0.0.
    """
    M, nc = strategy.batch_size, strategy.capture_stages
    q_t, p_c = fp.q_tilde, fp.p_c
    if nc == 0:
        if p_c == 0.0 or q_t == 0.0:
            return 0.0
        return M / (M - 1.0 + 1.0 / (n * p_c * q_t))
    if q_t < _TINY_Q:
        # analytic small-q limits: one capture stage leaves an (n-1)/n slot
        # tax per batch, two or more remove contention loss entirely
        return M / (M + (n - 1) / n) if nc == 1 else 1.0
    _, _, one_minus_pc = _success_probs(q_t, n, nc)
    x = one_minus_pc ** nc
    g = (one_minus_pc - x) / p_c
    h = x / (n * p_c * q_t)
    return M / (M + g + h)


def max_throughput(n: int, batch_size: int, capture_stages: int) -> float:
    """Supremum of throughput over the non-capture transmission probability.

    Capture-free: attained at q_tilde = 1/n. One capture stage: the limit
    as q_tilde -> 0. Two or more: full channel utilisation, 1.
    """
    if n < 1 or batch_size < 1 or capture_stages < 0:
        raise ConfigurationError("need n >= 1, batch_size >= 1, capture_stages >= 0")
    M = batch_size
    if capture_stages == 0:
        return M / (M - 1.0 + 1.0 / (1.0 - 1.0 / n) ** (n - 1))
    if capture_stages == 1:
        return M / (M + (n - 1) / n)
    return 1.0


def _stage_arrays(fp: FixedPoint, strategy: AccessStrategy):
    nc, K = strategy.capture_stages, strategy.cutoff_stage
    betas = np.concatenate([np.full(nc, fp.beta_c), np.full(K - nc + 1, fp.beta_nc)])
    ps = np.concatenate([np.full(nc, fp.p_c), np.full(K - nc + 1, fp.p_nc)])
    return betas, ps


def _moments_closed(fp: FixedPoint, strategy: AccessStrategy) -> tuple[float, float]:
    M, nc = strategy.batch_size, strategy.capture_stages
    p_c = fp.p_c
    if p_c == 0.0:
        raise ConfigurationError("service never completes at p_c = 0; moments undefined")
    one_minus_pc = 1.0 - p_c
    s = fp.p_nc * fp.beta_nc * strategy.tx_probs[nc]
    x = one_minus_pc ** nc
    slow = 1.0 / s - 1.0 / p_c
    gd1 = M + one_minus_pc / p_c + x * slow
    gd2 = (M * (M - 1.0) + 2.0 * one_minus_pc * (M - 1.0) / p_c
           + 2.0 * one_minus_pc / (p_c * p_c)
           + 2.0 * x * slow * (1.0 / s + 1.0 / p_c + M + nc - 2.0))
    return gd1, gd2


def _moments_recursive(fp: FixedPoint, strategy: AccessStrategy) -> tuple[float, float]:
    M, K = strategy.batch_size, strategy.cutoff_stage
    qs = strategy.tx_probs
    betas, ps = _stage_arrays(fp, strategy)
    if ps[K] * betas[K] * qs[K] == 0.0:
        raise ConfigurationError("service never completes; moments undefined")
    # per-stage sojourns are geometric: until the first attempt below the
    # cutoff, until the first successful attempt at the cutoff
    succ = [betas[k] * qs[k] for k in range(K)] + [ps[K] * betas[K] * qs[K]]
    ey = [1.0 / s for s in succ]
    ey2 = [(2.0 - s) / (s * s) for s in succ]
    e1 = [0.0] * (K + 1)
    e2 = [0.0] * (K + 1)
    e1[K] = ey[K] + M
    e2[K] = ey2[K] + 2.0 * M * ey[K] + M * M
    for k in range(K - 1, -1, -1):
        ez = ps[k] * M + (1.0 - ps[k]) * e1[k + 1]
        ez2 = ps[k] * M * M + (1.0 - ps[k]) * e2[k + 1]
        e1[k] = ey[k] + ez
        e2[k] = ey2[k] + 2.0 * ey[k] * ez + ez2
    start = betas[0] * qs[0]
    k1 = min(1, K)
    ed = start * ps[0] * M + (1.0 - start) * e1[0] + start * (1.0 - ps[0]) * e1[k1]
    ed2 = start * ps[0] * M * M + (1.0 - start) * e2[0] + start * (1.0 - ps[0]) * e2[k1]
    return ed, ed2 - ed


def service_moments(fp: FixedPoint, strategy: AccessStrategy,
                    method: str = "auto") -> ServiceMoments:
    """First two moments of HOL-batch service time.

    ``method="closed"`` uses the flat-schedule closed forms (requires
    cutoff == capture_stages); ``"recursive"`` walks the stage chain and
    works for any schedule, including cutoff 0 where the fresh-failure
    transition loops back onto the last stage. ``"auto"`` picks the
    closed form whenever it applies. Both agree to rounding.
    """
    if method not in ("auto", "closed", "recursive"):
        raise ConfigurationError(f"unknown method {method!r}")
    flat = strategy.cutoff_stage == strategy.capture_stages
    if method == "closed" and not flat:
        raise ConfigurationError("closed form needs cutoff_stage == capture_stages")
    if method == "recursive" or (method == "auto" and not flat):
        gd1, gd2 = _moments_recursive(fp, strategy)
    else:
        gd1, gd2 = _moments_closed(fp, strategy)
    sigma2 = max(gd2 + gd1 - gd1 * gd1, 0.0)
    return ServiceMoments(d_bar=gd1, sigma2=sigma2, gd1=gd1, gd2=gd2)


def fairness_index(moments: ServiceMoments, horizon: float) -> float:
    """Predicted Jain index over ``horizon`` slots: 1/(1 + (var/mean)/T).

    Valid for many nodes and horizons well beyond one batch service;
    increases monotonically to 1 as the horizon grows.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be >= 1")
    return 1.0 / (1.0 + (moments.sigma2 / moments.d_bar) / horizon)


def variance_ratio_capture_free(q0: float, n: int, batch_size: int) -> float:
    """Service-time variance-to-mean ratio for the flat capture-free case.

    Evaluates (1/f + (n-1)(M-1)) * (1 - M / (1/f + n(M-1))) with
    f = q0 (1-q0)^(n-1); minimized over q0 at exactly 1/n. Returns inf at
    f = 0 (q0 = 1 with contention).
    """
    if not 0.0 < q0 <= 1.0:
        raise ConfigurationError("q0 must lie in (0,1]")
    if n < 1 or batch_size < 1:
        raise ConfigurationError("need n >= 1 and batch_size >= 1")
    M = batch_size
    f = q0 * (1.0 - q0) ** (n - 1)
    if f == 0.0:
        return math.inf
    inv = 1.0 / f
    return (inv + (n - 1.0) * (M - 1.0)) * (1.0 - M / (inv + n * (M - 1.0)))


def hol_renewal_oracle(fp: FixedPoint, strategy: AccessStrategy, seed: int,
                       num_batches: int = 100_000) -> EmpiricalMoments:
    """Monte-Carlo of the HOL stage chain; the independent check on
    :func:`service_moments`.

    Samples ``num_batches`` service times by walking the chain with the
    fixed-point probabilities and returns empirical mean/variance with
    standard errors (the variance SE uses the fourth central moment).
    """
    if num_batches < 2:
        raise ConfigurationError("num_batches must be >= 2")
    M, K = strategy.batch_size, strategy.cutoff_stage
    qs = np.asarray(strategy.tx_probs)
    betas, ps = _stage_arrays(fp, strategy)
    rng = np.random.default_rng(seed)
    D = np.zeros(num_batches)
    done = np.zeros(num_batches, dtype=bool)
    stage = np.zeros(num_batches, dtype=np.int64)
    attempted = rng.random(num_batches) < betas[0] * qs[0]
    won = attempted & (rng.random(num_batches) < ps[0])
    D[won] = M
    done |= won
    stage[attempted & ~won] = min(1, K)
    for k in range(K + 1):
        mask = (stage == k) & ~done
        count = int(mask.sum())
        if count == 0:
            continue
        idx = np.flatnonzero(mask)
        if k < K:
            D[idx] += rng.geometric(betas[k] * qs[k], count)
            succ = rng.random(count) < ps[k]
            D[idx[succ]] += M
            done[idx[succ]] = True
            stage[idx[~succ]] = k + 1
        else:
            D[idx] += rng.geometric(ps[K] * betas[K] * qs[K], count) + M
            done[idx] = True
    mean = float(D.mean())
    var = float(D.var(ddof=1))
    centred = D - mean
    m4 = float(np.mean(centred ** 4))
    return EmpiricalMoments(
        d_bar=mean,
        sigma2=var,
        d_bar_se=float(D.std(ddof=1) / math.sqrt(num_batches)),
        sigma2_se=math.sqrt(max(m4 - var * var, 0.0) / num_batches),
        num_batches=num_batches,
    )


def limiting_probabilities(fp: FixedPoint, strategy: AccessStrategy) -> StateDistribution:
    """Embedded-chain and time-average state probabilities of a HOL batch.

    With cutoff 0 the single backoff stage absorbs its own failures (a
    self loop), which needs its own balance; deeper chains use the
    product-form solution. The time-average transmit probability equals
    batch_size / mean service time, i.e. the per-node throughput over
    batch_size.
    """
    M, K = strategy.batch_size, strategy.cutoff_stage
    qs = strategy.tx_probs
    betas, ps = _stage_arrays(fp, strategy)
    if ps[K] == 0.0:
        raise ConfigurationError("chain never reaches the transmit state at p = 0")
    if K == 0:
        s0 = betas[0] * qs[0]
        unnorm = np.array([1.0, (1.0 - s0 * ps[0]) / ps[0]])
    else:
        entries = [1.0, 1.0 - betas[0] * qs[0]]
        prod = 1.0
        for k in range(1, K):
            prod *= 1.0 - ps[k - 1]
            entries.append(prod)
        prod *= 1.0 - ps[K - 1]
        entries.append(prod / ps[K])
        unnorm = np.array(entries)
    pi = unnorm / unnorm.sum()
    tau = np.concatenate([[float(M)], 1.0 / (betas * np.asarray(qs))])
    weighted = pi * tau
    return StateDistribution(pi=pi, tau=tau, pi_tilde=weighted / weighted.sum())


@dataclass(frozen=True)
class AnalysisResult:
    """Throughput/fairness prediction with its intermediate quantities."""

    throughput: float
    fairness: float
    fixed_point: FixedPoint
    moments: ServiceMoments


def analyze_strategy(strategy: AccessStrategy, n: int, horizon: float,
                     **solver_kwargs) -> AnalysisResult:
    """Fixed point -> throughput -> service moments -> fairness, in one call."""
    fp = solve_fixed_point(strategy, n, **solver_kwargs)
    moments = service_moments(fp, strategy)
    return AnalysisResult(
        throughput=network_throughput(fp, strategy, n),
        fairness=fairness_index(moments, horizon),
        fixed_point=fp,
        moments=moments,
    )
