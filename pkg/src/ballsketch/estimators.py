"""Ratio estimators, analytic error intervals, and the dip unimodality test.

Conductance of a ball is estimated from two sketch cardinalities
(undirected edges touching the ball, directed edges leaving it) as
``2 * edges / out_edges - 1``; transitivity as ``3 * triangles /
wedges``. For both ratios, and for the raw triangle count, two interval
families are available: a Chebyshev bound that always applies, and a
Vysochanskij-Petunin bound with the 4/9 tail factor that is valid when
the underlying estimators are unimodal. The dip test gates that
assumption empirically.

All intervals are computed in asymptotic-constants mode: the vanishing
finite-size terms of the underlying expectation and variance expansions
are set to zero, with the uniform bias/deviation constants (delta1,
delta2) kept. Every interval records this mode on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError, PreconditionError, UndefinedValueError

__all__ = [
    "DELTA1",
    "DELTA2",
    "BETA_INF",
    "beta",
    "eta",
    "ConfidenceInterval",
    "estimate_conductance",
    "estimate_transitivity",
    "chebyshev_conductance_interval",
    "vp_conductance_interval",
    "chebyshev_transitivity_interval",
    "vp_transitivity_interval",
    "chebyshev_triangle_interval",
    "vp_triangle_interval",
    "ratio_widths_for_confidence",
    "additive_width_for_confidence",
    "dip_statistic",
    "dip_test",
]

DELTA1 = 5e-5
DELTA2 = 5e-4

_BETA_TABLE = ((16, 1.106), (32, 1.070), (64, 1.054), (128, 1.046))
BETA_INF = math.sqrt(3 * math.log(2) - 1)  # ~1.03896

_VP_SLACK = math.sqrt(8.0 / 3.0)


def beta(p: int) -> float:
    """Standard-error constant for p registers (conservative between table entries)."""
    if p < 16:
        raise ConfigurationError(f"error constants require at least 16 registers, got {p}")
    if p > 128:
        return BETA_INF
    value = _BETA_TABLE[0][1]
    for entry_p, entry_beta in _BETA_TABLE:
        if entry_p <= p:
            value = entry_beta
    return value


def eta(p: int) -> float:
    """Relative standard-deviation bound for a p-register cardinality estimate."""
    return beta(p) / math.sqrt(p) + DELTA2


@dataclass(frozen=True)
class ConfidenceInterval:
    """An interval plus a lower bound on the probability it traps the estimator.

    ``style`` is "multiplicative" for the ratio estimators (endpoints scale
    the center) and "additive" for the triangle count. ``plug_in`` marks
    intervals computed from estimated rather than true cardinalities;
    ``unimodal_checked`` marks VP intervals whose unimodality prerequisite
    was established externally (e.g. via :func:`dip_test`).
    """

    lo: float
    hi: float
    confidence: float
    style: str
    plug_in: bool = False
    unimodal_checked: bool = False
    asymptotic_constants: bool = True

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def estimate_conductance(edge_est: float, outedge_est: float, clamp: bool = False) -> float:
    """Conductance of a ball from its edge and out-edge cardinalities."""
    if edge_est <= 0 or outedge_est <= 0:
        raise UndefinedValueError(
            f"conductance estimate needs positive cardinalities, got ({edge_est}, {outedge_est})"
        )
    phi = 2.0 * edge_est / outedge_est - 1.0
    if clamp:
        phi = min(1.0, max(0.0, phi))
    return phi


def estimate_transitivity(tri_est: float, wedge_est: float, clamp: bool = False) -> float:
    """Transitivity from triangle and wedge cardinalities."""
    if wedge_est <= 0:
        raise UndefinedValueError(f"transitivity estimate needs a positive wedge count, got {wedge_est}")
    if tri_est < 0:
        raise UndefinedValueError(f"triangle cardinality cannot be negative, got {tri_est}")
    t = 3.0 * tri_est / wedge_est
    if clamp:
        t = min(1.0, max(0.0, t))
    return t


def _ratio_interval(num_card: float, den_card: float, center: float, p: int,
                    w1: float, w2: float, vp: bool, plug_in: bool,
                    unimodal_checked: bool) -> ConfidenceInterval:
    if num_card <= 0 or den_card <= 0:
        raise UndefinedValueError("interval needs positive cardinalities")
    if w1 <= 0 or w2 <= 0:
        raise PreconditionError("interval widths must be positive")
    e = eta(p)
    if vp:
        thr1 = _VP_SLACK * e * num_card
        thr2 = _VP_SLACK * e * den_card
        if not w1 > thr1:
            raise PreconditionError(
                f"lambda1={w1} must strictly exceed sqrt(8/3) times the deviation bound, i.e. > {thr1}"
            )
        if not w2 > thr2:
            raise PreconditionError(
                f"lambda2={w2} must strictly exceed sqrt(8/3) times the deviation bound, i.e. > {thr2}"
            )
    eps = w1 / num_card + DELTA1
    gam = w2 / den_card + DELTA1
    budget = e * e * (num_card ** 2 / w1 ** 2 + den_card ** 2 / w2 ** 2)
    if vp:
        budget *= 4.0 / 9.0
    confidence = min(1.0, max(0.0, 1.0 - budget))
    lo = (1.0 - eps) / (1.0 + gam) * center
    if gam >= 1.0:
        hi = math.inf
    else:
        hi = (1.0 + eps) / (1.0 - gam) * center
        lo, hi = min(lo, hi), max(lo, hi)
    return ConfidenceInterval(lo=lo, hi=hi, confidence=confidence, style="multiplicative",
                              plug_in=plug_in, unimodal_checked=unimodal_checked)


def chebyshev_conductance_interval(edge_card: float, outedge_card: float, phi: float,
                                   p: int, p1: float, p2: float,
                                   plug_in: bool = False) -> ConfidenceInterval:
    """Chebyshev interval for the conductance ratio estimator."""
    return _ratio_interval(edge_card, outedge_card, phi, p, p1, p2,
                           vp=False, plug_in=plug_in, unimodal_checked=False)


def vp_conductance_interval(edge_card: float, outedge_card: float, phi: float,
                            p: int, lambda1: float, lambda2: float,
                            plug_in: bool = False,
                            unimodal_checked: bool = False) -> ConfidenceInterval:
    """Vysochanskij-Petunin interval for the conductance ratio estimator.

    Valid when both cardinality estimators are unimodal; widths must
    strictly exceed sqrt(8/3) times the deviation bound eta * cardinality.
    """
    return _ratio_interval(edge_card, outedge_card, phi, p, lambda1, lambda2,
                           vp=True, plug_in=plug_in, unimodal_checked=unimodal_checked)


def chebyshev_transitivity_interval(triangle_card: float, wedge_card: float, t: float,
                                    p: int, p1: float, p2: float,
                                    plug_in: bool = False) -> ConfidenceInterval:
    """Chebyshev interval for the transitivity ratio estimator."""
    return _ratio_interval(triangle_card, wedge_card, t, p, p1, p2,
                           vp=False, plug_in=plug_in, unimodal_checked=False)


def vp_transitivity_interval(triangle_card: float, wedge_card: float, t: float,
                             p: int, lambda1: float, lambda2: float,
                             plug_in: bool = False,
                             unimodal_checked: bool = False) -> ConfidenceInterval:
    """Vysochanskij-Petunin interval for the transitivity ratio estimator."""
    return _ratio_interval(triangle_card, wedge_card, t, p, lambda1, lambda2,
                           vp=True, plug_in=plug_in, unimodal_checked=unimodal_checked)


def _additive_interval(delta: float, p: int, width: float, vp: bool, plug_in: bool,
                       unimodal_checked: bool) -> ConfidenceInterval:
    if delta < 0:
        raise UndefinedValueError("triangle cardinality cannot be negative")
    e = eta(p)
    if delta == 0:
        # Zero variance bound: any non-negative width traps the count surely.
        if width < 0:
            raise PreconditionError("interval width must be non-negative")
        return ConfidenceInterval(lo=0.0, hi=width, confidence=1.0, style="additive",
                                  plug_in=plug_in, unimodal_checked=unimodal_checked)
    if vp:
        thr = _VP_SLACK * e * delta
        if not width > thr:
            raise PreconditionError(
                f"lambda={width} must strictly exceed sqrt(8/3) times the deviation bound, i.e. > {thr}"
            )
    elif width <= 0:
        raise PreconditionError("interval width must be positive")
    budget = (e * delta / width) ** 2
    if vp:
        budget *= 4.0 / 9.0
    confidence = min(1.0, max(0.0, 1.0 - budget))
    center = delta * (1.0 + DELTA1)
    return ConfidenceInterval(lo=max(0.0, center - width), hi=center + width,
                              confidence=confidence, style="additive",
                              plug_in=plug_in, unimodal_checked=unimodal_checked)


def chebyshev_triangle_interval(delta: float, p: int, a: float,
                                plug_in: bool = False) -> ConfidenceInterval:
    """Chebyshev interval around the expected triangle-count estimate."""
    return _additive_interval(delta, p, a, vp=False, plug_in=plug_in, unimodal_checked=False)


def vp_triangle_interval(delta: float, p: int, lam: float, plug_in: bool = False,
                         unimodal_checked: bool = False) -> ConfidenceInterval:
    """Vysochanskij-Petunin interval around the expected triangle-count estimate."""
    return _additive_interval(delta, p, lam, vp=True, plug_in=plug_in,
                              unimodal_checked=unimodal_checked)


def ratio_widths_for_confidence(confidence: float, num_card: float, den_card: float,
                                p: int, method: str = "vp") -> tuple[float, float]:
    """Symmetric widths hitting a target confidence for a ratio interval.

    The confidence budget is split equally between the two cardinality
    deviations; widths come out proportional to eta(p) * cardinality.
    """
    if not 0.0 < confidence < 1.0:
        raise ConfigurationError(f"target confidence must be in (0, 1), got {confidence}")
    if method == "chebyshev":
        scale = math.sqrt(2.0 / (1.0 - confidence))
    elif method == "vp":
        scale = math.sqrt(8.0 / (9.0 * (1.0 - confidence)))
        if scale <= _VP_SLACK:
            raise PreconditionError(
                f"confidence {confidence} too low for a valid VP width (needs > 2/3)"
            )
    else:
        raise ConfigurationError(f"unknown interval method {method!r}")
    e = eta(p)
    return scale * e * num_card, scale * e * den_card


def additive_width_for_confidence(confidence: float, delta: float, p: int,
                                  method: str = "vp") -> float:
    """Width hitting a target confidence for a triangle-count interval."""
    if not 0.0 < confidence < 1.0:
        raise ConfigurationError(f"target confidence must be in (0, 1), got {confidence}")
    if method == "chebyshev":
        scale = 1.0 / math.sqrt(1.0 - confidence)
    elif method == "vp":
        scale = (2.0 / 3.0) / math.sqrt(1.0 - confidence)
        if delta > 0 and scale <= _VP_SLACK:
            raise PreconditionError(
                f"confidence {confidence} too low for a valid VP width (needs > 5/6)"
            )
    else:
        raise ConfigurationError(f"unknown interval method {method!r}")
    return scale * eta(p) * delta


# ---------------------------------------------------------------------------
# Dip statistic and Monte Carlo unimodality test
# ---------------------------------------------------------------------------

def _safe_ratio(num: float, den: float) -> float:
    return 0.0 if den == 0.0 else num / den


def _dip_sorted(xs) -> float:
    """Dip of a sorted sample: max distance between its empirical CDF and the
    closest unimodal CDF, via greatest-convex-minorant / least-concave-majorant
    fits over a shrinking modal interval. Minimum value is 1/(2n)."""
    n = len(xs)
    if n < 1:
        raise InputError("dip statistic needs at least one sample")
    if n < 2 or xs[-1] == xs[0]:
        return 0.5 / n
    x = [0.0] * (n + 1)  # 1-based
    for i in range(n):
        x[i + 1] = float(xs[i])

    # Pointers to the previous touch point of the convex minorant fit ...
    mn = [0] * (n + 1)
    mn[1] = 1
    for j in range(2, n + 1):
        mn[j] = j - 1
        while True:
            mnj = mn[j]
            if mnj == 1:
                break
            mnmnj = mn[mnj]
            if (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj):
                break
            mn[j] = mnmnj
    # ... and of the concave majorant fit.
    mj = [0] * (n + 1)
    mj[n] = n
    for k in range(n - 1, 0, -1):
        mj[k] = k + 1
        while True:
            mjk = mj[k]
            if mjk == n:
                break
            mjmjk = mj[mjk]
            if (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk):
                break
            mj[k] = mjmjk

    low, high = 1, n
    dip = 1.0  # in observation-count units; scaled by 1/(2n) at the end
    gcm = [0] * (n + 2)
    lcm = [0] * (n + 2)
    while True:
        gcm[1] = high
        i = 1
        while gcm[i] > low:
            gcm[i + 1] = mn[gcm[i]]
            i += 1
        l_gcm = i
        ig = i
        ix = i - 1
        lcm[1] = low
        i = 1
        while lcm[i] < high:
            lcm[i + 1] = mj[lcm[i]]
            i += 1
        l_lcm = i
        ih = i
        iv = 2

        if l_gcm != 2 or l_lcm != 2:
            # Largest gap between the two fits over [low, high].
            d = 0.0
            while True:
                gcmix = gcm[ix]
                lcmiv = lcm[iv]
                if gcmix > lcmiv:
                    gcmi1 = gcm[ix + 1]
                    dx = (lcmiv - gcmi1 + 1) - _safe_ratio(
                        (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1), x[gcmix] - x[gcmi1]
                    )
                    iv += 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv - 1
                else:
                    lcmiv1 = lcm[iv - 1]
                    dx = _safe_ratio(
                        (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1), x[lcmiv] - x[lcmiv1]
                    ) - (gcmix - lcmiv1 - 1)
                    ix -= 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv
                if ix < 1:
                    ix = 1
                if iv > l_lcm:
                    iv = l_lcm
                if gcm[ix] == lcm[iv]:
                    break
        else:
            d = 1.0
        if d < dip:
            break

        # Maximum deviation of the empirical CDF from the minorant fit below
        # the candidate modal interval ...
        dip_l = 0.0
        for j in range(ig, l_gcm):
            max_t = 1.0
            jb = gcm[j + 1]
            je = gcm[j]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (jj - jb + 1) - (x[jj] - x[jb]) * c
                    if max_t < t:
                        max_t = t
            if dip_l < max_t:
                dip_l = max_t
        # ... and from the majorant fit above it.
        dip_u = 0.0
        for j in range(ih, l_lcm):
            max_t = 1.0
            jb = lcm[j]
            je = lcm[j + 1]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (x[jj] - x[jb]) * c - (jj - jb - 1)
                    if max_t < t:
                        max_t = t
            if dip_u < max_t:
                dip_u = max_t

        dipnew = dip_u if dip_u > dip_l else dip_l
        if dip < dipnew:
            dip = dipnew
        if low == gcm[ig] and high == lcm[ih]:
            break
        low = gcm[ig]
        high = lcm[ih]
        if low >= high:
            break
    return dip / (2.0 * n)


def dip_statistic(samples) -> float:
    """Dip of an arbitrary sample (sorted internally)."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if len(x) < 1:
        raise InputError("dip statistic needs at least one sample")
    return _dip_sorted(x.tolist())


def dip_test(samples, monte_carlo_trials: int = 2000, rng_seed: int = 0) -> tuple[float, float]:
    """Dip statistic plus a Monte Carlo p-value against the uniform null.

    The p-value is (1 + #{null dips >= observed}) / (trials + 1), with null
    samples drawn uniformly on (0, 1) at the observed sample size. Small
    p-values reject unimodality.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if len(x) < 4:
        raise InputError(f"dip test needs at least 4 samples, got {len(x)}")
    if monte_carlo_trials < 1:
        raise ConfigurationError("monte_carlo_trials must be positive")
    stat = dip_statistic(x)
    rng = np.random.default_rng(rng_seed)
    n = len(x)
    exceed = 0
    # Draw in batches to bound memory while keeping the sort vectorized.
    batch = max(1, min(monte_carlo_trials, (1 << 23) // max(n, 1)))
    remaining = monte_carlo_trials
    while remaining > 0:
        take = min(batch, remaining)
        nulls = rng.random((take, n))
        nulls.sort(axis=1)
        for row in nulls:
            if _dip_sorted(row.tolist()) >= stat:
                exceed += 1
        remaining -= take
    p_value = (1 + exceed) / (monte_carlo_trials + 1)
    return stat, p_value
