"""Scalar special functions used by the ratio distribution.

Signed log-gamma, the modified Bessel function of the second kind (with the
elementary half-integer closed form), the Gaussian hypergeometric function
with region dispatch over its whole real domain of convergence, a 3F2 power
series, and the (2,3)-order Meijer G pattern of order (3,3) that the
symmetric-case CDF is built from.

Every function here is pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special as _sp

from .errors import (
    BudgetExceededError,
    DivergenceError,
    DomainError,
    ParameterError,
    PoleError,
)

_EPS = 2.220446049250313e-16
# c-offset used when a hypergeometric connection formula degenerates
_DEGENERATE_OFFSET = 1e-7
# a connection formula counts as degenerate when c-a-b is this close to an integer
_DEGENERATE_TOL = 1e-6
# coincident-pole detection threshold for the Meijer G residue expansion
_MEIJER_INTEGER_TOL = 1e-6


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy applied to every infinite series in the package."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 10000

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ParameterError("rel_tol must be > 0")
        if not self.abs_tol > 0.0:
            raise ParameterError("abs_tol must be > 0")
        if self.max_terms < 1:
            raise ParameterError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class EvalReport:
    """Value plus an error estimate and a tag naming the evaluation path."""

    value: float
    err_estimate: float
    method: str

    @property
    def needs_fallback(self) -> bool:
        return self.method == "fallback-required"


def _fallback() -> EvalReport:
    return EvalReport(math.nan, math.inf, "fallback-required")


def _is_nonpositive_integer(x: float, tol: float = 1e-12) -> bool:
    return x < 0.5 and abs(x - round(x)) < tol and round(x) <= 0


def _lgamma_signed(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign); sign is 0.0 exactly at the poles."""
    if _is_nonpositive_integer(x):
        return math.inf, 0.0
    return float(_sp.gammaln(x)), float(_sp.gammasgn(x))


def log_gamma(x: float) -> float:
    """log|Gamma(x)| for real non-pole x; pair with :func:`gamma_sign`."""
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at x={x}")
    return float(_sp.gammaln(x))


def gamma_sign(x: float) -> float:
    """Sign of Gamma(x) (+1 or -1) for real non-pole x."""
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at x={x}")
    return float(_sp.gammasgn(x))


def bessel_k(order: float, x: float) -> float:
    """Modified Bessel function of the second kind K_order(x), x > 0.

    Orders with order - 1/2 a non-negative integer use the elementary
    finite-sum representation; other orders go through a library backend.
    Overflow for tiny x at large order is reported as +inf.
    """
    if not x > 0.0:
        raise DomainError("bessel_k requires x > 0")
    order = abs(float(order))
    half = order - 0.5
    if half > -1e-12 and abs(half - round(half)) < 1e-12:
        return _bessel_k_half_integer(int(round(half)), x)
    v = float(_sp.kv(order, x))
    if math.isnan(v):
        raise DomainError(f"bessel_k failed for order={order}, x={x}")
    return v


def _bessel_k_half_integer(m: int, x: float) -> float:
    # sqrt(pi/(2x)) e^{-x} sum_{j<=m} (m+j)!/((m-j)! j!) (2x)^{-j}, in log space
    log2x = math.log(2.0 * x)
    s = 0.0
    for j in range(m + 1):
        lg = (
            math.lgamma(m + j + 1)
            - math.lgamma(m - j + 1)
            - math.lgamma(j + 1)
            - j * log2x
        )
        s += math.exp(lg)
    log_val = 0.5 * math.log(math.pi / (2.0 * x)) - x + math.log(s)
    try:
        return math.exp(log_val)
    except OverflowError:
        return math.inf


def _terminating_order(*params: float) -> int | None:
    """Smallest N with some parameter equal to -N (series then terminates)."""
    best = None
    for p in params:
        if _is_nonpositive_integer(p):
            n = -int(round(p))
            if best is None or n < best:
                best = n
    return best


def _series_core(uppers, lowers, x, ctrl, force_terms=None):
    """Sum_{j} prod(uppers)_j / (prod(lowers)_j j!) x^j by term recurrence.

    Returns (value, err, terms). Stops once past any transient growth hump
    and two consecutive terms are negligible; raises BudgetExceededError with
    the partial sum otherwise.
    """
    term = 1.0
    total = 1.0
    max_abs = 1.0
    small = 0
    limit = ctrl.max_terms if force_terms is None else force_terms + 2
    j = 0
    for j in range(limit):
        num = 1.0
        for u in uppers:
            num *= u + j
        den = 1.0 + j
        for low in lowers:
            den *= low + j
        if den == 0.0:
            raise PoleError("hypergeometric lower parameter hit a pole")
        ratio = num / den * x
        term *= ratio
        if term == 0.0:
            break
        total += term
        if abs(term) > max_abs:
            max_abs = abs(term)
        if abs(term) <= ctrl.rel_tol * abs(total) + ctrl.abs_tol:
            if abs(ratio) < 1.0:
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
        else:
            small = 0
    else:
        if force_terms is None:
            err = abs(term) + _EPS * max_abs * math.sqrt(limit)
            raise BudgetExceededError(
                f"series did not converge within {limit} terms",
                value=total,
                err_estimate=err,
                terms=limit,
            )
    err = _EPS * max_abs * math.sqrt(j + 2.0) + abs(term)
    return total, err, j + 1


def gauss_2f1(a: float, b: float, c: float, x: float,
              ctrl: SeriesControl | None = None) -> EvalReport:
    """Gaussian hypergeometric function on (-inf, 1], real parameters.

    Dispatch: direct series for |x| <= 1/2, a linear fractional argument map
    for x < -1/2, the 1-x connection formula for 1/2 < x < 1 (with an offset
    average when c-a-b degenerates to an integer), and the unit-argument
    gamma formula at x = 1 when it converges.
    """
    ctrl = ctrl or DEFAULT_CONTROL
    n_term = _terminating_order(a, b)
    if _is_nonpositive_integer(c):
        if n_term is None or n_term > -int(round(c)):
            raise PoleError(f"2F1 parameter pole: c={c}")
    value, err, method = _2f1_dispatch(a, b, c, x, ctrl, n_term)
    return EvalReport(value, err, method)


def _2f1_dispatch(a, b, c, x, ctrl, n_term=None):
    if n_term is None:
        n_term = _terminating_order(a, b)
    if n_term is not None:
        v, e, _ = _series_core((a, b), (c,), x, ctrl, force_terms=n_term)
        return v, e, "polynomial"
    if x == 0.0:
        return 1.0, 0.0, "series"
    if abs(x) <= 0.5:
        v, e, _ = _series_core((a, b), (c,), x, ctrl)
        return v, e, "series"
    if x < -0.5:
        return _2f1_pfaff(a, b, c, x, ctrl)
    if x < 1.0:
        return _2f1_near_unit(a, b, c, x, ctrl)
    if x == 1.0:
        v, e = _2f1_at_unit(a, b, c)
        return v, e, "unit-gamma"
    raise DomainError("2F1 argument must be < 1 (or exactly 1 when convergent)")


def _2f1_pfaff(a, b, c, x, ctrl):
    # F(a,b;c;x) = (1-x)^(-a) F(a, c-b; c; x/(x-1)); maps x<-1/2 into (1/3,1)
    y = x / (x - 1.0)
    v, e, method = _2f1_dispatch(a, c - b, c, y, ctrl)
    scale = math.exp(-a * math.log1p(-x))
    return scale * v, scale * e + _EPS * abs(scale * v), "pfaff+" + method


def _2f1_near_unit(a, b, c, x, ctrl):
    w = c - a - b
    k = round(w)
    dist = abs(w - k)
    if dist < _DEGENERATE_TOL:
        # evaluate at c offset on both sides of the degenerate point and
        # average; a doubled offset provides the error check
        c0 = c + (k - w)  # recentre so the offsets land symmetrically
        e = _DEGENERATE_OFFSET
        v1p, e1p = _2f1_connection(a, b, c0 + e, x, ctrl)
        v1m, e1m = _2f1_connection(a, b, c0 - e, x, ctrl)
        v2p, e2p = _2f1_connection(a, b, c0 + 2 * e, x, ctrl)
        v2m, e2m = _2f1_connection(a, b, c0 - 2 * e, x, ctrl)
        v1 = 0.5 * (v1p + v1m)
        v2 = 0.5 * (v2p + v2m)
        err = 10.0 * (abs(v1 - v2) + 0.5 * (e1p + e1m)) + dist * abs(v1) * 10.0
        return v1, err, "connection-degenerate"
    v, e = _2f1_connection(a, b, c, x, ctrl)
    # the two connection terms cancel increasingly as w approaches an integer
    e += _EPS * abs(v) / max(dist, _EPS)
    return v, e, "connection"


def _2f1_connection(a, b, c, x, ctrl):
    """Two-term 1-x connection formula, valid for non-integer w = c-a-b."""
    w = c - a - b
    one_mx = 1.0 - x
    lg_c, s_c = _lgamma_signed(c)
    t1 = 0.0
    e1 = 0.0
    lg_ca, s_ca = _lgamma_signed(c - a)
    lg_cb, s_cb = _lgamma_signed(c - b)
    if s_ca != 0.0 and s_cb != 0.0:
        lg_w, s_w = _lgamma_signed(w)
        f1, ef1, _ = _series_core((a, b), (1.0 - w,), one_mx, ctrl)
        coef = s_c * s_w * s_ca * s_cb * math.exp(lg_c + lg_w - lg_ca - lg_cb)
        t1 = coef * f1
        e1 = abs(coef) * ef1
    t2 = 0.0
    e2 = 0.0
    lg_a, s_a = _lgamma_signed(a)
    lg_b, s_b = _lgamma_signed(b)
    if s_a != 0.0 and s_b != 0.0:
        lg_mw, s_mw = _lgamma_signed(-w)
        f2, ef2, _ = _series_core((c - a, c - b), (1.0 + w,), one_mx, ctrl)
        coef = s_c * s_mw * s_a * s_b * math.exp(
            lg_c + lg_mw - lg_a - lg_b + w * math.log(one_mx)
        )
        t2 = coef * f2
        e2 = abs(coef) * ef2
    value = t1 + t2
    err = e1 + e2 + 4.0 * _EPS * (abs(t1) + abs(t2))
    return value, err


def _2f1_at_unit(a, b, c):
    w = c - a - b
    if w <= 0.0:
        raise DivergenceError(f"2F1 diverges at x=1 when c-a-b={w} <= 0")
    lg_c, s_c = _lgamma_signed(c)
    lg_w, s_w = _lgamma_signed(w)
    lg_ca, s_ca = _lgamma_signed(c - a)
    lg_cb, s_cb = _lgamma_signed(c - b)
    if s_ca == 0.0 or s_cb == 0.0:
        return 0.0, 0.0
    value = s_c * s_w * s_ca * s_cb * math.exp(lg_c + lg_w - lg_ca - lg_cb)
    return value, 4.0 * _EPS * abs(value)


def hyp_3f2_unit(a1: float, a2: float, a3: float, b1: float, b2: float,
                 x: float, ctrl: SeriesControl | None = None) -> EvalReport:
    """3F2 power series inside the unit disc (real argument)."""
    ctrl = ctrl or DEFAULT_CONTROL
    if abs(x) >= 1.0:
        raise DomainError("3F2 series requires |x| < 1")
    n_term = _terminating_order(a1, a2, a3)
    for low in (b1, b2):
        if _is_nonpositive_integer(low):
            if n_term is None or n_term > -int(round(low)):
                raise PoleError(f"3F2 parameter pole: lower parameter {low}")
    v, e, _ = _series_core((a1, a2, a3), (b1, b2), x, ctrl, force_terms=n_term)
    return EvalReport(v, e, "series-3f2")


@dataclass(frozen=True)
class MeijerGSpec:
    """Argument and the two parameter triples of the (2,3;3,3) G pattern."""

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    x: float

    def __post_init__(self):
        if len(self.a) != 3 or len(self.b) != 3:
            raise ParameterError("MeijerGSpec needs three upper and three lower parameters")
        if not self.x > 0.0:
            raise ParameterError("MeijerGSpec argument must be > 0")


def meijer_g_2_3_3_3(spec: MeijerGSpec, ctrl: SeriesControl | None = None) -> EvalReport:
    """G^{2,3}_{3,3}(x | a; b) by residue expansion over the right poles.

    Arguments above 1 are mapped to 1/x through the index-reversal relation
    of the G-function. Coincident residue poles (the logarithmic cases) and
    the point x = 1 return the fallback marker instead of a value.
    """
    ctrl = ctrl or DEFAULT_CONTROL
    x = spec.x
    if abs(x - 1.0) < 1e-12:
        return _fallback()
    if x < 1.0:
        return _slater_2_3(spec.a, spec.b, x, ctrl)
    cc = tuple(1.0 - bi for bi in spec.b)
    dd = tuple(1.0 - ai for ai in spec.a)
    rep = _slater_3_2(cc, dd, 1.0 / x, ctrl)
    if rep.needs_fallback:
        return rep
    return EvalReport(rep.value, rep.err_estimate, "slater-inverted")


def _near_integer(v: float, tol: float = _MEIJER_INTEGER_TOL) -> bool:
    return abs(v - round(v)) < tol


def _slater_2_3(a, b, x, ctrl):
    """Residue expansion of G^{2,3}_{3,3} over the poles of the first two
    lower parameters, each family a 3F2 series; |x| < 1."""
    if _near_integer(b[0] - b[1]):
        return _fallback()
    log_x = math.log(x)
    total = 0.0
    err = 0.0
    for h, o in ((0, 1), (1, 0)):
        bh = b[h]
        sign = 1.0
        lg = 0.0
        pole = False
        for v in (b[o] - bh, 1.0 + bh - a[0], 1.0 + bh - a[1], 1.0 + bh - a[2]):
            lv, sv = _lgamma_signed(v)
            if sv == 0.0:
                pole = True
                break
            lg += lv
            sign *= sv
        if pole:
            return _fallback()
        lv, sv = _lgamma_signed(1.0 + bh - b[2])
        if sv == 0.0:
            continue  # reciprocal gamma pole kills the whole family
        lg -= lv
        sign *= sv
        try:
            ser = hyp_3f2_unit(
                1.0 + bh - a[0], 1.0 + bh - a[1], 1.0 + bh - a[2],
                1.0 + bh - b[o], 1.0 + bh - b[2], x, ctrl,
            )
        except PoleError:
            return _fallback()
        mag = math.exp(lg + bh * log_x)
        total += sign * mag * ser.value
        err += mag * (ser.err_estimate + 8.0 * _EPS * abs(ser.value))
    return EvalReport(total, err + 4.0 * _EPS * abs(total), "slater-direct")


def _slater_3_2(c, d, y, ctrl):
    """Residue expansion of G^{3,2}_{3,3} over its three lower parameters."""
    for i in range(3):
        for j in range(i + 1, 3):
            if _near_integer(d[i] - d[j]):
                return _fallback()
    log_y = math.log(y)
    total = 0.0
    err = 0.0
    for h in range(3):
        others = [j for j in range(3) if j != h]
        dh = d[h]
        sign = 1.0
        lg = 0.0
        pole = False
        for v in (d[others[0]] - dh, d[others[1]] - dh,
                  1.0 + dh - c[0], 1.0 + dh - c[1]):
            lv, sv = _lgamma_signed(v)
            if sv == 0.0:
                pole = True
                break
            lg += lv
            sign *= sv
        if pole:
            return _fallback()
        lv, sv = _lgamma_signed(c[2] - dh)
        if sv == 0.0:
            continue
        lg -= lv
        sign *= sv
        try:
            ser = hyp_3f2_unit(
                1.0 + dh - c[0], 1.0 + dh - c[1], 1.0 + dh - c[2],
                1.0 + dh - d[others[0]], 1.0 + dh - d[others[1]], y, ctrl,
            )
        except PoleError:
            return _fallback()
        mag = math.exp(lg + dh * log_y)
        total += sign * mag * ser.value
        err += mag * (ser.err_estimate + 8.0 * _EPS * abs(ser.value))
    return EvalReport(total, err + 4.0 * _EPS * abs(total), "slater-direct")
