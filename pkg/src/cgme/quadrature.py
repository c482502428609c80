"""Oscillatory sinc-kernel quadrature and the closed-form sinc integrals.

The numerical oracle splits the real line at ``+-window``. Inside the window
the kernel is integrated by adaptive bisection with a Gauss-Legendre pair
(10 and 20 nodes) per panel. Outside it the kernel must be an exact product

    amplitude(x) * prod_k cos(w_k x + phi_k)

which is expanded into single waves and integrated with QUADPACK's Fourier
routine (QAWF) or, for the non-oscillating part, QAGI. Left and right tails
are folded together so that odd amplitudes decaying like 1/x converge as
symmetric principal values.

Closed forms, for positive a, b, c::

    I1(a,b,c) = int sin(c x) sinc(x-a) sinc(x-b) dx
    I2(a,b,c) = int sin(c x)/x sinc(x-a) sinc(x-b) dx
    J(a,b,c)  = int cos(c x) sinc(x-a) sinc(x-b) dx
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .core import NumericalContractError, ValidationError, sinc

__all__ = [
    "QuadratureError",
    "QuadResult",
    "IntegralSpec",
    "integrate_oracle",
    "expand_waves",
    "appendix_spec",
    "closed_I1",
    "closed_I1_over_c",
    "closed_I1_slope",
    "closed_I2",
    "closed_I2_over_c",
    "closed_I2_slope",
    "closed_I2_origin",
    "closed_J",
    "closed_J_origin",
]

_GL10 = np.polynomial.legendre.leggauss(10)
_GL20 = np.polynomial.legendre.leggauss(20)
_MAX_DEPTH = 40
_MAX_PANELS = 400_000
# integrals that vanish are resolved relative to this fraction of |kernel| mass
_MASS_FLOOR = 1e-4


class QuadratureError(NumericalContractError):
    """Quadrature did not reach its tolerance; carries the partial result."""

    def __init__(self, message, value=math.nan, error=math.inf):
        super().__init__(f"{message} (partial value {value!r}, error estimate {error!r})")
        self.value = value
        self.error = error


class QuadResult(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class IntegralSpec:
    """An integral over the whole real line.

    ``kernel`` must be vectorized and finite everywhere (removable
    singularities already resolved). For ``|x| >= window`` it must equal
    ``tail_amplitude(x) * prod(cos(w*x + phi) for w, phi in tail_waves)``
    with a smooth, non-oscillating amplitude.
    """

    kernel: Callable[[np.ndarray], np.ndarray]
    window: float
    tail_amplitude: Callable[[float], float]
    tail_waves: tuple = ()
    tol: float = 1e-10
    breakpoints: tuple = ()
    atol: float = 1e-15

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if not self.window > 0:
            raise ValidationError("window must be positive")


def expand_waves(waves: Sequence[tuple]) -> list[tuple[float, float, float]]:
    """Expand prod cos(w x + phi) into sum A cos(W x) - B sin(W x), W >= 0.

    Returns ``(W, A, B)`` triples sorted by W.
    """
    terms = [(1.0, 0.0, 0.0)]
    for w, phi in waves:
        nxt = []
        for coef, big_w, big_phi in terms:
            nxt.append((0.5 * coef, big_w + w, big_phi + phi))
            nxt.append((0.5 * coef, big_w - w, big_phi - phi))
        terms = nxt
    grouped: dict[float, list[float]] = {}
    for coef, big_w, big_phi in terms:
        if big_w < 0:
            big_w, big_phi = -big_w, -big_phi
        key = round(big_w, 12)
        acc = grouped.setdefault(key, [0.0, 0.0])
        acc[0] += coef * math.cos(big_phi)
        acc[1] += coef * math.sin(big_phi)
    return [(w, a, b) for w, (a, b) in sorted(grouped.items())]


def _panel_rules(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    out = []
    for nodes, weights in (_GL10, _GL20):
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
        out.append(half * (vals @ weights))
    out.append(np.abs(half) * (np.abs(vals) @ weights))
    return out


def _integrate_window(spec: IntegralSpec, max_w: float) -> tuple[QuadResult, float]:
    x = spec.window
    cuts = sorted({-x, x, *(p for p in spec.breakpoints if -x < p < x)})
    width = math.pi / max_w if max_w > 0 else 2.0 * x
    edges = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        k = max(1, math.ceil((hi - lo) / width))
        edges.append(np.linspace(lo, hi, k + 1)[:-1])
    lo = np.concatenate(edges)
    hi = np.append(lo[1:], x)
    depth = np.zeros(lo.size, dtype=int)

    done_val = 0.0
    done_err = 0.0
    done_mass = 0.0
    while True:
        coarse, fine, mass = _panel_rules(spec.kernel, lo, hi)
        err = np.abs(fine - coarse)
        if not np.all(np.isfinite(fine)):
            raise QuadratureError("kernel produced non-finite values inside the window")
        total = done_val + fine.sum()
        scale = max(abs(total), _MASS_FLOOR * (done_mass + mass.sum()))
        target = max(0.1 * spec.tol * scale, spec.atol)
        remaining = target - done_err
        # accept panels whose error is below their share of the budget
        share = max(remaining, 0.0) / max(lo.size, 1)
        ok = err <= share
        if err.sum() + done_err <= target:
            return QuadResult(float(total), float(err.sum() + done_err)), float(scale)
        done_val += fine[ok].sum()
        done_err += err[ok].sum()
        done_mass += mass[ok].sum()
        lo, hi, depth = lo[~ok], hi[~ok], depth[~ok]
        if np.any(depth >= _MAX_DEPTH) or 2 * lo.size > _MAX_PANELS:
            raise QuadratureError(
                "window integration exceeded refinement cap", float(total), float(err.sum() + done_err)
            )
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        depth = np.concatenate([depth + 1, depth + 1])


def _quad(func, a, **kw) -> QuadResult:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(func, a, np.inf, **kw)[:2]
    failures = [w for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    if failures:
        first = str(failures[0].message).splitlines()[0]
        raise QuadratureError(f"tail integration failed: {first}", value, err)
    return QuadResult(value, err)


def _integrate_tails(spec: IntegralSpec, atol: float) -> QuadResult:
    amp = spec.tail_amplitude
    x0 = spec.window

    def even(y):
        return amp(y) + amp(-y)

    def odd(y):
        return amp(y) - amp(-y)

    value = 0.0
    error = 0.0
    for w, a, b in expand_waves(spec.tail_waves):
        if w == 0.0:
            if abs(a) < 1e-14:
                continue
            r = _quad(even, x0, epsabs=atol / max(abs(a), 1e-300), epsrel=spec.tol * 0.1, limit=500)
            value += a * r.value
            error += abs(a) * r.error
            continue
        if abs(a) > 1e-14:
            r = _quad(even, x0, weight="cos", wvar=w, epsabs=atol / abs(a), limlst=200, limit=500)
            value += a * r.value
            error += abs(a) * r.error
        if abs(b) > 1e-14:
            r = _quad(odd, x0, weight="sin", wvar=w, epsabs=atol / abs(b), limlst=200, limit=500)
            value -= b * r.value
            error += abs(b) * r.error
    return QuadResult(value, error)


def integrate_oracle(spec: IntegralSpec) -> QuadResult:
    """Integrate ``spec`` over the real line to relative accuracy ``spec.tol``."""
    max_w = max((abs(w) for w, _ in spec.tail_waves), default=0.0)
    core, scale = _integrate_window(spec, max_w)
    atol = max(0.1 * spec.tol * scale, spec.atol)
    try:
        tails = _integrate_tails(spec, atol)
    except QuadratureError as exc:
        raise QuadratureError("oracle tails did not converge", core.value + exc.value,
                              core.error + exc.error) from None
    value = core.value + tails.value
    error = core.error + tails.error
    if not math.isfinite(value) or error > spec.tol * max(abs(value), scale) + 10 * spec.atol:
        raise QuadratureError("oracle missed its tolerance", value, error)
    return QuadResult(value, error)


# -- Appendix integrals -------------------------------------------------------

_SHIFTED_SINES = lambda a, b: ((1.0, -a - math.pi / 2), (1.0, -b - math.pi / 2))  # noqa: E731


def appendix_spec(kind: str, a: float, b: float, c: float = 0.0, tol: float = 1e-11) -> IntegralSpec:
    """IntegralSpec for the sinc-pair integrals.

    ``kind`` is one of ``I1``, ``I2``, ``J`` (weights sin(cx), sin(cx)/x,
    cos(cx)), ``I1_slope`` (weight x) or ``I2_slope`` (weight 1).
    """
    window = max(abs(a), abs(b)) + 8.0
    pair = lambda x: sinc(x - a) * sinc(x - b)  # noqa: E731
    pole = lambda x: 1.0 / ((x - a) * (x - b))  # noqa: E731
    waves = _SHIFTED_SINES(a, b)
    if kind == "I1":
        kernel = lambda x: np.sin(c * x) * pair(x)  # noqa: E731
        amp = pole
        waves = waves + ((c, -math.pi / 2),)
    elif kind == "I2":
        kernel = lambda x: c * sinc(c * x) * pair(x)  # noqa: E731
        amp = lambda x: pole(x) / x  # noqa: E731
        waves = waves + ((c, -math.pi / 2),)
    elif kind == "J":
        kernel = lambda x: np.cos(c * x) * pair(x)  # noqa: E731
        amp = pole
        waves = waves + ((c, 0.0),)
    elif kind == "I1_slope":
        kernel = lambda x: x * pair(x)  # noqa: E731
        amp = lambda x: x * pole(x)  # noqa: E731
    elif kind == "I2_slope":
        kernel = pair
        amp = pole
    else:
        raise ValidationError(f"unknown appendix integral {kind!r}")
    return IntegralSpec(kernel=kernel, window=window, tail_amplitude=amp, tail_waves=waves, tol=tol)


def _check_positive(**kw):
    for name, value in kw.items():
        if not value >= 0:
            raise ValidationError(f"{name} must be non-negative, got {value!r}")


def closed_I1(a: float, b: float, c: float) -> float:
    _check_positive(a=a, b=b, c=c)
    if c > 2.0:
        return 0.0
    s = 1.0 - c / 2.0
    return math.pi * math.sin((a + b) * c / 2.0) * s * sinc((a - b) * s)


def closed_I1_over_c(a: float, b: float, c: float) -> float:
    """I1(a, b, c)/c, finite as c -> 0 where it tends to :func:`closed_I1_slope`."""
    _check_positive(a=a, b=b, c=c)
    if c > 2.0:
        return 0.0
    s = 1.0 - c / 2.0
    return math.pi * (a + b) / 2.0 * sinc((a + b) * c / 2.0) * s * sinc((a - b) * s)


def closed_I1_slope(a: float, b: float) -> float:
    """Limit of I1/c as c -> 0."""
    _check_positive(a=a, b=b)
    return math.pi * (a + b) / 2.0 * sinc(a - b)


def closed_J(a: float, b: float, c: float) -> float:
    _check_positive(a=a, b=b, c=c)
    if c > 2.0:
        return 0.0
    s = 1.0 - c / 2.0
    return math.pi * math.cos((a + b) * c / 2.0) * s * sinc((a - b) * s)


def closed_J_origin(c: float) -> float:
    """J at a = b = 0."""
    return closed_J(0.0, 0.0, c)


def _divided_difference(fn, dfn, a, b):
    d = a - b
    if abs(d) > 1e-3 * max(1.0, abs(a), abs(b)):
        return (fn(a) - fn(b)) / d
    # mean of the derivative over [b, a]
    nodes, weights = np.polynomial.legendre.leggauss(5)
    mid, half = 0.5 * (a + b), 0.5 * d
    return 0.5 * float(np.dot(weights, [dfn(mid + half * t) for t in nodes]))


def closed_I2_over_c(a: float, b: float, c: float) -> float:
    """I2(a, b, c)/c, finite and smooth as c -> 0 and as a -> b."""
    _check_positive(a=a, b=b, c=c)
    if c > 2.0:
        return math.pi * sinc(a) * sinc(b) / c
    d = a - b
    ha, hb = a * c / 2.0, b * c / 2.0
    # p/c and q/c with p = sin(ac/2)/a
    p_c = 0.5 * sinc(ha)
    q_c = 0.5 * sinc(hb)

    # g(x) = sin^2(cx/2)/(c x)
    def g(x):
        return x * c / 4.0 * sinc(x * c / 2.0) ** 2

    def dg(x):
        return c / 2.0 * sinc(c * x) - c / 4.0 * sinc(c * x / 2.0) ** 2

    dd = _divided_difference(g, dg, a, b)
    return math.pi * (sinc(d) * (p_c * math.cos(ha) + q_c * math.cos(hb)) - math.cos(d) * dd)


def closed_I2(a: float, b: float, c: float) -> float:
    if c == 0.0:
        return 0.0
    return c * closed_I2_over_c(a, b, c)


def closed_I2_slope(a: float, b: float) -> float:
    """Limit of I2/c as c -> 0, the plain sinc-pair integral."""
    _check_positive(a=a, b=b)
    return math.pi * sinc(a - b)


def closed_I2_origin(c: float) -> float:
    """I2 at a = b = 0."""
    _check_positive(c=c)
    return math.pi * c * (1.0 - c / 4.0) if c <= 2.0 else math.pi
