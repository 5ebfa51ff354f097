"""Scalar C^3-bounded nonlinearities used as diffusion/forcing coefficients."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = ["NonlinearFn", "constant_fn", "tanh_fn", "shifted_tanh_fn",
           "clamped_linear_fn"]


def _as_array(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x[None], lambda out: float(out[0])
    return x, lambda out: out


@dataclass(frozen=True)
class NonlinearFn:
    """A scalar function with three bounded derivatives.

    ``lower_bound`` is the declared pointwise lower bound (needed for the
    diffusion coefficient, where the quotient B(g(u))/A(f(u)) must stay away
    from zero).  ``c3_bound`` is the declared bound on f and its first three
    derivatives.
    """

    name: str
    fn: Callable
    d1: Callable
    d2: Callable
    d3: Callable
    c3_bound: float
    lower_bound: Optional[float] = None

    def __call__(self, x):
        x, unwrap = _as_array(x)
        return unwrap(self.fn(x))

    def deriv(self, x, order=1):
        x, unwrap = _as_array(x)
        if order == 1:
            return unwrap(self.d1(x))
        if order == 2:
            return unwrap(self.d2(x))
        if order == 3:
            return unwrap(self.d3(x))
        raise ValueError("derivative order must be 1, 2 or 3")

    def check_derivative_consistency(self, lo=-3.0, hi=3.0, num=201,
                                     rel_tol=1e-6):
        """Finite-difference probe of f' against the declared derivative."""
        x = np.linspace(lo, hi, num)
        h = 1e-6 * max(1.0, hi - lo)
        fd = (self.fn(x + h) - self.fn(x - h)) / (2.0 * h)
        scale = max(np.abs(self.d1(x)).max(), 1.0)
        return bool(np.abs(fd - self.d1(x)).max() <= rel_tol * scale)


def constant_fn(value):
    """The constant function x -> value (all derivatives zero)."""
    lb = value if value > 0 else None
    return NonlinearFn(
        name="const(%g)" % value,
        fn=lambda x: np.full_like(x, float(value)),
        d1=lambda x: np.zeros_like(x),
        d2=lambda x: np.zeros_like(x),
        d3=lambda x: np.zeros_like(x),
        c3_bound=abs(float(value)),
        lower_bound=lb,
    )


def tanh_fn():
    return NonlinearFn(
        name="tanh",
        fn=np.tanh,
        d1=lambda x: 1.0 / np.cosh(x) ** 2,
        d2=lambda x: -2.0 * np.tanh(x) / np.cosh(x) ** 2,
        d3=lambda x: (4.0 * np.tanh(x) ** 2 - 2.0 / np.cosh(x) ** 2)
        / np.cosh(x) ** 2,
        c3_bound=4.0,
    )


def shifted_tanh_fn(shift=2.0):
    """``x -> shift + tanh(x)``; positive lower bound when shift > 1."""
    base = tanh_fn()
    lb = shift - 1.0 if shift > 1.0 else None
    return NonlinearFn(
        name="tanh+%g" % shift,
        fn=lambda x: shift + np.tanh(x),
        d1=base.d1,
        d2=base.d2,
        d3=base.d3,
        c3_bound=shift + 4.0,
        lower_bound=lb,
    )


# C^3 saturation profile: identity on [-1, 1], constant outside [-2, 2],
# glued with the 7th-order smoothstep (zero derivatives up to order 3 at
# both knots).
_S3 = np.polynomial.polynomial.Polynomial([0, 0, 0, 0, 35, -84, 70, -20])
_S3_D = _S3.deriv()
_S3_D2 = _S3_D.deriv()
_S3_INT = _S3.integ()


def _sat(y):
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    out = np.where(a <= 1.0, y, 0.0)
    mid = (a > 1.0) & (a < 2.0)
    ym = a[mid] - 1.0
    plateau = 2.0 - float(_S3_INT(1.0))
    out[mid] = np.sign(y[mid]) * (1.0 + ym - _S3_INT(ym))
    out[a >= 2.0] = np.sign(y[a >= 2.0]) * plateau
    return out


def _sat_d1(y):
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    out = np.where(a <= 1.0, 1.0, 0.0)
    mid = (a > 1.0) & (a < 2.0)
    out[mid] = 1.0 - _S3(a[mid] - 1.0)
    return out


def _sat_d2(y):
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    out = np.zeros_like(y)
    mid = (a > 1.0) & (a < 2.0)
    out[mid] = -np.sign(y[mid]) * _S3_D(a[mid] - 1.0)
    return out


def _sat_d3(y):
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    out = np.zeros_like(y)
    mid = (a > 1.0) & (a < 2.0)
    out[mid] = -_S3_D2(a[mid] - 1.0)
    return out


def clamped_linear_fn(slope=1.0, radius=2.0):
    """``x -> slope * x`` on [-radius, radius], smoothly saturated outside.

    The saturation keeps the function C^3 with bounded derivatives, so it can
    stand in for a genuinely linear coefficient inside the tested range.
    """
    r = float(radius)
    return NonlinearFn(
        name="clamped-linear(%g,%g)" % (slope, radius),
        fn=lambda x: slope * r * _sat(x / r),
        d1=lambda x: slope * _sat_d1(x / r),
        d2=lambda x: (slope / r) * _sat_d2(x / r),
        d3=lambda x: (slope / r ** 2) * _sat_d3(x / r),
        c3_bound=abs(slope) * max(2.0 * r, 8.0 / max(r, 1e-12)),
    )
