"""Exponential, Weibull and log-logistic families.

Parametrizations (all parameters strictly positive):

* exponential(rate):        Lambda(t) = rate * t
* weibull(shape, scale):    Lambda(t) = (t / scale) ** shape
* loglogistic(shape, scale): Lambda(t) = log(1 + (t / scale) ** shape)

Times are continuous and nonnegative; the cumulative hazard gradients are
defined for t > 0 (their t -> 0 limits are zero for the shipped families).
Log-likelihood contributions are ``log f(theta, X)`` for events and
``log S(theta, X)`` for censored records; gradients and Hessians are exact
analytic derivatives on the natural parameter scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import Observation
from .errors import DomainError, UsageError


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    q: int
    code: int

    def __str__(self) -> str:
        return self.name


EXPONENTIAL = FamilyDescriptor("exponential", 1, _kernels.EXPONENTIAL)
WEIBULL = FamilyDescriptor("weibull", 2, _kernels.WEIBULL)
LOGLOGISTIC = FamilyDescriptor("loglogistic", 2, _kernels.LOGLOGISTIC)

FAMILIES = {f.name: f for f in (EXPONENTIAL, WEIBULL, LOGLOGISTIC)}


def family(name) -> FamilyDescriptor:
    """Look up a family by lowercase name; FamilyDescriptors pass through."""
    if isinstance(name, FamilyDescriptor):
        return name
    try:
        return FAMILIES[str(name).lower()]
    except KeyError:
        raise UsageError(
            f"unknown family {name!r}; expected one of {sorted(FAMILIES)}"
        ) from None


def check_theta(fam: FamilyDescriptor, theta) -> np.ndarray:
    """Validate a parameter vector against the family's open space."""
    fam = family(fam)
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if theta.shape != (fam.q,):
        raise DomainError(
            f"{fam.name} expects {fam.q} parameter(s), got shape {theta.shape}"
        )
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0.0):
        raise DomainError(
            f"{fam.name} parameters must be strictly positive and finite, "
            f"got {theta.tolist()}"
        )
    return theta


def _ab(fam: FamilyDescriptor, theta: np.ndarray) -> tuple[float, float]:
    # kernels take two scalars; the exponential ignores the second
    a = float(theta[0])
    b = float(theta[1]) if fam.q == 2 else 1.0
    return a, b


def _eval(fam, theta, t, func):
    fam = family(fam)
    theta = check_theta(fam, theta)
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise UsageError(f"times must be finite and >= 0, got {t!r}")
    a, b = _ab(fam, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = func(fam, a, b, t_arr)
    return out if np.ndim(t) else float(out[0])


def cumulative_hazard(fam, theta, t):
    """Cumulative hazard Lambda(theta, t); scalar in, scalar out."""
    return _eval(fam, theta, t, lambda f, a, b, x: _kernels.cumhaz(f.code, a, b, x))


def survival(fam, theta, t):
    """Survival function S(theta, t), each family's closed form."""

    def _surv(f, a, b, x):
        u = x / b
        if f.code == _kernels.EXPONENTIAL:
            return np.exp(-a * x)
        if f.code == _kernels.WEIBULL:
            return np.exp(-(u**a))
        return 1.0 / (1.0 + u**a)

    return _eval(fam, theta, t, _surv)


def density(fam, theta, t):
    """Density f(theta, t), each family's closed form."""

    def _dens(f, a, b, x):
        u = x / b
        if f.code == _kernels.EXPONENTIAL:
            return a * np.exp(-a * x)
        if f.code == _kernels.WEIBULL:
            return (a / b) * u ** (a - 1.0) * np.exp(-(u**a))
        return (a / b) * u ** (a - 1.0) / (1.0 + u**a) ** 2

    return _eval(fam, theta, t, _dens)


def hazard(fam, theta, t):
    """Hazard rate lambda(theta, t) = f / S in each family's closed form."""

    def _haz(f, a, b, x):
        u = x / b
        if f.code == _kernels.EXPONENTIAL:
            return a * np.ones_like(x)
        if f.code == _kernels.WEIBULL:
            return (a / b) * u ** (a - 1.0)
        return (a / b) * u ** (a - 1.0) / (1.0 + u**a)

    return _eval(fam, theta, t, _haz)


def grad_cumulative_hazard(fam, theta, t):
    """Gradient of Lambda w.r.t. the parameters, shape (..., q); needs t > 0."""
    fam = family(fam)
    theta = check_theta(fam, theta)
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t_arr <= 0) or not np.all(np.isfinite(t_arr)):
        raise UsageError(f"gradient requires finite t > 0, got {t!r}")
    a, b = _ab(fam, theta)
    g = _kernels.cumhaz_grad(fam.code, a, b, t_arr)[:, : fam.q]
    return g if np.ndim(t) else g[0]


def loglik_derivatives(fam, theta, obs: Observation):
    """Per-observation log-likelihood value, gradient and Hessian.

    Value is log f(theta, X) for events and log S(theta, X) for censored
    observations; derivatives are analytic and on the natural scale.
    """
    fam = family(fam)
    theta = check_theta(fam, theta)
    times = np.array([obs.time], dtype=np.float64)
    events = np.array([float(obs.event)], dtype=np.float64)
    a, b = _ab(fam, theta)
    value, g0, g1 = _kernels.loglik_value_grad(fam.code, a, b, times, events)
    h00, h01, h11 = _kernels.loglik_hess(fam.code, a, b, times, events)
    grad = np.array([g0, g1])[: fam.q]
    hess = np.array([[h00, h01], [h01, h11]])[: fam.q, : fam.q]
    return float(value), grad, hess


def total_loglik(fam, theta, cohort) -> float:
    """Sum of per-observation log-likelihood contributions over a cohort."""
    fam = family(fam)
    theta = check_theta(fam, theta)
    a, b = _ab(fam, theta)
    value, _, _ = _kernels.loglik_value_grad(
        fam.code, a, b, cohort.times, cohort.events
    )
    return float(value)
