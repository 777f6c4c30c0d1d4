"""Censored maximum-likelihood fitting and information-matrix utilities.

Fitting runs a BFGS iteration with analytic gradients on log-parameters
(keeping the parameter space open) and restarts from a derivative-free
simplex search if the line search stalls. The reported information matrix is
the per-observation average of negated analytic log-likelihood Hessians at
the estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels, families
from .data import Cohort
from .errors import DomainError, FitError, SelectionError
from .families import FamilyDescriptor, check_theta, family

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class FitResult:
    """Converged MLE for one family on one cohort."""

    family: FamilyDescriptor
    theta_hat: np.ndarray
    info_matrix: np.ndarray
    loglik: float
    aic: float
    n: int
    converged: bool
    iterations: int

    def to_json_dict(self) -> dict:
        return {
            "family": self.family.name,
            "theta_hat": self.theta_hat.tolist(),
            "info_matrix": self.info_matrix.ravel().tolist(),
            "loglik": self.loglik,
            "aic": self.aic,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def default_init(fam: FamilyDescriptor, cohort: Cohort) -> np.ndarray:
    """Moment-style starting values: rate = events / exposure for the
    exponential; shape 1 and scale = median observed time otherwise."""
    fam = family(fam)
    if fam.q == 1:
        rate = cohort.n_events / float(cohort.times.sum())
        return np.array([rate if rate > 0 else 1.0])
    return np.array([1.0, float(np.median(cohort.times))])


def empirical_information(fam, theta, cohort: Cohort) -> np.ndarray:
    """Average negated log-likelihood Hessian, -(1/n) * sum_i H_i(theta)."""
    fam = family(fam)
    theta = check_theta(fam, theta)
    a = float(theta[0])
    b = float(theta[1]) if fam.q == 2 else 1.0
    h00, h01, h11 = _kernels.loglik_hess(
        fam.code, a, b, cohort.times, cohort.events
    )
    full = np.array([[h00, h01], [h01, h11]])
    return -full[: fam.q, : fam.q] / cohort.n


def fit_mle(
    fam,
    cohort: Cohort,
    init=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    """Fit one family by censored maximum likelihood.

    Converges when the mean log-likelihood gradient (natural scale) has norm
    <= tol, i.e. the total-log-likelihood gradient is within tol * n. Raises
    FitError (carrying the last iterate) on degenerate data, boundary drift
    or a stalled search.
    """
    fam = family(fam)
    if cohort.n_events == 0:
        raise FitError("no events: likelihood unbounded/degenerate")
    theta0 = default_init(fam, cohort) if init is None else check_theta(fam, init)
    if np.any(theta0 <= 0):
        raise DomainError(f"initial parameters must be positive, got {theta0}")
    x0 = math.log(float(theta0[0]))
    x1 = math.log(float(theta0[1])) if fam.q == 2 else 0.0
    grad_tol = tol
    times, events = cohort.times, cohort.events
    # overflow at rejected trial points is expected and handled; keep the
    # pure-numpy kernel path quiet about it
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        a, b, loglik, iters, status = _kernels.fit_quasi_newton(
            fam.code, times, events, x0, x1, grad_tol, max_iter
        )
        if status == _kernels.FIT_LINE_SEARCH:
            # simplex restart from the stalled iterate, then resume BFGS
            def negloglik(x):
                value, _, _ = _kernels.loglik_value_grad(
                    fam.code, math.exp(x[0]), math.exp(x[1]) if fam.q == 2 else 1.0,
                    times, events,
                )
                return -value

            start = [math.log(a)] + ([math.log(b)] if fam.q == 2 else [0.0])
            simplex = minimize(negloglik, start, method="Nelder-Mead")
            a2, b2, loglik, extra, status = _kernels.fit_quasi_newton(
                fam.code,
                times,
                events,
                float(simplex.x[0]),
                float(simplex.x[1]) if fam.q == 2 else 0.0,
                grad_tol,
                max_iter,
            )
            a, b = a2, b2
            iters += extra
    theta_hat = np.array([a, b][: fam.q])
    if status == _kernels.FIT_BOUNDARY or np.any(theta_hat < 1e-12) or np.any(
        theta_hat > 1e12
    ):
        raise FitError(
            f"{fam.name} fit drifted to the parameter-space boundary",
            last_theta=theta_hat,
        )
    if status != _kernels.FIT_OK:
        raise FitError(
            f"{fam.name} fit did not converge within {max_iter} iterations",
            last_theta=theta_hat,
        )
    info = empirical_information(fam, theta_hat, cohort)
    return FitResult(
        family=fam,
        theta_hat=theta_hat,
        info_matrix=info,
        loglik=float(loglik),
        aic=2.0 * fam.q - 2.0 * float(loglik),
        n=cohort.n,
        converged=True,
        iterations=int(iters),
    )


def aic(fit: FitResult) -> float:
    """Akaike information criterion, 2q - 2 * loglik."""
    return 2.0 * fit.family.q - 2.0 * fit.loglik


def select_model(fits) -> FitResult:
    """Pick the converged fit with lowest AIC.

    Ties resolve to the fewest parameters, then first declaration.
    """
    candidates = [f for f in fits if f is not None and f.converged]
    if not candidates:
        raise SelectionError("no converged fits to select from")
    return min(enumerate(candidates), key=lambda kv: (kv[1].aic, kv[1].family.q, kv[0]))[1]


def pseudo_inverse(m, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix via SVD.

    Singular values below tol * s_max count as zero; tol defaults to
    1e-12 * q for a q x q input.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise ValueError("matrix is not symmetric within 1e-10")
    if tol is None:
        tol = 1e-12 * m.shape[0]
    u, s, vt = np.linalg.svd(m)
    cutoff = tol * (s[0] if s.size else 0.0)
    inv = np.where(s > cutoff, np.divide(1.0, s, where=s > 0), 0.0)
    return (vt.T * inv) @ u.T
