"""Gaussian-process optimization with a lower-confidence-bound rule.

Each cycle is an independent mini-run: a fresh seeded random state, a
space-filling design, then a handful of acquisitions.  The squared-
exponential kernel's per-axis length scales and amplitude are refit by
maximum likelihood (analytic gradients, warm-started between
acquisitions) on the cycle's own data, and the next point minimizes
mu(x) - kappa * sigma(x) by multi-start local search.  Running many
short cycles with different random states is the exploration scheme; the
global best across cycles is reported.

Observations are treated as noise-free (common random numbers upstream
make the objective deterministic); the diagonal jitter exists purely for
numerical conditioning and escalates on Cholesky failure.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky
from scipy.optimize import minimize as scipy_minimize

from .core import (
    Budget,
    EvaluationTracker,
    OptimizerRun,
    SearchSpace,
    _StopSearch,
)


class SingularKernelError(RuntimeError):
    """Kernel matrix stayed non-positive-definite after jitter escalation."""


BASE_JITTER = 1e-10
MAX_JITTER = 1e-4


class GaussianProcess:
    """Zero-mean GP on standardized targets, squared-exponential kernel."""

    def __init__(self, space: SearchSpace):
        self.space = space
        self.x_train: np.ndarray | None = None
        self.theta_: np.ndarray | None = None
        self.jitter_: float = BASE_JITTER

    def fit(self, x: np.ndarray, y: np.ndarray,
            warm_start: bool = True) -> "GaussianProcess":
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        self.x_train = x
        self._y_mean = float(y.mean())
        self._y_scale = float(y.std())
        if self._y_scale < 1e-12:
            self._y_scale = 1.0
        self._yc = (y - self._y_mean) / self._y_scale
        # per-axis squared coordinate differences, reused by NLL gradient
        self._sq1d = (x[:, None, :] - x[None, :, :]) ** 2

        span = self.space.span
        log_lo = np.log(1e-3 * span)
        log_hi = np.log(10.0 * span)
        bounds = [(lo, hi) for lo, hi in zip(log_lo, log_hi)]
        bounds.append((np.log(1e-2), np.log(1e2)))  # log amplitude

        starts = [np.concatenate([np.log(0.3 * span), [0.0]]),
                  np.concatenate([np.log(1.0 * span), [0.0]])]
        if warm_start and self.theta_ is not None:
            starts = [self.theta_, starts[0]]

        best_theta, best_nll = starts[0], np.inf
        for theta0 in starts:
            res = scipy_minimize(self._nll_and_grad, theta0, jac=True,
                                 method="L-BFGS-B", bounds=bounds,
                                 options={"maxiter": 50})
            if res.fun < best_nll:
                best_nll, best_theta = float(res.fun), res.x
        self.theta_ = best_theta
        self.length_scales = np.exp(best_theta[:-1])
        self.amplitude = float(np.exp(best_theta[-1]))
        self._factorize()
        return self

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = a[:, None, :] / self.length_scales - b[None, :, :] / self.length_scales
        return self.amplitude ** 2 * np.exp(-0.5 * np.sum(d * d, axis=2))

    def _nll_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        ell2 = np.exp(2.0 * theta[:-1])
        amp2 = np.exp(2.0 * theta[-1])
        scaled = self._sq1d / ell2  # (n, n, d)
        k = amp2 * np.exp(-0.5 * scaled.sum(axis=2))
        jitter_diag = BASE_JITTER * amp2 + 1e-12
        kj = k.copy()
        kj[np.diag_indices_from(kj)] += jitter_diag
        n = len(kj)
        try:
            chol = cholesky(kj, lower=True)
        except np.linalg.LinAlgError:
            return 1e25, np.zeros_like(theta)
        alpha = cho_solve((chol, True), self._yc)
        nll = (0.5 * float(self._yc @ alpha)
               + float(np.log(np.diag(chol)).sum())
               + 0.5 * n * np.log(2 * np.pi))
        # dNLL/dtheta_j = 0.5 tr((K^-1 - alpha alpha^T) dK/dtheta_j)
        k_inv = cho_solve((chol, True), np.eye(n))
        w = k_inv - np.outer(alpha, alpha)
        grad = np.empty_like(theta)
        wk = w * k
        for j in range(len(theta) - 1):
            grad[j] = 0.5 * float((wk * scaled[:, :, j]).sum())
        grad[-1] = float(wk.sum()) \
            + BASE_JITTER * amp2 * float(np.trace(w))
        return nll, grad

    def _factorize(self) -> None:
        k = self._kernel(self.x_train, self.x_train)
        scale = self.amplitude ** 2
        jitter = BASE_JITTER
        while True:
            try:
                kj = k.copy()
                kj[np.diag_indices_from(kj)] += jitter * scale
                self._chol = cho_factor(kj, lower=True)
                break
            except np.linalg.LinAlgError:
                jitter *= 100.0
                if jitter > MAX_JITTER:
                    raise SingularKernelError(
                        f"kernel not positive definite at jitter {jitter:g}")
        self.jitter_ = jitter * scale
        self._alpha = cho_solve(self._chol, self._yc)

    def predict(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation on the original y scale."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k_star = self._kernel(x, self.x_train)
        mu = k_star @ self._alpha
        v = cho_solve(self._chol, k_star.T)
        var = self.amplitude ** 2 - np.sum(k_star * v.T, axis=1)
        var = np.maximum(var, 0.0)
        return (mu * self._y_scale + self._y_mean,
                np.sqrt(var) * self._y_scale)

    def lower_confidence_bound(self, x: np.ndarray,
                               kappa: float) -> np.ndarray:
        mu, sigma = self.predict(x)
        return mu - kappa * sigma

    def lcb_and_grad(self, x: np.ndarray,
                     kappa: float) -> tuple[float, np.ndarray]:
        """Acquisition value and its analytic gradient at a single point."""
        x = np.asarray(x, dtype=float)
        ell2 = self.length_scales ** 2
        diff = self.x_train - x[None, :]
        k_star = self.amplitude ** 2 * np.exp(
            -0.5 * np.sum(diff * diff / ell2, axis=1))
        dk = (k_star[:, None] * diff) / ell2  # rows: dk_i/dx
        mu = float(k_star @ self._alpha)
        dmu = self._alpha @ dk
        v = cho_solve(self._chol, k_star)
        var = max(self.amplitude ** 2 - float(k_star @ v), 0.0)
        sigma = np.sqrt(var)
        if sigma > 1e-12 * self.amplitude:
            dsigma = -(v @ dk) / sigma
        else:
            sigma, dsigma = 0.0, np.zeros_like(x)
        value = (mu - kappa * sigma) * self._y_scale + self._y_mean
        grad = (dmu - kappa * dsigma) * self._y_scale
        return float(value), grad


def _minimize_lcb(gp: GaussianProcess, space: SearchSpace, kappa: float,
                  rng: np.random.Generator, n_scan: int,
                  best_so_far: np.ndarray | None,
                  n_polish: int = 2) -> np.ndarray:
    """Coarse vectorized scan, then polish the leaders with L-BFGS-B."""
    candidates = space.sample(rng, n_scan)
    if best_so_far is not None:
        candidates = np.vstack([candidates,
                                np.asarray(best_so_far, dtype=float)])
    scores = gp.lower_confidence_bound(candidates, kappa)
    leaders = candidates[np.argsort(scores)[:n_polish]]

    bounds = list(zip(space.lower, space.upper))
    best_x = leaders[0]
    best_val = float(scores.min())
    for s in leaders:
        res = scipy_minimize(lambda z: gp.lcb_and_grad(z, kappa), s,
                             jac=True, method="L-BFGS-B", bounds=bounds,
                             options={"maxiter": 50})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    return space.clip(best_x)


def gp_optimize(objective: Callable[[np.ndarray], float], space: SearchSpace,
                budget: Budget, kappa: float = 50.0,
                n_random_starts: int = 10, seed: int = 0,
                x0: np.ndarray | None = None, repair=None, log=None,
                acquisition_scan: int = 256) -> OptimizerRun:
    """Cycle-restarted GP search; kappa >= 0 sets the exploration appetite."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    tracker = EvaluationTracker(objective, budget, repair=repair, log=log)
    settings = {"seed": seed, "kappa": kappa,
                "n_random_starts": n_random_starts,
                "cycles": budget.cycles,
                "iterations_per_cycle": budget.iterations_per_cycle}
    min_gap = 1e-9 * float(np.max(space.span))

    try:
        for cycle in range(budget.cycles):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(cycle,)))
            design = list(space.latin_hypercube(rng, n_random_starts))
            if cycle == 0 and x0 is not None:
                design.insert(0, space.clip(np.asarray(x0, dtype=float)))
            xs, ys = [], []
            for point in design:
                ys.append(tracker(point))
                xs.append(tracker.points[-1])  # as evaluated (post-repair)

            gp = GaussianProcess(space)
            for _ in range(budget.iterations_per_cycle):
                gp.fit(np.array(xs), np.array(ys))
                incumbent = xs[int(np.argmin(ys))]
                candidate = _minimize_lcb(gp, space, kappa, rng,
                                          acquisition_scan, incumbent)
                gaps = np.max(np.abs(np.array(xs)
                                     - tracker.preview(candidate)), axis=1)
                if gaps.min() < min_gap:  # duplicate would break the fit
                    candidate = space.clip(
                        candidate + rng.uniform(-1e-2, 1e-2, space.dim)
                        * space.span)
                ys.append(tracker(candidate))
                xs.append(tracker.points[-1])
    except _StopSearch:
        pass
    return tracker.finish("gp", settings)
