"""Subordination solutions of the fractional Cauchy problem.

With T(s) the Markov semigroup and q(t, s) the inverse-subordinator
density, the unique solution of the order-beta fractional problem with
initial datum f is

    u(t, x) = int_0^inf T(s) f(x) q(t, s) ds.

The self-similarity q(t, s) = t^-beta q(1, s t^-beta) turns this into an
integral over sigma = s / t^beta against the fixed weight q(1, sigma),
so the decay of the integrand does not depend on t.  The independent
Fourier-space route evaluates the same solution as the multiplier
E_beta(t^beta psi(k)) applied to f^(k).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from subdiff.fractional import mittag_leffler
from subdiff.semigroup import GridFunction, LevySymbol, _check_resolved
from subdiff.stable_laws import StableLaw, InverseSubordinatorLaw, inverse_subordinator_pdf


class QuadratureError(RuntimeError):
    """Subordination quadrature failed to reach the requested tolerance."""


@lru_cache(maxsize=32)
def _sigma_rule(beta: float, n_panels: int, order: int):
    """Panel Gauss-Legendre rule on (0, S*) weighted by q(1, sigma).

    Panels are geometrically graded towards sigma = 0 so that semigroup
    multipliers concentrated near zero (large t^beta |psi|) stay resolved.
    """
    law = StableLaw(beta)
    cutoff = law.inverse_tail_cutoff(1.0)
    x, w = leggauss(order)
    edges = np.concatenate([[0.0], np.geomspace(cutoff * 1e-5, cutoff, n_panels)])
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    sigma = (mids[:, None] + halfs[:, None] * x).ravel()
    weights = (halfs[:, None] * w).ravel() * inverse_subordinator_pdf(
        InverseSubordinatorLaw(law, 1.0), sigma
    )
    return sigma, weights


def _accumulate(sym: LevySymbol, beta: float, t: float, f: GridFunction,
                n_panels: int, order: int) -> np.ndarray:
    """sum_i w_i q(1, s_i) T(t^beta s_i) f, accumulated in physical space."""
    sigma, weights = _sigma_rule(float(beta), n_panels, order)
    spectrum = np.fft.fftn(f.values)
    psi = sym(*f.freq_meshes())
    scale = t**beta
    acc = np.zeros_like(f.values, dtype=complex)
    for s, w in zip(sigma, weights):
        acc += w * np.fft.ifftn(np.exp((scale * s) * psi) * spectrum)
    return acc


def subordinate_solution(sym: LevySymbol, beta: float, t: float, f: GridFunction,
                         rel_tol: float = 1e-9, max_refinements: int = 3) -> GridFunction:
    """u(t, .) by quadrature of T(s) f against the hitting-time density.

    The rule is refined (panel doubling, order bump) until two consecutive
    evaluations agree to rel_tol in the discrete L^1 norm; failure raises
    QuadratureError with diagnostics.  Mass is conserved because the
    weights integrate q to 1 and each T(s) conserves the k = 0 mode.
    """
    if not (0.0 < beta < 1.0):
        raise ValueError("subordination order must lie in (0, 1)")
    if t <= 0:
        raise ValueError("time must be positive")
    if sym.dim != f.dim:
        raise ValueError("symbol and grid dimensions differ")
    n_panels, order = 48, 20
    prev = _accumulate(sym, beta, t, f, n_panels, order)
    scale = max(np.sum(np.abs(prev)) * f.spacing**f.dim, 1e-300)
    history = []
    for _ in range(max_refinements):
        n_panels, order = n_panels * 2, order + 6
        cur = _accumulate(sym, beta, t, f, n_panels, order)
        diff = np.sum(np.abs(cur - prev)) * f.spacing**f.dim / scale
        history.append((n_panels, order, diff))
        if diff <= rel_tol:
            out = cur.real if not np.iscomplexobj(f.values) else cur
            return GridFunction(f.dim, f.half_width, f.points, out)
        prev = cur
    raise QuadratureError(
        "subordination quadrature did not converge to "
        f"rel_tol={rel_tol:.1e}; refinement history (panels, order, rel L1 change): {history}"
    )


def fourier_ml_solution(sym: LevySymbol, beta: float, t: float, f: GridFunction,
                        alias_tol: float = 1e-8) -> GridFunction:
    """Independent oracle: inverse transform of E_beta(t^beta psi(k)) f^(k)."""
    if not (0.0 < beta <= 1.0):
        raise ValueError("order must lie in (0, 1]")
    if t <= 0:
        raise ValueError("time must be positive")
    if sym.dim != f.dim:
        raise ValueError("symbol and grid dimensions differ")
    spectrum = np.fft.fftn(f.values)
    psi = sym(*f.freq_meshes())
    multiplier = mittag_leffler(beta, t**beta * psi)
    out_spec = multiplier * spectrum
    _check_resolved(out_spec, alias_tol, "fourier_ml_solution")
    out = np.fft.ifftn(out_spec)
    if not np.iscomplexobj(f.values):
        out = out.real
    return GridFunction(f.dim, f.half_width, f.points, out)


def solution_field(sym: LevySymbol, beta: float, times, f: GridFunction,
                   solver=subordinate_solution):
    """Stack subordinated snapshots u(t_i, .) into a TimeSeriesField.

    times must be a uniform grid starting at 0; the t = 0 snapshot is f.
    """
    from subdiff.fractional import TimeSeriesField

    times = np.asarray(times, dtype=float)
    if times[0] != 0.0:
        raise ValueError("field time grid must start at 0")
    values = np.empty((times.size,) + f.values.shape, dtype=f.values.dtype)
    values[0] = f.values
    for i, t in enumerate(times[1:], start=1):
        values[i] = solver(sym, beta, float(t), f).values
    return TimeSeriesField(times, values, f.dim, f.half_width, f.points)
