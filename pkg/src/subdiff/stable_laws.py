"""One-sided stable subordinators and their inverse (hitting-time) laws.

The subordinator law is pinned down by its Laplace transform

    E[exp(-s D_t)] = exp(-t s^beta),   0 < beta < 1,

so D_1 has a smooth density g_beta on (0, inf).  There is no elementary
formula for g_beta except at beta = 1/2, where

    g_{1/2}(x) = (4 pi x^3)^(-1/2) exp(-1/(4x)).

We evaluate g_beta through the single-integral (Zolotarev/Kanter)
representation

    g_beta(x) = beta / ((1-beta) pi) * x^(-1/(1-beta))
                * int_0^pi A(th) exp(-A(th) x^(-beta/(1-beta))) dth,

    A(th) = sin((1-beta) th) sin(beta th)^(beta/(1-beta))
            / sin(th)^(1/(1-beta)),

with a fixed Gauss-Legendre panel rule whose nodes are graded towards
th = pi where A blows up.  The same kernel A drives the Kanter sampler,

    D_1 = (A(U)/W)^((1-beta)/beta),  U ~ Unif(0, pi),  W ~ Exp(1),

and the hitting time E_t = inf{x > 0 : D_x > t} is sampled through the
marginal identity E_t = (t / D_1)^beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma as gamma_fn


def _kanter_log_kernel(beta: float, theta: np.ndarray) -> np.ndarray:
    """log A(theta) for the Zolotarev integrand / Kanter sampler."""
    with np.errstate(divide="ignore"):
        return (
            np.log(np.sin((1.0 - beta) * theta))
            + (beta / (1.0 - beta)) * np.log(np.sin(beta * theta))
            - (1.0 / (1.0 - beta)) * np.log(np.sin(theta))
        )


def _graded_panels(n_regular: int, n_geometric: int, order: int):
    """Gauss-Legendre nodes/weights on (0, pi), geometrically refined at pi.

    A(theta) diverges like (pi - theta)^(-1/(1-beta)); geometric panels down
    to pi - theta ~ 1e-13 keep the boundary layer resolved for every x at
    which the density is meaningfully nonzero.
    """
    x, w = leggauss(order)
    edges = list(np.linspace(0.0, np.pi / 2, n_regular + 1))
    ratio = (1e-13) ** (1.0 / n_geometric)
    edges += [np.pi - (np.pi / 2) * ratio**k for k in range(1, n_geometric + 1)]
    edges = np.asarray(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * x).ravel()
    weights = (halfs[:, None] * w).ravel()
    return nodes, weights


@dataclass(frozen=True)
class StableLaw:
    """Standard one-sided stable law with E[e^(-s D_1)] = e^(-s^beta).

    Holds the precomputed quadrature mesh for the density integral; the
    kernel values log A(theta_i) are cached because they do not depend on
    the evaluation point.
    """

    beta: float
    quad_nodes: np.ndarray = field(repr=False, default=None)
    quad_weights: np.ndarray = field(repr=False, default=None)
    _log_kernel: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"stability index must lie in (0,1), got {self.beta}")
        if self.quad_nodes is None:
            nodes, weights = _graded_panels(n_regular=16, n_geometric=40, order=24)
            object.__setattr__(self, "quad_nodes", nodes)
            object.__setattr__(self, "quad_weights", weights)
        if self._log_kernel is None:
            object.__setattr__(
                self, "_log_kernel", _kanter_log_kernel(self.beta, self.quad_nodes)
            )

    @property
    def kernel_floor(self) -> float:
        """min over theta of A(theta), attained in the theta -> 0 limit."""
        b = self.beta
        return (b**b * (1.0 - b) ** (1.0 - b)) ** (1.0 / (1.0 - b))

    def inverse_tail_cutoff(self, t: float, log_tail: float = 37.0) -> float:
        """S* with q(t, s) tail mass beyond S* below exp(-log_tail) ~ 1e-16.

        The hitting-time density decays like exp(-A_min t^(-b/(1-b)) s^(1/(1-b)));
        inverting that bound and padding by 20% gives the truncation point.
        """
        b = self.beta
        return 1.2 * (log_tail / self.kernel_floor) ** (1.0 - b) * t**b


@dataclass(frozen=True)
class InverseSubordinatorLaw:
    """Law of the hitting time E_t = inf{x > 0 : D_x > t} at fixed t."""

    base: StableLaw
    t: float

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError(f"physical time must be positive, got {self.t}")


def stable_pdf(law: StableLaw, t):
    """Density g_beta(t) of the standard stable subordinator at unit time.

    Parameters
    ----------
    law : StableLaw
    t : float or ndarray
        Evaluation points, all > 0.

    Returns
    -------
    float or ndarray
        g_beta(t) >= 0.  For beta = 1/2 this agrees with the closed form
        (4 pi t^3)^(-1/2) exp(-1/(4t)) to quadrature accuracy.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("stable density is defined for t > 0 only")
    b = law.beta
    expo = b / (1.0 - b)
    log_t = np.log(t_arr)[..., None]
    log_a = law._log_kernel
    # integrand assembled in log space: A * exp(-A t^-expo) * t^(-1/(1-b))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        arg = np.exp(log_a - expo * log_t)
        vals = np.exp(log_a - arg - log_t / (1.0 - b))
    integral = np.sum(law.quad_weights * vals, axis=-1)
    out = (b / ((1.0 - b) * np.pi)) * integral
    return out if out.ndim else float(out)


def laplace_of_pdf(law: StableLaw, s) -> float:
    """Numerical Laplace transform int_0^inf e^(-st) g_beta(t) dt.

    Substituting t = u/s turns the integral into int e^(-u) g(u/s)/s du,
    which is truncated at u = 45 (tail bound e^-45) and integrated with
    geometrically graded Gauss-Legendre panels.  Must reproduce e^(-s^beta).
    """
    s = float(s)
    if s <= 0:
        raise ValueError("Laplace variable must be positive")
    x, w = leggauss(20)
    edges = np.concatenate([[0.0], np.geomspace(1e-8, 45.0, 40)])
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    u = (mids[:, None] + halfs[:, None] * x).ravel()
    wu = (halfs[:, None] * w).ravel()
    g = stable_pdf(law, u / s)
    return float(np.sum(wu * np.exp(-u) * g / s))


def inverse_subordinator_pdf(law: InverseSubordinatorLaw, s):
    """Hitting-time density q(t, s) = (t/beta) g_beta(t s^(-1/beta)) s^(-1/beta-1).

    The s = 0 edge takes the analytic limit t^(-beta)/Gamma(1-beta); for
    beta = 1/2 the whole density collapses to the half-normal
    2/sqrt(4 pi t) * exp(-s^2/(4t)).
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("hitting-time density is supported on s >= 0")
    b = law.base.beta
    t = law.t
    out = np.empty(s_arr.shape, dtype=float)
    at_zero = s_arr == 0.0
    out[at_zero] = t ** (-b) / gamma_fn(1.0 - b)
    if np.any(~at_zero):
        sp = s_arr[~at_zero]
        x = t * sp ** (-1.0 / b)
        out[~at_zero] = (t / b) * stable_pdf(law.base, x) * sp ** (-1.0 / b - 1.0)
    return out if out.ndim else float(out)


def sample_stable(law: StableLaw, rng: np.random.Generator, size=None):
    """Draw D_1 via the Kanter product representation.

    U ~ Unif(0, pi) and W ~ Exp(1) give D_1 = (A(U)/W)^((1-beta)/beta),
    exact in law; no rejection step is involved.
    """
    b = law.beta
    u = rng.uniform(0.0, np.pi, size=size)
    w = rng.standard_exponential(size=size)
    log_a = _kanter_log_kernel(b, np.asarray(u))
    return np.exp((1.0 - b) / b * (log_a - np.log(w)))


def sample_inverse_subordinator(law: StableLaw, t: float, rng: np.random.Generator, size=None):
    """Draw the one-dimensional marginal E_t = (t / D_1)^beta.

    Only the fixed-t marginal is produced, not a path; for beta = 1/2 the
    output is half-normal with scale sqrt(2 t).
    """
    if t <= 0:
        raise ValueError(f"physical time must be positive, got {t}")
    d = sample_stable(law, rng, size=size)
    return (t / d) ** law.beta
