"""Power kernels |x|^q, their derivatives, and the attraction potential.

The drift generated by the datum is U = psi_a' * omega, which is Lipschitz;
its constant doubles as the step-size guard for the integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measures import MassQuadrature

__all__ = [
    "Exponents",
    "AttractionPotential",
    "psi",
    "psi_prime",
    "psi_double_prime",
    "attraction_U",
    "lipschitz_lambda",
]


@dataclass(frozen=True)
class Exponents:
    """Kernel exponent pair, restricted to 1 <= q_r <= q_a <= 2."""

    q_a: float
    q_r: float

    def __post_init__(self):
        if not (1.0 <= self.q_r <= self.q_a <= 2.0):
            raise ValueError(
                f"exponents must satisfy 1 <= q_r <= q_a <= 2, "
                f"got q_a={self.q_a}, q_r={self.q_r}"
            )

    @property
    def regime(self):
        return "balanced" if self.q_r == self.q_a else "attraction_dominated"


def _check_q(q):
    if not 1.0 <= q <= 2.0:
        raise ValueError(f"exponent {q} outside [1, 2]")


def psi(q, x):
    """|x|^q."""
    _check_q(q)
    return np.abs(x) ** q


def psi_prime(q, x):
    """q sgn(x) |x|^{q-1}, with psi'(0) = 0 for every q (sgn(0) = 0)."""
    _check_q(q)
    x = np.asarray(x, dtype=float)
    if q == 2.0:
        out = 2.0 * x
    elif q == 1.0:
        out = np.sign(x)
    else:
        out = q * np.sign(x) * np.abs(x) ** (q - 1.0)
    return out if out.ndim else float(out)


def psi_double_prime(q, x):
    """q(q-1)|x|^{q-2}; singular at 0 for q < 2."""
    _check_q(q)
    x = np.asarray(x, dtype=float)
    if q < 2.0 and np.any(x == 0.0):
        raise ValueError(f"second derivative of |x|^{q} undefined at 0")
    if q == 2.0:
        out = np.full_like(x, 2.0)
    else:
        out = q * (q - 1.0) * np.abs(x) ** (q - 2.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AttractionPotential:
    """Precomputed drift U = psi_a' * omega with its Lipschitz constant.

    For q_a = 1 the exact CDF form U = 2G - m is used instead of quadrature.
    """

    profile: object
    q_a: float
    quad: MassQuadrature
    y_nodes: np.ndarray = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self):
        _check_q(self.q_a)
        y = np.asarray(self.profile.quantile(self.quad.nodes), dtype=float)
        y.setflags(write=False)
        object.__setattr__(self, "y_nodes", y)
        object.__setattr__(self, "lam", _lipschitz_bound(self.profile, self.q_a))

    @classmethod
    def build(cls, profile, q_a, quad=None, num_nodes=None):
        if quad is None:
            quad = MassQuadrature.midpoint(profile, num_nodes or 400)
        return cls(profile, q_a, quad)

    def __call__(self, x):
        return attraction_U(self, x)


def _lipschitz_bound(profile, q_a):
    # Upper bounds for Lip(U); any valid bound works as a dt guard.
    rho = profile.density_bound
    m = profile.mass
    if q_a == 1.0:
        return 2.0 * rho
    if q_a == 2.0:
        return 2.0 * m
    return q_a * (q_a - 1.0) * (2.0 / (q_a - 1.0) * rho + m)


def attraction_U(pot, x):
    """Evaluate U at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    q_a = pot.q_a
    if q_a == 1.0:
        out = 2.0 * np.asarray(pot.profile.cdf(x)) - pot.profile.mass
    elif q_a == 2.0:
        # quadrature of 2(x - y) collapses to an affine function
        wy = np.dot(pot.quad.weights, pot.y_nodes)
        out = 2.0 * (pot.quad.total * x - wy)
    else:
        diff = x[..., None] - pot.y_nodes
        out = np.sum(pot.quad.weights * psi_prime(q_a, diff), axis=-1)
    out = np.asarray(out)
    return out if out.ndim else float(out)


def lipschitz_lambda(pot):
    return pot.lam
