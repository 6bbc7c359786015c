"""The effective four-level ("diamond") machine with collective baths.

Two degenerate qubits share a symmetric bath coupled through
``J_S = c_1 + c_2`` and an antisymmetric bath coupled through
``J_A = c_1 - c_2``. Each bath pumps at the common rate ``gamma_plus`` and
relaxes at its own rate; the ratio fixes a dimensionless inverse temperature
``beta = ln(gamma_minus / gamma_plus)`` (in units of ``1/omega0``), which may be
negative.
"""

from dataclasses import dataclass
import math

import numpy as np

from .concurrence import concurrence
from .errors import NonFiniteBetaError
from .lindblad import ABSORPTION, EMISSION, LindbladChannel, OpenSystem, steady_state

__all__ = [
    "LOWERING",
    "BELL_BASIS",
    "DiamondSpec",
    "site_lowering_ops",
    "collective_ops",
    "number_operator",
    "rates_from_betas",
    "betas_from_rates",
    "build_diamond",
    "analytic_concurrence",
    "analytic_concurrence_rates",
    "extreme_limit_concurrence",
    "concurrence_vs_numeric",
    "OVERFLOW_BETA",
]

# |0><1| in the (|0>, |1>) basis, |0> = ground
LOWERING = np.array([[0, 1], [0, 0]], dtype=complex)
OVERFLOW_BETA = 700.0

_s = 1 / math.sqrt(2)
# columns |G>, |S>, |A>, |E> over |00>, |01>, |10>, |11>
BELL_BASIS = np.array(
    [
        [1, 0, 0, 0],
        [0, _s, _s, 0],
        [0, _s, -_s, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class DiamondSpec:
    omega0: float = 1.0
    gamma_plus: float = 1.0
    gamma_minus_S: float = 1.0
    gamma_minus_A: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be > 0")
        if not (math.isfinite(self.gamma_plus) and self.gamma_plus > 0):
            raise ValueError("gamma_plus must be finite and > 0")
        for name in ("gamma_minus_S", "gamma_minus_A"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0")


def site_lowering_ops():
    """Per-qubit lowering operators ``(c_1, c_2)`` on the 4-dim product space."""
    eye = np.eye(2)
    return np.kron(LOWERING, eye), np.kron(eye, LOWERING)


def collective_ops():
    """``(J_S, J_A)`` with ``J_S = c_1 + c_2`` and ``J_A = c_1 - c_2``."""
    c1, c2 = site_lowering_ops()
    return c1 + c2, c1 - c2


def number_operator():
    c1, c2 = site_lowering_ops()
    return c1.conj().T @ c1 + c2.conj().T @ c2


def rates_from_betas(beta_A, beta_S, gamma_plus=1.0, omega0=1.0):
    """Decay rates ``gamma_plus * exp(beta)`` for the two collective baths."""
    for name, b in (("beta_A", beta_A), ("beta_S", beta_S)):
        if not math.isfinite(b):
            raise NonFiniteBetaError(f"{name}={b} is not finite; build DiamondSpec from rates")
        if b > OVERFLOW_BETA:
            raise NonFiniteBetaError(f"{name}={b} overflows the decay rate")
    return DiamondSpec(
        omega0=omega0,
        gamma_plus=gamma_plus,
        gamma_minus_S=gamma_plus * math.exp(beta_S),
        gamma_minus_A=gamma_plus * math.exp(beta_A),
    )


def _beta(gamma_minus, gamma_plus):
    return math.log(gamma_minus / gamma_plus) if gamma_minus > 0 else -math.inf


def betas_from_rates(spec):
    """``(beta_A, beta_S)``; a vanishing decay rate maps to ``-inf``."""
    return _beta(spec.gamma_minus_A, spec.gamma_plus), _beta(spec.gamma_minus_S, spec.gamma_plus)


def build_diamond(spec):
    js, ja = collective_ops()
    return OpenSystem(
        hamiltonian=spec.omega0 * number_operator(),
        channels=(
            LindbladChannel("S", ABSORPTION, js.conj().T, spec.gamma_plus),
            LindbladChannel("S", EMISSION, js, spec.gamma_minus_S),
            LindbladChannel("A", ABSORPTION, ja.conj().T, spec.gamma_plus),
            LindbladChannel("A", EMISSION, ja, spec.gamma_minus_A),
        ),
    )


def analytic_concurrence(beta_A, beta_S, with_flag=False):
    """Closed-form steady-state concurrence of the diamond machine.

    Evaluated with every exponential divided by ``exp(m)``,
    ``m = max(0, beta_A, beta_S)``, so the expression stays finite for any
    real betas (``-inf`` is accepted and means a dark decay channel). With
    ``with_flag=True`` returns ``(C, overflow_handled)`` where the flag marks
    inputs whose direct evaluation would overflow (``beta > 700``).
    """
    for b in (beta_A, beta_S):
        if math.isnan(b) or b == math.inf:
            raise NonFiniteBetaError(f"beta={b} is not supported")
    m = max(0.0, beta_A, beta_S)
    xa = math.exp(beta_A - m)
    xs = math.exp(beta_S - m)
    s = math.exp(-m)
    S = xa + xs
    A = abs(xa - xs)
    P = xa * xs
    # P / s, with exponent beta_A + beta_S - m = min(beta_A, beta_S) when m > 0
    expo = beta_A + beta_S - m
    q = math.exp(expo) if expo < OVERFLOW_BETA else math.inf
    n1 = A * abs(S / 2 - s)
    n2 = math.sqrt((S / 2 + s) * (2 * S * S * s + 2 * P * S - 4 * P * s))
    den = s * s + S * S + S * q / 2 + 1.5 * S * s - P
    c = 0.0 if math.isinf(den) else max(0.0, (n1 - n2) / den)
    if with_flag:
        return c, m > OVERFLOW_BETA
    return c


def analytic_concurrence_rates(spec):
    """Closed form evaluated from the rates of ``spec`` (zero decay allowed)."""
    beta_A, beta_S = betas_from_rates(spec)
    return analytic_concurrence(beta_A, beta_S)


def extreme_limit_concurrence(beta_S):
    """Large-``beta_S`` concurrence when the other bath is infinitely inverted."""
    e = math.exp(beta_S)
    den = 1 + e * e + 1.5 * e
    return (0.5 * e * e - e) / den - e * math.sqrt(e + 2) / den


def concurrence_vs_numeric(beta_A, beta_S, gamma_plus=1.0, omega0=1.0):
    """``(closed form, Wootters concurrence of the solved steady state)``."""
    spec = rates_from_betas(beta_A, beta_S, gamma_plus, omega0)
    ss = steady_state(build_diamond(spec))
    return analytic_concurrence(beta_A, beta_S), concurrence(ss.rho)
