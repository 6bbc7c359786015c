"""Steady-state heat currents and entropy-production rate.

Inverse temperatures are dimensionless (in units of ``1/omega0``), matching
the rate-ratio definition ``gamma_plus / gamma_minus = exp(-beta)``. The
entropy rate ``-sum beta_i Qdot_i / omega0`` is therefore a pure rate.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingBetaError, UnknownBathError
from .lindblad import NEUTRAL, apply_liouvillian

__all__ = ["ThermoReport", "heat_current", "heat_labels", "entropy_rate"]


@dataclass(frozen=True)
class ThermoReport:
    heat_currents: dict = field(default_factory=dict)
    entropy_rate: float = 0.0
    entropy_rate_normalized: float = 0.0
    entropy_rate_normalized_omega0: float = 0.0


def heat_current(sys, rho, label):
    """``Tr{H L_label(rho)}`` summed over every channel carrying ``label``."""
    channels = sys.channels_for(label)
    if not channels:
        raise UnknownBathError(label)
    val = np.trace(sys.hamiltonian @ apply_liouvillian(sys, rho, channels=channels))
    return float(val.real)


def heat_labels(sys):
    """Labels with at least one non-neutral channel, in first-seen order."""
    return tuple(dict.fromkeys(ch.label for ch in sys.channels if ch.direction != NEUTRAL))


def entropy_rate(sys, rho, betas, omega0=1.0, gamma_plus=None):
    """Heat currents of every heat bath and ``-sum beta_i Qdot_i / omega0``.

    Neutral-only labels (dephasing and similar) are excluded unless ``betas``
    names them. ``gamma_plus`` sets the normalization; it defaults to the
    largest absorption rate in ``sys``.
    """
    labels = list(heat_labels(sys))
    labels += [lb for lb in betas if lb not in labels and sys.channels_for(lb)]
    missing = [lb for lb in labels if lb not in betas]
    if missing:
        raise MissingBetaError(f"no beta supplied for bath(s) {missing}")
    currents = {lb: heat_current(sys, rho, lb) for lb in labels}
    sdot = 0.0
    for lb in labels:
        q = currents[lb]
        # -inf * 0 is 0: a bath with no net current produces no entropy
        if q != 0.0:
            sdot -= betas[lb] * q / omega0
    if gamma_plus is None:
        gamma_plus = max(
            (ch.rate for ch in sys.channels if ch.direction == "absorption"), default=1.0
        )
    return ThermoReport(
        heat_currents=currents,
        entropy_rate=sdot,
        entropy_rate_normalized=sdot / gamma_plus,
        entropy_rate_normalized_omega0=sdot / (gamma_plus * omega0),
    )
