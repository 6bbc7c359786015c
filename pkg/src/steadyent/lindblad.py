"""Lindblad channels, Liouvillian action, superoperators and exact steady states.

Rate convention: a channel with jump operator ``o`` and rate ``r`` contributes
``(r / 2) * D_o(rho)`` with ``D_o(rho) = 2 o rho o^+ - {o^+ o, rho}``. The
coherent part of the generator is ``i [rho, H]``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSteadyStateError,
    DimensionError,
    HermiticityError,
    NumericalPSDError,
    SingularSystemError,
)
from .linalg import as_matrix, is_hermitian, solve_linear

__all__ = [
    "EMISSION",
    "ABSORPTION",
    "NEUTRAL",
    "LindbladChannel",
    "OpenSystem",
    "SteadyState",
    "dissipator",
    "apply_liouvillian",
    "superoperator",
    "steady_state",
]

EMISSION = "emission"
ABSORPTION = "absorption"
NEUTRAL = "neutral"
DIRECTIONS = (EMISSION, ABSORPTION, NEUTRAL)

PSD_TOL = 1e-9
UNIQUENESS_TOL = 1e-8
# SVD rank probe is only attempted below this superoperator size
_RANK_PROBE_MAX = 1024


@dataclass(frozen=True, eq=False)
class LindbladChannel:
    label: str
    direction: str
    jump: np.ndarray
    rate: float

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        rate = float(self.rate)
        if not np.isfinite(rate) or rate < 0:
            raise ValueError(f"channel {self.label!r}: rate must be finite and >= 0, got {rate}")
        jump = as_matrix(self.jump, "jump")
        if jump.shape[0] != jump.shape[1]:
            raise DimensionError(f"channel {self.label!r}: jump operator must be square")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "jump", jump)


@dataclass(frozen=True, eq=False)
class OpenSystem:
    hamiltonian: np.ndarray
    channels: tuple = ()

    def __post_init__(self):
        h = as_matrix(self.hamiltonian, "hamiltonian")
        if h.shape[0] != h.shape[1]:
            raise DimensionError("hamiltonian must be square")
        if not is_hermitian(h):
            raise HermiticityError("hamiltonian is not Hermitian within 1e-10")
        channels = tuple(self.channels)
        for ch in channels:
            if ch.jump.shape != h.shape:
                raise DimensionError(
                    f"channel {ch.label!r} has dimension {ch.jump.shape[0]}, system has {h.shape[0]}"
                )
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "channels", channels)

    @property
    def dimension(self):
        return self.hamiltonian.shape[0]

    @property
    def labels(self):
        return tuple(dict.fromkeys(ch.label for ch in self.channels))

    @property
    def max_rate(self):
        return max((ch.rate for ch in self.channels), default=0.0)

    def channels_for(self, label):
        return tuple(ch for ch in self.channels if ch.label == label)


@dataclass(frozen=True, eq=False)
class SteadyState:
    rho: np.ndarray
    residual: float
    method: str = "trace-row-replacement"
    dimension: int = 0
    probe_difference: float = 0.0
    info: dict = field(default_factory=dict)


def dissipator(o, rho):
    """``2 o rho o^+ - o^+ o rho - rho o^+ o``."""
    o = as_matrix(o, "o")
    rho = as_matrix(rho, "rho")
    if o.shape != rho.shape or o.shape[0] != o.shape[1]:
        raise DimensionError(f"shape mismatch: o {o.shape}, rho {rho.shape}")
    od = o.conj().T
    odo = od @ o
    return 2.0 * o @ rho @ od - odo @ rho - rho @ odo


def _check_state_dim(sys, rho):
    rho = as_matrix(rho, "rho")
    if rho.shape != (sys.dimension, sys.dimension):
        raise DimensionError(f"rho has shape {rho.shape}, system dimension is {sys.dimension}")
    return rho


def apply_liouvillian(sys, rho, channels=None):
    """Right-hand side of the master equation, ``i[rho, H] + sum (r/2) D(rho)``.

    ``channels`` restricts the dissipative sum (the Hamiltonian part is then
    omitted); used for per-bath heat currents.
    """
    rho = _check_state_dim(sys, rho)
    if channels is None:
        h = sys.hamiltonian
        out = 1j * (rho @ h - h @ rho)
        channels = sys.channels
    else:
        out = np.zeros_like(rho)
    for ch in channels:
        if ch.rate:
            out = out + 0.5 * ch.rate * dissipator(ch.jump, rho)
    return out


def superoperator(sys):
    """Matrix ``F`` with ``F @ rho.ravel() == apply_liouvillian(sys, rho).ravel()``."""
    d = sys.dimension
    eye = np.eye(d)
    h = sys.hamiltonian
    f = 1j * (np.kron(eye, h.T) - np.kron(h, eye))
    for ch in sys.channels:
        if not ch.rate:
            continue
        o = ch.jump
        odo = o.conj().T @ o
        f += 0.5 * ch.rate * (2.0 * np.kron(o, o.conj()) - np.kron(odo, eye) - np.kron(eye, odo.T))
    return f


def _replaced_solve(f, d, row):
    a = f.copy()
    a[row, :] = 0.0
    a[row, :: d + 1] = 1.0
    b = np.zeros(d * d, dtype=complex)
    b[row] = 1.0
    return solve_linear(a, b).reshape(d, d)


def _null_dimension(f):
    s = np.linalg.svd(f, compute_uv=False)
    return int(np.sum(s <= 1e-10 * max(s[0], 1e-300)))


def _clean_density(x):
    rho = 0.5 * (x + x.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or abs(tr) < 1e-300:
        raise SingularSystemError("steady-state candidate has zero trace")
    rho = rho / tr
    w, v = np.linalg.eigh(rho)
    if w[0] < -PSD_TOL:
        raise NumericalPSDError(f"steady state has eigenvalue {w[0]:.3e} < -{PSD_TOL}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
        rho = rho / np.trace(rho).real
    return rho


def steady_state(sys, check_unique=True):
    """Unique stationary density matrix of ``sys``.

    One diagonal-population row of the (max-normalized) superoperator is
    replaced by the trace constraint and the system is solved directly. With
    ``check_unique`` a second solve replaces the last population row instead;
    the two answers only agree when the null space is one-dimensional.

    Raises
    ------
    SingularSystemError
        The trace-constrained system cannot be solved.
    DegenerateSteadyStateError
        More than one independent stationary state was detected.
    """
    d = sys.dimension
    if d == 1:
        return SteadyState(rho=np.ones((1, 1), complex), residual=0.0, dimension=1)
    f = superoperator(sys)
    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        raise DegenerateSteadyStateError("Liouvillian vanishes identically")
    f = f / scale
    try:
        x0 = _replaced_solve(f, d, 0)
        x1 = _replaced_solve(f, d, d * d - 1) if check_unique else x0
    except SingularSystemError:
        if d * d <= _RANK_PROBE_MAX and _null_dimension(f) > 1:
            raise DegenerateSteadyStateError("Liouvillian null space is degenerate") from None
        raise
    rho = _clean_density(x0)
    probe = 0.0
    if check_unique:
        probe = float(np.linalg.norm(rho - _clean_density(x1)))
        if not probe < UNIQUENESS_TOL:
            raise DegenerateSteadyStateError(
                f"independent trace-row solves differ by {probe:.3e}; steady state is not unique"
            )
    residual = float(np.linalg.norm(apply_liouvillian(sys, rho)))
    return SteadyState(rho=rho, residual=residual, dimension=d, probe_difference=probe)
