"""Two incoherently pumped qubits in a lossy cavity (Tavis-Cummings model).

Hilbert space ordering is ``qubit 1 x qubit 2 x cavity`` with the cavity
truncated to ``n_max`` photons, so the dimension is ``4 (n_max + 1)``.
Everything is solved in the lab frame; pick ``omega0 = 1`` as energy unit.
"""

from dataclasses import dataclass, replace
import math
import warnings

import numpy as np

from .concurrence import TwoQubitState, concurrence
from .diamond import DiamondSpec, LOWERING, analytic_concurrence
from .errors import DimensionError, MapUndefinedError, NoConvergenceError
from .linalg import partial_trace
from .lindblad import ABSORPTION, EMISSION, NEUTRAL, LindbladChannel, OpenSystem, steady_state

__all__ = [
    "CavitySpec",
    "MappedEffectiveParams",
    "build_tavis_cummings",
    "adiabatic_map",
    "effective_concurrence",
    "qubits_reduced_state",
    "converged_steady_state",
    "CavityPoint",
    "solve_point",
    "DEFAULT_LADDER",
]

DEFAULT_LADDER = (2, 4, 6, 8, 10, 12, 14, 15)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class CavitySpec:
    """Parameters of the cavity model; rates in the same units as ``omega0``.

    Dephasing enters as ``gamma_z (sz rho sz - rho)`` per qubit, detuning
    as qubit energies ``omega0 +/- delta`` and the cavity pump ``p_c`` as an
    absorption channel on the photon mode.
    """

    g: float
    kappa: float
    p: float
    gamma: float = 0.0
    omega0: float = 1.0
    omega_cav: float | None = None
    gamma_z: float = 0.0
    delta: float = 0.0
    p_c: float = 0.0
    n_max: int = 5

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be > 0")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError("g must be finite and >= 0")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        for name in ("p", "gamma", "gamma_z", "p_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0")
        if int(self.n_max) < 1:
            raise ValueError("n_max must be >= 1")
        if self.omega_cav is None:
            object.__setattr__(self, "omega_cav", self.omega0)
        if self.g / self.omega0 > 0.01:
            warnings.warn(
                f"g/omega0 = {self.g / self.omega0:.3g} > 0.01: rotating-wave approximation is doubtful",
                stacklevel=2,
            )

    @property
    def dims(self):
        return (2, 2, int(self.n_max) + 1)


@dataclass(frozen=True)
class MappedEffectiveParams:
    gamma_plus: float
    gamma_minus_A: float
    gamma_minus_S: float
    beta_A: float
    beta_S: float
    Gamma: float
    valid: bool

    def diamond_spec(self, omega0=1.0):
        return DiamondSpec(
            omega0=omega0,
            gamma_plus=self.gamma_plus,
            gamma_minus_S=self.gamma_minus_S,
            gamma_minus_A=self.gamma_minus_A,
        )


def _operators(spec):
    n = int(spec.n_max) + 1
    e2, en = np.eye(2), np.eye(n)
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    c1 = np.kron(np.kron(LOWERING, e2), en)
    c2 = np.kron(np.kron(e2, LOWERING), en)
    am = np.kron(np.eye(4), a)
    z1 = np.kron(np.kron(SIGMA_Z, e2), en)
    z2 = np.kron(np.kron(e2, SIGMA_Z), en)
    return c1, c2, am, z1, z2


def build_tavis_cummings(spec):
    c1, c2, a, z1, z2 = _operators(spec)
    n1 = c1.conj().T @ c1
    n2 = c2.conj().T @ c2
    coupling = sum(c.conj().T @ a + c @ a.conj().T for c in (c1, c2))
    h = (
        (spec.omega0 + spec.delta) * n1
        + (spec.omega0 - spec.delta) * n2
        + spec.omega_cav * (a.conj().T @ a)
        + spec.g * coupling
    )
    channels = (
        LindbladChannel("qubit-1", ABSORPTION, c1.conj().T, spec.p),
        LindbladChannel("qubit-2", ABSORPTION, c2.conj().T, spec.p),
        LindbladChannel("qubit-1", EMISSION, c1, spec.gamma),
        LindbladChannel("qubit-2", EMISSION, c2, spec.gamma),
        LindbladChannel("cavity", EMISSION, a, spec.kappa),
        LindbladChannel("cavity", ABSORPTION, a.conj().T, spec.p_c),
        # (r/2) D_sz(rho) = r (sz rho sz - rho), so rate gamma_z is exact
        LindbladChannel("dephase-1", NEUTRAL, z1, spec.gamma_z),
        LindbladChannel("dephase-2", NEUTRAL, z2, spec.gamma_z),
    )
    return OpenSystem(hamiltonian=h, channels=channels)


def adiabatic_map(spec):
    """Effective collective-bath rates after eliminating the cavity.

    ``Gamma = 4 g^2 / kappa``; ``valid`` is ``kappa / g > 1``.

    Raises
    ------
    MapUndefinedError
        When ``p == 0`` (temperatures undefined); the rates are attached as
        ``exc.params``.
    """
    big_gamma = 4 * spec.g**2 / spec.kappa
    gp = spec.p / 2
    gma = spec.gamma / 2
    gms = big_gamma + spec.gamma / 2
    valid = spec.kappa / spec.g > 1
    if spec.p == 0:
        params = MappedEffectiveParams(gp, gma, gms, math.nan, math.nan, big_gamma, valid)
        raise MapUndefinedError("effective temperatures need p > 0", params)
    beta_a = math.log(spec.gamma / spec.p) if spec.gamma > 0 else -math.inf
    beta_s = math.log((spec.gamma + 2 * big_gamma) / spec.p)
    return MappedEffectiveParams(gp, gma, gms, beta_a, beta_s, big_gamma, valid)


def effective_concurrence(spec):
    """Closed-form diamond concurrence at the adiabatically mapped parameters."""
    m = adiabatic_map(spec)
    return analytic_concurrence(m.beta_A, m.beta_S)


def qubits_reduced_state(rho_full, n_max):
    rho_full = np.asarray(rho_full)
    d = 4 * (int(n_max) + 1)
    if rho_full.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix for n_max={n_max}, got {rho_full.shape}")
    red = partial_trace(rho_full, (2, 2, int(n_max) + 1), keep=(0, 1))
    return TwoQubitState(0.5 * (red + red.conj().T))


@dataclass(frozen=True, eq=False)
class CavityPoint:
    concurrence: float
    n_used: int
    steady: object
    reduced: TwoQubitState
    history: tuple = ()


def solve_point(spec, c_tol=1e-4, ladder=DEFAULT_LADDER):
    """Convergence ladder over ``n_max`` returning a ``CavityPoint``.

    Solves at each truncation in ``ladder`` until the reduced concurrence
    moves by less than ``c_tol`` between consecutive levels.
    """
    history = []
    prev = None
    for n in ladder:
        sp = replace(spec, n_max=int(n))
        ss = steady_state(build_tavis_cummings(sp))
        red = qubits_reduced_state(ss.rho, n)
        c = concurrence(red)
        history.append((int(n), c))
        if prev is not None and abs(c - prev) < c_tol:
            return CavityPoint(c, int(n), ss, red, tuple(history))
        prev = c
    raise NoConvergenceError(
        f"concurrence not converged to {c_tol} by n_max={ladder[-1]}: history {history}",
        values=tuple(history),
    )


def converged_steady_state(spec, c_tol=1e-4, ladder=DEFAULT_LADDER):
    """``(SteadyState, n_used)`` at the first converged truncation."""
    pt = solve_point(spec, c_tol, ladder)
    return pt.steady, pt.n_used
