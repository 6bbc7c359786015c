"""Wootters concurrence of two-qubit density matrices.

Basis order is ``|00>, |01>, |10>, |11>`` throughout the package, with ``|0>``
the qubit ground state.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, HermiticityError, NotXStateError, NumericalPSDError
from .linalg import as_matrix, eig_general, is_hermitian

__all__ = ["TwoQubitState", "SIGMA_Y", "spin_flip", "concurrence", "concurrence_x"]

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(SIGMA_Y, SIGMA_Y)

_EIG_NEG_TOL = 1e-8
_X_PATTERN_TOL = 1e-10
# entries allowed to be nonzero in an X state of this package's form
_X_MASK = np.eye(4, dtype=bool)
_X_MASK[1, 2] = _X_MASK[2, 1] = True


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Validated 4x4 density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho, "rho")
        if rho.shape != (4, 4):
            raise DimensionError(f"two-qubit state must be 4x4, got {rho.shape}")
        if not is_hermitian(rho):
            raise HermiticityError("two-qubit state is not Hermitian within 1e-10")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValueError(f"two-qubit state has trace {np.trace(rho).real:.12g}")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -1e-9:
            raise NumericalPSDError("two-qubit state is not positive semidefinite")
        object.__setattr__(self, "rho", rho)


def _rho(state):
    if isinstance(state, TwoQubitState):
        return state.rho
    rho = as_matrix(state, "rho")
    if rho.shape != (4, 4):
        raise DimensionError(f"two-qubit state must be 4x4, got {rho.shape}")
    return rho


def spin_flip(state):
    """``(sigma_y x sigma_y) rho^* (sigma_y x sigma_y)``."""
    rho = _rho(state)
    return _YY @ rho.conj() @ _YY


def concurrence(state):
    rho = _rho(state)
    ev = eig_general(rho @ spin_flip(rho)).values
    if ev.real.min() < -_EIG_NEG_TOL:
        raise NumericalPSDError(
            f"rho * rho_tilde has eigenvalue {ev.real.min():.3e}; input is not a valid state"
        )
    lam = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_x(state):
    """Closed form ``2 max(0, |rho_c| - sqrt(rho_00 rho_11))`` for X states.

    Only the diagonal and the ``|01><10|`` coherence may be nonzero.
    """
    rho = _rho(state)
    stray = np.abs(rho[~_X_MASK])
    if stray.size and stray.max() > _X_PATTERN_TOL:
        raise NotXStateError(f"entry of magnitude {stray.max():.3e} outside the X pattern")
    p00 = max(rho[0, 0].real, 0.0)
    p11 = max(rho[3, 3].real, 0.0)
    return float(2.0 * max(0.0, abs(rho[1, 2]) - np.sqrt(p00 * p11)))
