"""Dense complex linear-algebra kernel.

Operators, density matrices and superoperators are plain two-dimensional
``complex128`` numpy arrays. Vectorization is row-major: ``|i><j|`` maps to
index ``i*d + j``, so ``A @ rho @ B`` becomes ``kron(A, B.T) @ rho.ravel()``.
"""

from dataclasses import dataclass
import warnings

import numpy as np
import scipy.linalg as la

from .errors import DimensionError, HermiticityError, SingularSystemError

__all__ = [
    "Spectrum",
    "as_matrix",
    "kron",
    "dagger",
    "partial_trace",
    "eig_hermitian",
    "eig_general",
    "solve_linear",
    "is_hermitian",
    "HERMITICITY_TOL",
]

HERMITICITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10
SOLVE_TOL = 1e-10
DEFECTIVE_COND = 1e12


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending by real part with matching eigenvector columns.

    ``vectors`` is ``None`` when the input was flagged as (numerically)
    defective; the eigenvalues are still meaningful in that case.
    """

    values: np.ndarray
    vectors: np.ndarray | None
    defective: bool = False

    def __len__(self):
        return len(self.values)


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex array, raising on anything else."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _square(a, name):
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def kron(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def dagger(a):
    return as_matrix(a).conj().T


def is_hermitian(a, tol=HERMITICITY_TOL):
    m = np.asarray(a)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol * scale)


def partial_trace(rho, dims, keep):
    """Reduce ``rho`` on a tensor product of subsystems with sizes ``dims``.

    Parameters
    ----------
    rho : array_like
        Square matrix of dimension ``prod(dims)``.
    dims : sequence of int
        Subsystem dimensions, first factor leftmost in the Kronecker product.
    keep : iterable of int
        Indices of the subsystems that survive. Their relative order in the
        output follows ``dims``, not the order given here.
    """
    rho = _square(rho, "rho")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(
            f"rho of dimension {rho.shape[0]} does not match subsystem dims {dims}"
        )
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep={keep} must be a non-empty subset of 0..{len(dims) - 1}")
    drop = [i for i in range(len(dims)) if i not in keep]
    n = len(dims)
    t = rho.reshape(dims + dims)
    order = keep + drop
    t = t.transpose(order + [n + i for i in order])
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.trace(t, axis1=1, axis2=3)


def eig_hermitian(a):
    """Real spectrum and orthonormal eigenvectors of a Hermitian matrix."""
    m = _square(a, "a")
    if not is_hermitian(m):
        raise HermiticityError("input is not Hermitian within tolerance 1e-10")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    order = np.argsort(w, kind="stable")[::-1]
    return Spectrum(values=w[order], vectors=v[:, order])


def eig_general(a):
    """Eigenvalues (and, when well defined, eigenvectors) of any square matrix."""
    m = _square(a, "a")
    w, v = np.linalg.eig(m)
    order = np.lexsort((-w.imag, -w.real))
    w, v = w[order], v[:, order]
    defective = bool(np.linalg.cond(v) > DEFECTIVE_COND) if m.size else False
    return Spectrum(values=w, vectors=None if defective else v, defective=defective)


def solve_linear(a, b):
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Raises
    ------
    SingularSystemError
        If LAPACK reports a singular or badly conditioned matrix, or the
        relative residual exceeds 1e-10.
    """
    a = _square(a, "a")
    b_arr = np.asarray(b, dtype=complex)
    if b_arr.shape[0] != a.shape[0]:
        raise DimensionError(f"right-hand side has {b_arr.shape[0]} rows, expected {a.shape[0]}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", la.LinAlgWarning)
            x = la.solve(a, b_arr, check_finite=False)
    except (la.LinAlgError, la.LinAlgWarning) as exc:
        raise SingularSystemError(str(exc)) from exc
    resid = np.linalg.norm(a @ x - b_arr)
    bound = SOLVE_TOL * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b_arr))
    if not np.isfinite(resid) or resid > bound:
        raise SingularSystemError(f"residual {resid:.3e} exceeds bound {bound:.3e}")
    return x
