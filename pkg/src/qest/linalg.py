"""Dense complex linear algebra for small quantum systems (dimension <= 8).

Everything works on plain numpy arrays.  Matrices are complex and row-major.
Most routines accept a stack of matrices (shape ``(..., n, n)``) and broadcast
over the leading axes; the batched form is what makes grid searches over
thousands of input states affordable.

The eigensolver is a cyclic complex Jacobi iteration rather than a LAPACK
call.  At these dimensions it is exact to working precision, has no
backend-dependent sign or ordering ambiguity, and vectorizes cleanly over a
batch, which keeps every result bit-reproducible across platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, ValidationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
ID2 = np.eye(2, dtype=complex)

#: default tolerance for "is this matrix Hermitian" checks (max-abs deviation)
HERMITIAN_TOL = 1e-9

#: eigenvalues of a density operator may dip this far below zero before we
#: reject it (finite-precision channel outputs land here routinely)
PSD_TOL = 1e-9

_JACOBI_MAX_SWEEPS = 60
_JACOBI_OFF_TOL = 1e-14


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose, broadcasting over leading axes."""
    return np.conj(np.swapaxes(m, -1, -2))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL, what: str = "matrix") -> None:
    """Raise ValidationError unless ``m`` equals its conjugate transpose within ``tol``."""
    m = np.asarray(m)
    if m.shape[-1] != m.shape[-2]:
        raise ValidationError(f"{what} must be square, got shape {m.shape}")
    dev = float(np.max(np.abs(m - dagger(m))))
    if dev > tol:
        raise ValidationError(
            f"{what} is not Hermitian: max |M - M^dag| = {dev:.3e} exceeds {tol:.3e}"
        )


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Apply one batched complex Jacobi rotation zeroing a[..., p, q] in place."""
    apq = a[..., p, q].copy()
    absq = np.abs(apq)
    active = absq > 1e-300
    safe = np.where(active, absq, 1.0)
    phase = np.where(active, apq / safe, 1.0 + 0.0j)

    app = a[..., p, p].real
    aqq = a[..., q, q].real
    tau = (aqq - app) / (2.0 * safe)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    with np.errstate(over="ignore"):
        denom = np.abs(tau) + np.sqrt(1.0 + tau * tau)
    t = -sign / denom  # an overflowing denominator correctly yields t = 0
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    c = np.where(active, c, 1.0)
    s = np.where(active, s, 0.0)

    # unitary block R = [[phase*c, -phase*s], [s, c]] on the (p, q) plane
    fc = (phase * c)[..., None]
    fs = (phase * s)[..., None]
    c_ = c[..., None]
    s_ = s[..., None]

    colp = a[..., :, p].copy()
    colq = a[..., :, q].copy()
    a[..., :, p] = colp * fc + colq * s_
    a[..., :, q] = -colp * fs + colq * c_

    rowp = a[..., p, :].copy()
    rowq = a[..., q, :].copy()
    a[..., p, :] = np.conj(fc) * rowp + s_ * rowq
    a[..., q, :] = -np.conj(fs) * rowp + c_ * rowq

    vcp = v[..., :, p].copy()
    vcq = v[..., :, q].copy()
    v[..., :, p] = vcp * fc + vcq * s_
    v[..., :, q] = -vcp * fs + vcq * c_


def _max_offdiag(a: np.ndarray) -> float:
    n = a.shape[-1]
    iu, ju = np.triu_indices(n, k=1)
    if iu.size == 0:
        return 0.0
    return float(np.max(np.abs(a[..., iu, ju])))


def hermitian_eig(m: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix (or stack of them).

    Parameters
    ----------
    m : array, shape (..., n, n)
        Hermitian within ``tol`` (max-abs deviation).
    tol : float
        Hermiticity tolerance.

    Returns
    -------
    eigenvalues : real array, shape (..., n), ascending
    eigenvectors : complex array, shape (..., n, n)
        Orthonormal columns, ``m = V diag(w) V^dag``.  Each column's
        largest-magnitude component is made real and positive so the
        output is reproducible.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    check_hermitian(a, tol=tol)

    n = a.shape[-1]
    a = 0.5 * (a + dagger(a))  # kill roundoff-level asymmetry before iterating
    v = np.zeros_like(a)
    v[...] = np.eye(n)

    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    threshold = _JACOBI_OFF_TOL * scale
    converged = n <= 1
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _max_offdiag(a) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    if not converged:
        raise ConvergenceError("Jacobi eigensolver did not converge")

    w = np.real(np.einsum("...ii->...i", a))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)

    # phase convention: largest-magnitude component of each column real positive
    idx = np.argmax(np.abs(v), axis=-2)
    lead = np.take_along_axis(v, idx[..., None, :], axis=-2)[..., 0, :]
    phase = lead / np.abs(lead)
    v = v * np.conj(phase)[..., None, :]
    return w, v


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a (x) b`` of two matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m: np.ndarray, dim_s: int, dim_a: int, keep: str = "S") -> np.ndarray:
    """Trace out one tensor factor of an operator on a dim_s*dim_a space.

    ``keep="S"`` sums over the ancilla indices and returns a dim_s matrix;
    ``keep="A"`` does the opposite.  Accepts stacked input ``(..., D, D)``.
    """
    m = np.asarray(m, dtype=complex)
    d = dim_s * dim_a
    if m.shape[-1] != d or m.shape[-2] != d:
        raise ValidationError(
            f"operator shape {m.shape} does not match dim_s*dim_a = {dim_s}*{dim_a}"
        )
    t = m.reshape(*m.shape[:-2], dim_s, dim_a, dim_s, dim_a)
    if keep == "S":
        return np.einsum("...iaja->...ij", t)
    if keep == "A":
        return np.einsum("...iaib->...ab", t)
    raise ValidationError(f'keep must be "S" or "A", got {keep!r}')


def pauli_decompose(m: np.ndarray) -> tuple[complex, complex, complex, complex]:
    """Coefficients (m0, m1, m2, m3) with ``m = m0 I + m1 sx + m2 sy + m3 sz``.

    The expansion is unique for any 2x2 complex matrix; coefficients are
    m0 = tr(m)/2 and ma = tr(sigma_a m)/2.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValidationError(f"pauli_decompose needs a 2x2 matrix, got shape {m.shape}")
    m0 = 0.5 * (m[0, 0] + m[1, 1])
    m1 = 0.5 * (m[0, 1] + m[1, 0])
    m2 = 0.5 * (1j * m[0, 1] - 1j * m[1, 0])
    m3 = 0.5 * (m[0, 0] - m[1, 1])
    return complex(m0), complex(m1), complex(m2), complex(m3)


def bloch_to_density(x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Density matrix ``(I + x . sigma)/2`` for a Bloch vector (or stack of them)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValidationError(f"Bloch vector needs 3 components, got shape {x.shape}")
    norm = np.linalg.norm(x, axis=-1)
    if np.any(norm > 1.0 + tol):
        raise ValidationError(f"Bloch vector norm {float(np.max(norm)):.12f} exceeds 1")
    eye = np.broadcast_to(ID2, x.shape[:-1] + (2, 2))
    return 0.5 * (
        eye
        + x[..., 0, None, None] * SIGMA_X
        + x[..., 1, None, None] * SIGMA_Y
        + x[..., 2, None, None] * SIGMA_Z
    )


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Inverse of :func:`bloch_to_density`; exact round trip to working precision."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (2, 2):
        raise ValidationError(f"expected a 2x2 density matrix, got shape {rho.shape}")
    x = np.stack(
        [
            np.real(rho[..., 0, 1] + rho[..., 1, 0]),
            np.real(1j * rho[..., 0, 1] - 1j * rho[..., 1, 0]),
            np.real(rho[..., 0, 0] - rho[..., 1, 1]),
        ],
        axis=-1,
    )
    return x


def check_density(rho: np.ndarray, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL) -> None:
    """Validate a density operator: Hermitian, unit trace, eigenvalues >= -psd_tol."""
    rho = np.asarray(rho, dtype=complex)
    check_hermitian(rho, tol=tol, what="density operator")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > max(tol, 1e-9):
        raise ValidationError(f"density operator trace {tr} is not 1")
    w, _ = hermitian_eig(rho, tol=max(tol, 1e-8))
    if float(np.min(w)) < -psd_tol:
        raise ValidationError(f"density operator has eigenvalue {float(np.min(w)):.3e} < -{psd_tol:.1e}")


def check_pure(psi: np.ndarray, tol: float = 1e-9) -> None:
    """Validate a pure-state amplitude vector (unit Euclidean norm)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError(f"expected an amplitude vector, got shape {psi.shape}")
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > tol:
        raise ValidationError(f"state vector norm {nrm:.12f} is not 1")


def pure_to_density(psi: np.ndarray) -> np.ndarray:
    """Projector ``|psi><psi|`` for amplitude vectors, batched over leading axes."""
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def fibonacci_sphere(n: int) -> np.ndarray:
    """A deterministic, nearly uniform grid of ``n`` points on the unit sphere."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
