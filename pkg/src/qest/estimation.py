"""One-parameter quantum estimation: SLD, Fisher information, optimal estimator.

The symmetric logarithmic derivative L of a family rho_theta solves
``d rho = (L rho + rho L)/2`` and is Hermitian; the quantum Fisher information
is ``tr(rho L^2)``.  For channel families the derivative of the output state
is taken by central differences with one Richardson level, so the pipeline
works for any family with an exact Kraus generator.

Input-state maximization is a deterministic dense search (Fibonacci grid on
the Bloch sphere for qubits, a Schmidt-form grid for qubit + qubit) followed
by Nelder-Mead refinement; the reported value is attained by the returned
state, hence a certified lower bound on the true maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import ChannelFamily, apply_channel
from .errors import DegenerateFamilyError, ParameterRangeError, ValidationError
from .linalg import (
    bloch_to_density,
    check_hermitian,
    dagger,
    fibonacci_sphere,
    hermitian_eig,
    pure_to_density,
)

KERNEL_TOL = 1e-10
DEGENERATE_QFI_TOL = 1e-12


@dataclass(frozen=True)
class EstimationResult:
    """Everything the SLD pipeline knows at one parameter point."""

    theta: float
    rho: np.ndarray
    drho: np.ndarray
    sld: np.ndarray
    qfi: float
    optimal_estimator: np.ndarray | None


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the pure-input maximization."""

    sphere_points: int = 2000
    schmidt_points: int = 20
    refine: bool = True
    refine_tol: float = 1e-9
    refine_maxiter: int = 800


def default_fd_step(theta: float) -> float:
    """Central-difference step balancing truncation against roundoff."""
    return max(1e-5, 1e-3 * abs(theta))


def _sld_from_eigensystem(p, v, drho, kernel_tol):
    """SLD and QFI given the eigensystem of rho; fully batched."""
    dt = dagger(v) @ drho @ v
    denom = p[..., :, None] + p[..., None, :]
    mask = denom > kernel_tol
    lt = np.where(mask, 2.0 * dt / np.where(mask, denom, 1.0), 0.0)
    qfi = np.einsum("...i,...ij->...", p, np.abs(lt) ** 2)
    sld_mat = v @ lt @ dagger(v)
    sld_mat = 0.5 * (sld_mat + dagger(sld_mat))
    return sld_mat, np.real(qfi)


def sld(rho: np.ndarray, drho: np.ndarray, kernel_tol: float = KERNEL_TOL) -> np.ndarray:
    """Symmetric logarithmic derivative of a state and its parameter derivative.

    In the eigenbasis of rho the solution is ``L_ij = 2 d_ij / (p_i + p_j)``
    wherever ``p_i + p_j > kernel_tol``; on the kernel of rho the SLD is not
    determined, and this implementation sets it to zero there.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    check_hermitian(drho, what="drho")
    if rho.shape != drho.shape:
        raise ValidationError(f"rho shape {rho.shape} != drho shape {drho.shape}")
    p, v = hermitian_eig(rho, tol=1e-8)
    mat, _ = _sld_from_eigensystem(p, v, drho, kernel_tol)
    return mat


def qfi(rho: np.ndarray, sld_op: np.ndarray) -> float:
    """Quantum Fisher information ``tr(rho L^2)``."""
    val = float(np.real(np.trace(rho @ sld_op @ sld_op)))
    return 0.0 if -1e-12 < val < 0.0 else val


class QfiEvaluator:
    """Pre-built channel evaluations for one (family, theta) point.

    Channels do not depend on the input state, so the five builds needed for
    the Richardson derivative are done once and then applied to arbitrarily
    large batches of inputs.
    """

    def __init__(self, family: ChannelFamily, theta: float, fd_step: float | None = None):
        h = default_fd_step(theta) if fd_step is None else float(fd_step)
        if h <= 0.0:
            raise ValidationError(f"fd_step must be positive, got {h}")
        if abs(theta) < 10.0 * h:
            raise ParameterRangeError(
                f"theta = {theta} is within 10 finite-difference steps of the "
                "divergent point 0; use the leading-order coefficient instead"
            )
        family.check_parameter(theta + h)
        family.check_parameter(theta - h)
        self.family = family
        self.theta = float(theta)
        self.fd_step = h
        self._ch0 = family.evaluate(theta)
        self._chp = family.evaluate(theta + h)
        self._chm = family.evaluate(theta - h)
        self._chp2 = family.evaluate(theta + h / 2.0)
        self._chm2 = family.evaluate(theta - h / 2.0)

    def output_and_derivative(self, rho_in: np.ndarray):
        h = self.fd_step
        d1 = (apply_channel(self._chp, rho_in) - apply_channel(self._chm, rho_in)) / (2.0 * h)
        d2 = (apply_channel(self._chp2, rho_in) - apply_channel(self._chm2, rho_in)) / h
        drho = (4.0 * d2 - d1) / 3.0
        drho = 0.5 * (drho + dagger(drho))
        return apply_channel(self._ch0, rho_in), drho

    def qfi(self, rho_in: np.ndarray, kernel_tol: float = KERNEL_TOL) -> np.ndarray:
        """QFI of the output family for a batch of input states ``(..., d, d)``."""
        rho, drho = self.output_and_derivative(rho_in)
        p, v = hermitian_eig(rho, tol=1e-8)
        _, vals = _sld_from_eigensystem(p, v, drho, kernel_tol)
        return vals

    def result(self, rho_in: np.ndarray, kernel_tol: float = KERNEL_TOL) -> EstimationResult:
        rho, drho = self.output_and_derivative(rho_in)
        p, v = hermitian_eig(rho, tol=1e-8)
        sld_mat, val = _sld_from_eigensystem(p, v, drho, kernel_tol)
        val = float(val)
        estimator = None
        if val > DEGENERATE_QFI_TOL:
            estimator = sld_mat / val + self.theta * np.eye(rho.shape[-1])
        return EstimationResult(
            theta=self.theta,
            rho=rho,
            drho=drho,
            sld=sld_mat,
            qfi=0.0 if -1e-12 < val < 0.0 else val,
            optimal_estimator=estimator,
        )


def channel_qfi(
    family: ChannelFamily,
    rho_in: np.ndarray,
    theta: float,
    fd_step: float | None = None,
    kernel_tol: float = KERNEL_TOL,
) -> EstimationResult:
    """Exact-output QFI of a channel family at one parameter point.

    Refuses parameter values within ten finite-difference steps of zero,
    where the Fisher information of a noise family diverges like 1/theta and
    differencing is meaningless.
    """
    return QfiEvaluator(family, theta, fd_step).result(rho_in, kernel_tol)


def optimal_estimator(res: EstimationResult, tol: float = DEGENERATE_QFI_TOL) -> np.ndarray:
    """A locally unbiased observable saturating the Cramer-Rao bound.

    Returns ``A = L/J + theta I``.  Off the support of rho the completion is
    a free choice; this one keeps A Hermitian and globally defined.
    """
    if res.qfi <= tol:
        raise DegenerateFamilyError(
            f"QFI = {res.qfi:.3e} carries no information; no estimator exists"
        )
    return res.sld / res.qfi + res.theta * np.eye(res.rho.shape[-1])


def _bloch_angles(x):
    polar = float(np.arccos(np.clip(x[2], -1.0, 1.0)))
    azim = float(np.arctan2(x[1], x[0]))
    return polar, azim


def _bloch_state(polar, azim):
    return np.array(
        [np.cos(polar / 2.0), np.exp(1j * azim) * np.sin(polar / 2.0)], dtype=complex
    )


def _schmidt_states(chi, phi, polar, azim):
    """Pure states of qubit + qubit in Schmidt form, vectorized over inputs.

    The system-side basis is the +/- Bloch pair at (polar, azim); the ancilla
    side uses the computational basis, which is no loss of generality because
    the extended channel acts trivially on the ancilla.
    """
    chi, phi, polar, azim = np.broadcast_arrays(chi, phi, polar, azim)
    u0 = np.stack(
        [np.cos(polar / 2.0) + 0j, np.exp(1j * azim) * np.sin(polar / 2.0)], axis=-1
    )
    u1 = np.stack(
        [-np.exp(-1j * azim) * np.sin(polar / 2.0), np.cos(polar / 2.0) + 0j], axis=-1
    )
    psi = np.zeros(chi.shape + (4,), dtype=complex)
    psi[..., 0:4:2] = np.cos(chi)[..., None] * u0
    psi[..., 1:4:2] = (np.sin(chi) * np.exp(1j * phi))[..., None] * u1
    return psi


def maximize_qfi_pure(
    family: ChannelFamily,
    theta: float,
    dim: int,
    search: SearchConfig | None = None,
    fd_step: float | None = None,
) -> tuple[np.ndarray, float]:
    """Best pure input state found by dense grid search plus local refinement.

    Supports dim 2 (qubit channels) and dim 4 (qubit channels extended by a
    qubit ancilla).  Ties on the grid are broken toward the smallest index,
    and the refinement is seeded from that point, so the result is
    deterministic.
    """
    cfg = search or SearchConfig()
    if dim not in (2, 4):
        raise ValidationError(f"pure-state search supports dim 2 or 4, got {dim}")
    if family.dim != dim:
        raise ValidationError(f"family dimension {family.dim} != requested dim {dim}")
    ev = QfiEvaluator(family, theta, fd_step)

    if dim == 2:
        grid = fibonacci_sphere(cfg.sphere_points)
        vals = ev.qfi(bloch_to_density(grid))
        best = int(np.argmax(vals))
        params = np.array(_bloch_angles(grid[best]))

        def objective(t):
            return -float(ev.qfi(pure_to_density(_bloch_state(t[0], t[1]))))

        if cfg.refine:
            res = minimize(
                objective,
                params,
                method="Nelder-Mead",
                options={
                    "xatol": cfg.refine_tol,
                    "fatol": cfg.refine_tol,
                    "maxiter": cfg.refine_maxiter,
                },
            )
            if -res.fun >= vals[best]:
                params = res.x
        psi = _bloch_state(params[0], params[1])
    else:
        n = cfg.schmidt_points
        chi = np.linspace(0.0, np.pi / 2.0, n)
        polar = np.linspace(0.0, np.pi, n)
        azim = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        cc, pp, aa = np.meshgrid(chi, polar, azim, indexing="ij")
        states = _schmidt_states(cc.ravel(), 0.0, pp.ravel(), aa.ravel())
        vals = ev.qfi(pure_to_density(states))
        best = int(np.argmax(vals))
        params = np.array([cc.ravel()[best], 0.0, pp.ravel()[best], aa.ravel()[best]])

        def objective(t):
            return -float(ev.qfi(pure_to_density(_schmidt_states(t[0], t[1], t[2], t[3]))))

        if cfg.refine:
            res = minimize(
                objective,
                params,
                method="Nelder-Mead",
                options={
                    "xatol": cfg.refine_tol,
                    "fatol": cfg.refine_tol,
                    "maxiter": cfg.refine_maxiter,
                },
            )
            if -res.fun >= vals[best]:
                params = res.x
        psi = _schmidt_states(params[0], params[1], params[2], params[3])

    psi = psi / np.linalg.norm(psi)
    value = float(ev.qfi(pure_to_density(psi)))
    return psi, value
