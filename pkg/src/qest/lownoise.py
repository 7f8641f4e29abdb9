"""Leading-order Fisher coefficients and the qubit enhancement geometry.

For a low-noise family the output QFI diverges like ``L/eps``; the leading
coefficient at input rho is

    L(rho) = sum_alpha [ tr(rho M^dag M) - |tr(rho M)|^2 ]

with M the noise operators.  On a qubit this reduces to a quadratic form on
the Bloch ball: writing each M in the Pauli basis gives three complex vectors
mu_a, their Gram matrix g, its real part H (positive semidefinite) and the
axial vector J built from its imaginary part, and then

    L(x) = tr H - x.H x - 2 J.x .

The enhancement factor eta is the ratio of the maximum of L over the solid
ball (reduced states of ancilla-extended pure inputs) to the maximum over the
unit sphere (unextended pure inputs).  For every qubit channel it lies in
[1, 3/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DegenerateChannelError,
    SingularGeometryError,
    ValidationError,
)
from .linalg import (
    bloch_to_density,
    dagger,
    fibonacci_sphere,
    hermitian_eig,
    pauli_decompose,
    tensor_product,
)

REGIME_J_ZERO = "J_ZERO"
REGIME_INSIDE_BALL = "INSIDE_BALL"
REGIME_OUTSIDE_BALL = "OUTSIDE_BALL"
REGIME_SINGULAR_H = "SINGULAR_H"

METHOD_CLOSED_FORM = "CLOSED_FORM"
METHOD_DIRECT = "DIRECT"
METHOD_BOTH = "BOTH"

#: relative eigenvalue floor below which H counts as singular
SINGULAR_REL_TOL = 1e-12
#: grid size for the cross-check inside the sphere minimizer
CROSS_CHECK_POINTS = 10_000


@dataclass(frozen=True)
class NoiseGeometry:
    """Pauli-basis reduction of a set of qubit noise operators.

    ``mu[a - 1]`` holds the sigma_a coefficients of every noise operator,
    ``g`` is their Hermitian Gram matrix, ``h`` its real part and ``jvec``
    the vector (Im g_23, Im g_31, Im g_12).
    """

    mu: np.ndarray
    g: np.ndarray
    h: np.ndarray
    jvec: np.ndarray


@dataclass(frozen=True)
class EnhancementReport:
    """Result of the ancilla-enhancement analysis of one qubit channel."""

    eta: float
    regime: str
    leading_pure: float
    leading_extended: float
    x_sphere: np.ndarray
    x_ball: np.ndarray
    method: str
    agreement: float | None = None

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "regime": self.regime,
            "leading_pure": self.leading_pure,
            "leading_extended": self.leading_extended,
            "x_sphere": [float(c) for c in self.x_sphere],
            "x_ball": [float(c) for c in self.x_ball],
            "method": self.method,
            "agreement": self.agreement,
        }


def _as_noise_ops(noise_ops, dim=None):
    ms = [np.asarray(m, dtype=complex) for m in noise_ops]
    if not ms:
        raise ValidationError("need at least one noise operator")
    d = ms[0].shape[0] if dim is None else dim
    for m in ms:
        if m.shape != (d, d):
            raise ValidationError(f"noise operator shape {m.shape} does not match dim {d}")
    return ms, d


def leading_qfi_coefficient(noise_ops, rho: np.ndarray) -> float:
    """Coefficient of the 1/eps divergence of the QFI at input ``rho``.

    Accepts a stack of states ``(..., d, d)`` and then returns an array.
    """
    ms, d = _as_noise_ops(noise_ops)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (d, d):
        raise ValidationError(f"state shape {rho.shape} does not match dim {d}")
    total = np.zeros(rho.shape[:-2])
    for m in ms:
        quad = np.real(np.einsum("...ij,ji->...", rho, dagger(m) @ m))
        lin = np.einsum("...ij,ji->...", rho, m)
        total = total + quad - np.abs(lin) ** 2
    if total.ndim == 0:
        val = float(total)
        return 0.0 if -1e-14 < val < 0.0 else val
    return total


def noise_geometry(noise_ops) -> NoiseGeometry:
    """Pauli reduction (mu, g, H, J) of qubit noise operators."""
    ms, d = _as_noise_ops(noise_ops)
    if d != 2:
        raise ValidationError(f"noise geometry is defined for qubits only, got dim {d}")
    mu = np.zeros((3, len(ms)), dtype=complex)
    for alpha, m in enumerate(ms):
        _, m1, m2, m3 = pauli_decompose(m)
        mu[:, alpha] = (m1, m2, m3)
    g = np.conj(mu) @ mu.T
    h = g.real.copy()
    h = 0.5 * (h + h.T)
    jvec = np.array([g[1, 2].imag, g[2, 0].imag, g[0, 1].imag])
    return NoiseGeometry(mu=mu, g=g, h=h, jvec=jvec)


def quadratic_form(geom: NoiseGeometry, x: np.ndarray) -> float:
    """Leading coefficient as a quadratic form, ``tr H - x.H x - 2 J.x``.

    Agrees with :func:`leading_qfi_coefficient` at ``rho = (I + x.sigma)/2``
    to working precision; accepts a stack of Bloch vectors ``(..., 3)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValidationError(f"Bloch vector needs 3 components, got shape {x.shape}")
    val = (
        np.trace(geom.h)
        - np.einsum("...i,ij,...j->...", x, geom.h, x)
        - 2.0 * np.einsum("i,...i->...", geom.jvec, x)
    )
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# minimum of x.Hx + 2c.x over the unit sphere
# ---------------------------------------------------------------------------


def _quad(h_mat, c, x):
    return float(x @ h_mat @ x + 2.0 * c @ x)


def _polish_on_sphere(h_mat, c, x0, iters=60):
    """Local refinement of a sphere-constrained quadratic minimum.

    Projected Newton steps in the tangent plane with a decrease guard; a
    Tikhonov-regularized retry handles flat valleys (near-degenerate
    spectra), and halved gradient steps are the last resort.
    """
    x = x0 / np.linalg.norm(x0)
    best = _quad(h_mat, c, x)
    eye = np.eye(3)
    hscale = max(float(np.max(np.abs(h_mat))), 1e-300)
    for _ in range(iters):
        grad = h_mat @ x + c
        lam = x @ grad
        rgrad = grad - lam * x
        if np.linalg.norm(rgrad) < 1e-16 * max(hscale, abs(lam)):
            break
        # orthonormal tangent basis via the least-aligned coordinate axis
        k = int(np.argmin(np.abs(x)))
        t1 = eye[k] - x[k] * x
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(x, t1)
        t_basis = np.stack([t1, t2], axis=1)
        red_h = t_basis.T @ (h_mat - lam * eye) @ t_basis
        rhs = -(t_basis.T @ grad)
        moved = False
        for reg in (0.0, 1e-12 * hscale, 1e-8 * hscale):
            try:
                delta = np.linalg.solve(red_h + reg * np.eye(2), rhs)
            except np.linalg.LinAlgError:
                continue
            nrm = np.linalg.norm(delta)
            if not np.isfinite(nrm):
                continue
            if nrm > 1.0:
                delta = delta / nrm
            cand = x + t_basis @ delta
            cand /= np.linalg.norm(cand)
            val = _quad(h_mat, c, cand)
            if val <= best - 1e-18 * hscale or (val <= best and reg == 0.0):
                x, best = cand, val
                moved = True
                break
        if moved:
            continue
        # gradient fallback with halving
        t = 1.0 / hscale
        for _ in range(30):
            cand = x - t * rgrad
            cand /= np.linalg.norm(cand)
            val = _quad(h_mat, c, cand)
            if val < best:
                x, best = cand, val
                moved = True
                break
            t *= 0.5
        if not moved:
            break
    return best, x


def _sphere_min_grid(h_mat, c, n_points=CROSS_CHECK_POINTS):
    """Dense-grid route: multi-start local polish from the best grid points."""
    pts = fibonacci_sphere(n_points)
    vals = np.einsum("ni,ij,nj->n", pts, h_mat, pts) + 2.0 * pts @ c
    order = np.argsort(vals, kind="stable")
    best_val, best_x = np.inf, None
    for i in order[:3]:
        val, x = _polish_on_sphere(h_mat, c, pts[int(i)])
        if val < best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _secular_candidates(w, d, scale):
    """Lagrange-multiplier roots of the secular equation, plus hard cases.

    Works in the eigenbasis: candidates y(lam) = -d / (w - lam) with
    ``sum y^2 = 1``.  Returns a list of (lam, y) pairs.
    """
    out = []
    # cluster nearly equal eigenvalues so the polynomial stays well posed
    clusters = []
    for i, wi in enumerate(w):
        if clusters and abs(wi - w[clusters[-1][0]]) <= 1e-9 * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    values = [w[c[0]] for c in clusters]
    weights = [float(np.sum(d[c] ** 2)) for c in clusters]

    # polynomial form of sum_m weight_m / (value_m - lam)^2 = 1, assembled as
    # raw coefficient arrays; (val - lam)^2 is a quadratic in lam
    quads = [np.convolve([-1.0, val], [-1.0, val]) for val in values]
    denom = np.array([1.0])
    for qd in quads:
        denom = np.convolve(denom, qd)
    acc = np.zeros(1)
    for m in range(len(values)):
        rest = np.array([1.0])
        for m2 in range(len(values)):
            if m2 != m:
                rest = np.convolve(rest, quads[m2])
        acc = np.polyadd(acc, weights[m] * rest)
    secular_poly = np.polyadd(acc, -denom)
    roots = np.roots(secular_poly) if len(secular_poly) > 1 else []

    def phi_and_slope(lam):
        with np.errstate(over="ignore"):
            num = sum(
                wt / (val - lam) ** 2 for wt, val in zip(weights, values) if abs(val - lam) > 0
            )
            slope = sum(
                2.0 * wt / (val - lam) ** 3 for wt, val in zip(weights, values) if abs(val - lam) > 0
            )
        return num - 1.0, slope

    for root in np.atleast_1d(roots):
        # polynomial roots near double poles can carry spurious imaginary
        # parts, so polish the real part against the rational form first and
        # judge validity by feasibility afterwards
        lam = float(np.real(root))
        if abs(lam) > 10.0 * scale:
            continue  # spurious root far outside the feasible multiplier range
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for _ in range(8):
                if min(abs(lam - val) for val in values) < 1e-13 * scale:
                    break
                f, fp = phi_and_slope(lam)
                if fp == 0.0 or not np.isfinite(fp):
                    break
                lam_next = lam - f / fp
                if not np.isfinite(lam_next):
                    break
                if lam_next == lam:
                    break
                lam = lam_next
        if min(abs(lam - val) for val in values) < 1e-12 * scale:
            continue  # runaway toward a pole; hard-case handling covers it
        y = -d / (w - lam)
        nrm = np.linalg.norm(y)
        if not (0.5 < nrm < 2.0):
            continue  # far from the feasible sphere: not a true multiplier
        out.append((lam, y / nrm))

    # hard-case style candidates: multiplier pinned at each eigenvalue, the
    # cluster's own linear component dropped and the leftover norm placed in
    # the cluster.  Candidates are exact feasible points evaluated later, so
    # attempting them for every cluster is safe; they are what rescues the
    # minimum when the polynomial roots collapse into the poles.
    for cluster, val in zip(clusters, values):
        y = np.zeros(3)
        ok = True
        for i in range(3):
            if i in cluster:
                continue
            gap = w[i] - val
            if abs(gap) < 1e-13 * scale:
                ok = False
                break
            y[i] = -d[i] / gap
        if not ok:
            continue
        rest = 1.0 - float(y @ y)
        if rest < -1e-12:
            continue
        # complete the norm inside the cluster, descending along -d there
        amp = np.sqrt(max(0.0, rest))
        d_cl = d[cluster]
        n_cl = float(np.linalg.norm(d_cl))
        if n_cl > 0.0:
            y[cluster] = -amp * d_cl / n_cl
        else:
            y[cluster[0]] = amp
        nrm = np.linalg.norm(y)
        if nrm > 0:
            out.append((val, y / nrm))
    return out


def _eig3(h_mat):
    """Eigendecomposition of a small real symmetric matrix, real vectors."""
    w, v = hermitian_eig(np.asarray(h_mat, dtype=complex))
    return w, v.real


def _sphere_min_secular(h_mat, c, eig=None):
    """Analytic route: eigen-diagonalize and enumerate multiplier branches."""
    w, v = _eig3(h_mat) if eig is None else eig
    d = v.T @ c
    scale = max(1.0, float(np.max(np.abs(w))), float(np.linalg.norm(d)))
    best_val, best_x = np.inf, None
    for _, y in _secular_candidates(w, d, scale):
        x = v @ y
        x /= np.linalg.norm(x)
        val = _quad(h_mat, c, x)
        if val < best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _min_on_sphere(h_mat, c, cross_check_points=CROSS_CHECK_POINTS, eig=None):
    """Global minimum of ``x.Hx + 2c.x`` over the unit sphere.

    The secular route is exact when its branch enumeration is well
    conditioned; the polished-grid route is independent of it.  Whenever the
    enumeration is off (it can only overestimate a minimum), the grid result
    is smaller and wins.
    """
    h_mat = np.asarray(h_mat, dtype=float)
    c = np.asarray(c, dtype=float)
    sec_val, sec_x = _sphere_min_secular(h_mat, c, eig=eig)
    grid_val, grid_x = _sphere_min_grid(h_mat, c, cross_check_points)
    if sec_x is None or grid_val < sec_val:
        return grid_val, grid_x
    return sec_val, sec_x


def min_quadratic_on_sphere(h_mat: np.ndarray, k: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimize ``(x + k) . H (x + k)`` over unit vectors x.

    H must be symmetric positive semidefinite.  Solved by eigen-
    diagonalization plus a secular-equation search over the Lagrange
    multiplier, cross-checked against a polished dense sphere grid.
    """
    h_mat = np.asarray(h_mat, dtype=float)
    k = np.asarray(k, dtype=float)
    if h_mat.shape != (3, 3) or k.shape != (3,):
        raise ValidationError("expected a 3x3 matrix and a 3-vector")
    if np.max(np.abs(h_mat - h_mat.T)) > 1e-9:
        raise ValidationError("H must be symmetric")
    w, v = hermitian_eig(h_mat.astype(complex))
    if float(w[0]) < -1e-9 * max(1.0, float(w[-1])):
        raise ValidationError(f"H must be positive semidefinite, min eigenvalue {float(w[0]):.3e}")
    val, x = _min_on_sphere(h_mat, h_mat @ k, eig=(w, v.real))
    return val + float(k @ h_mat @ k), x


# ---------------------------------------------------------------------------
# enhancement factor
# ---------------------------------------------------------------------------


def _frobenius_total(ms):
    return sum(float(np.sum(np.abs(m) ** 2)) for m in ms)


def _direct_bounds(geom: NoiseGeometry, eig, cross_check_points=2048):
    """Sphere and ball maxima of the leading coefficient, no inverse needed."""
    tr_h = float(np.trace(geom.h))
    sphere_min, x_sphere = _min_on_sphere(
        geom.h, geom.jvec, cross_check_points=cross_check_points, eig=eig
    )
    leading_pure = tr_h - sphere_min

    # concave objective on the ball: interior optimum needs H x = -J solvable
    w, v = eig
    wmax = max(float(w[-1]), 1e-300)
    inv_w = np.where(w > SINGULAR_REL_TOL * wmax, 1.0 / np.where(w > 0, w, 1.0), 0.0)
    x0 = -(v @ (inv_w * (v.T @ geom.jvec)))
    resid = float(np.linalg.norm(geom.h @ x0 + geom.jvec))
    consistent = resid <= 1e-10 * max(1.0, float(np.linalg.norm(geom.jvec)), tr_h)
    if consistent and np.linalg.norm(x0) <= 1.0 + 1e-12:
        leading_extended = tr_h - float(geom.jvec @ x0)
        nrm = np.linalg.norm(x0)
        x_ball = x0 if nrm <= 1.0 else x0 / nrm
    else:
        leading_extended = leading_pure
        x_ball = x_sphere
    if leading_extended < leading_pure:  # ball contains the sphere
        leading_extended = leading_pure
        x_ball = x_sphere
    return leading_pure, leading_extended, x_sphere, x_ball


def _classify(geom: NoiseGeometry, eig):
    tr_h = float(np.trace(geom.h))
    w, v = eig
    jn = float(np.linalg.norm(geom.jvec))
    if jn <= 1e-12 * max(1.0, tr_h):
        return REGIME_J_ZERO
    if float(w[0]) <= SINGULAR_REL_TOL * max(float(w[-1]), 1e-300):
        return REGIME_SINGULAR_H
    k = v @ ((v.T @ geom.jvec) / w)
    return REGIME_INSIDE_BALL if np.linalg.norm(k) <= 1.0 else REGIME_OUTSIDE_BALL


def _closed_form(geom: NoiseGeometry, eig, cross_check_points=2048):
    regime = _classify(geom, eig)
    if regime == REGIME_SINGULAR_H:
        raise SingularGeometryError(
            "noise metric is singular; the closed form needs H^-1, use the direct method"
        )
    tr_h = float(np.trace(geom.h))
    sphere_min, x_sphere = _min_on_sphere(
        geom.h, geom.jvec, cross_check_points=cross_check_points, eig=eig
    )
    leading_pure = tr_h - sphere_min
    if regime == REGIME_J_ZERO:
        leading_extended = tr_h
        x_ball = np.zeros(3)
        eta = tr_h / leading_pure
    else:
        k = np.linalg.solve(geom.h, geom.jvec)
        jhj = float(geom.jvec @ k)
        if regime == REGIME_INSIDE_BALL:
            # ball minimum of (x+k).H(x+k) is zero at x = -k
            leading_extended = tr_h + jhj
            x_ball = -k
            eta = (tr_h + jhj) / (tr_h + jhj - (sphere_min + jhj))
        else:
            leading_extended = leading_pure
            x_ball = x_sphere
            eta = 1.0
    return eta, regime, leading_pure, leading_extended, x_sphere, x_ball


def enhancement_factor(noise_ops, method: str = METHOD_DIRECT) -> EnhancementReport:
    """Ancilla-assisted enhancement factor of a qubit noise channel.

    ``method`` selects the computation path: DIRECT maximizes the quadratic
    form over sphere and ball without inverting H (always applicable),
    CLOSED_FORM uses the H^-1 expression and the regime split, BOTH runs
    both and records their discrepancy.  The ratio always lies in [1, 3/2].
    """
    if method not in (METHOD_CLOSED_FORM, METHOD_DIRECT, METHOD_BOTH):
        raise ValidationError(f"unknown method {method!r}")
    ms, _ = _as_noise_ops(noise_ops, dim=2)
    geom = noise_geometry(ms)
    tr_h = float(np.trace(geom.h))
    if tr_h <= 1e-12 * _frobenius_total(ms):
        raise DegenerateChannelError(
            "every noise operator is proportional to the identity; "
            "the leading coefficient vanishes for all inputs"
        )

    eig = _eig3(geom.h)
    if method == METHOD_CLOSED_FORM:
        eta, regime, lp, le, xs, xb = _closed_form(geom, eig)
        return EnhancementReport(
            eta=eta, regime=regime, leading_pure=lp, leading_extended=le,
            x_sphere=xs, x_ball=xb, method=method,
        )

    lp, le, xs, xb = _direct_bounds(geom, eig)
    eta_direct = le / lp
    regime = _classify(geom, eig)
    if method == METHOD_DIRECT:
        return EnhancementReport(
            eta=eta_direct, regime=regime, leading_pure=lp, leading_extended=le,
            x_sphere=xs, x_ball=xb, method=method,
        )
    eta_cf, regime_cf, _, _, _, xb_cf = _closed_form(geom, eig)
    return EnhancementReport(
        eta=eta_direct, regime=regime_cf, leading_pure=lp, leading_extended=le,
        x_sphere=xs, x_ball=xb_cf if regime_cf != REGIME_OUTSIDE_BALL else xb,
        method=method, agreement=abs(eta_direct - eta_cf),
    )


def eta_bruteforce(noise_ops, grid_size: int = 10_000) -> float:
    """Enhancement factor by exhaustive search, independent of the geometry.

    Maximizes :func:`leading_qfi_coefficient` directly over a Fibonacci grid
    of pure states and over a radial-by-spherical grid of the solid ball
    (reduced states of extended inputs; a qubit ancilla suffices), each
    followed by Nelder-Mead refinement.
    """
    if grid_size < 1000:
        raise ValidationError(f"grid_size must be at least 1000, got {grid_size}")
    ms, _ = _as_noise_ops(noise_ops, dim=2)

    def coeff(xs):
        return leading_qfi_coefficient(ms, bloch_to_density(xs))

    dirs = fibonacci_sphere(grid_size)
    sphere_vals = coeff(dirs)
    i = int(np.argmax(sphere_vals))
    polar = float(np.arccos(np.clip(dirs[i, 2], -1.0, 1.0)))
    azim = float(np.arctan2(dirs[i, 1], dirs[i, 0]))

    def sphere_obj(t):
        x = np.array(
            [np.sin(t[0]) * np.cos(t[1]), np.sin(t[0]) * np.sin(t[1]), np.cos(t[0])]
        )
        return -float(coeff(x))

    res = minimize(
        sphere_obj, np.array([polar, azim]), method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 600},
    )
    best_sphere = max(float(sphere_vals[i]), -res.fun)

    radii = np.linspace(0.0, 1.0, 16)
    ball_pts = np.concatenate([r * dirs for r in radii if r > 0] + [np.zeros((1, 3))])
    ball_vals = coeff(ball_pts)
    j = int(np.argmax(ball_vals))

    def ball_obj(v):
        v = np.asarray(v)
        nrm = np.linalg.norm(v)
        x = v if nrm <= 1.0 else v / nrm
        return -float(coeff(x))

    res = minimize(
        ball_obj, ball_pts[j], method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 800},
    )
    best_ball = max(float(ball_vals[j]), -res.fun, best_sphere)

    if best_sphere <= 0.0:
        raise DegenerateChannelError("leading coefficient vanishes on the sphere")
    return best_ball / best_sphere


def optimal_input_states(report: EnhancementReport) -> tuple[np.ndarray, np.ndarray]:
    """Optimal probes attaining the report's leading coefficients.

    Returns the pure qubit state with Bloch vector ``x_sphere`` and a
    purification (with a qubit ancilla) of the ball optimum, built through
    the eigendecomposition of the reduced state so the Schmidt form is
    explicit.
    """
    xs = np.asarray(report.x_sphere, dtype=float)
    polar = float(np.arccos(np.clip(xs[2] / max(np.linalg.norm(xs), 1e-300), -1.0, 1.0)))
    azim = float(np.arctan2(xs[1], xs[0]))
    pure = np.array(
        [np.cos(polar / 2.0), np.exp(1j * azim) * np.sin(polar / 2.0)], dtype=complex
    )

    rho = bloch_to_density(np.asarray(report.x_ball, dtype=float))
    w, v = hermitian_eig(rho)
    w = np.clip(w, 0.0, None)
    basis = np.eye(2, dtype=complex)
    extended = np.zeros(4, dtype=complex)
    for idx in range(2):
        extended += np.sqrt(w[idx]) * tensor_product(
            v[:, idx].reshape(2, 1), basis[:, idx].reshape(2, 1)
        ).ravel()
    extended /= np.linalg.norm(extended)
    return pure, extended
