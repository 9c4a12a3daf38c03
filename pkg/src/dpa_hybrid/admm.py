"""Baseband precoder by scaled ADMM on a sphere, plus its closed-form oracle.

For a fixed RF matrix the per-subcarrier problem

    min ||F_opt[k] - F_RF F_BB||_F^2   s.t.  ||F_BB||_F^2 = P

is vectorized with ``A = I_{N_s} kron F_RF`` and ``b = vec(F_opt[k])`` and lifted
to real variables ``xbar = [Re x; Im x]``. Because ``F_RF^H F_RF = I`` the lifted
Gram matrix ``A1^T A1 + A2^T A2`` is the identity, so the smooth ADMM step has
the closed form

    xbar <- (2 A1^T Re b + 2 A2^T Im b + rho (y - nu)) / (2 + rho)

followed by radial projection of ``xbar + nu`` onto the sphere of radius
``sqrt(P)`` and the scaled dual update ``nu <- nu + xbar - y``.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateProjectionError, DomainError, StructureError
from .rf import RfPhases, assemble_rf, validate_rf_matrix

VARIANTS = ("derived", "verbatim")


def vec(M):
    """Column-stacking vectorization."""
    return np.asarray(M).reshape(-1, order="F")


def unvec(x, n_rows, n_cols):
    return np.asarray(x).reshape((n_rows, n_cols), order="F")


def lift(z):
    """Complex vector(s) to ``[Re; Im]`` along the last axis."""
    return np.concatenate([z.real, z.imag], axis=-1)


def unlift(xbar):
    n = xbar.shape[-1] // 2
    return xbar[..., :n] + 1j * xbar[..., n:]


@dataclass(frozen=True)
class RealLiftedSystem:
    """Real-domain data of one baseband subproblem.

    ``A1 = [Re A, -Im A]`` and ``A2 = [Im A, Re A]`` are
    ``(N_s*N_t_tot, 2*M_t*N_s)``; ``c`` is the squared sphere radius.
    """

    A1: np.ndarray
    A2: np.ndarray
    b_re: np.ndarray
    b_im: np.ndarray
    c: float
    n_subarrays: int
    n_streams: int

    @property
    def dim(self):
        return self.A1.shape[1]

    def rhs(self):
        """``A1^T Re b + A2^T Im b``, the lift of ``A^H b``."""
        return self.A1.T @ self.b_re + self.A2.T @ self.b_im

    def objective(self, xbar):
        return float(np.sum((self.A1 @ xbar - self.b_re) ** 2) + np.sum((self.A2 @ xbar - self.b_im) ** 2))

    def to_complex(self, xbar):
        """De-vectorize a lifted iterate into an ``(M_t, N_s)`` baseband matrix."""
        return unvec(unlift(xbar), self.n_subarrays, self.n_streams)

    def to_real(self, F_BB):
        return lift(vec(F_BB))

    def gram_error(self):
        G = self.A1.T @ self.A1 + self.A2.T @ self.A2
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def build_real_system(rf, F_opt_k, power):
    """Lift one subcarrier's baseband problem to the real domain.

    Args:
        rf: :class:`RfPhases` or an explicit ``(N_t_tot, M_t)`` RF matrix,
            which must be block-diagonal with entries of modulus
            ``1/sqrt(N_t_sub)``.
        F_opt_k: ``(N_t_tot, N_s)`` target precoder.
        power: total power ``P`` (the sphere radius squared).
    """
    if isinstance(rf, RfPhases):
        F_RF = assemble_rf(rf)
    else:
        F_RF = np.asarray(rf, dtype=complex)
        validate_rf_matrix(F_RF)
    F_opt_k = np.asarray(F_opt_k, dtype=complex)
    if F_opt_k.ndim != 2 or F_opt_k.shape[0] != F_RF.shape[0]:
        raise StructureError(f"F_opt shape {F_opt_k.shape} does not match F_RF rows {F_RF.shape[0]}")
    if not power > 0:
        raise DomainError("power must be positive")
    n_s = F_opt_k.shape[1]
    A = np.kron(np.eye(n_s), F_RF)
    A1 = np.hstack([A.real, -A.imag])
    A2 = np.hstack([A.imag, A.real])
    b = vec(F_opt_k)
    return RealLiftedSystem(A1, A2, b.real.copy(), b.imag.copy(), float(power), F_RF.shape[1], n_s)


@dataclass
class AdmmReport:
    """Outcome of one ADMM run.

    ``solution`` is the feasible iterate ``y`` de-vectorized to ``(M_t, N_s)``;
    ``y`` and ``nu`` are kept so a later solve can warm-start.
    """

    solution: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool
    y: np.ndarray
    nu: np.ndarray


def initial_point(w, c):
    """Warm start ``sqrt(c) * w / ||w||``, or the first canonical direction when ``w = 0``.

    Works row-wise on a stack of lifted vectors.
    """
    w = np.atleast_2d(w)
    norms = np.linalg.norm(w, axis=-1, keepdims=True)
    e1 = np.zeros_like(w)
    e1[:, 0] = 1.0
    safe = np.where(norms > 0, norms, 1.0)
    return np.sqrt(c) * np.where(norms > 0, w / safe, e1)


def admm_solve(system, rho=1.0, eps_p=1e-6, eps_d=1e-6, max_iters=10_000, *,
               y0=None, nu0=None, variant="derived", callback=None):
    """Scaled ADMM for ``min g(xbar)`` over the sphere ``||xbar||^2 = c``.

    The smooth step is evaluated from ``A1``, ``A2`` and ``b`` on every
    iteration, exactly as the update is written, so one iteration costs a
    dense real matrix-vector product.

    Args:
        system: :class:`RealLiftedSystem`.
        rho: penalty parameter.
        eps_p, eps_d: tolerances on ``||xbar - y||`` and ``||rho (y_new - y)||``.
        max_iters: iteration cap; hitting it returns the best feasible iterate
            with ``converged=False``.
        y0, nu0: starting point; defaults to the warm start of
            :func:`initial_point` and a zero dual.
        variant: ``"derived"`` uses ``rho (y - nu)`` in the smooth step;
            ``"verbatim"`` uses ``rho (y - xbar_prev)``, kept for comparison.
        callback: optional ``callback(i, xbar, y, nu)`` after every iteration.

    Raises:
        DegenerateProjectionError: ``xbar + nu`` vanished at a projection.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    if not system.c > 0:
        raise DomainError("sphere radius must be positive")
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    radius = np.sqrt(system.c)
    y = initial_point(system.rhs(), system.c)[0] if y0 is None else np.array(y0, dtype=float)
    nu = np.zeros_like(y) if nu0 is None else np.array(nu0, dtype=float)
    if callback is None:
        A1t = np.ascontiguousarray(system.A1.T)
        A2t = np.ascontiguousarray(system.A2.T)
        best_y = y.copy()
        i, converged, r_p, r_d, bad = _admm_dense(A1t, A2t, system.b_re, system.b_im, y, nu, best_y, radius,
                                                  float(rho), float(eps_p), float(eps_d), int(max_iters),
                                                  variant == "verbatim")
        if bad:
            raise DegenerateProjectionError(f"xbar + nu vanished at iteration {i}")
    else:
        i, converged, r_p, r_d, best_y, nu = _admm_python(system, y, nu, radius, rho, eps_p, eps_d, max_iters,
                                                      variant, callback)
    return AdmmReport(system.to_complex(best_y), int(i), float(r_p), float(r_d), system.objective(best_y),
                      bool(converged), best_y, nu)


def _admm_python(system, y, nu, radius, rho, eps_p, eps_d, max_iters, variant, callback):
    A1t, A2t = system.A1.T, system.A2.T
    x_prev = y.copy()
    best_y, best_score = y, float(2.0 * system.rhs() @ y)
    r_p = r_d = np.inf
    converged = False
    i = 0
    for i in range(1, max_iters + 1):
        w2 = 2.0 * (A1t @ system.b_re + A2t @ system.b_im)
        if variant == "derived":
            x = (w2 + rho * (y - nu)) / (2.0 + rho)
        else:
            x = (w2 + rho * (y - x_prev)) / (2.0 + rho)
        u = x + nu
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            raise DegenerateProjectionError(f"xbar + nu vanished at iteration {i}")
        y_new = radius * u / nrm
        nu = nu + x - y_new
        r_p = float(np.linalg.norm(x - y_new))
        r_d = float(np.linalg.norm(rho * (y_new - y)))
        y, x_prev = y_new, x
        callback(i, x, y, nu)
        # on the sphere g(y) = c - 2 w.y + ||b||^2, so the best iterate maximizes w.y
        score = float(w2 @ y)
        if score > best_score:
            best_y, best_score = y, score
        if r_p < eps_p and r_d < eps_d:
            converged = True
            break
    if converged:
        best_y = y
    return i, converged, r_p, r_d, best_y, nu


@njit(cache=True)
def _admm_dense(A1t, A2t, b_re, b_im, y, nu, best, radius, rho, eps_p, eps_d, max_iters, verbatim):
    # same iteration as _admm_python; y, nu and best are updated in place
    n, m = A1t.shape
    w2 = np.empty(n)
    x = np.empty(n)
    u = np.empty(n)
    xp = y.copy()
    best_score = 0.0
    for j in range(n):
        s = 0.0
        for r in range(m):
            s += A1t[j, r] * b_re[r] + A2t[j, r] * b_im[r]
        best_score += 2.0 * s * y[j]
    r_p = np.inf
    r_d = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        for j in range(n):
            s = 0.0
            for r in range(m):
                s += A1t[j, r] * b_re[r] + A2t[j, r] * b_im[r]
            w2[j] = 2.0 * s
        nrm2 = 0.0
        for j in range(n):
            if verbatim:
                x[j] = (w2[j] + rho * (y[j] - xp[j])) / (2.0 + rho)
            else:
                x[j] = (w2[j] + rho * (y[j] - nu[j])) / (2.0 + rho)
            u[j] = x[j] + nu[j]
            nrm2 += u[j] * u[j]
        if nrm2 == 0.0:
            return it, False, r_p, r_d, True
        scale = radius / np.sqrt(nrm2)
        rp2 = 0.0
        rd2 = 0.0
        score = 0.0
        for j in range(n):
            y_new = u[j] * scale
            nu[j] = nu[j] + x[j] - y_new
            rp2 += (x[j] - y_new) ** 2
            rd2 += (y_new - y[j]) ** 2
            y[j] = y_new
            xp[j] = x[j]
            score += w2[j] * y_new
        r_p = np.sqrt(rp2)
        r_d = rho * np.sqrt(rd2)
        if score > best_score:
            best_score = score
            best[:] = y
        if r_p < eps_p and r_d < eps_d:
            best[:] = y
            return it, True, r_p, r_d, False
    return it, False, r_p, r_d, False


@dataclass(frozen=True)
class OracleSolution:
    solution: np.ndarray
    objective: float
    degenerate: bool


def sphere_ls_oracle(system, gram_tol=1e-8):
    """Global minimizer of ``||A x - b||^2`` on ``||x||^2 = c`` when ``A^H A = I``.

    The objective reduces to ``c - 2 Re<A^H b, x> + ||b||^2``, so the optimum
    is ``sqrt(c) * A^H b / ||A^H b||``. If ``A^H b = 0`` every feasible point
    is optimal; the first canonical direction is returned and flagged.
    """
    err = system.gram_error()
    if err > gram_tol:
        raise StructureError(f"lifted Gram matrix deviates from identity by {err:.3g}")
    w = system.rhs()
    degenerate = bool(np.linalg.norm(w) == 0.0)
    x = initial_point(w, system.c)[0]
    return OracleSolution(system.to_complex(x), system.objective(x), degenerate)


def closed_form_baseband(F_RF, F_opt, power):
    """``sqrt(P) F_RF^H F_opt[k] / ||F_RF^H F_opt[k]||_F`` for a stack of subcarriers."""
    F_opt = np.asarray(F_opt)
    single = F_opt.ndim == 2
    G = np.einsum("im,kis->kms", np.asarray(F_RF).conj(), F_opt[None] if single else F_opt)
    norms = np.linalg.norm(G, axis=(1, 2), keepdims=True)
    G = np.sqrt(power) * G / np.where(norms > 0, norms, 1.0)
    return G[0] if single else G


@dataclass
class BasebandSolution:
    """Batched ADMM result over all subcarriers.

    ``F_BB`` is ``(K, M_t, N_s)``; ``y``/``nu`` are the lifted ``(K, 2*M_t*N_s)``
    iterates. Rows that hit the iteration cap carry their best feasible
    iterate in ``y``/``F_BB``.
    """

    F_BB: np.ndarray
    y: np.ndarray
    nu: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    primal_residual: np.ndarray
    dual_residual: np.ndarray


@njit(cache=True)
def _admm_rows(w2, y, nu, radius, rho, eps_p, eps_d, max_iters, verbatim):
    # one independent sphere-ADMM per row; y and nu are updated in place
    K, n = w2.shape
    iters = np.zeros(K, np.int64)
    conv = np.zeros(K, np.bool_)
    r_p = np.full(K, np.inf)
    r_d = np.full(K, np.inf)
    x = np.empty(n)
    u = np.empty(n)
    for k in range(K):
        yk = y[k].copy()
        nuk = nu[k].copy()
        xp = yk.copy()
        best = yk.copy()
        best_score = 0.0
        for j in range(n):
            best_score += w2[k, j] * yk[j]
        for _ in range(max_iters):
            nrm2 = 0.0
            for j in range(n):
                if verbatim:
                    x[j] = (w2[k, j] + rho * (yk[j] - xp[j])) / (2.0 + rho)
                else:
                    x[j] = (w2[k, j] + rho * (yk[j] - nuk[j])) / (2.0 + rho)
                u[j] = x[j] + nuk[j]
                nrm2 += u[j] * u[j]
            if nrm2 == 0.0:
                nuk[0] += 1e-12
                u[0] = x[0] + nuk[0]
                nrm2 = u[0] * u[0]
            scale = radius / np.sqrt(nrm2)
            rp2 = 0.0
            rd2 = 0.0
            score = 0.0
            for j in range(n):
                y_new = u[j] * scale
                nuk[j] = nuk[j] + x[j] - y_new
                rp2 += (x[j] - y_new) ** 2
                rd2 += (y_new - yk[j]) ** 2
                yk[j] = y_new
                xp[j] = x[j]
                score += w2[k, j] * y_new
            iters[k] += 1
            r_p[k] = np.sqrt(rp2)
            r_d[k] = rho * np.sqrt(rd2)
            if score > best_score:
                best_score = score
                best[:] = yk
            if r_p[k] < eps_p and r_d[k] < eps_d:
                conv[k] = True
                break
        y[k] = yk if conv[k] else best
        nu[k] = nuk
    return iters, conv, r_p, r_d


def solve_baseband(F_RF, F_opt, power, rho=1.0, eps_p=1e-6, eps_d=1e-6, max_iters=10_000, *,
                   y0=None, nu0=None, variant="derived"):
    """Run the ADMM iteration for every subcarrier.

    Same iteration as :func:`admm_solve`, compiled, with the loop-invariant
    term ``A^H b`` formed once per subcarrier as ``F_RF^H F_opt[k]``. A
    vanishing projection argument is handled by nudging the dual variable by
    ``1e-12`` along the first coordinate.
    """
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    if not rho > 0:
        raise DomainError("rho must be positive")
    F_opt = np.asarray(F_opt)
    K, _, n_s = F_opt.shape
    n_sub_arrays = F_RF.shape[1]
    G = np.einsum("im,kis->kms", F_RF.conj(), F_opt)
    w2 = 2.0 * lift(G.transpose(0, 2, 1).reshape(K, -1))  # column-major vec per k
    y = initial_point(w2, power) if y0 is None else np.array(y0, dtype=float)
    nu = np.zeros_like(y) if nu0 is None else np.array(nu0, dtype=float)
    iters, conv, r_p, r_d = _admm_rows(np.ascontiguousarray(w2), y, nu, float(np.sqrt(power)), float(rho),
                                       float(eps_p), float(eps_d), int(max_iters), variant == "verbatim")
    F_BB = unlift(y).reshape(K, n_s, n_sub_arrays).transpose(0, 2, 1)
    return BasebandSolution(F_BB, y, nu, iters, conv, r_p, r_d)
