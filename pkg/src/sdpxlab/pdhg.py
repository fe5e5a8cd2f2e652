"""First-order primal-dual solver for Frobenius-regularized linear SDPs.

The iteration alternates a projected primal step and an extrapolated dual
ascent step,

    X <- Proj_PSD[ (X - a*(A*(y) + C)) / (1 + a*eps) ]
    y <- y + b*( A(X' + theta (X' - X)) - b_rhs ),

with constant step sizes a*b = rho / lambda_max(A*A), rho < 1, primal
first.  Minimum-Frobenius-norm solutions are obtained by warm-started
continuation over a shrinking regularization ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DivergenceError,
    NumericalError,
    SdpInstance,
    ShapeError,
    SolutionTriple,
    apply_A,
    apply_A_adjoint,
    objective,
    symmetrize,
)

EPS_LADDER = (1e-2, 1e-4, 1e-6)


@dataclass(frozen=True)
class PdhgConfig:
    """Step-size and stopping parameters.

    ``alpha=None`` picks 1/sqrt(lambda_max) at solve time; ``safety`` is
    the fraction rho of the step-size stability bound actually used.
    """

    eps: float = 1e-6
    alpha: float | None = None
    safety: float = 0.9
    theta: float = 1.0
    tol: float = 1e-6
    max_iters: int = 20000
    eig_tol: float = 1e-8

    def validate(self):
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not 0 < self.safety < 1:
            raise ValueError(f"safety fraction must be in (0,1), got {self.safety}")
        if self.tol <= 0 or self.max_iters < 1 or self.eig_tol <= 0:
            raise ValueError("tol, eig_tol must be > 0 and max_iters >= 1")


@dataclass(frozen=True)
class PdhgState:
    X: np.ndarray
    y: np.ndarray
    t: int
    primal_res: float = math.inf
    step_res: float = math.inf


@dataclass
class PdhgStats:
    iterations: int
    converged: bool
    primal_res: float
    dual_res: float
    step_res: float
    objective: float
    alpha: float
    beta: float
    lambda_max: float
    cold_start_iterations: int | None = None
    history: list[float] | None = None

    def to_json_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residuals": {"primal": self.primal_res, "dual": self.dual_res,
                          "step": self.step_res},
            "objective": self.objective,
        }


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues (descending) and orthonormal eigenvector columns."""

    eigvals: np.ndarray
    eigvecs: np.ndarray


def eig_sym(M) -> SpectralDecomp:
    """Full spectral decomposition of a symmetric matrix.

    Backed by LAPACK's symmetric eigensolver; eigenvalues are returned in
    descending order and each eigenvector's largest-magnitude component is
    made positive so results are deterministic.
    """
    arr = symmetrize(M)
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    lead = np.abs(v).argmax(axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return SpectralDecomp(eigvals=w, eigvecs=v * signs)


def project_psd(M) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: drop negative eigen-pairs."""
    arr = symmetrize(M)
    if not np.any(arr[~np.eye(arr.shape[0], dtype=bool)]):
        # diagonal input: clamp in place, exactly
        return np.diag(np.maximum(np.diag(arr), 0.0))
    dec = eig_sym(arr)
    clamped = np.maximum(dec.eigvals, 0.0)
    out = (dec.eigvecs * clamped) @ dec.eigvecs.T
    return symmetrize(out)


def lambda_max_op(inst: SdpInstance, tol: float = 1e-6,
                  max_iters: int = 5000) -> float:
    """Largest eigenvalue of X -> A*(A(X)) by power iteration on S^n."""
    if inst.m == 0 or not np.any(inst.dense_A):
        raise NumericalError("constraint operator is zero")
    rng = np.random.default_rng(0)
    lam = 0.0
    for _restart in range(5):
        M = symmetrize(rng.standard_normal((inst.n, inst.n)))
        M /= np.linalg.norm(M)
        lam = 0.0
        for _ in range(max_iters):
            T = apply_A_adjoint(inst, apply_A(inst, M))
            nrm = float(np.linalg.norm(T))
            if nrm == 0.0:
                break  # start was orthogonal to the range; restart
            new_lam = float(np.einsum("ij,ij->", M, T))
            M = T / nrm
            if abs(new_lam - lam) <= tol * max(abs(new_lam), 1e-30):
                return new_lam
            lam = new_lam
        else:
            return lam
    raise NumericalError("power iteration kept collapsing to zero")


def _steps(inst: SdpInstance, cfg: PdhgConfig) -> tuple[float, float, float]:
    lam = lambda_max_op(inst)
    alpha = cfg.alpha if cfg.alpha is not None else 1.0 / math.sqrt(lam)
    beta = cfg.safety / (alpha * lam)
    # step-size stability condition: alpha*beta*lambda_max = rho < 1
    assert alpha * beta * lam < 1.0
    return alpha, beta, lam


def pdhg_step(state: PdhgState, inst: SdpInstance, cfg: PdhgConfig) -> PdhgState:
    """One primal-then-dual update with the configured step sizes."""
    cfg.validate()
    alpha, beta, _ = _steps(inst, cfg)
    return _step_inner(state, inst, cfg, alpha, beta)


def _step_inner(state, inst, cfg, alpha, beta) -> PdhgState:
    X, y = state.X, state.y
    Z = (X - alpha * (apply_A_adjoint(inst, y) + inst.C)) / (1.0 + alpha * cfg.eps)
    if not np.all(np.isfinite(Z)):
        raise DivergenceError(f"non-finite iterate at t={state.t + 1}")
    Xn = project_psd(Z)
    W = Xn + cfg.theta * (Xn - X)
    yn = y + beta * (apply_A(inst, W) - inst.b)
    if not (np.all(np.isfinite(Xn)) and np.all(np.isfinite(yn))):
        raise DivergenceError(f"non-finite iterate at t={state.t + 1}")
    step_res = float(np.linalg.norm(Xn - X)) / max(1.0, float(np.linalg.norm(X)))
    primal = float(np.max(np.abs(apply_A(inst, Xn) - inst.b))) if inst.m else 0.0
    return PdhgState(X=Xn, y=yn, t=state.t + 1, primal_res=primal, step_res=step_res)


def _dual_residual(inst: SdpInstance, X, y, eps: float) -> float:
    S = inst.C + eps * X + apply_A_adjoint(inst, y)
    return float(np.linalg.norm(S - project_psd(S)))


def solve(inst: SdpInstance, cfg: PdhgConfig | None = None,
          X0: np.ndarray | None = None, y0: np.ndarray | None = None,
          record_history: bool = False, kkt_stop: bool = False
          ) -> tuple[SolutionTriple, PdhgStats]:
    """Iterate until primal, dual and step residuals all fall below tol.

    On iteration exhaustion the best iterate is returned with
    ``converged=False`` (no exception).  ``kkt_stop`` additionally
    requires the complementarity gap |<X, C + A*(y)>| <= tol, used by the
    final continuation stage.
    """
    cfg = cfg or PdhgConfig()
    cfg.validate()
    alpha, beta, lam = _steps(inst, cfg)
    X = np.zeros((inst.n, inst.n)) if X0 is None else project_psd(symmetrize(X0))
    y = np.zeros(inst.m) if y0 is None else np.asarray(y0, dtype=np.float64).copy()
    if len(y) != inst.m:
        raise ShapeError(f"|y0|={len(y)} but m={inst.m}")
    state = PdhgState(X=X, y=y, t=0)
    history: list[float] | None = [] if record_history else None
    running_min = math.inf
    converged = False
    dual = math.inf
    for _ in range(cfg.max_iters):
        state = _step_inner(state, inst, cfg, alpha, beta)
        if history is not None:
            history.append(state.primal_res)
        running_min = min(running_min, state.primal_res)
        if state.primal_res > 1e6 * max(running_min, cfg.tol):
            raise DivergenceError(
                f"primal residual grew to {state.primal_res:.3e} from running "
                f"minimum {running_min:.3e} at t={state.t}")
        if state.primal_res <= cfg.tol and state.step_res <= cfg.tol:
            dual = _dual_residual(inst, state.X, state.y, cfg.eps)
            if dual <= cfg.tol:
                if not kkt_stop:
                    converged = True
                    break
                S = inst.C + apply_A_adjoint(inst, state.y)
                if abs(float(np.einsum("ij,ij->", state.X, S))) <= cfg.tol:
                    converged = True
                    break
    if math.isinf(dual):
        dual = _dual_residual(inst, state.X, state.y, cfg.eps)
    stats = PdhgStats(
        iterations=state.t, converged=converged, primal_res=state.primal_res,
        dual_res=dual, step_res=state.step_res,
        objective=objective(inst, state.X), alpha=alpha, beta=beta,
        lambda_max=lam, history=history)
    S = inst.C + apply_A_adjoint(inst, state.y)
    return SolutionTriple(X=state.X, y=state.y, S=S), stats


def solve_continuation(inst: SdpInstance, cfg: PdhgConfig | None = None,
                       ladder: tuple[float, ...] = EPS_LADDER,
                       polish: bool = True
                       ) -> tuple[SolutionTriple, list[PdhgStats]]:
    """Warm-started solves over a shrinking regularization ladder.

    The ladder stages pull the iterate toward the minimum-Frobenius-norm
    optimum; the final polish stage re-solves without regularization and
    stops on full KKT residuals, removing the regularization bias from
    the dual and the complementarity gap.
    """
    cfg = cfg or PdhgConfig()
    X = y = None
    all_stats: list[PdhgStats] = []
    stages = [(e, False) for e in ladder]
    if polish:
        stages.append((0.0, True))
    for idx, (eps, is_polish) in enumerate(stages):
        # a heavily regularized stage sits O(eps) away from the next
        # stage's optimum, so solving it beyond eps/100 is wasted work
        stage_cfg = replace(cfg, eps=eps, tol=max(cfg.tol, eps * 1e-2))
        try:
            triple, stats = solve(inst, stage_cfg, X0=X, y0=y, kkt_stop=is_polish)
        except DivergenceError as exc:
            raise DivergenceError(f"continuation stage {idx} (eps={eps}): {exc}") from exc
        X, y = triple.X, triple.y
        all_stats.append(stats)
    return triple, all_stats


def min_norm_solution(inst: SdpInstance, cfg: PdhgConfig | None = None) -> np.ndarray:
    """Primal optimum of minimum Frobenius norm, via continuation."""
    triple, _ = solve_continuation(inst, cfg)
    return triple.X


def kkt_residuals(inst: SdpInstance, X, y) -> tuple[float, float, float]:
    """(primal infeasibility, slack cone distance, complementarity gap)."""
    X = np.asarray(X, dtype=np.float64)
    primal = float(np.max(np.abs(apply_A(inst, X) - inst.b))) if inst.m else 0.0
    S = inst.C + apply_A_adjoint(inst, y)
    dual = float(np.linalg.norm(S - project_psd(S)))
    gap = abs(float(np.einsum("ij,ij->", X, S)))
    return primal, dual, gap


def warm_start_solve(inst: SdpInstance, X0, y0, cfg: PdhgConfig | None = None,
                     compare_cold: bool = False
                     ) -> tuple[SolutionTriple, PdhgStats]:
    """Solve starting from a PSD-projected initial primal and given dual.

    With ``compare_cold`` the same configuration is also run from zero and
    its iteration count reported in ``stats.cold_start_iterations``.
    """
    cfg = cfg or PdhgConfig()
    triple, stats = solve(inst, cfg, X0=symmetrize(X0), y0=y0)
    if compare_cold:
        _, cold = solve(inst, cfg)
        stats.cold_start_iterations = cold.iterations
    return triple, stats
