"""Joint precoder / phase-shift optimizer.

Maximizes log2 det(I + c * H G G^H H^H) over the precoder G (Frobenius power
ms) and the unit-modulus phase vector theta of the reflecting surface, where
H(theta) = h1 diag(theta) hm + h2 and c = P / (noise * ms).  The determinant
objective is split through an auxiliary matrix variable Y constrained to
I + c H G G^H H^H, handled by scaled-dual alternating minimization; theta
takes one momentum-accelerated projected-gradient step per outer pass.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .channel import ChannelSet
from .complexity import CostQuery, admm_apg_per_iteration
from .config import SystemConfig


class InvariantViolation(RuntimeError):
    """An internal-consistency check failed during the solve loop."""


@dataclass
class IterationRecord:
    """Per-iteration trace entry."""

    rate: float              # bits/s/Hz
    lagrangian: float        # penalized objective, natural log
    primal_residual: float   # ||Y - I - c H G G^H H^H||_F


@dataclass
class SolverState:
    """Mutable optimizer state across outer iterations."""

    theta: np.ndarray        # current phases, unit modulus
    theta_prev: np.ndarray   # previous phases, feeds the momentum step
    g: np.ndarray            # precoder, mt x ms
    y: np.ndarray            # auxiliary Hermitian positive definite matrix
    z: np.ndarray            # scaled dual matrix, Hermitian
    d_momentum: float        # momentum magnitude, starts at 0
    iteration: int
    trace: List[IterationRecord] = field(default_factory=list)


@dataclass
class SolveResult:
    """Outcome of one optimization run."""

    precoder: np.ndarray
    theta: np.ndarray
    rates: np.ndarray              # bits/s/Hz per iteration
    lagrangian: np.ndarray
    primal_residual: np.ndarray
    converged_at: Optional[int]    # first iteration with flat rate, 1-based
    wall_time_s: float
    cm_count: int                  # modelled complex multiplications

    @property
    def final_rate(self) -> float:
        return float(self.rates[-1])


def effective_channel(theta: np.ndarray, ch: ChannelSet) -> np.ndarray:
    """Composite link h1 diag(theta) hm + h2."""
    return (ch.h1 * theta) @ ch.hm + ch.h2


def spectral_efficiency(h: np.ndarray, g: np.ndarray, c: float) -> float:
    """log2 det(I + c * (H G)(H G)^H) in bits/s/Hz."""
    m = h @ g
    gram = np.eye(h.shape[0], dtype=complex) + c * (m @ m.conj().T)
    _, logdet = np.linalg.slogdet(gram)
    return float(logdet / np.log(2.0))


def water_filling(sigma: np.ndarray, c: float, budget: float) -> np.ndarray:
    """Exact power allocation maximizing sum log(1 + c sigma_j^2 p_j).

    Closed-form over the active set: thresholds 1 / (c sigma_j^2) are sorted
    and the largest prefix whose common water level exceeds its weakest
    threshold is kept; p_j = max(0, level - threshold_j) and the powers sum to
    budget exactly.  Zero gains get zero power; all-zero gains are rejected.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise ValueError("sigma must be a non-empty 1-D array")
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if not budget > 0:
        raise ValueError(f"budget must be positive, got {budget}")
    if not np.any(sigma > 0):
        raise ValueError("water_filling needs at least one positive gain")
    thresh = np.full(sigma.shape, np.inf)
    pos = sigma > 0
    thresh[pos] = 1.0 / (c * sigma[pos] ** 2)
    order = np.argsort(thresh, kind="stable")
    sorted_t = thresh[order]
    n_pos = int(pos.sum())
    csum = np.cumsum(sorted_t[:n_pos])
    level = 0.0
    for m in range(n_pos, 0, -1):
        level = (budget + csum[m - 1]) / m
        if level > sorted_t[m - 1]:
            break
    return np.maximum(0.0, level - thresh)


def update_precoder(h: np.ndarray, cfg: SystemConfig
                    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Singular-direction precoder with water-filled stream powers.

    Keeps the ms leading singular triplets of h (descending); the precoder is
    the right singular vectors scaled by sqrt of the allocated powers, so its
    squared Frobenius norm equals ms.  Returns (g, u, lam, p) with u the kept
    left singular vectors and lam the kept singular values.
    """
    u, s, vh = np.linalg.svd(h, full_matrices=False)
    ms = cfg.ms
    u, s, vh = u[:, :ms], s[:ms], vh[:ms]
    p = water_filling(s, cfg.snr_per_stream, float(ms))
    g = vh.conj().T * np.sqrt(p)
    return g, u, s, p


def update_auxiliary(u: np.ndarray, lam: np.ndarray, p: np.ndarray,
                     z: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Closed-form minimizer of -log det(Y) + (rho/2) ||Y - Q||_F^2.

    Q = I + c U diag(lam^2 p) U^H - Z.  Diagonalizing Q decouples the problem
    per eigenvalue; each solves y^2 - q y - 1/rho = 0 and takes the positive
    root, so the result is Hermitian positive definite.
    """
    c = cfg.snr_per_stream
    mr = z.shape[0]
    q = np.eye(mr, dtype=complex) + c * (u * (lam * lam * p)) @ u.conj().T - z
    q = 0.5 * (q + q.conj().T)
    lam_q, u1 = np.linalg.eigh(q)
    root = np.sqrt(lam_q * lam_q + 4.0 / cfg.rho)
    # the two forms are algebraically equal; branching avoids cancellation
    # when an eigenvalue of Q is large and negative
    y_diag = np.where(lam_q >= 0.0, 0.5 * (lam_q + root),
                      (2.0 / cfg.rho) / (root - lam_q))
    y = (u1 * y_diag) @ u1.conj().T
    return 0.5 * (y + y.conj().T)


def gradient_theta(theta: np.ndarray, ch: ChannelSet, g: np.ndarray,
                   y: np.ndarray, z: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Conjugate-coordinate gradient of ||Y - I - c H G G^H H^H + Z||_F^2.

    With E the residual matrix, the gradient with respect to conj(theta) is
    -2 c diag(h1^H E H G G^H hm^H); a real-parameter perturbation d theta
    changes the objective by 2 Re(conj(grad) . d theta).
    """
    c = cfg.snr_per_stream
    h = effective_channel(theta, ch)
    hg = h @ g
    e = y - np.eye(h.shape[0], dtype=complex) - c * (hg @ hg.conj().T) + z
    left = ch.h1.conj().T @ (e @ hg)      # mi x ms
    right = ch.hm @ g                     # mi x ms
    return -2.0 * c * np.einsum("ns,ns->n", left, right.conj())


def project_unit_modulus(xi: np.ndarray) -> np.ndarray:
    """Nearest unit-modulus vector; exact zeros map to 1."""
    xi = np.asarray(xi, dtype=complex)
    mag = np.abs(xi)
    out = np.ones_like(xi)
    nz = mag > 0
    out[nz] = xi[nz] / mag[nz]
    return out


def apg_step(theta: np.ndarray, theta_prev: np.ndarray, d_prev: float,
             grad: np.ndarray, tau: float) -> Tuple[np.ndarray, float]:
    """One momentum-extrapolated projected-gradient step on the phases.

    d_new = (1 + sqrt(1 + 4 d_prev^2)) / 2 and t = (d_new - 1) / d_new; the
    first call from d_prev = 0 gives t = 0, a pure projected-gradient step.
    """
    d_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * d_prev * d_prev))
    t = (d_new - 1.0) / d_new
    omega = theta + t * (theta - theta_prev)
    theta_new = project_unit_modulus(omega - grad / tau)
    return theta_new, float(d_new)


def update_dual(z: np.ndarray, y: np.ndarray, h: np.ndarray, g: np.ndarray,
                cfg: SystemConfig) -> np.ndarray:
    """Scaled-dual ascent: z + Y - I - c (H G)(H G)^H."""
    hg = h @ g
    gram = cfg.snr_per_stream * (hg @ hg.conj().T)
    gram = 0.5 * (gram + gram.conj().T)   # keep the accumulated dual Hermitian
    return z + y - np.eye(h.shape[0], dtype=complex) - gram


def _check_iterate(state: SolverState, q_resid: float, q_norm: float,
                   t: float, d_prev: float, cfg: SystemConfig) -> None:
    theta_dev = float(np.max(np.abs(np.abs(state.theta) - 1.0)))
    if theta_dev >= 1e-12:
        raise InvariantViolation(f"phase modulus off unit by {theta_dev:.3e}")
    g_power = float(np.linalg.norm(state.g) ** 2)
    if abs(g_power - cfg.ms) >= 1e-9:
        raise InvariantViolation(f"precoder power {g_power!r} != ms {cfg.ms}")
    z_asym = float(np.max(np.abs(state.z - state.z.conj().T)))
    if z_asym >= 1e-9:
        raise InvariantViolation(f"dual matrix asymmetry {z_asym:.3e}")
    y_min = float(np.min(np.linalg.eigvalsh(state.y)))
    if y_min <= 0:
        raise InvariantViolation(f"auxiliary matrix not positive definite: {y_min:.3e}")
    if q_resid >= 1e-8 * (1.0 + q_norm):
        raise InvariantViolation(
            f"auxiliary stationarity residual {q_resid:.3e} vs target {q_norm:.3e}"
        )
    if state.d_momentum <= d_prev:
        raise InvariantViolation("momentum magnitude did not increase")
    if not (0.0 <= t < 1.0):
        raise InvariantViolation(f"momentum weight {t!r} outside [0, 1)")


def solve(cfg: SystemConfig, ch: ChannelSet,
          init: Optional[np.ndarray] = None) -> SolveResult:
    """Run the alternating optimizer on one channel realization.

    Starts from a random unit-modulus phase vector drawn from cfg.seed (or
    from init when given), a zero dual, and an auxiliary matrix meeting its
    constraint exactly.  Each iteration refreshes the precoder for the current
    composite channel, solves the auxiliary subproblem in closed form, takes
    one accelerated projected-gradient phase step, then ascends the dual.
    Identical (cfg, channels, init) always produce identical traces.
    """
    cfg.validate()
    if ch.mr != cfg.mr or ch.mt != cfg.mt or ch.mi != cfg.mi:
        raise ValueError(
            f"channel dims ({ch.mr}, {ch.mt}, {ch.mi}) do not match config "
            f"({cfg.mr}, {cfg.mt}, {cfg.mi})"
        )
    c = cfg.snr_per_stream
    if init is not None:
        theta = np.asarray(init, dtype=complex).copy()
        if theta.shape != (cfg.mi,):
            raise ValueError(f"init must have shape ({cfg.mi},), got {theta.shape}")
        if np.max(np.abs(np.abs(theta) - 1.0)) > 1e-9:
            raise ValueError("init must be unit modulus")
    else:
        rng = np.random.default_rng(cfg.seed)
        theta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, cfg.mi))

    eye = np.eye(cfg.mr, dtype=complex)
    h = effective_channel(theta, ch)
    g, _, _, _ = update_precoder(h, cfg)
    hg = h @ g
    y0 = eye + c * (hg @ hg.conj().T)
    state = SolverState(
        theta=theta,
        theta_prev=theta.copy(),
        g=g,
        y=0.5 * (y0 + y0.conj().T),   # constraint met, zero initial residual
        z=np.zeros((cfg.mr, cfg.mr), dtype=complex),
        d_momentum=0.0,
        iteration=0,
    )

    converged_at: Optional[int] = None
    start = time.perf_counter()
    for k in range(1, cfg.k_max + 1):
        h = effective_channel(state.theta, ch)
        g, u, lam, p = update_precoder(h, cfg)
        y = update_auxiliary(u, lam, p, state.z, cfg)
        grad = gradient_theta(state.theta, ch, g, y, state.z, cfg)
        d_prev = state.d_momentum
        theta_new, d_new = apg_step(state.theta, state.theta_prev,
                                    d_prev, grad, cfg.tau)
        state.theta_prev = state.theta
        state.theta = theta_new
        state.g, state.y, state.d_momentum, state.iteration = g, y, d_new, k

        # dual ascent uses the composite channel the precoder and auxiliary
        # steps saw this iteration; folding the phase step's realignment into
        # the dual in the same iteration destabilizes the loop
        gram_stale = c * (u * (lam * lam * p)) @ u.conj().T
        gram_stale = 0.5 * (gram_stale + gram_stale.conj().T)
        residual = y - eye - gram_stale

        h_new = effective_channel(theta_new, ch)
        hg = h_new @ g
        gram = c * (hg @ hg.conj().T)
        gram = 0.5 * (gram + gram.conj().T)
        _, y_logdet = np.linalg.slogdet(y)
        lagr = float(-y_logdet
                     + 0.5 * cfg.rho * np.linalg.norm(y - eye - gram + state.z) ** 2)
        state.z = state.z + residual
        _, rate_logdet = np.linalg.slogdet(eye + gram)
        rate = float(rate_logdet / np.log(2.0))
        state.trace.append(IterationRecord(
            rate=rate,
            lagrangian=lagr,
            primal_residual=float(np.linalg.norm(residual)),
        ))

        if cfg.validate_iterates:
            q = eye + c * (u * (lam * lam * p)) @ u.conj().T - state.z + residual
            # state.z already includes this iteration's residual; undo it to
            # recover the dual the auxiliary step saw
            q = 0.5 * (q + q.conj().T)
            stat = np.linalg.norm(-np.linalg.inv(y) + cfg.rho * (y - q))
            t = (d_new - 1.0) / d_new
            _check_iterate(state, float(stat), float(np.linalg.norm(q)), t,
                           d_prev, cfg)

        if converged_at is None and k >= 2:
            if abs(state.trace[-1].rate - state.trace[-2].rate) < cfg.convergence_tol:
                converged_at = k
                if cfg.early_stop:
                    break
    wall = time.perf_counter() - start

    per_iter = admm_apg_per_iteration(
        CostQuery(mt=cfg.mt, mr=cfg.mr, mi=cfg.mi, ms=cfg.ms,
                  iterations=state.iteration)
    )
    return SolveResult(
        precoder=state.g,
        theta=state.theta,
        rates=np.array([r.rate for r in state.trace]),
        lagrangian=np.array([r.lagrangian for r in state.trace]),
        primal_residual=np.array([r.primal_residual for r in state.trace]),
        converged_at=converged_at,
        wall_time_s=wall,
        cm_count=per_iter * state.iteration,
    )


def baseline_random_phase(cfg: SystemConfig, ch: ChannelSet,
                          rng: np.random.Generator) -> SolveResult:
    """Uniform random phases with the matched water-filled precoder."""
    cfg.validate()
    theta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, ch.mi))
    h = effective_channel(theta, ch)
    g, _, _, _ = update_precoder(h, cfg)
    rate = spectral_efficiency(h, g, cfg.snr_per_stream)
    return SolveResult(
        precoder=g, theta=theta, rates=np.array([rate]),
        lagrangian=np.array([np.nan]), primal_residual=np.array([np.nan]),
        converged_at=1, wall_time_s=0.0, cm_count=0,
    )


def baseline_no_irs(cfg: SystemConfig, ch: ChannelSet) -> SolveResult:
    """Direct link only: water-filled precoder on h2, surface ignored."""
    cfg.validate()
    h = ch.h2
    theta = np.ones(ch.mi, dtype=complex)   # placeholder, unused by the rate
    if not np.any(h):
        # dead direct link: any feasible precoder gives rate 0
        g = np.zeros((ch.mt, cfg.ms), dtype=complex)
        g[np.arange(cfg.ms), np.arange(cfg.ms)] = 1.0
        rate = 0.0
    else:
        g, _, _, _ = update_precoder(h, cfg)
        rate = spectral_efficiency(h, g, cfg.snr_per_stream)
    return SolveResult(
        precoder=g, theta=theta, rates=np.array([rate]),
        lagrangian=np.array([np.nan]), primal_residual=np.array([np.nan]),
        converged_at=1, wall_time_s=0.0, cm_count=0,
    )
