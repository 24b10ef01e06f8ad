"""Bayesian reduced-rank mean estimation for a matrix of noisy observations.

Model: Y = U diag(d) V' + E with U, V orthonormal frames (m x R and
n x R), E i.i.d. normal(0, sigma^2). Priors: U, V uniform on their
manifolds; d_j i.i.d. normal(0, tau^2); inverse-gamma priors on sigma^2
and tau^2 through

    1/tau^2   ~ gamma(eta0/2, eta0*t20/2)
    1/sigma^2 ~ gamma(nu0/2,  nu0*s20/2).

Full conditionals used by the Gibbs sweep:

    U | rest ~ MF(Y V D / sigma^2)          (one column sweep per iteration)
    V | rest ~ MF(Y' U D / sigma^2)
    d_j | rest ~ normal(tau^2 u_j'Y v_j / (sigma^2 + tau^2),
                        tau^2 sigma^2 / (tau^2 + sigma^2))
    1/tau^2 | rest ~ gamma((eta0 + R)/2, (eta0*t20 + sum d_j^2)/2)
    1/sigma^2 | rest ~ gamma((nu0 + mn)/2, (nu0*s20 + |Y - UDV'|^2)/2)
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, InputError
from .frames import OrthonormalFrame, random_uniform_frame
from .samplers import sample_mf_matrix_gibbs


@dataclass(frozen=True)
class SvdHyperParams:
    """Prior hyperparameters (nu0, s20) for sigma^2 and (eta0, t20) for tau^2."""

    nu0: float = 1.0
    s20: float = 1.0
    eta0: float = 1.0
    t20: float = 1.0

    def __post_init__(self):
        for name in ("nu0", "s20", "eta0", "t20"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class SvdModelState:
    U: OrthonormalFrame
    V: OrthonormalFrame
    d: np.ndarray
    sigma2: float
    tau2: float

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=np.float64))
        if d.shape != (self.U.cols,) or self.V.cols != self.U.cols:
            raise DimensionError("U, V and d disagree on the rank R")
        if not (self.sigma2 > 0 and self.tau2 > 0):
            raise InputError("sigma2 and tau2 must be strictly positive")
        object.__setattr__(self, "d", d)

    @property
    def rank(self) -> int:
        return self.U.cols

    def mean_matrix(self) -> np.ndarray:
        """U diag(d) V', the current fit of the low-rank mean."""
        return (self.U.entries * self.d) @ self.V.entries.T


@dataclass(frozen=True)
class DataMatrix:
    """A fully observed m x n data matrix."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.ndim != 2:
            raise DimensionError("data matrix must be 2-d")
        if not np.all(np.isfinite(entries)):
            raise InputError("data matrix has non-finite entries")
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


def _as_matrix(y) -> np.ndarray:
    return y.entries if isinstance(y, DataMatrix) else np.asarray(y, dtype=np.float64)


def simulate_dataset(m: int, n: int, rank_true: int,
                     rng: np.random.Generator) -> tuple[DataMatrix, SvdModelState]:
    """Draw ground truth and data: uniform frames, singular values from
    sorted exponential(1) draws scaled by sqrt(m*n), unit noise variance."""
    if not 1 <= rank_true <= min(m, n):
        raise DimensionError(f"need 1 <= rank_true <= min(m, n), got {rank_true}")
    u0 = random_uniform_frame(m, rank_true, rng)
    v0 = random_uniform_frame(n, rank_true, rng)
    d0 = np.sort(rng.exponential(size=rank_true))[::-1] * np.sqrt(m * n)
    truth = SvdModelState(U=u0, V=v0, d=d0, sigma2=1.0, tau2=float(np.mean(d0**2)))
    y = truth.mean_matrix() + rng.standard_normal((m, n))
    return DataMatrix(y), truth


def mle_init(y, rank: int) -> SvdModelState:
    """Maximum-likelihood starting state from the top-`rank` SVD of the data.

    sigma2 starts at the sample variance of the residuals and tau2 at the
    mean squared retained singular value.
    """
    ymat = _as_matrix(y)
    m, n = ymat.shape
    if not 1 <= rank <= min(m, n):
        raise DimensionError(f"need 1 <= rank <= min(m, n), got rank={rank}")
    uu, ss, vt = np.linalg.svd(ymat, full_matrices=False)
    u = OrthonormalFrame(uu[:, :rank])
    v = OrthonormalFrame(vt[:rank].T)
    d = ss[:rank].copy()
    resid = ymat - (u.entries * d) @ v.entries.T
    sigma2 = float(np.var(resid, ddof=1))
    if sigma2 <= 0.0:
        sigma2 = np.finfo(np.float64).tiny  # exact low-rank data
    return SvdModelState(U=u, V=v, d=d, sigma2=sigma2, tau2=float(np.mean(d**2)))


def mf_parameter_for_u(state: SvdModelState, y) -> np.ndarray:
    """Y V D / sigma^2, the MF parameter of the U full conditional."""
    return _as_matrix(y) @ (state.V.entries * state.d) / state.sigma2


def mf_parameter_for_v(state: SvdModelState, y) -> np.ndarray:
    """Y' U D / sigma^2, the MF parameter of the V full conditional."""
    return _as_matrix(y).T @ (state.U.entries * state.d) / state.sigma2


def update_u(state: SvdModelState, y, rng: np.random.Generator) -> SvdModelState:
    new_u = sample_mf_matrix_gibbs(mf_parameter_for_u(state, y), state.U, rng)
    return replace(state, U=new_u)


def update_v(state: SvdModelState, y, rng: np.random.Generator) -> SvdModelState:
    new_v = sample_mf_matrix_gibbs(mf_parameter_for_v(state, y), state.V, rng)
    return replace(state, V=new_v)


def d_conditional_moments(state: SvdModelState, y) -> tuple[np.ndarray, float]:
    """Mean vector and (common) variance of the d_j full conditionals."""
    ymat = _as_matrix(y)
    quad = np.einsum("ij,ik,kj->j", state.U.entries, ymat, state.V.entries)
    var = state.tau2 * state.sigma2 / (state.tau2 + state.sigma2)
    mean = state.tau2 * quad / (state.sigma2 + state.tau2)
    return mean, float(var)


def update_d(state: SvdModelState, y, rng: np.random.Generator) -> SvdModelState:
    mean, var = d_conditional_moments(state, y)
    d = rng.normal(mean, np.sqrt(var))
    return replace(state, d=d)


def update_variances(state: SvdModelState, y, hyper: SvdHyperParams,
                     rng: np.random.Generator) -> SvdModelState:
    ymat = _as_matrix(y)
    m, n = ymat.shape
    resid2 = float(np.sum((ymat - state.mean_matrix()) ** 2))
    sigma2 = 1.0 / rng.gamma((hyper.nu0 + m * n) / 2.0,
                             2.0 / (hyper.nu0 * hyper.s20 + resid2))
    tau2 = 1.0 / rng.gamma((hyper.eta0 + state.rank) / 2.0,
                           2.0 / (hyper.eta0 * hyper.t20 + float(np.sum(state.d**2))))
    return replace(state, sigma2=float(sigma2), tau2=float(tau2))


@dataclass(frozen=True)
class SvdGibbsResult:
    d_trace: np.ndarray          # (saved, R), each row sorted decreasing
    m_posterior_mean: np.ndarray  # (m, n)
    saved_count: int
    final_state: SvdModelState


def run_svd_gibbs(y, rank: int, hyper: SvdHyperParams, iters: int, thin: int,
                  rng: np.random.Generator) -> SvdGibbsResult:
    """Run the Gibbs sampler from the MLE start.

    Update order per iteration: U, V, d, sigma^2, tau^2. Every `thin`-th
    iteration the sorted absolute singular values are recorded and
    U diag(d) V' is accumulated into the posterior-mean estimate. d is
    deliberately left unsorted inside the chain; sorting happens only in
    the saved trace, anything else would change the target.
    """
    ymat = _as_matrix(y)
    if iters < 1 or thin < 1 or iters < thin:
        raise InputError(f"need iters >= thin >= 1, got iters={iters}, thin={thin}")
    state = mle_init(ymat, rank)
    trace = []
    msum = np.zeros_like(ymat)
    for it in range(1, iters + 1):
        state = update_u(state, ymat, rng)
        state = update_v(state, ymat, rng)
        state = update_d(state, ymat, rng)
        state = update_variances(state, ymat, hyper, rng)
        if it % thin == 0:
            trace.append(np.sort(np.abs(state.d))[::-1])
            msum += state.mean_matrix()
    saved = len(trace)
    return SvdGibbsResult(d_trace=np.array(trace),
                          m_posterior_mean=msum / saved,
                          saved_count=saved,
                          final_state=state)


def rank_r_approximation(mat: np.ndarray, rank: int) -> np.ndarray:
    """Best rank-`rank` approximation in Frobenius norm (truncated SVD)."""
    mat = np.asarray(mat, dtype=np.float64)
    if not 1 <= rank <= min(mat.shape):
        raise DimensionError(f"need 1 <= rank <= min(m, n), got rank={rank}")
    uu, ss, vt = np.linalg.svd(mat, full_matrices=False)
    return (uu[:, :rank] * ss[:rank]) @ vt[:rank]


def mean_squared_error(truth: np.ndarray, estimate: np.ndarray) -> float:
    """Mean squared entry-wise difference (the loss used for comparisons)."""
    t = np.asarray(truth, dtype=np.float64)
    e = np.asarray(estimate, dtype=np.float64)
    if t.shape != e.shape:
        raise DimensionError(f"shape mismatch: {t.shape} vs {e.shape}")
    return float(np.mean((t - e) ** 2))
