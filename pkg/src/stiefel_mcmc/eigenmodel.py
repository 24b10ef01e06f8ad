"""Latent-eigenmodel probit analysis of a symmetric binary network.

For an n x n symmetric adjacency matrix y (diagonal undefined, missing
entries allowed), the model places a latent symmetric Gaussian matrix Z
with

    z_ij = theta + u_i' Lambda u_j + eps_ij,     y_ij = 1(z_ij > 0),

where U (n x R, orthonormal columns) holds the latent node factors,
Lambda = diag(lambda), off-diagonal eps have variance 1 and diagonal
entries variance 2 (they correspond to no observation and are simply
carried by the augmentation). Priors: theta ~ N(0, t2_theta), lambda_r
i.i.d. N(0, t2_lambda), U uniform on the manifold.

Estimation is by Gibbs sampling on (Z, theta, lambda, U); the full
conditional of U is the matrix Bingham family with A = (Z - theta)/2 and
B = lambda.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

from . import kernels
from .errors import ConstraintError, DimensionError, InputError
from .frames import OrthonormalFrame, random_uniform_frame, require_symmetric
from .samplers import sample_bingham_matrix_gibbs

MISSING = -1  # code for unobserved entries (includes the whole diagonal)


@dataclass(frozen=True)
class SymmetricBinaryNetwork:
    """Adjacency codes: 1 edge, 0 non-edge, -1 missing; diagonal always -1."""

    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.ndim != 2 or codes.shape[0] != codes.shape[1]:
            raise DimensionError("adjacency must be a square matrix")
        codes = codes.astype(np.int8, copy=True)
        if not np.isin(codes, (-1, 0, 1)).all():
            bad = np.argwhere(~np.isin(codes, (-1, 0, 1)))[0]
            raise InputError(
                f"adjacency entries must be 0, 1 or missing; "
                f"offending cell ({bad[0] + 1},{bad[1] + 1})")
        mismatch = np.argwhere(codes != codes.T)
        if mismatch.size:
            i, j = sorted(mismatch[0])
            raise ConstraintError(
                f"adjacency not symmetric: entries ({i + 1},{j + 1}) and "
                f"({j + 1},{i + 1}) disagree")
        np.fill_diagonal(codes, MISSING)
        codes.flags.writeable = False
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_dense(cls, y) -> "SymmetricBinaryNetwork":
        """Build from a float/object matrix where NaN (or None) marks missing."""
        arr = np.asarray(y, dtype=np.float64)
        codes = np.full(arr.shape, MISSING, dtype=np.int8)
        observed = np.isfinite(arr)
        codes[observed & (arr == 1)] = 1
        codes[observed & (arr == 0)] = 0
        if (observed & (arr != 0) & (arr != 1)).any():
            bad = np.argwhere(observed & (arr != 0) & (arr != 1))[0]
            raise InputError(
                f"adjacency entries must be 0, 1 or missing; "
                f"offending cell ({bad[0] + 1},{bad[1] + 1})")
        return cls(codes)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def observed_edge_density(self) -> float:
        """Fraction of observed off-diagonal entries equal to 1 (0.5 if none)."""
        iu = np.triu_indices(self.n, 1)
        vals = self.codes[iu]
        obs = vals[vals >= 0]
        if obs.size == 0:
            return 0.5
        return float(np.mean(obs))


@dataclass(frozen=True)
class NodeCovariates:
    """Per-node binary indicators carried through to the positions output."""

    table: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        if table.ndim != 2:
            raise DimensionError("covariate table must be 2-d")
        finite = np.isfinite(table)
        if ((table != 0) & (table != 1) & finite).any():
            raise InputError("covariate entries must be 0, 1 or missing")
        names = tuple(self.names) if self.names else tuple(
            f"x{k + 1}" for k in range(table.shape[1]))
        if len(names) != table.shape[1]:
            raise DimensionError("covariate names do not match column count")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.table.shape[0]


@dataclass(frozen=True)
class EigenHyperParams:
    t2_lambda: float
    t2_theta: float
    rank: int = 2

    def __post_init__(self):
        if not (self.t2_lambda > 0 and self.t2_theta > 0):
            raise InputError("t2_lambda and t2_theta must be strictly positive")
        if self.rank < 1:
            raise InputError("rank must be a positive integer")


@dataclass(frozen=True)
class EigenmodelState:
    Z: np.ndarray
    U: OrthonormalFrame
    lam: np.ndarray
    theta: float

    def __post_init__(self):
        z = np.asarray(self.Z, dtype=np.float64)
        lam = np.atleast_1d(np.asarray(self.lam, dtype=np.float64))
        if z.shape != (self.U.rows, self.U.rows):
            raise DimensionError("Z must be n x n with n = rows of U")
        if lam.shape != (self.U.cols,):
            raise DimensionError("lambda must have one entry per column of U")
        object.__setattr__(self, "Z", z)
        object.__setattr__(self, "lam", lam)

    def factor_matrix(self) -> np.ndarray:
        """U Lambda U', the latent low-rank part of the edge propensities."""
        return (self.U.entries * self.lam) @ self.U.entries.T


def sample_z_full_conditional(y: SymmetricBinaryNetwork, mean: np.ndarray,
                              rng: np.random.Generator) -> np.ndarray:
    """Draw the latent matrix given constraints: off-diagonal entries are
    N(mean, 1) forced positive where y = 1 and negative where y = 0,
    unconstrained where missing; diagonal entries are N(mean, 2)."""
    mean = require_symmetric(np.asarray(mean, dtype=np.float64),
                             tol=1e-8, name="mean")
    if mean.shape[0] != y.n:
        raise DimensionError(
            f"mean is {mean.shape}, expected ({y.n}, {y.n})")
    return kernels.zfill_probit(np.ascontiguousarray(mean), y.codes, rng)


def theta_conditional_moments(state: EigenmodelState,
                              hyper: EigenHyperParams) -> tuple[float, float]:
    """(mean, variance) of theta | Z, U, lambda: conjugate normal based on
    the upper-triangle residuals Z - U Lambda U'."""
    n = state.U.rows
    resid = state.Z - state.factor_matrix()
    iu = np.triu_indices(n, 1)
    var = 1.0 / (1.0 / hyper.t2_theta + n * (n - 1) / 2.0)
    mean = var * float(resid[iu].sum())
    return mean, var


def update_theta(state: EigenmodelState, hyper: EigenHyperParams,
                 rng: np.random.Generator) -> EigenmodelState:
    mean, var = theta_conditional_moments(state, hyper)
    return replace(state, theta=float(rng.normal(mean, np.sqrt(var))))


def lambda_conditional_moments(state: EigenmodelState,
                               hyper: EigenHyperParams) -> tuple[np.ndarray, float]:
    """(mean vector, common variance) of lambda | Z, U, theta.

    With E = Z - theta the likelihood term for lambda_r is
    exp(lambda_r u_r'Eu_r / 2 - lambda_r^2 / 4), i.e. Gaussian with
    precision 1/2; combining with the N(0, t2_lambda) prior gives
    variance v = 2 t2 / (2 + t2) and mean v (u_r'Eu_r) / 2.
    """
    resid = state.Z - state.theta
    var = 2.0 * hyper.t2_lambda / (2.0 + hyper.t2_lambda)
    u = state.U.entries
    quad = np.einsum("ir,ij,jr->r", u, resid, u)
    return var * quad / 2.0, float(var)


def update_lambda(state: EigenmodelState, hyper: EigenHyperParams,
                  rng: np.random.Generator) -> EigenmodelState:
    mean, var = lambda_conditional_moments(state, hyper)
    return replace(state, lam=rng.normal(mean, np.sqrt(var)))


def bingham_parameter(state: EigenmodelState) -> np.ndarray:
    """(Z - theta)/2, the A matrix of the U full conditional."""
    return (state.Z - state.theta) / 2.0


def update_u(state: EigenmodelState, rng: np.random.Generator) -> EigenmodelState:
    new_u = sample_bingham_matrix_gibbs(bingham_parameter(state), state.lam,
                                        state.U, rng)
    return replace(state, U=new_u)


def initial_state(y: SymmetricBinaryNetwork, hyper: EigenHyperParams,
                  rng: np.random.Generator) -> EigenmodelState:
    """Naive start: theta at the probit of the observed edge density,
    lambda = 0, U uniform; Z is drawn in the first sweep."""
    density = min(max(y.observed_edge_density(), 1.0 / (y.n * y.n)),
                  1.0 - 1.0 / (y.n * y.n))
    theta = float(ndtri(density))
    u = random_uniform_frame(y.n, hyper.rank, rng)
    z = np.zeros((y.n, y.n))
    return EigenmodelState(Z=z, U=u, lam=np.zeros(hyper.rank), theta=theta)


def check_sign_constraints(y: SymmetricBinaryNetwork, z: np.ndarray) -> None:
    """Raise if any latent entry contradicts an observed edge indicator."""
    codes = y.codes
    bad = ((codes == 1) & (z <= 0)) | ((codes == 0) & (z >= 0))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ConstraintError(
            f"latent z[{i + 1},{j + 1}] = {z[i, j]:.3e} violates observed "
            f"y = {codes[i, j]}")


@dataclass(frozen=True)
class EigenGibbsResult:
    lambda_trace: np.ndarray   # (saved, R), each row sorted increasing
    theta_trace: np.ndarray    # (saved,)
    m_bar: np.ndarray          # posterior mean of U Lambda U'
    saved_count: int
    final_state: EigenmodelState


def run_eigenmodel_gibbs(y: SymmetricBinaryNetwork, hyper: EigenHyperParams,
                         iters: int, burn: int, thin: int,
                         rng: np.random.Generator,
                         check_constraints: bool = False) -> EigenGibbsResult:
    """Run the Gibbs sampler: per iteration Z, theta, lambda, U in that
    order; after `burn` iterations every `thin`-th state is recorded
    (sorted lambda, theta, running sum of U Lambda U').

    check_constraints=True re-validates the sign pattern of Z against the
    observed network every iteration (test mode).
    """
    if iters <= burn or burn < 0 or thin < 1:
        raise InputError(
            f"need iters > burn >= 0 and thin >= 1, got {iters}/{burn}/{thin}")
    state = initial_state(y, hyper, rng)
    lam_rows, theta_vals = [], []
    msum = np.zeros((y.n, y.n))
    for it in range(1, iters + 1):
        z = sample_z_full_conditional(y, state.theta + state.factor_matrix(), rng)
        if check_constraints:
            check_sign_constraints(y, z)
        state = replace(state, Z=z)
        state = update_theta(state, hyper, rng)
        state = update_lambda(state, hyper, rng)
        state = update_u(state, rng)
        if it > burn and it % thin == 0:
            lam_rows.append(np.sort(state.lam))
            theta_vals.append(state.theta)
            msum += state.factor_matrix()
    saved = len(lam_rows)
    return EigenGibbsResult(lambda_trace=np.array(lam_rows),
                            theta_trace=np.array(theta_vals),
                            m_bar=msum / saved,
                            saved_count=saved,
                            final_state=state)


def latent_positions(m_bar: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Rank-`rank` eigendecomposition of the posterior mean factor matrix.

    Returns (positions, eigenvalues): the eigenvectors whose eigenvalues
    are largest in absolute value, ordered by decreasing |eigenvalue|,
    each with its first nonzero coordinate made nonnegative so output is
    deterministic up to that convention.
    """
    m_bar = require_symmetric(np.asarray(m_bar, dtype=np.float64),
                              tol=1e-8, name="m_bar")
    n = m_bar.shape[0]
    if not 1 <= rank <= n:
        raise DimensionError(f"need 1 <= rank <= n, got rank={rank}")
    vals, vecs = np.linalg.eigh(m_bar)
    order = np.argsort(-np.abs(vals), kind="stable")[:rank]
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(rank):
        col = vecs[:, k]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return vecs, vals


def generate_network(theta: float, lam: np.ndarray, u: OrthonormalFrame,
                     rng: np.random.Generator) -> SymmetricBinaryNetwork:
    """Simulate a network from the model: symmetric Gaussian latent matrix
    with the stated variance conventions, thresholded at zero."""
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    if lam.shape != (u.cols,):
        raise DimensionError("lambda must have one entry per column of U")
    n = u.rows
    mean = theta + (u.entries * lam) @ u.entries.T
    noise = rng.standard_normal((n, n))
    eps = np.triu(noise, 1)
    eps = eps + eps.T + np.diag(np.sqrt(2.0) * np.diag(noise))
    codes = ((mean + eps) > 0).astype(np.int8)
    np.fill_diagonal(codes, MISSING)
    return SymmetricBinaryNetwork(codes)
