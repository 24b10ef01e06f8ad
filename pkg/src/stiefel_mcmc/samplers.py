"""Random-variate generation for MF and Bingham families on sphere and manifold.

Vector samplers are exact draws:

* ``sample_mf_vector`` -- tangent-normal decomposition with Wood's (1994)
  rejection sampler for the angle cosine.
* ``sample_bingham_vector`` -- rotation to the eigenbasis of A plus
  rejection from an angular-central-Gaussian envelope (Kent, Ganeiber &
  Mardia 2018).

Matrix samplers are column-wise Gibbs kernels: conditional on the other
columns, column j of a frame is confined to the unit sphere of their
orthogonal complement, where the target reduces to a vector MF (resp.
vector Bingham) law. Each column is redrawn exactly from that conditional,
so one call is one sweep of a Markov kernel whose stationary distribution
is the target; it is not an independent draw from the target. For an
approximately independent draw, ``sample_mf_matrix`` runs a documented
number of burn sweeps from a uniform start.

Square frames (R = m) are accepted but the sweep degenerates there: each
column is determined by the others up to sign, so the kernel only flips
signs and is not irreducible on the orthogonal group. Keep R < m when the
chain actually needs to move.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import DimensionError, InputError
from .frames import (
    FRAME_TOL,
    OrthonormalFrame,
    frame_defect,
    orthonormalize,
    require_symmetric,
)

# Sweeps used by sample_mf_matrix to wash out the starting frame.
DEFAULT_BURN_SWEEPS = 25


@dataclass(frozen=True)
class GibbsKernelState:
    """Current frame of a matrix Gibbs kernel plus the number of sweeps taken."""

    current: OrthonormalFrame
    sweep_count: int = 0

    def advanced(self, new_frame: OrthonormalFrame) -> "GibbsKernelState":
        return replace(self, current=new_frame, sweep_count=self.sweep_count + 1)


def sample_mf_vector(c: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Exact draw from density prop-to exp(c'u) on the unit sphere of R^m."""
    c = np.ascontiguousarray(np.atleast_1d(c), dtype=np.float64)
    if c.ndim != 1 or c.shape[0] < 1:
        raise DimensionError("c must be a non-empty vector")
    if not np.all(np.isfinite(c)):
        raise InputError("c has non-finite entries")
    return kernels.mf_vector(c, rng)


def sample_bingham_vector(A: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Exact draw from density prop-to exp(u'Au) on the unit sphere of R^m."""
    a = require_symmetric(A)
    if not np.all(np.isfinite(a)):
        raise InputError("A has non-finite entries")
    lam, evecs = np.linalg.eigh(a)
    y = kernels.bingham_spectral(lam, rng)
    u = evecs @ y
    return u / np.linalg.norm(u)


def _null_basis(u: np.ndarray, j: int) -> np.ndarray:
    """Orthonormal basis N of the orthogonal complement of the columns of u
    other than column j. Shape (m, m-r+1)."""
    m, r = u.shape
    if r == 1:
        return np.eye(m)
    others = np.delete(u, j, axis=1)
    q, _ = np.linalg.qr(others, mode="complete")
    return q[:, r - 1:]


def _check_kernel_args(param: np.ndarray, current: OrthonormalFrame, name: str):
    if param.shape != (current.rows, current.cols):
        raise DimensionError(
            f"{name} has shape {param.shape}, expected "
            f"{(current.rows, current.cols)} to match the frame")


def _ensure_frame(entries: np.ndarray) -> OrthonormalFrame:
    # repair drift instead of failing; sweeps only compose orthonormal
    # pieces so this fires rarely even in very long runs
    if frame_defect(entries) > FRAME_TOL:
        entries = orthonormalize(entries)
    return OrthonormalFrame(entries)


def sample_mf_matrix_gibbs(C: np.ndarray,
                           current: OrthonormalFrame,
                           rng: np.random.Generator) -> OrthonormalFrame:
    """One Gibbs sweep over columns targeting density prop-to etr(C'U)."""
    c = np.asarray(C, dtype=np.float64)
    _check_kernel_args(c, current, "C")
    if not np.all(np.isfinite(c)):
        raise InputError("C has non-finite entries")
    u = current.entries.copy()
    m, r = u.shape
    for j in range(r):
        if r == 1:
            u[:, 0] = kernels.mf_vector(np.ascontiguousarray(c[:, 0]), rng)
            continue
        nb = _null_basis(u, j)
        cj = np.ascontiguousarray(nb.T @ c[:, j])
        if not cj.any():
            z = kernels.sample_sphere(nb.shape[1], rng)
        else:
            z = kernels.mf_vector(cj, rng)
        u[:, j] = nb @ z
    return _ensure_frame(u)


def sample_mf_matrix(C: np.ndarray,
                     rng: np.random.Generator,
                     sweeps: int = DEFAULT_BURN_SWEEPS,
                     initial: OrthonormalFrame | None = None) -> OrthonormalFrame:
    """Approximately independent draw targeting etr(C'U).

    Runs `sweeps` Gibbs sweeps (default 25) from a uniform random frame,
    or from `initial` when given. The result is a Markov-chain state, not
    an exact draw; 25 sweeps is ample for the moderate concentrations
    arising in the bundled models.
    """
    from .frames import random_uniform_frame

    c = np.asarray(C, dtype=np.float64)
    if c.ndim != 2:
        raise DimensionError("C must be a matrix")
    state = initial if initial is not None else random_uniform_frame(
        c.shape[0], c.shape[1], rng)
    for _ in range(max(1, sweeps)):
        state = sample_mf_matrix_gibbs(c, state, rng)
    return state


def sample_bingham_matrix_gibbs(A: np.ndarray,
                                b: np.ndarray,
                                current: OrthonormalFrame,
                                rng: np.random.Generator) -> OrthonormalFrame:
    """One Gibbs sweep over columns targeting density prop-to etr(diag(b) U'A U).

    A is centered by its mean diagonal entry before anything else; the
    target is invariant under A -> A + aI, and doing the shift up front
    makes the kernel honor that invariance by construction (identical
    random streams give identical output) while also keeping the
    exponentials well scaled.
    """
    a = require_symmetric(A)
    bvec = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if a.shape[0] != current.rows:
        raise DimensionError(
            f"A has shape {a.shape}, expected ({current.rows}, {current.rows})")
    if bvec.shape != (current.cols,):
        raise DimensionError(
            f"b has shape {bvec.shape}, expected ({current.cols},)")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(bvec))):
        raise InputError("A or b has non-finite entries")

    m = a.shape[0]
    a = a - (np.trace(a) / m) * np.eye(m)

    u = current.entries.copy()
    r = u.shape[1]
    for j in range(r):
        nb = _null_basis(u, j) if r > 1 else None
        if bvec[j] == 0.0:
            q = m if nb is None else nb.shape[1]
            z = kernels.sample_sphere(q, rng)
        else:
            sub = a if nb is None else nb.T @ a @ nb
            lam, evecs = np.linalg.eigh(bvec[j] * sub)
            z = evecs @ kernels.bingham_spectral(lam, rng)
        u[:, j] = z if nb is None else nb @ z
    return _ensure_frame(u)
