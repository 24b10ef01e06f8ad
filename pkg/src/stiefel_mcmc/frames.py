"""Orthonormal frames and Bingham-von Mises-Fisher (BMF) parameterizations.

A frame is an m x R matrix U with U'U = I_R, i.e. a point on the Stiefel
manifold V_{R,m}. The BMF exponential family on that manifold has
unnormalized density

    p(U | A, B, C)  prop-to  etr(C'U + B U'A U)

with A symmetric (m x m), B diagonal (R x R, stored here as a vector) and
C an arbitrary m x R matrix. For R = 1 this reduces to the vector family
exp(c'u + u'Au) on the unit sphere; B is absorbed into A. The linear part
alone (A = 0) is the von Mises-Fisher family, the quadratic part alone
(C = 0) is the Bingham family.

Only unnormalized log-densities are provided; the normalizing constants
(hypergeometric functions of matrix argument) are out of scope.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, DimensionError

# Max-norm tolerance for U'U = I, enforced at construction and after
# every sampler step.
FRAME_TOL = 1e-10
# Tolerance for symmetry checks on A.
SYMMETRY_TOL = 1e-12


def frame_defect(entries: np.ndarray) -> float:
    """max |U'U - I|, the orthonormality defect of a candidate frame."""
    entries = np.asarray(entries, dtype=np.float64)
    r = entries.shape[1]
    return float(np.max(np.abs(entries.T @ entries - np.eye(r))))


def orthonormalize(entries: np.ndarray) -> np.ndarray:
    """Thin QR with the sign of diag(R) fixed to be positive.

    Used both to repair floating-point drift after long Gibbs runs and as
    the measure-preserving step of uniform sampling (the sign fix removes
    the QR sign ambiguity that would otherwise break Haar uniformity).
    """
    q, r = np.linalg.qr(np.asarray(entries, dtype=np.float64))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def require_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL, name: str = "A") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.abs(a - a.T) <= tol):
        raise ConstraintError(f"{name} is not symmetric within {tol}")
    return a


@dataclass(frozen=True)
class OrthonormalFrame:
    """An m x R matrix with orthonormal columns (a point on V_{R,m})."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.ndim != 2:
            raise DimensionError(f"frame must be 2-d, got ndim={entries.ndim}")
        m, r = entries.shape
        if r < 1 or m < 1:
            raise DimensionError(f"frame dimensions must be positive, got {m}x{r}")
        if r > m:
            raise DimensionError(f"frame has more columns than rows ({m}x{r})")
        if frame_defect(entries) > FRAME_TOL:
            raise ConstraintError(
                f"columns not orthonormal: max |U'U - I| = {frame_defect(entries):.3e} "
                f"> {FRAME_TOL}")
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


def random_uniform_frame(m: int, r: int, rng: np.random.Generator) -> OrthonormalFrame:
    """Draw a frame uniformly (invariant Haar measure) on V_{r,m}.

    Standard construction: thin QR of an m x r matrix of independent
    standard normals, with diag(R) made positive.
    """
    if m < 1 or r < 1 or r > m:
        raise DimensionError(f"need 1 <= r <= m, got m={m}, r={r}")
    return OrthonormalFrame(orthonormalize(rng.standard_normal((m, r))))


@dataclass(frozen=True)
class BmfParams:
    """Parameters (A, b, C) of the matrix BMF density etr(C'U + diag(b) U'A U).

    b is stored in non-increasing order; if the input is not ordered, the
    sorting permutation is applied to b and to the columns of C together
    (the same distribution up to relabeling of columns) and recorded in
    ``column_order``: canonical column j corresponds to input column
    column_order[j].
    """

    A: np.ndarray
    b: np.ndarray
    C: np.ndarray
    column_order: np.ndarray = field(init=False)

    def __post_init__(self):
        a = require_symmetric(self.A)
        b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        c = np.asarray(self.C, dtype=np.float64)
        if b.ndim != 1:
            raise DimensionError("b must be a vector")
        if c.ndim != 2:
            raise DimensionError("C must be a matrix")
        m, r = c.shape
        if a.shape[0] != m or b.shape[0] != r:
            raise DimensionError(
                f"inconsistent shapes: A {a.shape}, b ({b.shape[0]},), C {c.shape}")
        # stable sort keeps ties deterministic
        order = np.argsort(-b, kind="stable")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b[order])
        object.__setattr__(self, "C", c[:, order])
        object.__setattr__(self, "column_order", order)

    @property
    def rows(self) -> int:
        return self.C.shape[0]

    @property
    def cols(self) -> int:
        return self.C.shape[1]


def canonicalize_bmf(A, b, C) -> BmfParams:
    """Reorder (b, C) so that b is non-increasing; see BmfParams."""
    return BmfParams(A, b, C)


@dataclass(frozen=True)
class VectorBmfParams:
    """Parameters (c, A) of the vector BMF density exp(c'u + u'Au) on the sphere."""

    c: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=np.float64))
        a = require_symmetric(self.A)
        if c.ndim != 1:
            raise DimensionError("c must be a vector")
        if a.shape[0] != c.shape[0]:
            raise DimensionError(
                f"inconsistent shapes: c ({c.shape[0]},), A {a.shape}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", a)


def log_density_bmf(params: BmfParams, frame: OrthonormalFrame) -> float:
    """Unnormalized log-density tr(C'U) + tr(diag(b) U'A U).

    Adding a*I to A shifts this by a * sum(b) for every frame (since
    U'U = I), so log-density differences are invariant under A -> A + aI.
    """
    u = frame.entries
    if u.shape != params.C.shape:
        raise DimensionError(
            f"frame shape {u.shape} does not match params shape {params.C.shape}")
    quad = np.einsum("ij,ik,kj->j", u, params.A, u)
    return float(np.sum(params.C * u) + params.b @ quad)


def log_density_vector_bmf(params: VectorBmfParams, u: np.ndarray) -> float:
    """Unnormalized log-density c'u + u'Au for a unit vector u."""
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if u.shape != params.c.shape:
        raise DimensionError(
            f"u has shape {u.shape}, expected {params.c.shape}")
    if abs(u @ u - 1.0) > FRAME_TOL:
        raise ConstraintError(f"u is not a unit vector: |u|^2 = {u @ u:.15f}")
    return float(params.c @ u + u @ params.A @ u)
