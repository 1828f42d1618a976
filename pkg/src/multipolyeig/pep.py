"""Univariate polynomial eigenvalue problems: linearization, QZ, projection.

A matrix polynomial R(lambda) of degree m is reduced to a pencil A + lambda*B
of side m*dim (companion form in the monomial basis, colleague form in the
Chebyshev basis), solved densely, and—when R is a singular polynomial—first
compressed to its normal rank by a random two-sided orthogonal projection.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dixon import ResultantPoly
from .errors import ProjectionFailureError
from .mpoly import Basis

__all__ = [
    "MatrixPencil",
    "RankProfile",
    "companion_linearize",
    "colleague_linearize",
    "solve_gep",
    "solve_pep",
    "normal_rank",
    "project_singular",
]


@dataclass
class MatrixPencil:
    """Linear matrix polynomial A + lambda*B."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        self.B = np.asarray(self.B, dtype=complex)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")
        if self.B.shape != self.A.shape:
            raise ValueError("A and B must have the same shape")

    @property
    def dim(self):
        return self.A.shape[0]

    def eval(self, lam):
        return self.A + lam * self.B


@dataclass
class RankProfile:
    """Numerical normal rank of a matrix polynomial with its probe evidence."""

    normal_rank: int
    sample_points: list
    singular_values: list = field(repr=False)
    rank_tol: float = 1e-10


def _blocks(R):
    if R.m < 1:
        raise ValueError("constant matrix polynomial has no eigenvalues to linearize")
    return R.m, R.size


def companion_linearize(R):
    """Companion pencil of a monomial-basis matrix polynomial.

    The pencil's right eigenvectors stack the blocks
    [lambda^(m-1) v; ...; lambda v; v].
    """
    if R.basis != Basis.MONOMIAL:
        raise ValueError("companion form requires the monomial basis")
    m, n = _blocks(R)
    dim = m * n
    eye = np.eye(n)
    A = np.zeros((dim, dim), dtype=complex)
    B = np.zeros((dim, dim), dtype=complex)
    B[:n, :n] = R.coeffs[m]
    for j in range(1, m):
        B[j * n : (j + 1) * n, j * n : (j + 1) * n] = eye
    for k in range(m):
        A[:n, k * n : (k + 1) * n] = R.coeffs[m - 1 - k]
    for j in range(1, m):
        A[j * n : (j + 1) * n, (j - 1) * n : j * n] = -eye
    return MatrixPencil(A, B)


def colleague_linearize(R):
    """Colleague pencil of a Chebyshev-basis matrix polynomial.

    Right eigenvectors stack [T_{m-1}(lambda) v; ...; T_1(lambda) v; v].
    """
    if R.basis != Basis.CHEBYSHEV1:
        raise ValueError("colleague form requires the Chebyshev basis")
    m, n = _blocks(R)
    if m == 1:
        return MatrixPencil(R.coeffs[0], R.coeffs[1])
    dim = m * n
    eye = np.eye(n)
    A = np.zeros((dim, dim), dtype=complex)
    B = np.zeros((dim, dim), dtype=complex)
    B[:n, :n] = 2.0 * R.coeffs[m]
    for j in range(1, m):
        B[j * n : (j + 1) * n, j * n : (j + 1) * n] = eye
    for k in range(m):
        A[:n, k * n : (k + 1) * n] = R.coeffs[m - 1 - k]
    A[:n, n : 2 * n] -= R.coeffs[m]
    for j in range(1, m - 1):
        A[j * n : (j + 1) * n, (j - 1) * n : j * n] = -eye / 2.0
        A[j * n : (j + 1) * n, (j + 1) * n : (j + 2) * n] = -eye / 2.0
    A[(m - 1) * n : m * n, (m - 2) * n : (m - 1) * n] = -eye
    return MatrixPencil(A, B)


def solve_gep(pencil):
    """All eigenpairs of A + lambda*B; infinite eigenvalues come out as inf."""
    alpha_beta, vecs = scipy.linalg.eig(
        pencil.A, -pencil.B, homogeneous_eigvals=True, right=True
    )
    alphas, betas = alpha_beta
    out = []
    for j in range(pencil.dim):
        if betas[j] == 0:
            lam = complex(np.inf)
        else:
            lam = complex(alphas[j] / betas[j])
            if not np.isfinite(lam):
                lam = complex(np.inf)
        out.append((lam, vecs[:, j]))
    return out


def eigenvector_block(vec, size):
    """Best-conditioned size-length block of a linearization eigenvector."""
    blocks = np.asarray(vec, dtype=complex).reshape(-1, size)
    norms = np.linalg.norm(blocks, axis=1)
    return blocks[int(np.argmax(norms))]


def solve_pep(R):
    """Finite eigenpairs of a matrix polynomial via its linearization.

    Returns (lambda, v) pairs with v recovered from the largest block of the
    linearization eigenvector.
    """
    pencil = (
        colleague_linearize(R) if R.basis == Basis.CHEBYSHEV1 else companion_linearize(R)
    )
    pairs = []
    for lam, vec in solve_gep(pencil):
        if np.isinf(lam):
            continue
        pairs.append((lam, eigenvector_block(vec, R.size)))
    return pairs


def _rank_from_singular_values(sv, rank_tol):
    # Rank is cut at the crossing below rank_tol.  Gaps *within* the
    # below-tolerance tail carry no rank information (roundoff junk next to
    # exact zeros produces huge spurious gaps there).
    sv = np.asarray(sv)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv / sv[0] > rank_tol))


def normal_rank(R, probes=3, rank_tol=1e-10, rng=None):
    """Numerical normal rank of R by sampling on a randomly rotated circle."""
    if probes < 1:
        raise ValueError("need at least one probe")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    phase = np.exp(2j * np.pi * rng.uniform())
    points = [phase * np.exp(2j * np.pi * j / probes) for j in range(probes)]
    best = 0
    all_sv = []
    for z in points:
        sv = np.linalg.svd(R.eval(z), compute_uv=False)
        all_sv.append(sv)
        best = max(best, _rank_from_singular_values(sv, rank_tol))
    return RankProfile(best, points, all_sv, rank_tol)


def project_singular(R, rp, rng=None):
    """Two-sided orthogonal compression of a singular matrix polynomial.

    Draws U (r x dim, orthonormal rows) and V (dim x r, orthonormal columns)
    from Gaussian matrices and forms R'(lambda) = U R(lambda) V, re-probing
    to confirm the compressed polynomial has full normal rank r; redraws up
    to three times before giving up.
    """
    r = rp.normal_rank
    dim = R.size
    if r > dim:
        raise ValueError("normal rank exceeds dimension")
    if r == dim:
        eye = np.eye(dim, dtype=complex)
        return R, eye, eye
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    for _ in range(3):
        gu = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
        gv = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
        u = np.linalg.qr(gu)[0].conj().T
        v = np.linalg.qr(gv)[0]
        coeffs = np.einsum("rd,kde,es->krs", u, R.coeffs, v)
        projected = ResultantPoly(coeffs, R.basis)
        if normal_rank(projected, probes=3, rank_tol=rp.rank_tol, rng=rng).normal_rank == r:
            return projected, u, v
    raise ProjectionFailureError(
        f"projection to normal rank {r} not confirmed after 3 draws"
    )
