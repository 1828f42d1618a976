"""Operator-determinant solver for linear multiparameter eigenvalue problems.

A linear MEP consists of d equations W_i(x) v_i = (V_i0 - sum_j x_j V_ij) v_i
= 0 sharing the point x in C^d.  The block Kronecker determinants Delta_0 and
Delta_k turn it into d generalized eigenvalue problems
(Delta_k - x_k Delta_0) z = 0 with the shared eigenvector
z = v_1 kron ... kron v_d.
"""

import itertools

import numpy as np
import scipy.linalg

from .errors import SingularMepError
from .extract import Solution, SolutionSet, residual
from .mpoly import Basis, MatrixPoly, Pmep

__all__ = ["LinearMep", "delta", "solve_linear_mep", "kron_factor"]


class LinearMep:
    """Coefficient container: one constant and d coefficient matrices per equation."""

    def __init__(self, v0, vmats):
        self.v0 = [np.asarray(m, dtype=complex) for m in v0]
        self.vmats = [[np.asarray(m, dtype=complex) for m in row] for row in vmats]
        self.d = len(self.v0)
        if len(self.vmats) != self.d or any(len(row) != self.d for row in self.vmats):
            raise ValueError("need d coefficient matrices per equation")
        self.sizes = []
        for i in range(self.d):
            n = self.v0[i].shape[0]
            for m in [self.v0[i]] + self.vmats[i]:
                if m.shape != (n, n):
                    raise ValueError(f"equation {i + 1} matrices must all be {n}x{n}")
            self.sizes.append(n)
        self.sizes = tuple(self.sizes)
        self.N = int(np.prod(self.sizes))

    def eval_equation(self, i, x):
        """W_i(x) = V_i0 - sum_j x_j V_ij."""
        x = np.asarray(x, dtype=complex).reshape(-1)
        out = self.v0[i].copy()
        for j in range(self.d):
            out -= x[j] * self.vmats[i][j]
        return out

    def to_pmep(self):
        """Encode as a dense degree-(1,...,1) polynomial system."""
        polys = []
        for i in range(self.d):
            n = self.sizes[i]
            coeffs = np.zeros((2,) * self.d + (n, n), dtype=complex)
            coeffs[(0,) * self.d] = self.v0[i]
            for j in range(self.d):
                idx = [0] * self.d
                idx[j] = 1
                coeffs[tuple(idx)] = -self.vmats[i][j]
            polys.append(MatrixPoly(coeffs, Basis.MONOMIAL))
        return Pmep(polys)


def delta(mep, k):
    """Block Kronecker determinant: Delta_0 for k = 0, else column k replaced by V_i0."""
    if not 0 <= k <= mep.d:
        raise ValueError("k must lie in 0..d")

    def column(i, j):
        if k and j == k - 1:
            return mep.v0[i]
        return mep.vmats[i][j]

    out = np.zeros((mep.N, mep.N), dtype=complex)
    for sigma in itertools.permutations(range(mep.d)):
        term = column(0, sigma[0])
        for i in range(1, mep.d):
            term = np.kron(term, column(i, sigma[i]))
        out += _perm_sign(sigma) * term
    return out


def _perm_sign(sigma):
    sign = 1
    seen = [False] * len(sigma)
    for start in range(len(sigma)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def kron_factor(z, sizes):
    """Best rank-1 Kronecker factorization of z into per-equation vectors."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    factors = []
    rest = z
    for n in sizes[:-1]:
        mat = rest.reshape(n, -1)
        u, sv, vh = np.linalg.svd(mat, full_matrices=False)
        factors.append(u[:, 0])
        rest = sv[0] * vh[0]
    factors.append(rest / np.linalg.norm(rest))
    return factors


def solve_linear_mep(mep):
    """Solve a regular linear MEP through its operator determinants.

    Solves the x_d generalized eigenvalue problem once; the other coordinates
    come from generalized Rayleigh quotients with the left eigenvectors, which
    ties every coordinate to the same underlying eigenvector and avoids
    combinatorial matching across the d eigenproblems.
    """
    d0 = delta(mep, 0)
    sv = np.linalg.svd(d0, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] <= 1e-12:
        raise SingularMepError("Delta_0 is numerically singular; not a regular MEP")
    deltas = [delta(mep, k) for k in range(1, mep.d + 1)]
    vals, left, right = scipy.linalg.eig(deltas[-1], d0, left=True, right=True)
    pmep = mep.to_pmep()
    sols = []
    for idx in range(vals.shape[0]):
        z = right[:, idx]
        w = left[:, idx]
        denom = w.conj() @ (d0 @ z)
        x = np.empty(mep.d, dtype=complex)
        x[-1] = vals[idx]
        for k in range(mep.d - 1):
            x[k] = (w.conj() @ (deltas[k] @ z)) / denom
        sol = Solution(x, residual(pmep, x))
        sol.eigenvectors = kron_factor(z, mep.sizes)
        sols.append(sol)
    sols.sort(key=lambda s: s.residual)
    return SolutionSet(sols, {"resultant_size": mep.N, "normal_rank": mep.N,
                              "projected": False, "dropped_eigenpairs": 0,
                              "rotation_seed": None})
