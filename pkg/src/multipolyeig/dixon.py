"""Hidden-variable tensor Dixon resultant construction.

Pipeline per interpolation node in the hidden variable x_d:

1. evaluate the block-determinant numerator of the Dixon function on a tensor
   grid in (s_1..s_{d-1}, t_1..t_{d-1}),
2. divide out prod_k (s_k - t_k) exactly,
3. unfold the coefficient tensor into a square matrix,

then interpolate the matrices across the x_d nodes to get the matrix
polynomial R(x_d).

Layout conventions (fixed; the on-disk format and eigenvector extraction rely
on them):

* the Dixon coefficient tensor F has axes (i_1..i_{d-1}, j_1..j_{d-1}, r, c)
  where F[i, j] is the N-by-N coefficient of prod_k s_k^{i_k} t_k^{j_k}
  (basis powers in the Chebyshev case),
* unfolding maps block column (i_1..i_{d-1}) and block row (j_1..j_{d-1}) to
  flat indices colexicographically (index 1 fastest) with N-sized blocks
  contiguous: row = r + N*(j_1 + (beta_1+1)*(j_2 + ...)).

The eigenvectors of R(x_d) then carry ascending block Vandermonde structure:
block (i_1..i_{d-1}) holds prod_k x_k^{i_k} * (v_1 kron ... kron v_d).
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _basisops as bo
from .errors import DixonConsistencyError
from .mpoly import Basis, MatrixPoly, Pmep

__all__ = [
    "DixonShape",
    "ResultantPoly",
    "dixon_numerator_eval",
    "divide_out",
    "unfold",
    "refold",
    "build_resultant",
]


class DixonShape:
    """Degree bookkeeping for the tensor Dixon construction of one Pmep."""

    def __init__(self, d, tau, sizes):
        if d < 2:
            raise ValueError("the Dixon construction needs d >= 2")
        tau = tuple(int(t) for t in tau)
        if len(tau) != d or len(sizes) != d:
            raise ValueError("tau/sizes must have length d")
        if any(t < 1 for t in tau[:-1]):
            raise ValueError("every non-hidden variable must appear (tau_k >= 1 for k < d)")
        if tau[-1] < 0:
            raise ValueError("negative degree bound")
        self.d = d
        self.tau = tau
        self.sizes = tuple(int(n) for n in sizes)
        self.N = int(np.prod(self.sizes))
        self.alpha = tuple((k + 1) * tau[k] - 1 for k in range(d - 1))
        self.beta = tuple((d - k - 1) * tau[k] - 1 for k in range(d - 1))
        blocks = int(np.prod([a + 1 for a in self.alpha])) if d > 1 else 1
        expected = math.factorial(d - 1) * int(np.prod(tau[:-1]))
        if blocks != expected:
            raise AssertionError("block-count identity violated")
        self.num_blocks = blocks
        self.resultant_size = self.N * blocks
        self.xd_degree_bound = d * tau[-1]

    @classmethod
    def from_pmep(cls, p):
        return cls(p.d, p.tau, p.sizes)

    def __repr__(self):
        return (
            f"DixonShape(d={self.d}, tau={self.tau}, N={self.N}, "
            f"size={self.resultant_size}, xd_deg<={self.xd_degree_bound})"
        )


class ResultantPoly:
    """Univariate matrix polynomial R(x_d) as a stack of coefficient matrices."""

    def __init__(self, coeffs, basis=Basis.MONOMIAL):
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError("coeffs must be a stack of square matrices")
        if arr.shape[0] < 1:
            raise ValueError("need at least the constant coefficient")
        self.coeffs = arr
        self.basis = basis if isinstance(basis, Basis) else Basis(basis)

    @property
    def m(self):
        return self.coeffs.shape[0] - 1

    @property
    def size(self):
        return self.coeffs.shape[1]

    def __repr__(self):
        return f"ResultantPoly(m={self.m}, size={self.size}, basis={self.basis.tag})"

    def eval(self, xd):
        return bo.val_axis0(self.basis.tag, complex(xd), self.coeffs)

    def max_coeff_norm(self):
        return float(np.max(np.linalg.norm(self.coeffs, axis=(1, 2)))) if self.coeffs.size else 0.0

    def convert_basis(self, target):
        target = target if isinstance(target, Basis) else Basis(target)
        if target == self.basis:
            return self
        mat = bo.conversion_matrix(self.basis.tag, target.tag, self.m)
        return ResultantPoly(np.tensordot(mat, self.coeffs, axes=(1, 0)), target)

    def trim(self, tol=1e-10):
        """Drop trailing coefficients small relative to the largest one."""
        norms = np.linalg.norm(self.coeffs, axis=(1, 2))
        top = float(np.max(norms))
        if top == 0.0:
            return ResultantPoly(self.coeffs[:1], self.basis)
        keep = self.m + 1
        while keep > 1 and norms[keep - 1] <= tol * top:
            keep -= 1
        return ResultantPoly(self.coeffs[:keep], self.basis)


def _hybrid_point(s, t, xd, col):
    """Evaluation point of block column `col` (0-based): t before, s from col on."""
    return np.concatenate([t[:col], s[col:], [xd]])


def dixon_numerator_eval(p, s, t, xd):
    """Numerator of the Dixon function at one point (s, t, x_d).

    Leibniz expansion of the d-by-d block determinant whose (i, j) block is
    P_i at the hybrid point (t_1..t_{j-1}, s_j..s_{d-1}, x_d), with ordinary
    products replaced by Kronecker products taken in equation order.
    """
    s = np.asarray(s, dtype=complex).reshape(-1)
    t = np.asarray(t, dtype=complex).reshape(-1)
    d = p.d
    if s.shape != (d - 1,) or t.shape != (d - 1,):
        raise ValueError("s and t must have length d-1")
    evals = [
        [poly.eval(_hybrid_point(s, t, xd, col)) for col in range(d)] for poly in p.polys
    ]
    total = np.zeros((p.N, p.N), dtype=complex)
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        term = evals[0][perm[0]]
        for i in range(1, d):
            term = np.kron(term, evals[i][perm[i]])
        total += sign * term
    return total


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _kron_batched(a, b):
    """Kronecker product of matrix stacks with broadcast batch axes."""
    p, q = a.shape[-2], a.shape[-1]
    r, s = b.shape[-2], b.shape[-1]
    out = np.einsum("...ab,...cd->...acbd", a, b)
    return out.reshape(out.shape[:-4] + (p * r, q * s))


def _split_interleaved(k_s, k_t):
    """Split the size-(k_s+k_t) Chebyshev family into disjoint s/t node sets."""
    total = k_s + k_t
    nodes = bo.cheb1_nodes(total)
    take_s = np.zeros(total, dtype=bool)
    count = 0
    for i in range(total):
        if (i + 1) * k_s // total > count:
            take_s[i] = True
            count += 1
    return nodes[take_s], nodes[~take_s]


def _numerator_on_grid(p, shape, s_grids, t_grids, xd):
    """Numerator values on the tensor grid; axes (s_1.., t_1.., N, N)."""
    d = p.d
    hidden = [poly.hide_last(xd) if d > 1 else poly for poly in p.polys]
    s_rows = [bo.basis_rows(p.basis.tag, s_grids[k], shape.tau[k]) for k in range(d - 1)]
    t_rows = [bo.basis_rows(p.basis.tag, t_grids[k], shape.tau[k]) for k in range(d - 1)]
    grid_axes = 2 * (d - 1)
    evals = []
    for poly in hidden:
        per_col = []
        for col in range(d):
            vals = poly.coeffs
            for k in range(d - 1):
                rows = t_rows[k] if k < col else s_rows[k]
                vals = bo.apply_matrix_axis(vals, rows, k)
            # expand to the common axis order (s_1.., t_1.., n, n)
            full = np.expand_dims(vals, axis=tuple(range(d - 1, 2 * (d - 1))))
            order = list(range(grid_axes + 2))
            for k in range(d - 1):
                if k < col:  # axis k currently holds the t_k grid
                    order[k], order[d - 1 + k] = order[d - 1 + k], order[k]
            per_col.append(np.transpose(full, order) if col else full)
        evals.append(per_col)
    first = True
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        term = evals[0][perm[0]]
        for i in range(1, d):
            term = _kron_batched(term, evals[i][perm[i]])
        total = sign * term if first else total + sign * term
        first = False
    return total


def _axis_pair(shape, k):
    """Tensor axes of the s_k and t_k degrees in a Dixon coefficient tensor."""
    return k, (shape.d - 1) + k


def _divide_pair_monomial(g, ax_s, ax_t, a_max, b_max):
    """Exact division of monomial coefficients g by (s - t) along an axis pair.

    g has degree a_max+1 in the s axis and b_max+1 in the t axis; the quotient
    h (degrees a_max, b_max) satisfies g[a, b] = h[a-1, b] - h[a, b-1].
    """
    out_shape = list(g.shape)
    out_shape[ax_s] = a_max + 1
    out_shape[ax_t] = b_max + 1
    h = np.zeros(out_shape, dtype=complex)

    def g_at(a, b):
        idx = [slice(None)] * g.ndim
        idx[ax_s], idx[ax_t] = a, b
        return g[tuple(idx)]

    def h_at(a, b):
        idx = [slice(None)] * h.ndim
        idx[ax_s], idx[ax_t] = a, b
        return h[tuple(idx)]

    for b in range(b_max + 1):
        for a in range(a_max, -1, -1):
            val = g_at(a + 1, b)
            if b >= 1 and a + 1 <= a_max:
                val = val + h_at(a + 1, b - 1)
            idx = [slice(None)] * h.ndim
            idx[ax_s], idx[ax_t] = a, b
            h[tuple(idx)] = val
    return h


def _multiply_pair(h, basis, ax_s, ax_t):
    """(s - t) * h in coefficient space along one axis pair."""
    ms = bo.shift_multiply_matrix(basis.tag, h.shape[ax_s] - 1)
    mt = bo.shift_multiply_matrix(basis.tag, h.shape[ax_t] - 1)
    sh = bo.apply_matrix_axis(h, ms, ax_s)
    sh = _pad_axis(sh, ax_t, 1)
    th = bo.apply_matrix_axis(h, mt, ax_t)
    th = _pad_axis(th, ax_s, 1)
    return sh - th


def _pad_axis(arr, axis, extra):
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (0, extra)
    return np.pad(arr, pad)


def _truncate_axis(arr, axis, size):
    idx = [slice(None)] * arr.ndim
    idx[axis] = slice(0, size)
    return arr[tuple(idx)]


def divide_out(numerator_coeffs, shape, basis, check_tol=1e-8):
    """Divide numerator coefficients by prod_k (s_k - t_k), pair by pair.

    `numerator_coeffs` has axes (s_1.., t_1.., N, N) with degree alpha_k+1 in
    the s_k axis and beta_k+1 in the t_k axis. Monomial basis uses the exact
    coefficient recurrence; Chebyshev input should be divided in value space
    (see build_resultant), so only monomial is accepted here.

    Every partial quotient is multiplied back and compared with the input;
    a relative mismatch above check_tol raises DixonConsistencyError.
    """
    basis = basis if isinstance(basis, Basis) else Basis(basis)
    if basis != Basis.MONOMIAL:
        raise ValueError("coefficient-space division is monomial-only")
    g = np.asarray(numerator_coeffs, dtype=complex)
    scale = float(np.max(np.abs(g))) or 1.0
    h = g
    for k in range(shape.d - 1):
        ax_s, ax_t = _axis_pair(shape, k)
        prev = h
        h = _divide_pair_monomial(prev, ax_s, ax_t, shape.alpha[k], shape.beta[k])
        back = _multiply_pair(h, basis, ax_s, ax_t)
        err = float(np.max(np.abs(back - prev)))
        if err > check_tol * scale:
            raise DixonConsistencyError(
                f"divide-out failed the multiply-back check on pair {k + 1}: "
                f"relative error {err / scale:.3e}"
            )
    return h


def unfold(f_coeffs, shape):
    """Unfold a Dixon coefficient tensor into the resultant matrix.

    Block columns are indexed by the s multi-index, block rows by the t
    multi-index, both colexicographically with index 1 fastest; N-sized
    blocks are contiguous.
    """
    d = shape.d
    expected = (
        tuple(a + 1 for a in shape.alpha)
        + tuple(b + 1 for b in shape.beta)
        + (shape.N, shape.N)
    )
    f_coeffs = np.asarray(f_coeffs)
    if f_coeffs.shape != expected:
        raise ValueError(f"tensor shape {f_coeffs.shape} does not match {expected}")
    n_i = d - 1
    i_axes = list(range(n_i))
    j_axes = list(range(n_i, 2 * n_i))
    r_axis, c_axis = 2 * n_i, 2 * n_i + 1
    order = j_axes[::-1] + [r_axis] + i_axes[::-1] + [c_axis]
    rows = shape.N * int(np.prod([b + 1 for b in shape.beta]))
    cols = shape.resultant_size
    return np.transpose(f_coeffs, order).reshape(rows, cols)


def refold(mat, shape):
    """Inverse of unfold."""
    n_i = shape.d - 1
    i_axes = list(range(n_i))
    j_axes = list(range(n_i, 2 * n_i))
    order = j_axes[::-1] + [2 * n_i] + i_axes[::-1] + [2 * n_i + 1]
    unfolded_shape = (
        tuple(shape.beta[k] + 1 for k in reversed(range(n_i)))
        + (shape.N,)
        + tuple(shape.alpha[k] + 1 for k in reversed(range(n_i)))
        + (shape.N,)
    )
    tens = np.asarray(mat).reshape(unfolded_shape)
    return np.transpose(tens, np.argsort(order))


def _unit_roots(m):
    return np.exp(2j * np.pi * np.arange(m) / m)


def _grids(shape, basis):
    """Interpolation grids for the s_k/t_k axes.

    Monomial coefficients are recovered from uniform unit-circle samples,
    whose Vandermonde matrix is a scaled DFT and perfectly conditioned; the
    s/t families may overlap because division happens in coefficient space.
    The Chebyshev path divides on the grid, so its s and t families must be
    disjoint: interleave a single Chebyshev family per axis pair.
    """
    if basis == Basis.MONOMIAL:
        s_grids = [_unit_roots(shape.alpha[k] + 2) for k in range(shape.d - 1)]
        t_grids = [_unit_roots(shape.beta[k] + 2) for k in range(shape.d - 1)]
        return s_grids, t_grids
    s_grids, t_grids = [], []
    for k in range(shape.d - 1):
        s_nodes, t_nodes = _split_interleaved(shape.alpha[k] + 2, shape.beta[k] + 2)
        s_grids.append(s_nodes)
        t_grids.append(t_nodes)
    return s_grids, t_grids


def _node_noise_floor(p, xd):
    """Cancellation floor of the numerator evaluated on the in-[-1,1] grids.

    Every Leibniz term is a Kronecker product of equation values at points
    inside the unit box, so its entries are bounded by the product of the
    per-equation coefficient sums; the numerator is an alternating sum of d!
    such terms and anything at rounding distance of that bound is noise.
    """
    term = 1.0
    for poly in p.polys:
        hidden = poly.hide_last(xd)
        axes = tuple(range(hidden.d))
        term *= float(np.max(np.sum(np.abs(hidden.coeffs), axis=axes)))
    return 64.0 * math.factorial(p.d) * np.finfo(float).eps * term


def _dixon_tensor_at_node(p, shape, s_grids, t_grids, xd, check_tol):
    """Divided Dixon coefficient tensor at one x_d node.

    A numerator that vanishes identically at the node (the Dixon function has
    the hidden variable's value as a content root) evaluates to pure
    cancellation noise; it is snapped to the exact zero tensor instead of
    being fed to the division, which could not tell noise from inconsistency.
    """
    d = p.d
    num_vals = _numerator_on_grid(p, shape, s_grids, t_grids, xd)
    if float(np.max(np.abs(num_vals))) <= _node_noise_floor(p, xd):
        out_shape = (
            tuple(a + 1 for a in shape.alpha)
            + tuple(b + 1 for b in shape.beta)
            + (shape.N, shape.N)
        )
        return np.zeros(out_shape, dtype=complex)
    s_mats = [bo.interp_matrix(p.basis.tag, s_grids[k], shape.alpha[k] + 1) for k in range(d - 1)]
    t_mats = [bo.interp_matrix(p.basis.tag, t_grids[k], shape.beta[k] + 1) for k in range(d - 1)]
    if p.basis == Basis.MONOMIAL:
        num_coeffs = num_vals
        for k in range(d - 1):
            ax_s, ax_t = _axis_pair(shape, k)
            num_coeffs = bo.apply_matrix_axis(num_coeffs, s_mats[k], ax_s)
            num_coeffs = bo.apply_matrix_axis(num_coeffs, t_mats[k], ax_t)
        return divide_out(num_coeffs, shape, p.basis, check_tol)
    # Chebyshev: divide on the grid, where s_k - t_k never vanishes
    f_vals = num_vals
    for k in range(d - 1):
        ax_s, ax_t = _axis_pair(shape, k)
        diff = s_grids[k].reshape((-1,) + (1,) * (f_vals.ndim - 1 - ax_s))
        diff = diff - t_grids[k].reshape((-1,) + (1,) * (f_vals.ndim - 1 - ax_t))
        f_vals = f_vals / diff
    f_ext = f_vals
    num_coeffs = num_vals
    for k in range(d - 1):
        ax_s, ax_t = _axis_pair(shape, k)
        f_ext = bo.apply_matrix_axis(f_ext, s_mats[k], ax_s)
        f_ext = bo.apply_matrix_axis(f_ext, t_mats[k], ax_t)
        num_coeffs = bo.apply_matrix_axis(num_coeffs, s_mats[k], ax_s)
        num_coeffs = bo.apply_matrix_axis(num_coeffs, t_mats[k], ax_t)
    back = f_ext
    for k in range(d - 1):
        ax_s, ax_t = _axis_pair(shape, k)
        back = _multiply_pair(back, p.basis, ax_s, ax_t)
        back = _truncate_axis(back, ax_s, shape.alpha[k] + 2)
        back = _truncate_axis(back, ax_t, shape.beta[k] + 2)
    scale = float(np.max(np.abs(num_coeffs))) or 1.0
    err = float(np.max(np.abs(back - num_coeffs)))
    if err > check_tol * scale:
        raise DixonConsistencyError(
            f"grid division failed the multiply-back check: relative error {err / scale:.3e}"
        )
    out = f_ext
    for k in range(d - 1):
        ax_s, ax_t = _axis_pair(shape, k)
        out = _truncate_axis(out, ax_s, shape.alpha[k] + 1)
        out = _truncate_axis(out, ax_t, shape.beta[k] + 1)
    return out


def build_resultant(p, trim_tol=1e-10, check_tol=1e-8, workers=1):
    """Construct the hidden variable tensor Dixon resultant R(x_d) of a Pmep.

    Evaluates the Dixon function at d*tau_d + 1 nodes in x_d (unit-circle
    samples for monomial input, Chebyshev nodes for Chebyshev input), divides
    and unfolds per node, and interpolates entrywise. Trailing coefficients
    below trim_tol (relative) are trimmed.
    """
    if not isinstance(p, Pmep):
        raise ValueError("build_resultant expects a Pmep")
    if p.d < 2:
        raise ValueError("d=1 input is already a polynomial eigenvalue problem")
    shape = DixonShape.from_pmep(p)
    s_grids, t_grids = _grids(shape, p.basis)
    deg = shape.xd_degree_bound
    if p.basis == Basis.MONOMIAL:
        xd_nodes = _unit_roots(deg + 1)
    else:
        xd_nodes = bo.cheb1_nodes(deg + 1)

    def node_matrix(xd):
        tens = _dixon_tensor_at_node(p, shape, s_grids, t_grids, xd, check_tol)
        return unfold(tens, shape)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mats = list(pool.map(node_matrix, xd_nodes))
    else:
        mats = [node_matrix(xd) for xd in xd_nodes]
    stack = np.stack(mats, axis=0)
    if p.basis == Basis.MONOMIAL:
        to_coeff = bo.interp_matrix(bo.MONOMIAL, xd_nodes, deg)
    else:
        to_coeff = bo.cheb1_vals_to_coeffs_matrix(deg + 1)
    coeffs = np.tensordot(to_coeff, stack, axes=(1, 0))
    return ResultantPoly(coeffs, p.basis).trim(trim_tol)
