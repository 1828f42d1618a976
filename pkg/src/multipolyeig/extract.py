"""Solution recovery from resultant eigenvectors, residuals, and filtering.

Eigenvectors of the resultant R(x_d) carry block Vandermonde structure: the
flat vector is a stack of N-sized blocks indexed colexicographically by the
s-exponent multi-index (i_1..i_{d-1}), and block i holds
prod_k x_k^{i_k} * v.  The coordinate x_k is therefore the entrywise ratio of
the unit-exponent block e_k against the zero-exponent block.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ExtractionFailureError

__all__ = [
    "Solution",
    "SolutionSet",
    "ExtractionConfig",
    "block_indices",
    "vandermonde_ratios",
    "generic_nullspace_mask",
    "residual",
    "filter_solutions",
]


@dataclass
class Solution:
    """One validated solution: coordinates, normalized residual, provenance flags."""

    x: np.ndarray
    residual: float
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=complex).reshape(-1)
        self.residual = float(self.residual)
        base = {"rotated": False, "projected": False, "reduced": False}
        base.update(self.flags)
        self.flags = base


class SolutionSet:
    """List of solutions plus solver diagnostics."""

    def __init__(self, solutions, diagnostics=None):
        self.solutions = list(solutions)
        self.diagnostics = dict(diagnostics or {})

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]

    def __repr__(self):
        return f"SolutionSet({len(self.solutions)} solutions, diagnostics={self.diagnostics})"

    def points(self):
        """All solution coordinate vectors as a (count, d) array."""
        if not self.solutions:
            return np.zeros((0, 0), dtype=complex)
        return np.array([s.x for s in self.solutions])


@dataclass
class ExtractionConfig:
    """Tolerances for eigenvector-based coordinate extraction."""

    nullspace_tol: float = 1e-13
    keep_fraction: float = 0.25
    residual_tol: float = 1e-8

    def __post_init__(self):
        if self.nullspace_tol <= 0 or self.residual_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.keep_fraction <= 1:
            raise ValueError("keep_fraction must lie in (0, 1]")


def block_indices(shape, exponents):
    """Flat indices of the eigenvector block for one s-exponent multi-index."""
    exponents = tuple(exponents)
    if len(exponents) != shape.d - 1:
        raise ValueError("need one exponent per non-hidden variable")
    flat = 0
    stride = 1
    for k in range(shape.d - 1):
        if not 0 <= exponents[k] <= shape.alpha[k]:
            raise ValueError("exponent out of range")
        flat += exponents[k] * stride
        stride *= shape.alpha[k] + 1
    return np.arange(shape.N) + shape.N * flat


def vandermonde_ratios(V, shape, mask=None, keep_fraction=0.25, coords=None):
    """Recover x_1..x_{d-1} from one resultant eigenvector.

    For each coordinate k, averages the ratios of unmasked entries of the
    e_k block against the zero block, using only the pairs whose divisor
    magnitude lies in the top ``keep_fraction``.  ``mask`` (boolean, True =
    usable) has one entry per eigenvector component.  ``coords`` restricts
    recovery to the given 0-based coordinates (default: all); the entries of
    skipped coordinates come back as NaN.

    Raises ExtractionFailureError when a requested coordinate has no usable
    entry pair (either alpha_k = 0, so the block does not exist, or
    masking/zero divisors remove everything).
    """
    V = np.asarray(V, dtype=complex).reshape(-1)
    if V.shape[0] != shape.resultant_size:
        raise ValueError("eigenvector length does not match the resultant size")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.shape[0] != V.shape[0]:
            raise ValueError("mask length does not match the eigenvector")
    wanted = range(shape.d - 1) if coords is None else coords
    zero_idx = block_indices(shape, (0,) * (shape.d - 1))
    out = np.full(shape.d - 1, np.nan, dtype=complex)
    for k in wanted:
        if shape.alpha[k] == 0:
            raise ExtractionFailureError(
                f"coordinate {k + 1} has no degree-1 block in the eigenvector"
            )
        unit = [0] * (shape.d - 1)
        unit[k] = 1
        num_idx = block_indices(shape, unit)
        usable = np.ones(shape.N, dtype=bool)
        if mask is not None:
            usable &= mask[zero_idx] & mask[num_idx]
        den = V[zero_idx]
        usable &= np.abs(den) > 0
        if not np.any(usable):
            raise ExtractionFailureError(f"no usable entry pairs for coordinate {k + 1}")
        num = V[num_idx][usable]
        den = den[usable]
        order = np.argsort(-np.abs(den))
        keep = max(1, int(np.ceil(keep_fraction * den.shape[0])))
        pick = order[:keep]
        out[k] = np.mean(num[pick] / den[pick])
    return out


def generic_nullspace_mask(R, cfg, rank_tol=1e-10, rng=None):
    """Boolean usable-entry mask screening out the generic null space of R.

    Evaluates R at a random point, takes the right singular vectors with
    relative singular value below ``rank_tol`` as a generic null-space basis,
    and marks entry j unusable when that basis has row norm above
    ``cfg.nullspace_tol`` at j (the entry is visibly corrupted by the null
    space).  A nonsingular R yields an all-usable mask.
    """
    basis = generic_nullspace_basis(R, rank_tol, rng)
    mask = np.ones(R.size, dtype=bool)
    if basis.shape[1]:
        mask = np.linalg.norm(basis, axis=1) <= cfg.nullspace_tol
    return mask


def generic_nullspace_basis(R, rank_tol=1e-10, rng=None):
    """Orthonormal basis (columns) of the null space of R at a random point."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    z = 1.3 * np.exp(2j * np.pi * rng.uniform())
    mat = R.eval(z)
    _, sv, vh = np.linalg.svd(mat)
    top = sv[0] if sv.size else 0.0
    if top == 0.0:
        return np.eye(R.size, dtype=complex)
    null = sv <= rank_tol * top
    rank = int(np.count_nonzero(~null))
    return vh[rank:].conj().T


def residual(p, x):
    """Normalized residual max_i sigma_min(P_i(x)) / scale_i at a point."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    worst = 0.0
    for poly in p.polys:
        scale = poly.max_coeff_norm()
        if scale == 0.0:
            continue
        sv = np.linalg.svd(poly.eval(x), compute_uv=False)
        worst = max(worst, float(sv[-1]) / scale)
    return worst


def filter_solutions(cands, cfg):
    """Keep residual <= residual_tol, deduplicate, sort by residual."""
    kept = [s for s in cands if s.residual <= cfg.residual_tol]
    kept.sort(key=lambda s: s.residual)
    unique = []
    for sol in kept:
        matched = False
        for other in unique:
            denom = max(
                1.0,
                float(np.max(np.abs(sol.x))),
                float(np.max(np.abs(other.x))),
            )
            if np.max(np.abs(sol.x - other.x)) <= 1e-8 * denom:
                matched = True
                break
        if not matched:
            unique.append(sol)
    return SolutionSet(unique)
