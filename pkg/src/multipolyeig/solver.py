"""End-to-end solver: rotation, hidden variable, resultant, QZ, extraction.

Pipeline for d >= 2 (single univariate matrix polynomials pass straight to
the linearization machinery):

1. optional Haar-random orthogonal change of coordinates (on by default; it
   separates repeated hidden-coordinate values, which otherwise corrupt the
   eigenvector extraction),
2. choose the hidden variable and permute it last,
3. build the hidden-variable Dixon resultant R(x_d),
4. probe the normal rank; compress singular R by a two-sided projection,
5. linearize (companion/colleague) and solve with QZ,
6. per eigenpair, recover the front coordinates from the block Vandermonde
   structure of the eigenvector, masking entries corrupted by the generic
   null space,
7. coordinates without a usable eigenvector block are re-solved from the
   equations themselves (one level of reduction only),
8. undo the permutation and rotation, and keep the candidates whose residual
   on the original system passes the filter.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .dixon import DixonShape, ResultantPoly, build_resultant
from .errors import (
    ExtractionFailureError,
    MultiPolyEigError,
    ReductionDepthExceededError,
    SingularMepError,
)
from .extract import (
    ExtractionConfig,
    Solution,
    SolutionSet,
    block_indices,
    filter_solutions,
    generic_nullspace_basis,
    residual,
    vandermonde_ratios,
)
from .mpoly import Basis, Pmep
from .opdet import LinearMep, solve_linear_mep
from .pep import normal_rank, project_singular, solve_pep

__all__ = ["SolverConfig", "choose_hidden_variable", "random_orthogonal", "solve"]


@dataclass
class SolverConfig:
    """Knobs for the full pipeline; defaults follow the library conventions."""

    basis: Basis | None = None
    rotate: bool = True
    seed: int = 0
    hide_variable: int | None = None
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    rank_tol: float = 1e-10
    probes: int = 3
    trim_tol: float = 1e-10
    reduce_linear: bool = True

    def __post_init__(self):
        if self.rank_tol <= 0 or self.trim_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.probes < 1:
            raise ValueError("need at least one probe")
        if self.hide_variable is not None and self.hide_variable < 1:
            raise ValueError("hide_variable is a 1-based variable index")


def random_orthogonal(d, seed):
    """Haar-distributed real orthogonal d x d matrix, deterministic in seed."""
    if d < 1:
        raise ValueError("d must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def choose_hidden_variable(p):
    """1-based index of the variable to hide.

    Prefers a variable of degree 1 (its loss from the eigenvector structure
    is avoided by hiding it); ties go to the smallest resultant size, then to
    the highest index so an already-last variable needs no reordering.
    """
    d = p.d
    tau = p.tau
    n_prod = int(np.prod(p.sizes))

    def size_if_hidden(i):
        rest = [tau[j] for j in range(d) if j != i - 1]
        return n_prod * math.factorial(d - 1) * int(np.prod(rest))

    linear = [i for i in range(1, d + 1) if tau[i - 1] == 1]
    cands = linear if linear else list(range(1, d + 1))
    best = min((size_if_hidden(i), -i) for i in cands)
    return -best[1]


def _as_linear_mep(p):
    """Convert a degree-(1,..,1) system without cross terms, else return None."""
    if any(t != 1 for t in p.tau):
        return None
    q = p.convert_basis(Basis.MONOMIAL)
    v0, vmats = [], []
    for poly in q.polys:
        scale = poly.max_coeff_norm()
        coeffs = poly.coeffs
        for idx in np.ndindex(*(2,) * q.d):
            if sum(idx) >= 2 and np.max(np.abs(coeffs[idx])) > 1e-14 * scale:
                return None
        v0.append(coeffs[(0,) * q.d])
        row = []
        for j in range(q.d):
            e = [0] * q.d
            e[j] = 1
            row.append(-coeffs[tuple(e)])
        vmats.append(row)
    return LinearMep(v0, vmats)


def _hiding_permutation(d, hide):
    perm = [i for i in range(1, d + 1) if i != hide] + [hide]
    return perm


def _null_basis(mat, rel_tol):
    _, sv, vh = np.linalg.svd(mat)
    if sv.size == 0 or sv[0] == 0.0:
        return np.eye(mat.shape[1], dtype=complex)
    rank = int(np.count_nonzero(sv / sv[0] > rel_tol))
    if rank == mat.shape[1]:
        rank = mat.shape[1] - 1  # keep at least the smallest direction
    return vh[rank:].conj().T


def _least_generic_combination(null_basis, generic_basis):
    """Vector in span(null_basis) least representable in the generic null space."""
    if generic_basis.shape[1] == 0 or null_basis.shape[1] == 1:
        return null_basis[:, -1]
    overlap = generic_basis.conj().T @ null_basis
    _, _, vh = np.linalg.svd(overlap)
    return null_basis @ vh[-1].conj()


def _lost_coordinates(shape, mask):
    zero_idx = block_indices(shape, (0,) * (shape.d - 1))
    lost = []
    for k in range(shape.d - 1):
        if shape.alpha[k] == 0:
            lost.append(k)
            continue
        unit = [0] * (shape.d - 1)
        unit[k] = 1
        usable = mask[zero_idx] & mask[block_indices(shape, unit)]
        if not np.any(usable):
            lost.append(k)
    return lost


def _pep_solutions(p, cfg):
    """d = 1 passthrough: eigenvalues of the single matrix polynomial."""
    poly = p.polys[0]
    r = ResultantPoly(poly.coeffs, poly.basis).trim(cfg.trim_tol)
    rng = np.random.default_rng([cfg.seed, 3])
    rp = normal_rank(r, cfg.probes, cfg.rank_tol, rng)
    projected = rp.normal_rank < r.size
    work = r
    if projected:
        work, _, _ = project_singular(r, rp, rng)
    pairs = solve_pep(work) if work.m >= 1 else []
    cands = [
        Solution([lam], residual(p, [lam]), {"projected": projected})
        for lam, _ in pairs
    ]
    out = filter_solutions(cands, cfg.extraction)
    out.diagnostics = {
        "resultant_size": r.size,
        "normal_rank": rp.normal_rank,
        "projected": projected,
        "dropped_eigenpairs": 0,
        "rotation_seed": None,
    }
    return out


def _lost_coordinate_candidates(work, front, lam, lost, cfg, depth):
    """Candidate completions for coordinates missing from the eigenvector."""
    d = work.d
    known = {j: front[j] for j in range(d - 1) if j not in lost}
    known[d - 1] = lam
    if len(lost) == 1:
        k = lost[0]
        values = []
        for poly in work.polys:
            sub = poly.partial_eval(known)
            r = ResultantPoly(sub.coeffs, sub.basis).trim(cfg.trim_tol)
            if r.m < 1 or r.max_coeff_norm() == 0.0:
                continue
            values.extend(lam_k for lam_k, _ in solve_pep(r))
        out = []
        for val in values:
            y = np.array(front, dtype=complex)
            y[k] = val
            out.append(np.concatenate([y, [lam]]))
        return out
    if depth >= 1:
        raise ReductionDepthExceededError(
            "reduced problem still misses coordinates; refusing to recurse deeper"
        )
    reduced_polys = []
    for poly in work.polys[: len(lost)]:
        sub = poly.partial_eval(known)
        reduced_polys.append(sub)
    sub_cfg = replace(cfg, hide_variable=None, basis=None)
    sub = solve(Pmep(reduced_polys), sub_cfg, _depth=depth + 1)
    out = []
    for s in sub:
        y = np.array(front, dtype=complex)
        for pos, k in enumerate(sorted(lost)):
            y[k] = s.x[pos]
        out.append(np.concatenate([y, [lam]]))
    return out


def solve(p, cfg=None, _depth=0):
    """Globally solve a polynomial multiparameter eigenvalue problem."""
    cfg = cfg or SolverConfig()
    if not isinstance(p, Pmep):
        raise ValueError("expected a Pmep")
    if cfg.basis is not None and cfg.basis != p.basis:
        p = p.convert_basis(cfg.basis)
    d = p.d
    if cfg.hide_variable is not None and cfg.hide_variable > d:
        raise ValueError("hide_variable exceeds the number of variables")
    if d == 1:
        return _pep_solutions(p, cfg)
    if any(t < 1 for t in p.tau):
        raise ValueError(
            "every variable must appear in the system (tau_k >= 1); a missing "
            "variable leaves the point underdetermined"
        )

    if cfg.reduce_linear and all(t == 1 for t in p.tau):
        mep = _as_linear_mep(p)
        if mep is not None:
            try:
                out = solve_linear_mep(mep)
                kept = [s for s in out if s.residual <= cfg.extraction.residual_tol]
                diag = dict(out.diagnostics)
                result = filter_solutions(kept, cfg.extraction)
                result.diagnostics = diag
                return result
            except SingularMepError:
                pass

    rotated = False
    q = None
    if cfg.hide_variable is not None:
        if cfg.rotate:
            warnings.warn(
                "rotation skipped because hide_variable is explicit; repeated "
                "hidden-coordinate values across solutions may corrupt extraction",
                RuntimeWarning,
                stacklevel=2,
            )
        work = p
        hide = cfg.hide_variable
    elif cfg.rotate:
        q = random_orthogonal(d, cfg.seed)
        work = p.change_of_variables(q)
        rotated = True
        hide = choose_hidden_variable(work)
    else:
        work = p
        hide = choose_hidden_variable(work)

    perm = _hiding_permutation(d, hide)
    work = work.permute_variables(perm)

    R = build_resultant(work, trim_tol=cfg.trim_tol)
    shape = DixonShape.from_pmep(work)
    rng = np.random.default_rng([cfg.seed, 1])
    rp = normal_rank(R, cfg.probes, cfg.rank_tol, rng)
    projected = rp.normal_rank < R.size
    solver_R = R
    if projected:
        solver_R, _, _ = project_singular(R, rp, rng)

    eigpairs = solve_pep(solver_R) if solver_R.m >= 1 else []
    mask = None
    generic_basis = None
    if projected:
        generic_basis = generic_nullspace_basis(R, cfg.rank_tol, rng)
        mask = np.linalg.norm(generic_basis, axis=1) <= cfg.extraction.nullspace_tol
        if generic_basis.shape[1] == 0:
            mask = np.ones(R.size, dtype=bool)
    lost = _lost_coordinates(shape, mask if mask is not None else np.ones(R.size, bool))
    recover = [k for k in range(d - 1) if k not in lost]
    structural = [k for k in lost if shape.alpha[k] == 0]
    # coordinates whose blocks exist but are fully masked: the cleaned null
    # vector may still carry them, so try unmasked ratios before falling back
    # to re-solving the equations
    speculative = [k for k in lost if k not in structural] if not structural else []

    def to_original(y):
        x = np.empty(d, dtype=complex)
        for k in range(d):
            x[perm[k] - 1] = y[k]
        return q.T @ x if rotated else x

    dropped = 0
    cands = []
    kf = cfg.extraction.keep_fraction
    tol = cfg.extraction.residual_tol
    for lam, vec in eigpairs:
        if projected:
            null = _null_basis(R.eval(lam), cfg.rank_tol)
            vec = _least_generic_combination(null, generic_basis)
        front = np.full(d - 1, np.nan, dtype=complex)
        try:
            if recover:
                got = vandermonde_ratios(
                    vec, shape, mask=mask, keep_fraction=kf, coords=recover
                )
                for k in recover:
                    front[k] = got[k]
        except ExtractionFailureError:
            dropped += 1
            continue
        speculated = True
        if speculative:
            try:
                got = vandermonde_ratios(
                    vec, shape, mask=None, keep_fraction=kf, coords=speculative
                )
                for k in speculative:
                    front[k] = got[k]
            except ExtractionFailureError:
                speculated = False
        completions = None
        reduced = False
        if not structural and speculated:
            y = np.concatenate([front, [lam]])
            if mask is None or residual(p, to_original(y)) <= tol:
                completions = [y]
        if completions is None and mask is not None and not structural:
            # the masked average can be misled when the pencil's kernel varies
            # with the eigenvalue; retry on all entries, residual deciding
            try:
                got = vandermonde_ratios(vec, shape, mask=None, keep_fraction=kf)
                y = np.concatenate([got, [lam]])
                if residual(p, to_original(y)) <= tol:
                    completions = [y]
            except ExtractionFailureError:
                pass
        if completions is None and lost:
            # a spurious eigenvalue can make the substituted equations
            # arbitrarily degenerate; give up on the eigenpair, not the solve
            try:
                completions = _lost_coordinate_candidates(
                    work, front, lam, lost, cfg, _depth
                )
                reduced = True
            except (ValueError, MultiPolyEigError):
                dropped += 1
                continue
        if completions is None:
            if np.any(np.isnan(front)):
                dropped += 1
                continue
            completions = [np.concatenate([front, [lam]])]
        for y in completions:
            x = to_original(y)
            cands.append(
                Solution(
                    x,
                    residual(p, x),
                    {"rotated": rotated, "projected": projected, "reduced": reduced},
                )
            )

    out = filter_solutions(cands, cfg.extraction)
    out.diagnostics = {
        "resultant_size": R.size,
        "normal_rank": rp.normal_rank,
        "projected": projected,
        "dropped_eigenpairs": dropped,
        "rotation_seed": cfg.seed if rotated else None,
    }
    return out
