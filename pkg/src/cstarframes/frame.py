"""Continuous frames given by piecewise-polynomial module-valued maps.

A :class:`FrameMap` assigns to every interval of its measure space a
polynomial with module-element coefficients and to every atom a module
element.  All operators derived from it (frame operator, mixed operators
``T_F T*_G``, analysis and synthesis) are computed with exact moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats.qmc import Halton

from .algebra import DEFAULT_TOL, alg_norm
from .errors import KernelViolation, NotAFrame, NotDual, SpaceMismatch, SpecMismatch
from .hmodule import (ModuleElement, ModuleOperator, ModuleSpace, coords_many, mod_coords,
                      mod_inner, op_identity_defect, op_inverse)
from .measure import (DEGREE_CAP, AlgebraPoly, MeasureSpace, integrate_coefficients, poly_eval)

COMMUTATIVE_EXACT = "commutative-exact"
DIRECTION_SAMPLED = "direction-sampled"
STRATEGIES = (COMMUTATIVE_EXACT, DIRECTION_SAMPLED)
DEFAULT_DIRECTIONS = 512
GRAM_EIG_TOL = 1e-12


def _frozen(a, shape):
    a = np.array(a, dtype=complex).reshape(shape)
    a.setflags(write=False)
    return a


class FrameMap:
    """Module-valued map on a measure space.

    Parameters
    ----------
    space : ModuleSpace
        Target module; must satisfy the module axioms.
    measure : MeasureSpace
    intervals : sequence of array_like
        One (d_i + 1, m) coordinate array per interval of ``measure``,
        row ``j`` being the coefficient of ω^j.
    atoms : array_like
        (K, m) coordinates of the values at the atoms of ``measure``.
    """

    __slots__ = ("space", "measure", "intervals", "atoms")

    def __init__(self, space: ModuleSpace, measure: MeasureSpace, intervals: Sequence, atoms=(),
                 degree_cap: int = DEGREE_CAP):
        space.require_valid()
        m = space.dim
        ivs = tuple(_frozen(c, (-1, m)) for c in intervals)
        if len(ivs) != len(measure.intervals):
            raise SpecMismatch(f"{len(ivs)} coefficient lists for {len(measure.intervals)} intervals")
        for c in ivs:
            if len(c) == 0:
                raise ValueError("an interval needs at least one coefficient")
            if len(c) - 1 > degree_cap:
                raise ValueError(f"degree {len(c) - 1} exceeds cap {degree_cap}")
        atoms = _frozen(atoms, (-1, m))
        if len(atoms) != len(measure.atoms):
            raise SpecMismatch(f"{len(atoms)} atom values for {len(measure.atoms)} atoms")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "measure", measure)
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "atoms", atoms)

    def __setattr__(self, name, value):
        raise AttributeError("FrameMap is immutable")

    @classmethod
    def from_ambient(cls, space: ModuleSpace, measure: MeasureSpace, intervals=(), atoms=(),
                     tol: float = DEFAULT_TOL) -> FrameMap:
        """Build from ambient p x q coefficient matrices instead of coordinates."""
        ivs = [[mod_coords(space, c, tol) for c in cs] for cs in intervals]
        ats = [mod_coords(space, v, tol) for v in atoms]
        return cls(space, measure, ivs, np.array(ats, dtype=complex).reshape(-1, space.dim))

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.intervals), default=0)

    def coefficient(self, interval: int, power: int) -> ModuleElement:
        c = self.intervals[interval]
        return ModuleElement(self.space, c[power] if power < len(c) else np.zeros(self.space.dim))

    def atom_value(self, k: int) -> ModuleElement:
        return ModuleElement(self.space, self.atoms[k])

    def ambient_intervals(self) -> list[np.ndarray]:
        return [np.tensordot(c, self.space.basis_tensor, axes=1) for c in self.intervals]

    def ambient_atoms(self) -> np.ndarray:
        return np.tensordot(self.atoms, self.space.basis_tensor, axes=1)

    def transform(self, matrix) -> FrameMap:
        """Apply a coordinate matrix to every coefficient and atom value."""
        t = np.asarray(matrix, dtype=complex).T
        return FrameMap(self.space, self.measure, [c @ t for c in self.intervals], self.atoms @ t)

    def restrict(self, excluded_atoms) -> FrameMap:
        """The map on the measure space with the given atoms removed."""
        drop = set(excluded_atoms)
        keep = [k for k in range(len(self.atoms)) if k not in drop]
        return FrameMap(self.space, self.measure.without_atoms(drop), self.intervals, self.atoms[keep])

    def with_atom_values(self, atoms) -> FrameMap:
        return FrameMap(self.space, self.measure, self.intervals, atoms)

    def __repr__(self):
        return (f"FrameMap({self.space!r}, intervals={len(self.intervals)}, "
                f"atoms={len(self.atoms)}, degree={self.degree})")


def _same_domain(F: FrameMap, G: FrameMap):
    if F.space != G.space:
        raise SpaceMismatch("frame maps take values in different module spaces")
    if F.measure != G.measure:
        raise SpaceMismatch("frame maps are defined on different measure spaces")


def frame_eval(F: FrameMap, omega: float) -> ModuleElement:
    kind, idx = F.measure.locate(omega)
    if kind == "atom":
        return F.atom_value(idx)
    return ModuleElement(F.space, poly_eval(F.intervals[idx], omega))


def _conv(left, right, op):
    out = np.zeros((len(left) + len(right) - 1,) + op(left[0], right[0]).shape, dtype=complex)
    for j, x in enumerate(left):
        for k, y in enumerate(right):
            out[j + k] += op(x, y)
    return out


def _mixed_matrix(F: FrameMap, G: FrameMap, excluded_atoms=(), tol: float = DEFAULT_TOL) -> np.ndarray:
    """Coordinate matrix of f ↦ ∫ <f, G(ω)> F(ω) dμ(ω)."""
    _same_domain(F, G)
    # <e_i, G> F = e_i (G^H F) in ambient form, so only the q x q kernel ∫ G^H F is integrated
    gh_f = lambda g, f: g.conj().T @ f
    ivs = [_conv(gc, fc, gh_f) for gc, fc in zip(G.ambient_intervals(), F.ambient_intervals())]
    ga, fa = G.ambient_atoms(), F.ambient_atoms()
    atoms = np.conj(np.swapaxes(ga, -1, -2)) @ fa if len(fa) else np.zeros((0, F.space.cols, F.space.cols))
    kernel = integrate_coefficients(ivs, atoms, F.measure, excluded_atoms)
    images = np.einsum("ipq,qr->ipr", F.space.basis_tensor, kernel)
    return coords_many(F.space, images, tol).T


def mixed_operator(F: FrameMap, G: FrameMap, tol: float = DEFAULT_TOL) -> ModuleOperator:
    """The operator T_F T*_G : f ↦ ∫ <f, G(ω)> F(ω) dμ(ω)."""
    return ModuleOperator(F.space, _mixed_matrix(F, G, tol=tol))


def frame_operator(F: FrameMap, tol: float = DEFAULT_TOL) -> ModuleOperator:
    """S_F f = ∫ <f, F(ω)> F(ω) dμ(ω), built column by column on the basis."""
    return mixed_operator(F, F, tol)


def analysis_apply(F: FrameMap, f: ModuleElement) -> AlgebraPoly:
    """(T*_F f)(ω) = <f, F(ω)> as a piecewise polynomial."""
    if f.space != F.space:
        raise SpaceMismatch("element and frame belong to different spaces")
    spec = F.space.algebra
    mask = spec.mask()
    fa = f.ambient
    ivs = [(fa @ np.conj(np.swapaxes(c, -1, -2))) * mask for c in F.ambient_intervals()]
    atoms = (fa @ np.conj(np.swapaxes(F.ambient_atoms(), -1, -2))) * mask
    return AlgebraPoly(spec, ivs, atoms)


def synthesis_apply(F: FrameMap, phi: AlgebraPoly, tol: float = DEFAULT_TOL) -> ModuleElement:
    """T_F φ = ∫ φ(ω) F(ω) dμ(ω)."""
    if phi.spec != F.space.algebra:
        raise SpecMismatch("coefficient map and frame use different algebras")
    if len(phi.intervals) != len(F.intervals) or len(phi.atoms) != len(F.atoms):
        raise SpecMismatch("coefficient map is not defined on the frame's measure space")
    ivs = [_conv(pc, fc, np.matmul) for pc, fc in zip(phi.intervals, F.ambient_intervals())]
    fa = F.ambient_atoms()
    atoms = phi.atoms @ fa if len(fa) else np.zeros((0, F.space.rows, F.space.cols))
    total = integrate_coefficients(ivs, atoms, F.measure)
    return ModuleElement(F.space, mod_coords(F.space, total, tol))


@dataclass(frozen=True)
class BoundsReport:
    """Frame bounds with the certificates that attain them.

    ``lower_witness``/``upper_witness`` are ``(block, coords)`` pairs: the
    bound is attained in block ``block`` by the element with those
    coordinates (for sampled bounds, along the sampled direction).
    """

    lower: float
    upper: float
    strategy: str
    directions_used: int
    tolerance: float
    lower_witness: Optional[tuple] = None
    upper_witness: Optional[tuple] = None

    @property
    def is_frame(self) -> bool:
        return self.lower > self.tolerance

    @property
    def is_tight(self) -> bool:
        return abs(self.upper - self.lower) <= self.tolerance * max(1.0, abs(self.upper))


def pencil_extremes(M, G, eig_tol: float = GRAM_EIG_TOL, kernel_tol: float = 1e-9):
    """Extreme generalized eigenvalues of the Hermitian pencil (M, G) on range(G).

    Returns ``None`` when G vanishes, otherwise ``(lo, hi, x_lo, x_hi)``
    with ``x^H M x = λ x^H G x`` at each extreme.

    Raises
    ------
    KernelViolation
        If M does not vanish on ker G, so no finite upper bound exists.
    """
    M = 0.5 * (M + M.conj().T)
    G = 0.5 * (G + G.conj().T)
    w, U = np.linalg.eigh(G)
    if w[-1] <= eig_tol:
        return None
    keep = w > eig_tol * max(1.0, w[-1])
    null = U[:, ~keep]
    if null.size:
        leak = np.linalg.norm(M @ null, 2)
        if leak > kernel_tol * max(1.0, np.linalg.norm(M, 2)):
            raise KernelViolation(f"frame form does not vanish on the Gram kernel (|M N| = {leak:.3e})")
    W = U[:, keep] / np.sqrt(w[keep])
    R = W.conj().T @ M @ W
    lam, V = np.linalg.eigh(0.5 * (R + R.conj().T))
    return float(lam[0]), float(lam[-1]), W @ V[:, 0], W @ V[:, -1]


def unit_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic unit vectors in ℂ^n: the standard basis, then scrambled Halton points."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    count = max(count, 1)
    basis = np.eye(n, dtype=complex)[:count]
    extra = count - len(basis)
    if extra <= 0:
        return basis
    u = Halton(d=2 * n, scramble=True, seed=seed).random(extra)
    z = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    v = z[:, :n] + 1j * z[:, n:]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.vstack([basis, v])


def _block_forms(space: ModuleSpace, k: int, v: np.ndarray) -> np.ndarray:
    """Hermitian coordinate matrix H with v^H <f, f>_k v = c^H H c."""
    s = space.algebra.slices()[k]
    g = space.gram[:, :, s, s]
    return np.einsum("a,ijab,b->ji", v.conj(), g, v)


def frame_bounds(F: FrameMap, strategy: Optional[str] = None, n_directions: int = DEFAULT_DIRECTIONS,
                 tol: float = DEFAULT_TOL, seed: int = 0, require_frame: bool = True) -> BoundsReport:
    """Optimal constants A, B with A<f,f> <= <Sf,f> <= B<f,f>.

    ``commutative-exact`` (all blocks of size 1) solves one generalized
    eigenproblem per block and is exact.  ``direction-sampled`` scalarises
    each block along deterministic unit vectors; its A is an over-estimate
    and its B an under-estimate of the optimal constants.  The default is
    the exact strategy whenever it applies.

    Raises
    ------
    NotAFrame
        If ``require_frame`` and A <= ``tol``.
    KernelViolation
        If some block admits no finite upper bound.
    """
    spec = F.space.algebra
    if strategy is None:
        strategy = COMMUTATIVE_EXACT if spec.is_commutative else DIRECTION_SAMPLED
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == COMMUTATIVE_EXACT and not spec.is_commutative:
        raise ValueError("commutative-exact needs every algebra block to have size 1")

    S = frame_operator(F, tol).matrix
    lo = (np.inf, None)
    hi = (-np.inf, None)
    used = 0
    for k, n in enumerate(spec.block_sizes):
        dirs = np.ones((1, 1)) if strategy == COMMUTATIVE_EXACT else unit_directions(n, n_directions, seed + k)
        if strategy == DIRECTION_SAMPLED:
            used += len(dirs)
        for v in dirs:
            H = _block_forms(F.space, k, v)
            ext = pencil_extremes(H @ S, H)
            if ext is None:
                continue
            a, b, xa, xb = ext
            if a < lo[0]:
                lo = (a, (k, xa))
            if b > hi[0]:
                hi = (b, (k, xb))
    if lo[1] is None:
        raise NotAFrame("the module has no nonzero inner products")
    lower = max(lo[0], 0.0)
    report = BoundsReport(lower, hi[0], strategy, used, tol, lo[1], hi[1])
    if require_frame and lower <= tol:
        raise NotAFrame(f"lower frame bound {lower:.3e} <= {tol:g}")
    return report


def canonical_dual(F: FrameMap, tol: float = DEFAULT_TOL) -> FrameMap:
    """S⁻¹F, applied coefficientwise."""
    return F.transform(op_inverse(frame_operator(F, tol), tol).matrix)


@dataclass(frozen=True)
class DualityReport:
    defect: float
    is_dual: bool
    tolerance: float


def duality_defect(F: FrameMap, G: FrameMap, tol: float = DEFAULT_TOL) -> DualityReport:
    """Max-entry distance of T_F T*_G from the identity."""
    d = op_identity_defect(mixed_operator(F, G, tol))
    return DualityReport(d, d <= tol, tol)


@dataclass(frozen=True)
class LowerBoundCheck:
    dual_upper_bound: float
    norm_lower_bound: float
    samples: int
    max_violation: float
    min_ratio: float
    passed: bool


def dual_pair_lower_bound_check(F: FrameMap, G: FrameMap, samples: int = 200, seed: int = 0,
                                tol: float = DEFAULT_TOL, n_directions: int = DEFAULT_DIRECTIONS
                                ) -> LowerBoundCheck:
    """Check B_G⁻¹ ||<f,f>|| <= ||∫<f,F><F,f> dμ|| on random f for a dual pair (F, G).

    For non-commutative algebras B_G comes from the direction-sampled
    strategy and is only an estimate.
    """
    rep = duality_defect(F, G, tol)
    if not rep.is_dual:
        raise NotDual(f"duality defect {rep.defect:.3e} exceeds {tol:g}")
    bg = frame_bounds(G, n_directions=n_directions, tol=tol, seed=seed, require_frame=False).upper
    S = frame_operator(F, tol)
    rng = np.random.default_rng(seed)
    m = F.space.dim
    worst, ratio = -np.inf, np.inf
    for _ in range(samples):
        f = ModuleElement(F.space, rng.standard_normal(m) + 1j * rng.standard_normal(m))
        ff = alg_norm(mod_inner(f, f))
        sf = alg_norm(mod_inner(ModuleElement(F.space, S.matrix @ f.coords), f))
        worst = max(worst, ff / bg - sf)
        ratio = min(ratio, sf / ff)
    return LowerBoundCheck(bg, 1.0 / bg, samples, float(worst), float(ratio), worst <= tol)
