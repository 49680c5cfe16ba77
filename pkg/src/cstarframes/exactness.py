"""Removing parts of a frame: the ψ-map, atom and subset removal, Riesz-type tests.

For a frame F with frame operator S and a point ω₀, the map
ψ(ω) = <F(ω₀), S⁻¹F(ω)> decides whether F survives the removal of ω₀:
the restriction to Ω \\ {ω₀} is a frame exactly when
``1_A - ψ(ω₀) μ({ω₀})`` is invertible, and then its lower bound is at
least A / (1 + k μ({ω₀})) with ``k = |a|² |∫_{Ω\\{ω₀}} ψψ* dμ|`` and
``a`` the inverse above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, alg_invert, alg_norm
from .errors import (HypothesisFails, NotACoefficient, NotApplicable, OutOfDomain,
                     PreconditionFailed, Singular, ZeroVector)
from .frame import (FrameMap, _mixed_matrix, analysis_apply, canonical_dual, duality_defect,
                    frame_bounds, frame_eval, frame_operator, synthesis_apply)
from .hmodule import ModuleElement, mod_inner, mod_norm, op_apply, op_inverse
from .measure import AlgebraPoly, evaluate, l2_inner, moment

NOT_FRAME = "NotFrame"
FRAME_WITH_BOUND = "FrameWithBound"
MEASURE_ZERO = "MeasureZeroTrivial"


def psi_map(F: FrameMap, omega0: float, tol: float = DEFAULT_TOL) -> AlgebraPoly:
    """ψ(ω) = <F(ω₀), S⁻¹F(ω)>, i.e. the analysis of F(ω₀) against the canonical dual."""
    return analysis_apply(canonical_dual(F, tol), frame_eval(F, omega0))


def _psi_parts(F: FrameMap, omega0: float, tol: float):
    psi = psi_map(F, omega0, tol)
    k = F.measure.atom_index(omega0)
    excluded = () if k is None else (k,)
    psi0 = evaluate(psi, F.measure, omega0)
    rest = l2_inner(psi, psi, F.measure, excluded)
    return psi0, rest, F.measure.point_mass(omega0)


def psi_identity_defect(F: FrameMap, omega0: float, tol: float = DEFAULT_TOL) -> float:
    """|ψ(ω₀) - ∫_{Ω\\{ω₀}} ψψ* dμ - ψ(ω₀)² μ({ω₀})|."""
    psi0, rest, mass = _psi_parts(F, omega0, tol)
    return alg_norm(psi0 - rest - mass * (psi0 @ psi0))


@dataclass(frozen=True)
class RemovalReport:
    omega0: float
    atom_index: Optional[int]
    mass: float
    psi_at_omega0: AlgebraElement
    criterion_invertible: bool
    verdict: str
    frame_lower_bound: float
    a_norm: Optional[float] = None
    k: Optional[float] = None
    guaranteed_lower_bound: Optional[float] = None
    general_dual_bound: Optional[float] = None


def _resolve_point(F: FrameMap, omega0, atom_index):
    if (omega0 is None) == (atom_index is None):
        raise ValueError("give exactly one of omega0 and atom_index")
    if atom_index is not None:
        if not 0 <= atom_index < len(F.measure.atoms):
            raise OutOfDomain(f"atom index {atom_index} out of range")
        return F.measure.atoms[atom_index][0]
    F.measure.locate(omega0)
    return float(omega0)


def removal_check_atom(F: FrameMap, omega0: Optional[float] = None, *, atom_index: Optional[int] = None,
                       tol: float = DEFAULT_TOL, dual: Optional[FrameMap] = None,
                       strategy: Optional[str] = None) -> RemovalReport:
    """Decide whether F restricted to Ω \\ {ω₀} is still a frame.

    Points without an atom have measure zero and give
    ``MeasureZeroTrivial``.  At an atom, ``c = 1_A - ψ(ω₀) μ({ω₀})`` is
    inverted: failure means ``NotFrame``; success gives
    ``FrameWithBound`` with ``guaranteed_lower_bound = A / (1 + k μ)``.
    When an explicit dual ``dual`` is supplied, the bound obtained from
    it, ``A / (1 + |a_G|² B_G |F(ω₀)|² μ)`` with
    ``a_G = (1_A - <F(ω₀), G(ω₀)> μ)⁻¹``, is reported too.
    """
    omega0 = _resolve_point(F, omega0, atom_index)
    bounds = frame_bounds(F, strategy=strategy, tol=tol)
    psi0, rest, mass = _psi_parts(F, omega0, tol)
    k_idx = F.measure.atom_index(omega0)
    if mass == 0.0:
        return RemovalReport(omega0, None, 0.0, psi0, True, MEASURE_ZERO, bounds.lower,
                             1.0, alg_norm(rest), bounds.lower)
    one = psi0.spec.identity()
    try:
        a = alg_invert(one - mass * psi0, tol)
    except Singular:
        return RemovalReport(omega0, k_idx, mass, psi0, False, NOT_FRAME, bounds.lower)
    a_norm = alg_norm(a)
    k = a_norm ** 2 * alg_norm(rest)
    general = None
    if dual is not None:
        general = _general_dual_bound(F, dual, omega0, mass, bounds.lower, tol)
    return RemovalReport(omega0, k_idx, mass, psi0, True, FRAME_WITH_BOUND, bounds.lower,
                         a_norm, k, bounds.lower / (1.0 + k * mass), general)


def _general_dual_bound(F, G, omega0, mass, lower, tol):
    if not duality_defect(F, G, tol).is_dual:
        raise PreconditionFailed("the supplied map is not a dual of F")
    f0, g0 = frame_eval(F, omega0), frame_eval(G, omega0)
    try:
        a = alg_invert(f0.space.algebra.identity() - mass * mod_inner(f0, g0), tol)
    except Singular:
        return None
    bg = frame_bounds(G, tol=tol, require_frame=False).upper
    return lower / (1.0 + alg_norm(a) ** 2 * bg * mod_norm(f0) ** 2 * mass)


@dataclass(frozen=True)
class SubsetRemovalReport:
    subset_measure: float
    f: ModuleElement
    witness: ModuleElement
    witness_residual: float
    verdict: str = NOT_FRAME


def _clip(intervals, sub):
    """Pieces of each measure interval, flagged as inside/outside the union of ``sub``."""
    pieces = []
    for i, (a, b) in enumerate(intervals):
        cuts = {a, b}
        for c, d in sub:
            lo, hi = max(a, c), min(b, d)
            if lo < hi:
                cuts.update((lo, hi))
        pts = sorted(cuts)
        for lo, hi in zip(pts, pts[1:]):
            mid = 0.5 * (lo + hi)
            inside = any(c <= mid <= d for c, d in sub)
            pieces.append((i, lo, hi, inside))
    return pieces


def subset_removal_check(F: FrameMap, atoms: Sequence[int] = (), intervals: Sequence = (),
                         tol: float = DEFAULT_TOL) -> SubsetRemovalReport:
    """Check the hypothesis under which removing Ω₁ destroys the frame property.

    Ω₁ is the union of the given sub-intervals and atoms; atoms lying in
    a chosen sub-interval belong to Ω₁ automatically.  With
    f = ∫_{Ω₁} F dμ, the hypothesis is <f, S⁻¹F(ω)> = χ_{Ω₁}(ω) for every
    ω, compared coefficientwise on interval pieces and by value at atoms.
    When it holds, w = S⁻¹f is a nonzero element annihilated by every
    F(ω) outside Ω₁, so the restriction is not a frame.

    Raises
    ------
    HypothesisFails
        With ``location`` set to the first violating piece or atom.
    ZeroVector
        If f = 0.
    """
    sp = F.measure
    sub = [(float(c), float(d)) for c, d in intervals]
    for c, d in sub:
        if not c < d:
            raise ValueError(f"sub-interval ({c}, {d}) is empty")
    chosen = set(atoms)
    for k, (w, _) in enumerate(sp.atoms):
        if any(c <= w <= d for c, d in sub):
            chosen.add(k)
    if any(not 0 <= k < len(sp.atoms) for k in chosen):
        raise OutOfDomain("atom index out of range")
    pieces = _clip(sp.intervals, sub)
    inside = [p for p in pieces if p[3]]
    measure = sum(hi - lo for _, lo, hi, _ in inside) + sum(sp.atoms[k][1] for k in chosen)
    if not measure > 0:
        raise ValueError("Ω₁ must have positive measure")

    m = F.space.dim
    f = np.zeros(m, dtype=complex)
    for i, lo, hi, _ in inside:
        for j, c in enumerate(F.intervals[i]):
            f = f + moment((lo, hi), j) * c
    for k in sorted(chosen):
        f = f + sp.atoms[k][1] * F.atoms[k]
    f = ModuleElement(F.space, f)
    if mod_norm(f) <= tol:
        raise ZeroVector("∫_{Ω₁} F dμ vanishes")

    h = analysis_apply(canonical_dual(F, tol), f)
    one = F.space.algebra.identity().to_dense()
    zero = np.zeros_like(one)
    for i, lo, hi, ins in pieces:
        coeffs = h.intervals[i]
        target = np.zeros_like(coeffs)
        if ins:
            target[0] = one
        err = float(np.max(np.abs(coeffs - target)))
        if err > tol:
            raise HypothesisFails(
                f"<f, S⁻¹F(ω)> is not {'1_A' if ins else '0'} on [{lo:g}, {hi:g}] (error {err:.3e})",
                location=("interval", i, lo, hi))
    for k in range(len(sp.atoms)):
        target = one if k in chosen else zero
        err = float(np.max(np.abs(h.atoms[k] - target)))
        if err > tol:
            raise HypothesisFails(f"<f, S⁻¹F(ω)> is not {'1_A' if k in chosen else '0'} at atom {k}"
                                  f" (error {err:.3e})", location=("atom", k))

    witness = op_apply(op_inverse(frame_operator(F, tol), tol), f)
    ann = analysis_apply(F, witness)
    residual = 0.0
    for i, lo, hi, ins in pieces:
        if not ins:
            residual = max(residual, float(np.max(np.abs(ann.intervals[i]))))
    for k in range(len(sp.atoms)):
        if k not in chosen:
            residual = max(residual, float(np.max(np.abs(ann.atoms[k]))))
    return SubsetRemovalReport(measure, f, witness, residual)


@dataclass(frozen=True)
class RieszReport:
    applicable: bool
    rank: Optional[int]
    target_dim: Optional[int]
    is_riesz_type: Optional[bool]
    zero_atoms: tuple[int, ...]
    second_dual: Optional[FrameMap] = None
    second_dual_defect: Optional[float] = None


def _zero_atoms(F: FrameMap, tol: float) -> tuple[int, ...]:
    return tuple(k for k in range(len(F.atoms)) if mod_norm(F.atom_value(k)) <= tol)


def analysis_matrix(F: FrameMap) -> np.ndarray:
    """ℂ-linear matrix of f ↦ (<f, F(ω_k)>)_k on a purely atomic measure.

    Rows run over atoms and, within each atom, over the in-block entries
    of the algebra; columns over basis coordinates of f.
    """
    mask = F.space.algebra.mask()
    rows = []
    for fa in F.ambient_atoms():
        vals = np.einsum("iab,cb->iac", F.space.basis_tensor, fa.conj())
        rows.append(vals[:, mask].T)
    return np.vstack(rows) if rows else np.zeros((0, F.space.dim))


def _perturbation_dual(F: FrameMap, tol: float):
    """A dual of F other than the canonical one, or None if the dual is unique.

    Solves the real-linear system T_F T*_H = 0 for atom values H and adds
    a null solution to the canonical dual.
    """
    m, K = F.space.dim, len(F.atoms)
    zero_iv = [np.zeros_like(c) for c in F.intervals]
    cols = []
    for r in range(2 * K * m):
        h = np.zeros(K * m, dtype=complex)
        h[r // 2] = 1.0 if r % 2 == 0 else 1j
        H = FrameMap(F.space, F.measure, zero_iv, h.reshape(K, m))
        X = _mixed_matrix(F, H, tol=tol)
        cols.append(np.concatenate([X.real.ravel(), X.imag.ravel()]))
    A = np.array(cols).T
    _, s, Vt = np.linalg.svd(A)
    s_full = np.zeros(Vt.shape[0])
    s_full[:len(s)] = s
    scale = max(1.0, s_full[0])
    null = np.flatnonzero(s_full <= 1e-10 * scale)
    if not len(null):
        return None
    x = Vt[null[0]]
    h = (x[0::2] + 1j * x[1::2]).reshape(K, m)
    G = canonical_dual(F, tol)
    return G.with_atom_values(G.atoms + h)


def riesz_type_check(F: FrameMap, tol: float = DEFAULT_TOL) -> RieszReport:
    """Riesz-type test: is the analysis operator onto L²(Ω, A)?

    Decided as complex rank of :func:`analysis_matrix` against
    K · dim_ℂ(A) on purely atomic measures; other measures report
    ``applicable=False``.  When the test fails and the dual is not
    unique, a second dual is constructed and its defect reported.
    """
    zeros = _zero_atoms(F, tol)
    if not F.measure.is_atomic:
        return RieszReport(False, None, None, None, zeros)
    mat = analysis_matrix(F)
    target = len(F.atoms) * F.space.algebra.complex_dim
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0]))) if sv.size else 0
    riesz = rank == target
    second = defect = None
    if not riesz:
        second = _perturbation_dual(F, tol)
        if second is not None:
            defect = duality_defect(F, second, tol).defect
    return RieszReport(True, rank, target, riesz, zeros, second, defect)


@dataclass(frozen=True)
class NonRieszReport:
    removal: RemovalReport
    dual: FrameMap
    dual_defect: float
    discrepancy: float
    method: str


def non_riesz_via_removal(F: FrameMap, omega0: Optional[float] = None, *, atom_index: Optional[int] = None,
                          tol: float = DEFAULT_TOL) -> NonRieszReport:
    """Exhibit a second dual of F from a removable atom.

    The canonical dual of F restricted to Ω \\ {ω₀}, extended by zero at
    ω₀, is a dual of F.  If F(ω₀) = 0 that map coincides with S⁻¹F, so a
    nonzero value is placed at ω₀ instead.
    """
    rep = removal_check_atom(F, omega0, atom_index=atom_index, tol=tol)
    if rep.verdict != FRAME_WITH_BOUND:
        raise PreconditionFailed(f"removal at ω₀ = {rep.omega0:g} gives {rep.verdict}")
    k = rep.atom_index
    canonical = canonical_dual(F, tol)
    if mod_norm(F.atom_value(k)) <= tol:
        atoms = np.array(canonical.atoms)
        atoms[k] = F.space.basis_element(0).coords
        G = canonical.with_atom_values(atoms)
        method = "zero-atom"
    else:
        reduced = canonical_dual(F.restrict([k]), tol)
        atoms = np.insert(np.asarray(reduced.atoms).reshape(-1, F.space.dim), k, 0.0, axis=0)
        G = FrameMap(F.space, F.measure, reduced.intervals, atoms)
        method = "restricted-canonical"
    defect = duality_defect(F, G, tol).defect
    diff = ModuleElement(F.space, G.atoms[k] - canonical.atoms[k])
    return NonRieszReport(rep, G, defect, mod_norm(diff), method)


@dataclass(frozen=True)
class ExactnessScan:
    reports: tuple[RemovalReport, ...]
    exact_on_atoms: bool


def exactness_scan(F: FrameMap, tol: float = DEFAULT_TOL) -> ExactnessScan:
    if not F.measure.is_atomic:
        raise NotApplicable("exactness scans need a purely atomic measure")
    reports = tuple(removal_check_atom(F, atom_index=k, tol=tol) for k in range(len(F.atoms)))
    return ExactnessScan(reports, all(r.verdict == NOT_FRAME for r in reports))


def minimal_coefficient_defect(F: FrameMap, f: ModuleElement, phi: AlgebraPoly,
                               tol: float = DEFAULT_TOL) -> float:
    """Defect of ∫φφ* = ∫cc* + ∫(φ-c)(φ-c)* with c(ω) = <f, S⁻¹F(ω)>.

    Raises
    ------
    NotACoefficient
        If ∫ φ F dμ differs from f by more than ``tol``.
    """
    synth = synthesis_apply(F, phi, tol)
    if mod_norm(synth - f) > tol * max(1.0, mod_norm(f)):
        raise NotACoefficient("φ does not synthesise f")
    sp = F.measure
    c = analysis_apply(canonical_dual(F, tol), f)
    lhs = l2_inner(phi, phi, sp)
    rhs = l2_inner(c, c, sp) + l2_inner(phi - c, phi - c, sp)
    return alg_norm(lhs - rhs)
