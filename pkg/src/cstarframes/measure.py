"""Measure spaces of intervals plus point masses, and exact polynomial integration.

A measure here is Lebesgue measure on finitely many disjoint intervals
plus finitely many weighted atoms.  An atom may sit inside an interval;
its point then carries the atom's mass on top of the (zero) Lebesgue
mass.  Integrands are piecewise polynomials in the parameter, so every
integral reduces to monomial moments and is exact up to the final
floating-point rounding.

Summation order is fixed: intervals in listed order (powers ascending
within each), then atoms in listed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraElement, BlockSpec
from .errors import DegreeCapExceeded, OutOfDomain, SpecMismatch

DEGREE_CAP = 16


@dataclass(frozen=True)
class MeasureSpace:
    intervals: tuple[tuple[float, float], ...] = ()
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        ats = tuple((float(w), float(m)) for w, m in self.atoms)
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"interval ({a}, {b}) must satisfy a < b with finite ends")
        for i in range(len(ivs)):
            for j in range(i + 1, len(ivs)):
                (a1, b1), (a2, b2) = ivs[i], ivs[j]
                if max(a1, a2) < min(b1, b2):
                    raise ValueError(f"intervals {ivs[i]} and {ivs[j]} overlap")
        points = [w for w, _ in ats]
        if len(set(points)) != len(points):
            raise ValueError("atom points must be distinct")
        for w, m in ats:
            if not (math.isfinite(w) and math.isfinite(m) and m > 0):
                raise ValueError(f"atom ({w}, {m}) needs a finite point and positive mass")
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "atoms", ats)
        if not ivs and not ats:
            raise ValueError("measure space is empty")

    @property
    def is_atomic(self) -> bool:
        return not self.intervals

    @property
    def total_mass(self) -> float:
        return sum(b - a for a, b in self.intervals) + sum(m for _, m in self.atoms)

    def atom_index(self, omega: float):
        for k, (w, _) in enumerate(self.atoms):
            if w == omega:
                return k
        return None

    def interval_index(self, omega: float):
        for i, (a, b) in enumerate(self.intervals):
            if a <= omega <= b:
                return i
        return None

    def point_mass(self, omega: float) -> float:
        """μ({ω}); zero for points that carry no atom."""
        k = self.atom_index(omega)
        return 0.0 if k is None else self.atoms[k][1]

    def locate(self, omega: float) -> tuple[str, int]:
        """``("atom", k)`` or ``("interval", i)``; atoms take precedence."""
        k = self.atom_index(omega)
        if k is not None:
            return "atom", k
        i = self.interval_index(omega)
        if i is not None:
            return "interval", i
        raise OutOfDomain(f"ω = {omega!r} lies outside every interval and atom")

    def without_atoms(self, indices: Iterable[int]) -> MeasureSpace:
        drop = set(indices)
        return MeasureSpace(self.intervals, [a for k, a in enumerate(self.atoms) if k not in drop])


@lru_cache(maxsize=4096)
def _moment_exact(a: float, b: float, j: int) -> float:
    fa, fb = Fraction(a), Fraction(b)
    return float((fb ** (j + 1) - fa ** (j + 1)) / (j + 1))


def moment(interval: tuple[float, float], j: int) -> float:
    """∫_a^b ω^j dω, computed in exact rational arithmetic and rounded once."""
    a, b = interval
    if not a < b:
        raise ValueError(f"interval ({a}, {b}) must satisfy a < b")
    if j < 0:
        raise ValueError("moment order must be nonnegative")
    return _moment_exact(float(a), float(b), int(j))


def integrate_coefficients(interval_coeffs: Sequence[np.ndarray], atom_values: np.ndarray,
                           sp: MeasureSpace, excluded_atoms=(), intervals=None):
    """Integrate a piecewise polynomial with array-valued coefficients.

    ``interval_coeffs[i][j]`` multiplies ω^j on interval ``i``;
    ``atom_values[k]`` is the value at atom ``k``.  ``intervals`` may
    override the integration ranges (used for sub-intervals).
    """
    ranges = sp.intervals if intervals is None else intervals
    shape = np.shape(atom_values)[1:] if len(atom_values) else np.shape(interval_coeffs[0])[1:]
    acc = np.zeros(shape, dtype=complex)
    for rng, coeffs in zip(ranges, interval_coeffs):
        for j, c in enumerate(coeffs):
            acc = acc + moment(rng, j) * c
    skip = set(excluded_atoms)
    for k, ((_, mass), v) in enumerate(zip(sp.atoms, atom_values)):
        if k not in skip:
            acc = acc + mass * v
    return acc


def poly_eval(coeffs: np.ndarray, omega: float) -> np.ndarray:
    """Evaluate ascending-power array coefficients at ω (Horner)."""
    out = np.zeros(coeffs.shape[1:], dtype=complex)
    for c in coeffs[::-1]:
        out = out * omega + c
    return out


def _frozen_stack(arrs, shape):
    a = np.array(arrs, dtype=complex).reshape((-1,) + shape)
    a.setflags(write=False)
    return a


class AlgebraPoly:
    """Piecewise-polynomial map from a measure space into the algebra.

    ``intervals[i]`` has shape (d_i + 1, p, p) with ascending powers and
    ``atoms`` has shape (K, p, p); matrices are block-diagonal in the
    ambient embedding of ``spec``.  The object is aligned with a
    :class:`MeasureSpace` by position, not by reference.
    """

    __slots__ = ("spec", "intervals", "atoms")

    def __init__(self, spec: BlockSpec, intervals: Sequence, atoms, degree_cap: int = DEGREE_CAP):
        p = spec.dim
        ivs = tuple(_frozen_stack(c, (p, p)) for c in intervals)
        for c in ivs:
            if len(c) == 0:
                raise ValueError("an interval needs at least one coefficient")
            if len(c) - 1 > degree_cap:
                raise DegreeCapExceeded(f"degree {len(c) - 1} exceeds cap {degree_cap}")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "atoms", _frozen_stack(atoms, (p, p)))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraPoly is immutable")

    @classmethod
    def from_elements(cls, spec: BlockSpec, intervals: Sequence[Sequence[AlgebraElement]],
                      atoms: Sequence[AlgebraElement] = ()) -> AlgebraPoly:
        for e in [x for cs in intervals for x in cs] + list(atoms):
            if e.spec != spec:
                raise SpecMismatch("coefficient belongs to a different algebra")
        return cls(spec, [[e.to_dense() for e in cs] for cs in intervals],
                   [e.to_dense() for e in atoms])

    @classmethod
    def constant(cls, value: AlgebraElement, sp: MeasureSpace) -> AlgebraPoly:
        d = value.to_dense()
        return cls(value.spec, [[d] for _ in sp.intervals], [d for _ in sp.atoms])

    @classmethod
    def zero(cls, spec: BlockSpec, sp: MeasureSpace) -> AlgebraPoly:
        return cls.constant(spec.zero(), sp)

    def coefficient(self, interval: int, power: int) -> AlgebraElement:
        c = self.intervals[interval]
        if power >= len(c):
            return self.spec.zero()
        return AlgebraElement.from_dense(self.spec, c[power])

    def atom_value(self, k: int) -> AlgebraElement:
        return AlgebraElement.from_dense(self.spec, self.atoms[k])

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.intervals), default=0)

    def _check(self, other: AlgebraPoly):
        if not isinstance(other, AlgebraPoly):
            raise TypeError(f"expected AlgebraPoly, got {type(other).__name__}")
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec.block_sizes} vs {other.spec.block_sizes}")
        if len(other.intervals) != len(self.intervals) or len(other.atoms) != len(self.atoms):
            raise SpecMismatch("polynomials are defined on different domains")

    def _combine(self, other, sign):
        self._check(other)
        ivs = []
        for x, y in zip(self.intervals, other.intervals):
            n = max(len(x), len(y))
            z = np.zeros((n,) + x.shape[1:], dtype=complex)
            z[:len(x)] += x
            z[:len(y)] += sign * y
            ivs.append(z)
        return AlgebraPoly(self.spec, ivs, self.atoms + sign * other.atoms)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        return AlgebraPoly(self.spec, [scalar * c for c in self.intervals], scalar * self.atoms)

    __rmul__ = __mul__

    def __repr__(self):
        return f"AlgebraPoly({self.spec.block_sizes}, degree={self.degree}, atoms={len(self.atoms)})"


def _check_domain(P: AlgebraPoly, sp: MeasureSpace):
    if len(P.intervals) != len(sp.intervals) or len(P.atoms) != len(sp.atoms):
        raise SpecMismatch(
            f"polynomial has {len(P.intervals)} intervals/{len(P.atoms)} atoms, measure has "
            f"{len(sp.intervals)}/{len(sp.atoms)}")


def evaluate(P: AlgebraPoly, sp: MeasureSpace, omega: float) -> AlgebraElement:
    _check_domain(P, sp)
    kind, idx = sp.locate(omega)
    if kind == "atom":
        return P.atom_value(idx)
    return AlgebraElement.from_dense(P.spec, poly_eval(P.intervals[idx], omega))


def integrate_alg_poly(P: AlgebraPoly, sp: MeasureSpace, excluded_atoms=()) -> AlgebraElement:
    """Exact ∫ P dμ over ``sp`` minus the atoms listed in ``excluded_atoms``.

    Examples
    --------
    >>> spec = BlockSpec((1, 1))
    >>> P = AlgebraPoly.from_elements(spec, [[spec.diag([0, 1]), spec.zero(), spec.diag([3, 0])]])
    >>> integrate_alg_poly(P, MeasureSpace([(0, 1)])).blocks[0].real
    array([[1.]])
    """
    _check_domain(P, sp)
    return AlgebraElement.from_dense(P.spec, integrate_coefficients(P.intervals, P.atoms, sp, excluded_atoms))


def mul_adjoint(P: AlgebraPoly, Q: AlgebraPoly) -> tuple[list[np.ndarray], np.ndarray]:
    """Coefficients of ω ↦ P(ω) Q(ω)^*.  The parameter is real, so powers pass through the adjoint."""
    P._check(Q)
    ivs = []
    for x, y in zip(P.intervals, Q.intervals):
        out = np.zeros((len(x) + len(y) - 1,) + x.shape[1:], dtype=complex)
        yh = np.conj(np.swapaxes(y, -1, -2))
        for j in range(len(x)):
            for k in range(len(y)):
                out[j + k] += x[j] @ yh[k]
        ivs.append(out)
    atoms = P.atoms @ np.conj(np.swapaxes(Q.atoms, -1, -2)) if len(P.atoms) else P.atoms
    return ivs, atoms


def l2_inner(P: AlgebraPoly, Q: AlgebraPoly, sp: MeasureSpace, excluded_atoms=()) -> AlgebraElement:
    """⟨P, Q⟩ = ∫ P(ω) Q(ω)^* dμ(ω) in L²(Ω, A)."""
    _check_domain(P, sp)
    ivs, atoms = mul_adjoint(P, Q)
    return AlgebraElement.from_dense(P.spec, integrate_coefficients(ivs, atoms, sp, excluded_atoms))
