"""Hilbert C*-modules realised as subspaces of p x q complex matrices.

The algebra acts by left multiplication and the inner product is
``<M, N> = M @ N^H``, whose value is read back as a block-diagonal
algebra element.  Elements are stored as coordinates over an explicit
basis so that operators are plain m x m matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, BlockSpec, alg_norm, alg_is_positive
from .errors import InvalidSpace, NotInSpan, Singular, SpaceMismatch


def _residual_ok(residual: float, scale: float, tol: float) -> bool:
    return residual <= tol * max(1.0, scale)


@dataclass(frozen=True)
class Failure:
    axiom: str
    detail: str

    def __str__(self):
        return f"{self.axiom}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[Failure, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


class ModuleSpace:
    """Span of ``basis`` inside p x q matrices, a left module over ``algebra``.

    Construction only checks shapes; use :func:`mod_validate` (or
    :meth:`require_valid`) to check the module axioms.
    """

    def __init__(self, algebra: BlockSpec, rows: int, cols: int, basis: Sequence):
        basis = tuple(np.array(b, dtype=complex) for b in basis)
        if not basis:
            raise ValueError("a module space needs at least one basis element")
        if rows != algebra.dim:
            raise ValueError(f"rows={rows} must equal the algebra dimension {algebra.dim}")
        for i, b in enumerate(basis):
            if b.shape != (rows, cols):
                raise ValueError(f"basis[{i}] has shape {b.shape}, expected ({rows}, {cols})")
            b.setflags(write=False)
        self.algebra = algebra
        self.rows = int(rows)
        self.cols = int(cols)
        self.basis = basis

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def basis_tensor(self) -> np.ndarray:
        """Basis stacked as an (m, p, q) array."""
        t = np.stack(self.basis)
        t.setflags(write=False)
        return t

    @cached_property
    def _flat(self) -> np.ndarray:
        return self.basis_tensor.reshape(self.dim, -1).T

    @cached_property
    def gram(self) -> np.ndarray:
        """Ambient Gram tensor ``gram[i, j] = e_i @ e_j^H`` of shape (m, m, p, p)."""
        g = np.einsum("iab,jcb->ijac", self.basis_tensor, self.basis_tensor.conj())
        g.setflags(write=False)
        return g

    @cached_property
    def report(self) -> ValidationReport:
        return mod_validate(self)

    def require_valid(self):
        rep = self.report
        if not rep.ok:
            raise InvalidSpace(str(rep.failures[0]))

    def element(self, coords) -> ModuleElement:
        return ModuleElement(self, coords)

    def from_ambient(self, matrix, tol: float = DEFAULT_TOL) -> ModuleElement:
        return ModuleElement(self, mod_coords(self, matrix, tol))

    def zero(self) -> ModuleElement:
        return ModuleElement(self, np.zeros(self.dim))

    def basis_element(self, i: int) -> ModuleElement:
        c = np.zeros(self.dim)
        c[i] = 1.0
        return ModuleElement(self, c)

    def identity(self) -> ModuleOperator:
        return ModuleOperator(self, np.eye(self.dim))

    def _key(self):
        return (self.algebra, self.rows, self.cols, self.basis_tensor.tobytes())

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ModuleSpace):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"ModuleSpace(blocks={self.algebra.block_sizes}, rows={self.rows}, "
                f"cols={self.cols}, dim={self.dim})")


def mod_validate(space: ModuleSpace, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the Hilbert module axioms of ``space``.

    Failures are collected, not raised: linear independence of the basis,
    invariance of the span under every matrix unit of the algebra,
    inner products of basis pairs supported on the block-diagonal
    pattern, and positivity of each ``<e, e>``.
    """
    failures = []
    flat = space._flat
    sv = np.linalg.svd(flat, compute_uv=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    if rank < space.dim:
        failures.append(Failure("independence",
                                f"basis is not linearly independent (rank {rank} < {space.dim})"))
        # span tests below need a proper basis
        return ValidationReport(tuple(failures))

    spec = space.algebra
    moved_out = _first_escape(space, tol)
    if moved_out is not None:
        failures.append(Failure("A-invariance",
                                f"not A-invariant: a matrix unit maps basis[{moved_out}] out of the span"))

    off = ~spec.mask()
    g = space.gram
    leak = np.abs(g[:, :, off]).max(axis=-1) if off.any() else np.zeros((space.dim, space.dim))
    bad = np.argwhere(leak > tol)
    if len(bad):
        i, j = bad[0]
        failures.append(Failure("inner-product pattern",
                                f"<basis[{i}], basis[{j}]> has an entry outside the block-diagonal "
                                f"pattern (|x| = {leak[i, j]:.3e})"))

    for i in range(space.dim):
        if not alg_is_positive(AlgebraElement.from_dense(spec, g[i, i]), tol):
            failures.append(Failure("positivity", f"<basis[{i}], basis[{i}]> is not positive"))
            break
    return ValidationReport(tuple(failures))


def _first_escape(space: ModuleSpace, tol: float):
    for unit in space.algebra.matrix_units():
        moved = np.einsum("ab,ibc->iac", unit.to_dense(), space.basis_tensor)
        for i, m in enumerate(moved):
            _, res = _solve(space, m)
            if not _residual_ok(res, np.linalg.norm(m), tol):
                return i
    return None


def _solve(space: ModuleSpace, matrix):
    rhs = np.asarray(matrix, dtype=complex).reshape(-1)
    c, *_ = np.linalg.lstsq(space._flat, rhs, rcond=None)
    return c, float(np.linalg.norm(space._flat @ c - rhs))


def mod_coords(space: ModuleSpace, ambient, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Coordinates of an ambient p x q matrix over the basis.

    The least-squares solution is accepted when the reconstruction
    residual is at most ``tol * max(1, |ambient|)``; otherwise
    :class:`NotInSpan` is raised.
    """
    ambient = np.asarray(ambient, dtype=complex)
    if ambient.shape != (space.rows, space.cols):
        raise NotInSpan(f"matrix of shape {ambient.shape} is not {space.rows}x{space.cols}")
    c, res = _solve(space, ambient)
    if not _residual_ok(res, np.linalg.norm(ambient), tol):
        raise NotInSpan(f"residual {res:.3e} exceeds tolerance {tol:g}")
    return c


def coords_many(space: ModuleSpace, ambients, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`mod_coords` over a stack of shape (N, p, q); returns (N, m)."""
    ambients = np.asarray(ambients, dtype=complex)
    if ambients.shape[0] == 0:
        return np.zeros((0, space.dim), dtype=complex)
    rhs = ambients.reshape(ambients.shape[0], -1).T
    c, *_ = np.linalg.lstsq(space._flat, rhs, rcond=None)
    res = np.linalg.norm(space._flat @ c - rhs, axis=0)
    scale = np.linalg.norm(rhs, axis=0)
    worst = np.argmax(res - tol * np.maximum(1.0, scale))
    if not _residual_ok(res[worst], scale[worst], tol):
        raise NotInSpan(f"residual {res[worst]:.3e} exceeds tolerance {tol:g}")
    return c.T


class ModuleElement:
    """Element of a :class:`ModuleSpace` given by basis coordinates."""

    __slots__ = ("space", "coords")

    def __init__(self, space: ModuleSpace, coords):
        coords = np.array(coords, dtype=complex).reshape(-1)
        if coords.shape != (space.dim,):
            raise SpaceMismatch(f"expected {space.dim} coordinates, got {coords.size}")
        coords.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleElement is immutable")

    @property
    def ambient(self) -> np.ndarray:
        return np.tensordot(self.coords, self.space.basis_tensor, axes=1)

    def _check(self, other):
        if not isinstance(other, ModuleElement):
            raise TypeError(f"expected ModuleElement, got {type(other).__name__}")
        if other.space != self.space:
            raise SpaceMismatch("elements belong to different module spaces")

    def __add__(self, other):
        self._check(other)
        return ModuleElement(self.space, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return ModuleElement(self.space, self.coords - other.coords)

    def __neg__(self):
        return ModuleElement(self.space, -self.coords)

    def __mul__(self, scalar):
        return ModuleElement(self.space, scalar * self.coords)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ModuleElement({np.array2string(self.coords, precision=6, separator=',')})"


def mod_inner(f: ModuleElement, g: ModuleElement) -> AlgebraElement:
    """``<f, g> = M @ N^H`` for the ambient matrices M, N of f and g."""
    f._check(g)
    dense = np.einsum("i,j,ijab->ab", f.coords, g.coords.conj(), f.space.gram)
    return AlgebraElement.from_dense(f.space.algebra, dense)


def mod_act(a: AlgebraElement, f: ModuleElement, tol: float = DEFAULT_TOL) -> ModuleElement:
    if a.spec != f.space.algebra:
        raise SpaceMismatch("algebra element does not act on this module space")
    return ModuleElement(f.space, mod_coords(f.space, a.to_dense() @ f.ambient, tol))


def mod_norm(f: ModuleElement) -> float:
    return float(np.sqrt(alg_norm(mod_inner(f, f))))


class ModuleOperator:
    """ℂ-linear map on a module space, as a matrix acting on coordinates."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: ModuleSpace, matrix):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (space.dim, space.dim):
            raise SpaceMismatch(f"operator of shape {matrix.shape} on a {space.dim}-dim space")
        matrix.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleOperator is immutable")

    def __matmul__(self, other):
        if isinstance(other, ModuleOperator):
            return op_compose(self, other)
        if isinstance(other, ModuleElement):
            return op_apply(self, other)
        return NotImplemented

    def __repr__(self):
        return f"ModuleOperator({np.array2string(self.matrix, precision=6, separator=',')})"


def op_apply(T: ModuleOperator, f: ModuleElement) -> ModuleElement:
    if T.space != f.space:
        raise SpaceMismatch("operator and element belong to different spaces")
    return ModuleElement(f.space, T.matrix @ f.coords)


def op_compose(T: ModuleOperator, R: ModuleOperator) -> ModuleOperator:
    """The operator ``T ∘ R``."""
    if T.space != R.space:
        raise SpaceMismatch("operators act on different spaces")
    return ModuleOperator(T.space, T.matrix @ R.matrix)


def op_inverse(T: ModuleOperator, tol: float = DEFAULT_TOL) -> ModuleOperator:
    smin = np.linalg.svd(T.matrix, compute_uv=False)[-1]
    if smin <= tol:
        raise Singular(f"operator has smallest singular value {smin:.3e} <= {tol:g}")
    return ModuleOperator(T.space, np.linalg.inv(T.matrix))


def op_identity_defect(T: ModuleOperator) -> float:
    """Largest entry of ``|matrix(T) - I|``."""
    return float(np.max(np.abs(T.matrix - np.eye(T.space.dim))))
