"""Finite direct sums of full matrix algebras.

Every finite-dimensional C*-algebra is isomorphic to a direct sum
M_{n_1}(C) + ... + M_{n_K}(C).  Elements are stored block by block and
embed block-diagonally into M_p(C) with p = n_1 + ... + n_K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import Singular, SpecMismatch

DEFAULT_TOL = 1e-10


def _frozen(x):
    x = np.array(x, dtype=complex)
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class BlockSpec:
    """Block sizes of the algebra; ``dim`` is the size of the ambient matrices."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise ValueError("block_sizes must be nonempty")
        if any(n < 1 for n in sizes):
            raise ValueError(f"block sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def dim(self) -> int:
        return sum(self.block_sizes)

    @property
    def complex_dim(self) -> int:
        """Dimension of the algebra as a complex vector space."""
        return sum(n * n for n in self.block_sizes)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_sizes:
            out.append(acc)
            acc += n
        return tuple(out)

    def slices(self) -> list[slice]:
        return [slice(o, o + n) for o, n in zip(self.offsets, self.block_sizes)]

    def mask(self) -> np.ndarray:
        """Boolean p x p mask of the block-diagonal support pattern."""
        m = np.zeros((self.dim, self.dim), dtype=bool)
        for s in self.slices():
            m[s, s] = True
        return m

    def identity(self) -> AlgebraElement:
        return AlgebraElement(self, [np.eye(n) for n in self.block_sizes])

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, [np.zeros((n, n)) for n in self.block_sizes])

    def diag(self, values: Sequence[complex]) -> AlgebraElement:
        """Element with the given diagonal in the ambient embedding."""
        return AlgebraElement.from_dense(self, np.diag(np.asarray(values, dtype=complex)))

    def matrix_units(self) -> list[AlgebraElement]:
        """ℂ-basis of the algebra made of matrix units E_ab inside each block."""
        units = []
        for k, n in enumerate(self.block_sizes):
            for a in range(n):
                for b in range(n):
                    blocks = [np.zeros((m, m)) for m in self.block_sizes]
                    blocks[k][a, b] = 1.0
                    units.append(AlgebraElement(self, blocks))
        return units


class AlgebraElement:
    """An element of a block-diagonal matrix algebra.

    Values are immutable.  ``a @ b`` is the algebra product, ``a.H`` the
    adjoint, and ``a @ f`` for a module element ``f`` is the module action.
    """

    __slots__ = ("spec", "blocks")

    def __init__(self, spec: BlockSpec, blocks: Iterable):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != len(spec.block_sizes):
            raise SpecMismatch(f"expected {len(spec.block_sizes)} blocks, got {len(blocks)}")
        for b, n in zip(blocks, spec.block_sizes):
            if b.shape != (n, n):
                raise SpecMismatch(f"block of shape {b.shape} does not match size {n}")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def from_dense(cls, spec: BlockSpec, matrix) -> AlgebraElement:
        """Project a p x p matrix onto its diagonal blocks (off-block entries are dropped)."""
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (spec.dim, spec.dim):
            raise SpecMismatch(f"matrix of shape {matrix.shape} is not {spec.dim}x{spec.dim}")
        return cls(spec, [matrix[s, s] for s in spec.slices()])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.spec.dim, self.spec.dim), dtype=complex)
        for s, b in zip(self.spec.slices(), self.blocks):
            out[s, s] = b
        return out

    def _check(self, other: AlgebraElement):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec.block_sizes} vs {other.spec.block_sizes}")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.spec, [-x for x in self.blocks])

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.spec, [scalar * x for x in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, AlgebraElement):
            return alg_mul(self, other)
        from .hmodule import ModuleElement, mod_act

        if isinstance(other, ModuleElement):
            return mod_act(self, other)
        return NotImplemented

    @property
    def H(self) -> AlgebraElement:
        return alg_adjoint(self)

    def allclose(self, other: AlgebraElement, atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(x, y, rtol=0.0, atol=atol) for x, y in zip(self.blocks, other.blocks))

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=6, separator=",") for b in self.blocks)
        return f"AlgebraElement({self.spec.block_sizes}, [{inner}])"


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.spec, [x @ y for x, y in zip(a.blocks, b.blocks)])


def alg_adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.spec, [x.conj().T for x in a.blocks])


def alg_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) for b in a.blocks)


def alg_is_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    """True iff every block is Hermitian within ``tol`` with spectrum >= -tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    for b in a.blocks:
        if np.max(np.abs(b - b.conj().T)) > tol:
            return False
        h = 0.5 * (b + b.conj().T)
        if np.linalg.eigvalsh(h)[0] < -tol:
            return False
    return True


def alg_spectrum(a: AlgebraElement) -> np.ndarray:
    """Eigenvalues of all blocks, concatenated in block order."""
    return np.concatenate([np.linalg.eigvals(b) for b in a.blocks])


def alg_invert(a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Blockwise inverse.

    Raises
    ------
    Singular
        If the smallest singular value of some block is <= ``tol``.
    """
    inv = []
    for k, b in enumerate(a.blocks):
        smin = np.linalg.svd(b, compute_uv=False)[-1]
        if smin <= tol:
            raise Singular(f"block {k} has smallest singular value {smin:.3e} <= {tol:g}")
        inv.append(np.linalg.inv(b))
    return AlgebraElement(a.spec, inv)
