"""Brute-force references that share no code path with the library.

Everything here works from ambient matrices and the defining sums or
Gauss-Legendre quadrature, never from the library's operators.
"""

import numpy as np
import scipy.linalg as sla


def ambient_atoms(F):
    return np.array([sum(c * e for c, e in zip(v, F.space.basis)) for v in F.atoms])


def block_entry(M, spec, k):
    s = spec.slices()[k]
    return M[s, s]


def quadrature(F, n=40):
    """Nodes, weights and ambient values of F for Gauss-Legendre plus atoms."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights, values = [], [], []
    for (a, b), coeffs in zip(F.measure.intervals, F.intervals):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        for ti, wi in zip(t, 0.5 * (b - a) * w):
            c = sum(cj * ti ** j for j, cj in enumerate(coeffs))
            nodes.append(ti)
            weights.append(wi)
            values.append(sum(ci * e for ci, e in zip(c, F.space.basis)))
    for (pt, mass), v in zip(F.measure.atoms, ambient_atoms(F) if len(F.atoms) else []):
        nodes.append(pt)
        weights.append(mass)
        values.append(v)
    return np.array(nodes), np.array(weights), values


def commutative_forms(F, excluded_atoms=(), n=40):
    """Per block k the Hermitian forms (M_k, H_k) in coordinates c with
    c^H M_k c = ∫ |<f, F>_k|² dμ and c^H H_k c = <f, f>_k.
    """
    spec = F.space.algebra
    basis = F.space.basis
    _, weights, values = quadrature(F, n)
    skip = {len(weights) - len(F.atoms) + k for k in excluded_atoms}
    out = []
    for k in range(len(spec.block_sizes)):
        r = spec.offsets[k]
        H = np.array([[(ei @ ej.conj().T)[r, r] for ei in basis] for ej in basis])
        M = np.zeros_like(H)
        for idx, (wt, Fv) in enumerate(zip(weights, values)):
            if idx in skip:
                continue
            u = np.array([(ei @ Fv.conj().T)[r, r] for ei in basis])
            M += wt * np.outer(u.conj(), u)
        out.append((M, H))
    return out


def restricted_bounds(F, excluded_atoms=(), n=40):
    """Optimal (A, B) for commutative algebras after removing some atoms."""
    lo, hi = np.inf, -np.inf
    for M, H in commutative_forms(F, excluded_atoms, n):
        R = sla.orth(H, rcond=1e-12)
        if R.size == 0:
            continue
        Hr = R.conj().T @ H @ R
        Mr = R.conj().T @ M @ R
        lam = sla.eigh(Mr, Hr, eigvals_only=True)
        lo, hi = min(lo, lam[0]), max(hi, lam[-1])
    return max(lo, 0.0), hi


def frame_operator_dense(F, n=40):
    """Coordinate matrix of S by quadrature: column i holds coordinates of S e_i."""
    basis = np.array(F.space.basis)
    flat = basis.reshape(len(basis), -1).T
    spec = F.space.algebra
    mask = np.zeros((spec.dim, spec.dim), dtype=bool)
    for s in spec.slices():
        mask[s, s] = True
    _, weights, values = quadrature(F, n)
    cols = []
    for e in basis:
        acc = np.zeros_like(e)
        for wt, Fv in zip(weights, values):
            acc = acc + wt * ((e @ Fv.conj().T) * mask) @ Fv
        cols.append(np.linalg.lstsq(flat, acc.ravel(), rcond=None)[0])
    return np.array(cols).T


def synthesis_kernel(F):
    """Real basis of atom coefficient maps φ with Σ_k μ_k φ_k F(ω_k) = 0.

    Returns a list of (K, p, p) arrays of block-diagonal matrices.
    """
    spec = F.space.algebra
    p = spec.dim
    K = len(F.atoms)
    Fa = ambient_atoms(F)
    units = []
    for k in range(K):
        for s in spec.slices():
            for a in range(s.start, s.stop):
                for b in range(s.start, s.stop):
                    for z in (1.0, 1j):
                        phi = np.zeros((K, p, p), dtype=complex)
                        phi[k, a, b] = z
                        units.append(phi)
    cols = []
    for phi in units:
        out = sum(mass * phi[k] @ Fa[k] for k, (_, mass) in enumerate(F.measure.atoms))
        cols.append(np.concatenate([out.real.ravel(), out.imag.ravel()]))
    N = sla.null_space(np.array(cols).T, rcond=1e-10)
    return [np.tensordot(N[:, j], np.array(units), axes=1) for j in range(N.shape[1])]
