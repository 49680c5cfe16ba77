from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import cstarframes.measure
from cstarframes import (AlgebraPoly, BlockSpec, DegreeCapExceeded, MeasureSpace, OutOfDomain,
                         SpecMismatch, alg_is_positive, evaluate, integrate_alg_poly, l2_inner,
                         moment)

SPEC2 = BlockSpec((1, 1))


def diag_poly(*coeff_pairs, spec=SPEC2, atoms=()):
    """Single-interval polynomial with diagonal coefficients."""
    return AlgebraPoly.from_elements(spec, [[spec.diag(c) for c in coeff_pairs]],
                                     [spec.diag(v) for v in atoms])


def test_moment_examples():
    assert moment((0, 1), 2) == pytest.approx(1 / 3, abs=0)
    assert moment((0, 1), 0) == 1.0
    assert moment((2, 3), 1) == 2.5
    with pytest.raises(ValueError):
        moment((1, 0), 1)


@given(st.fractions(-4, 4, max_denominator=16), st.fractions(0.0625, 4, max_denominator=16),
       st.integers(0, 16))
def test_moment_is_correctly_rounded(a, width, j):
    a, b = float(a), float(a + width)
    exact = (Fraction(b) ** (j + 1) - Fraction(a) ** (j + 1)) / (j + 1)
    assert moment((a, b), j) == float(exact)


def test_measure_validation():
    with pytest.raises(ValueError):
        MeasureSpace([(1, 0)])
    with pytest.raises(ValueError):
        MeasureSpace([(0, 2), (1, 3)])
    with pytest.raises(ValueError):
        MeasureSpace([], [(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        MeasureSpace([], [(0, 0)])
    with pytest.raises(ValueError):
        MeasureSpace()
    sp = MeasureSpace([(0, 1), (1, 2)], [(0.5, 2.0)])
    assert sp.total_mass == 4.0 and not sp.is_atomic
    assert sp.locate(0.5) == ("atom", 0) and sp.locate(1.5) == ("interval", 1)
    assert sp.point_mass(0.5) == 2.0 and sp.point_mass(0.25) == 0.0
    with pytest.raises(OutOfDomain):
        sp.locate(3.0)
    assert sp.without_atoms([0]).atoms == ()


def test_integrate_examples():
    sp = MeasureSpace([(0, 1)])
    P = diag_poly([0, 1], [0, 0], [3, 0])
    assert integrate_alg_poly(P, sp).allclose(SPEC2.identity(), atol=1e-15)
    assert integrate_alg_poly(AlgebraPoly.zero(SPEC2, sp), sp).allclose(SPEC2.zero())
    spec = BlockSpec((1,))
    atom = MeasureSpace([], [(0.3, 2.0)])
    one = AlgebraPoly.constant(spec.identity(), atom)
    assert integrate_alg_poly(one, atom, excluded_atoms=[0]).allclose(spec.zero())
    assert integrate_alg_poly(one, atom).allclose(2 * spec.identity())


def test_l2_inner_examples():
    spec = BlockSpec((1,))
    sp = MeasureSpace([(0, 1)])
    one = AlgebraPoly.constant(spec.identity(), sp)
    assert l2_inner(one, one, sp).allclose(spec.identity())
    P = diag_poly([0, -1], [2, 1])
    assert l2_inner(P, P, sp).allclose(SPEC2.diag([4 / 3, 1 / 3]), atol=1e-15)
    Q = diag_poly([0, 0], [3, 0])
    assert l2_inner(Q, Q, sp).allclose(SPEC2.diag([3, 0]), atol=1e-15)


def test_degree_cap_and_domain_checks():
    with pytest.raises(DegreeCapExceeded):
        AlgebraPoly(SPEC2, [np.zeros((18, 2, 2))], [])
    P = diag_poly([1, 1])
    with pytest.raises(SpecMismatch):
        integrate_alg_poly(P, MeasureSpace([(0, 1)], [(2, 1)]))
    with pytest.raises(SpecMismatch):
        P + AlgebraPoly.zero(BlockSpec((2,)), MeasureSpace([(0, 1)]))


def test_evaluate_prefers_atoms():
    sp = MeasureSpace([(0, 1)], [(0.5, 1.0)])
    P = diag_poly([1, 1], [1, 1], atoms=[[7, 8]])
    assert evaluate(P, sp, 0.5).allclose(SPEC2.diag([7, 8]))
    assert evaluate(P, sp, 0.25).allclose(SPEC2.diag([1.25, 1.25]))


@st.composite
def poly_cases(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    spec = draw(st.sampled_from([BlockSpec((1,)), SPEC2, BlockSpec((2,)), BlockSpec((1, 2))]))
    sp = MeasureSpace([(-1, 0.5), (1, 2.5)], [(3.0, 0.75), (0.25, 1.5)])

    def rand_poly(deg):
        p = spec.dim
        mask = spec.mask()
        ivs = [(rng.standard_normal((deg + 1, p, p)) + 1j * rng.standard_normal((deg + 1, p, p))) * mask
               for _ in sp.intervals]
        ats = (rng.standard_normal((2, p, p)) + 1j * rng.standard_normal((2, p, p))) * mask
        return AlgebraPoly(spec, ivs, ats)

    return spec, sp, rand_poly(draw(st.integers(0, 4))), rand_poly(draw(st.integers(0, 4))), rng


@given(poly_cases())
def test_integration_is_linear(case):
    spec, sp, P, Q, rng = case
    z = complex(*rng.standard_normal(2))
    lhs = integrate_alg_poly(P + z * Q, sp)
    rhs = integrate_alg_poly(P, sp) + z * integrate_alg_poly(Q, sp)
    assert lhs.allclose(rhs, atol=1e-12 * 50)


@given(poly_cases())
def test_l2_inner_is_positive(case):
    _, sp, P, _, _ = case
    assert alg_is_positive(l2_inner(P, P, sp), 1e-10)


@given(poly_cases())
def test_splitting_at_an_atom(case):
    _, sp, P, _, _ = case
    last = len(sp.atoms) - 1
    for k in range(len(sp.atoms)):
        whole = integrate_alg_poly(P, sp)
        part = integrate_alg_poly(P, sp, excluded_atoms=[k]) + sp.atoms[k][1] * P.atom_value(k)
        if k == last:
            # the excluded atom is the final summand, so the split is bit-identical
            assert all(np.array_equal(x, y) for x, y in zip(whole.blocks, part.blocks))
        else:
            assert whole.allclose(part, atol=1e-12 * 20)


@given(poly_cases())
def test_product_degree_is_exact(case):
    spec, sp, P, Q, _ = case
    # Gauss-Legendre with enough nodes integrates the product exactly
    x, w = np.polynomial.legendre.leggauss(10)
    ref = np.zeros((spec.dim, spec.dim), dtype=complex)
    for (a, b), pc, qc in zip(sp.intervals, P.intervals, Q.intervals):
        for xi, wi in zip(x, w):
            t = 0.5 * (b - a) * xi + 0.5 * (a + b)
            pv = cstarframes.measure.poly_eval(pc, t)
            qv = cstarframes.measure.poly_eval(qc, t)
            ref += 0.5 * (b - a) * wi * pv @ qv.conj().T
    for (_, m), pv, qv in zip(sp.atoms, P.atoms, Q.atoms):
        ref += m * pv @ qv.conj().T
    np.testing.assert_allclose(l2_inner(P, Q, sp).to_dense(), ref, atol=1e-10)


def test_doctests():
    import doctest
    assert doctest.testmod(cstarframes.measure).failed == 0
