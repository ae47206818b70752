import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stencil_dmp.symbolics import (
    DT, Const, Deriv, Eq, FieldAccess, FieldSpec, GridSpec, NotAffineError,
    Product, Recip, StencilEquation, Sum, Symbol, UnsupportedDerivative,
    accesses, add, apply_cse, discretize, discretize_expr, eval_exact,
    fd_coefficients, mul, neg, solve_forward, substitute, walk,
)


def grid2d(n=8, extent=2.0):
    return GridSpec(shape=(n, n), extent=(extent, extent))


def field(name="u", grid=None, so=2, to=1):
    return FieldSpec(name=name, grid=grid or grid2d(), space_order=so, time_order=to)


# ---------------------------------------------------------------------------
# fd_coefficients


def vandermonde_oracle(d, acc):
    # Independent oracle: solve the moment system in floating point.
    r = acc // 2
    ks = np.arange(-r, r + 1, dtype=float)
    mat = np.vander(ks, N=2 * r + 1, increasing=True).T
    rhs = np.zeros(2 * r + 1)
    rhs[d] = math.factorial(d)
    return np.linalg.solve(mat, rhs)


def test_fd_second_order_second_derivative():
    assert fd_coefficients(2, 2) == [Fraction(1), Fraction(-2), Fraction(1)]


def test_fd_second_order_first_derivative():
    assert fd_coefficients(1, 2) == [Fraction(-1, 2), Fraction(0), Fraction(1, 2)]


@pytest.mark.parametrize("d,acc", [(1, 2), (2, 2), (2, 4), (2, 8)])
def test_fd_matches_vandermonde_oracle(d, acc):
    got = np.array([float(c) for c in fd_coefficients(d, acc)])
    assert np.max(np.abs(got - vandermonde_oracle(d, acc))) < 1e-12


def test_fd_fourth_order_values():
    # Frozen from the numeric oracle above (and classical tables).
    assert fd_coefficients(2, 4) == [
        Fraction(-1, 12), Fraction(4, 3), Fraction(-5, 2), Fraction(4, 3),
        Fraction(-1, 12)]


def test_fd_unsupported_order():
    with pytest.raises(UnsupportedDerivative):
        fd_coefficients(3, 2)
    with pytest.raises(UnsupportedDerivative):
        fd_coefficients(1, 3)


@given(st.sampled_from([1, 2]), st.sampled_from([2, 4, 6, 8, 10]))
def test_fd_moment_sums(d, acc):
    coeffs = fd_coefficients(d, acc)
    r = acc // 2
    assert sum(coeffs) == 0
    first_moment = sum(Fraction(k) * c for k, c in zip(range(-r, r + 1), coeffs))
    assert first_moment == (1 if d == 1 else 0)
    # symmetry / antisymmetry
    for k in range(1, r + 1):
        if d == 2:
            assert coeffs[r + k] == coeffs[r - k]
        else:
            assert coeffs[r + k] == -coeffs[r - k]


def test_fd_polynomial_exactness_exact_arithmetic():
    # Discretized 2D Laplacian applied to x**2 + y**2 on a unit-spacing grid
    # returns exactly 4 at interior points (order-2 scheme, degree-2 input).
    g = GridSpec(shape=(9, 9), extent=(8.0, 8.0))  # h == 1 exactly
    u = field(grid=g)
    lap = discretize_expr(u.laplace)
    for (cx, cy) in [(3, 3), (4, 5), (2, 6)]:
        bind = {Symbol("h_x"): Fraction(1), Symbol("h_y"): Fraction(1)}
        for acc in accesses(lap):
            x, y = cx + acc.offsets[0], cy + acc.offsets[1]
            bind[acc] = Fraction(x * x + y * y)
        assert eval_exact(lap, bind) == 4


# ---------------------------------------------------------------------------
# discretize


def test_discretize_laplacian_shape_and_weights():
    u = field()
    lap = discretize_expr(u.laplace)
    # accesses: per axis, offsets 0, -1, +1 with weights -2, 1, 1 over h^2
    offs = sorted(a.offsets for a in accesses(lap))
    assert offs == sorted([(0, 0), (-1, 0), (1, 0), (0, 0), (0, -1), (0, 1)])
    bind = {Symbol("h_x"): Fraction(1, 2), Symbol("h_y"): Fraction(1, 3)}
    vals = {(0, 0): Fraction(5), (-1, 0): Fraction(1), (1, 0): Fraction(2),
            (0, -1): Fraction(3), (0, 1): Fraction(4)}
    for acc in accesses(lap):
        bind[acc] = vals[acc.offsets]
    expected = (1 + 2 - 2 * 5) * Fraction(4) + (3 + 4 - 2 * 5) * Fraction(9)
    assert eval_exact(lap, bind) == expected


def test_discretize_forward_time_difference():
    u = field()
    d = discretize_expr(u.dt)
    bind = {DT: Fraction(1, 4)}
    for acc in accesses(d):
        bind[acc] = Fraction(7) if acc.tshift == 1 else Fraction(3)
    assert eval_exact(d, bind) == (7 - 3) * 4


def test_discretize_central_second_time_difference():
    u = field(to=2)
    d = discretize_expr(u.dt2)
    bind = {DT: Fraction(1, 2)}
    vals = {1: Fraction(5), 0: Fraction(2), -1: Fraction(1)}
    for acc in accesses(d):
        bind[acc] = vals[acc.tshift]
    assert eval_exact(d, bind) == (5 - 2 * 2 + 1) * 4


def test_discretize_rejects_radius_beyond_halo():
    g = grid2d()
    u = FieldSpec(name="u", grid=g, space_order=4, halo=(1, 1))
    with pytest.raises(Exception) as err:
        discretize(Eq(u.dt, u.laplace), g)
    assert "halo" in str(err.value)
    assert "u" in str(err.value)


def test_discretize_max_offset_is_half_space_order():
    u = field(so=8)
    lap = discretize_expr(u.laplace)
    assert max(abs(o) for a in accesses(lap) for o in a.offsets) == 4


# ---------------------------------------------------------------------------
# solve_forward


def rational_probe(eq: Eq, solved: StencilEquation, seed=0):
    """Substitute the solved rhs for the unknown and check the original
    equation holds exactly over random rational samples."""
    rng = np.random.default_rng(seed)
    residual = add(eq.lhs, neg(eq.rhs))
    for _ in range(5):
        bind = {}
        leaves = {n for n in walk(residual) if isinstance(n, (Symbol, FieldAccess))}
        leaves |= {n for n in walk(solved.rhs) if isinstance(n, (Symbol, FieldAccess))}
        for leaf in leaves:
            bind[leaf] = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 12)))
        bind[solved.lhs] = eval_exact(solved.rhs, bind)
        assert eval_exact(residual, bind) == 0


def test_solve_diffusion_form_and_substitution():
    u = field()
    eq = Eq(u.dt, u.laplace)
    solved = solve_forward(eq, u.forward)
    assert solved.lhs == u.forward
    # Paper-shaped result: dt * (1/dt * u[t0] + laplacian terms)
    assert isinstance(solved.rhs, Product)
    assert solved.rhs.factors[0] == DT
    rational_probe(discretize(eq, u.grid), solved)


def test_solve_acoustic_second_order_in_time():
    g = grid2d()
    u = FieldSpec(name="u", grid=g, space_order=2, time_order=2)
    m = FieldSpec(name="m", grid=g, space_order=2, time_order=0)
    eq = Eq(m.at() * u.dt2 - u.laplace)
    solved = solve_forward(eq, u.forward)
    # u[t+1] == 2u[t] - u[t-1] + (dt^2/m) * laplace(u): check exactly on
    # rational samples rather than by tree shape.
    rational_probe(discretize(eq, g), solved)
    tshifts = {a.tshift for a in accesses(solved.rhs) if a.spec.name == "u"}
    assert tshifts == {0, -1}


def test_solve_already_solved_is_identity():
    u = field()
    solved = solve_forward(Eq(u.forward, Const(Fraction(5))), u.forward)
    assert solved.lhs == u.forward
    assert solved.rhs == Const(Fraction(5))


def test_solve_rejects_nonlinear():
    u = field()
    with pytest.raises(NotAffineError):
        solve_forward(Eq(u.forward * u.forward, Const(Fraction(1))), u.forward)


def test_solve_rejects_zero_coefficient():
    u = field()
    with pytest.raises(NotAffineError):
        solve_forward(Eq(u.at(), Const(Fraction(5))), u.forward)


# ---------------------------------------------------------------------------
# apply_cse


def float_eval(e, bind):
    from stencil_dmp.symbolics import Neg, Recip

    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, (Symbol, FieldAccess)):
        return bind[e]
    if isinstance(e, Sum):
        acc = float_eval(e.terms[0], bind)
        for t in e.terms[1:]:
            acc = acc + float_eval(t, bind)
        return acc
    if isinstance(e, Product):
        acc = float_eval(e.factors[0], bind)
        for f in e.factors[1:]:
            acc = acc * float_eval(f, bind)
        return acc
    if isinstance(e, Neg):
        return -float_eval(e.arg, bind)
    if isinstance(e, Recip):
        return 1.0 / float_eval(e.arg, bind)
    raise TypeError(type(e))


def test_cse_extracts_shared_center_term():
    u = field()
    solved = solve_forward(Eq(u.dt, u.laplace), u.forward)
    out = apply_cse(solved)
    # -2*u[t0, x, y] is shared by the two axis terms.
    u0 = u.at()
    shared = mul(Const(Fraction(-2)), u0)
    bodies = dict(out.temporaries)
    assert shared in bodies.values()
    # 1/(h_x*h_x) and 1/(h_y*h_y) each occur three times -> extracted too.
    assert Recip(Product((Symbol("h_x"), Symbol("h_x")))) in bodies.values()
    name = next(n for n, e in out.temporaries if e == shared)
    uses = sum(1 for n in walk(out.rhs) for _ in [n] if n == Symbol(name))
    uses += sum(1 for _, e in out.temporaries for n in walk(e) if n == Symbol(name))
    assert uses == 2


def test_cse_no_repeats_is_identity():
    u = field()
    eq = StencilEquation(u.forward, add(u.at(), Const(Fraction(3))))
    assert apply_cse(eq) is eq


def test_cse_squared_sum():
    u = field()
    a = Symbol("a")
    b = Symbol("b")
    s = add(a, b)
    eq = StencilEquation(u.forward, mul(s, s))
    out = apply_cse(eq)
    assert len(out.temporaries) == 1
    name, body = out.temporaries[0]
    assert body == s
    assert out.rhs == Product((Symbol(name), Symbol(name)))


@given(st.integers(0, 2 ** 31 - 1))
def test_cse_bitwise_identical_on_random_inputs(seed):
    rng = np.random.default_rng(seed)
    u = field()
    m = FieldSpec(name="m", grid=u.grid, time_order=0)
    eq = solve_forward(Eq(m.at() * u.dt, u.laplace), u.forward)
    out = apply_cse(eq)
    leaves = {n for n in walk(eq.rhs) if isinstance(n, (Symbol, FieldAccess))}
    bind = {leaf: float(rng.uniform(0.1, 2.0)) for leaf in leaves}
    before = float_eval(eq.rhs, bind)
    scope = dict(bind)
    for name, body in out.temporaries:
        scope[Symbol(name)] = float_eval(body, scope)
    after = float_eval(out.rhs, scope)
    assert before == after  # bitwise


def test_cse_preserves_substituted_semantics():
    u = field()
    eq = apply_cse(solve_forward(Eq(u.dt, u.laplace), u.forward))
    # Temporaries are acyclic: each references only earlier names.
    seen = set()
    for name, body in eq.temporaries:
        for n in walk(body):
            if isinstance(n, Symbol) and n.name.startswith("r"):
                assert n.name in seen
        seen.add(name)
