"""Symbolic grids, fields and stencil equations.

Expressions are immutable trees over exact rational constants; they stay
rational until a plan binds them to floats, so rearrangement passes cannot
perturb runtime values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

TIME_AXIS = -1

AXIS_NAMES = ("x", "y", "z")


class SymbolicsError(ValueError):
    """Raised for malformed grids, fields or equations."""


class UnsupportedDerivative(SymbolicsError):
    """Derivative order outside the supported set."""


class StencilExceedsHalo(SymbolicsError):
    """A discretized stencil reads beyond the field's allocated halo."""


class NotAffineError(SymbolicsError):
    """Equation is not affine in the requested unknown."""


# ---------------------------------------------------------------------------
# Grid and field descriptions


@dataclass(frozen=True)
class GridSpec:
    """A structured grid: points per axis and physical extent per axis.

    Spacing is ``extent / (shape - 1)``, i.e. points sit on the domain
    boundary (``dx = 2/(nx-1)`` for a 4-point axis of extent 2).
    """

    shape: tuple[int, ...]
    extent: tuple[float, ...]

    def __post_init__(self):
        if len(self.shape) != len(self.extent):
            raise SymbolicsError("shape and extent rank mismatch")
        if self.ndims not in (2, 3):
            raise SymbolicsError("only 2D and 3D grids are supported")
        if any(n < 2 for n in self.shape):
            raise SymbolicsError("every axis needs at least 2 points")
        if any(e <= 0.0 for e in self.extent):
            raise SymbolicsError("extent must be strictly positive")

    @property
    def ndims(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(e / (n - 1) for e, n in zip(self.extent, self.shape))


def _default_halo(grid: GridSpec, space_order: int) -> tuple[int, ...]:
    return (space_order,) * grid.ndims


@dataclass(frozen=True)
class FieldSpec:
    """A discrete field on a grid.

    ``time_order`` 0 marks a static (coefficient) field with one buffer;
    orders 1 and 2 evolve with 2 and 3 time buffers.  ``halo`` is the
    per-side ghost width per spatial axis and defaults to ``space_order``,
    which bounds every stencil radius this package generates (radius is
    ``space_order/2`` per derivative application, at most doubled by
    nested derivatives).
    """

    name: str
    grid: GridSpec
    space_order: int = 2
    time_order: int = 1
    halo: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.space_order < 2 or self.space_order % 2:
            raise SymbolicsError(f"{self.name}: space_order must be even and >= 2")
        if self.time_order not in (0, 1, 2):
            raise SymbolicsError(f"{self.name}: time_order must be 0, 1 or 2")
        if self.halo is None:
            object.__setattr__(self, "halo", _default_halo(self.grid, self.space_order))
        if len(self.halo) != self.grid.ndims or any(h < 0 for h in self.halo):
            raise SymbolicsError(f"{self.name}: bad halo {self.halo}")

    @property
    def time_buffers(self) -> int:
        return self.time_order + 1

    @property
    def is_static(self) -> bool:
        return self.time_order == 0

    # -- expression sugar ---------------------------------------------------

    def at(self, tshift: int = 0, offsets: tuple[int, ...] = None) -> "FieldAccess":
        if offsets is None:
            offsets = (0,) * self.grid.ndims
        return FieldAccess(self, tshift, tuple(offsets))

    @property
    def forward(self) -> "FieldAccess":
        return self.at(+1)

    @property
    def backward(self) -> "FieldAccess":
        return self.at(-1)

    @property
    def dt(self) -> "Deriv":
        return Deriv(self.at(), TIME_AXIS, 1)

    @property
    def dt2(self) -> "Deriv":
        return Deriv(self.at(), TIME_AXIS, 2)

    def d(self, axis: int, order: int = 1) -> "Deriv":
        return Deriv(self.at(), axis, order)

    @property
    def dx(self) -> "Deriv":
        return self.d(0)

    @property
    def dy(self) -> "Deriv":
        return self.d(1)

    @property
    def dz(self) -> "Deriv":
        return self.d(2)

    @property
    def laplace(self) -> "Expr":
        return add(*(self.d(a, 2) for a in range(self.grid.ndims)))


# ---------------------------------------------------------------------------
# Expression nodes


class Expr:
    """Base for all expression nodes; supports arithmetic sugar."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, recip(as_expr(other)))

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Symbol(Expr):
    """A scalar symbol: dt, spacings h_x/h_y/h_z, or a CSE temporary."""

    name: str


@dataclass(frozen=True)
class FieldAccess(Expr):
    """Read or write a field at a time-buffer shift and spatial offsets."""

    spec: FieldSpec
    tshift: int
    offsets: tuple[int, ...]

    def __post_init__(self):
        if self.spec.is_static and self.tshift != 0:
            raise SymbolicsError(f"{self.spec.name}: static field has one buffer")

    @property
    def name(self) -> str:
        return self.spec.name


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Recip(Expr):
    arg: Expr


@dataclass(frozen=True)
class Deriv(Expr):
    """Derivative placeholder; removed by :func:`discretize`.

    ``arg`` may be any expression, so rotated operators can nest a
    derivative of a coefficient-weighted derivative.
    """

    arg: Expr
    axis: int
    order: int


Number = Union[int, Fraction]


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot coerce {x!r} to an expression (floats are not exact)")


def add(*terms) -> Expr:
    """Flattened sum; evaluation folds terms left to right."""
    flat: list[Expr] = []
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Sum):
            flat.extend(t.terms)
        elif isinstance(t, Const) and t.value == 0:
            continue
        else:
            flat.append(t)
    if not flat:
        return Const(Fraction(0))
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def mul(*factors) -> Expr:
    """Flattened product; rational factors fold into a single leading one."""
    flat: list[Expr] = []
    coeff = Fraction(1)
    for f in factors:
        f = as_expr(f)
        if isinstance(f, Product):
            for g in f.factors:
                if isinstance(g, Const):
                    coeff *= g.value
                else:
                    flat.append(g)
        elif isinstance(f, Const):
            coeff *= f.value
        else:
            flat.append(f)
    if coeff == 0:
        return Const(Fraction(0))
    if coeff != 1:
        flat.insert(0, Const(coeff))
    if not flat:
        return Const(Fraction(1))
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def neg(x) -> Expr:
    """Exact negation: flips a rational coefficient when one is present."""
    x = as_expr(x)
    if isinstance(x, Const):
        return Const(-x.value)
    if isinstance(x, Neg):
        return x.arg
    if isinstance(x, Sum):
        return add(*(neg(t) for t in x.terms))
    if isinstance(x, Product):
        for i, f in enumerate(x.factors):
            if isinstance(f, Const):
                return mul(*x.factors[:i], Const(-f.value), *x.factors[i + 1:])
            if isinstance(f, Neg):
                return mul(*x.factors[:i], f.arg, *x.factors[i + 1:])
        return Neg(x)
    return Neg(x)


def recip(x) -> Expr:
    x = as_expr(x)
    if isinstance(x, Const):
        if x.value == 0:
            raise SymbolicsError("reciprocal of zero")
        return Const(1 / x.value)
    if isinstance(x, Recip):
        return x.arg
    if isinstance(x, Neg):
        return neg(recip(x.arg))
    if isinstance(x, Product):
        return mul(*(recip(f) for f in x.factors))
    return Recip(x)


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Sum):
        return e.terms
    if isinstance(e, Product):
        return e.factors
    if isinstance(e, (Neg, Recip)):
        return (e.arg,)
    if isinstance(e, Deriv):
        return (e.arg,)
    return ()


def rebuild(e: Expr, new_children: tuple[Expr, ...]) -> Expr:
    if isinstance(e, Sum):
        return Sum(new_children)
    if isinstance(e, Product):
        return Product(new_children)
    if isinstance(e, Neg):
        return Neg(new_children[0])
    if isinstance(e, Recip):
        return Recip(new_children[0])
    if isinstance(e, Deriv):
        return Deriv(new_children[0], e.axis, e.order)
    return e


def transform(e: Expr, fn) -> Expr:
    """Bottom-up rewrite: apply ``fn`` to each node after its children."""
    ch = children(e)
    if ch:
        new = tuple(transform(c, fn) for c in ch)
        if new != ch:
            e = rebuild(e, new)
    return fn(e)


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def accesses(e: Expr) -> list[FieldAccess]:
    return [n for n in walk(e) if isinstance(n, FieldAccess)]


def shift(e: Expr, axis: int, k: int) -> Expr:
    """Shift every field access by ``k`` cells along ``axis``."""
    if k == 0:
        return e

    def move(n: Expr) -> Expr:
        if isinstance(n, FieldAccess):
            off = list(n.offsets)
            off[axis] += k
            return FieldAccess(n.spec, n.tshift, tuple(off))
        return n

    return transform(e, move)


# ---------------------------------------------------------------------------
# Equations


@dataclass(frozen=True)
class Eq:
    """Symbolic equation lhs == rhs (rhs defaults to zero)."""

    lhs: Expr
    rhs: Expr = Const(Fraction(0))


@dataclass(frozen=True)
class StencilEquation:
    """An explicit update: write ``lhs`` from ``rhs`` after ``temporaries``.

    Temporaries are acyclic: each may reference fields, symbols and
    earlier temporaries only.
    """

    lhs: FieldAccess
    rhs: Expr
    temporaries: tuple[tuple[str, Expr], ...] = ()

    def __post_init__(self):
        if not isinstance(self.lhs, FieldAccess):
            raise SymbolicsError("stencil equation lhs must be a field access")
        if not self.lhs.spec.is_static:
            for acc in self.reads():
                if acc.spec.name == self.lhs.spec.name and acc.tshift == self.lhs.tshift:
                    raise SymbolicsError(
                        f"{self.lhs.spec.name}: explicit scheme reads its own "
                        f"written buffer (t{self.lhs.tshift:+d})")

    def reads(self) -> list[FieldAccess]:
        out = []
        for _, expr in self.temporaries:
            out.extend(accesses(expr))
        out.extend(accesses(self.rhs))
        return out

    def exprs(self) -> list[Expr]:
        return [e for _, e in self.temporaries] + [self.rhs]


# ---------------------------------------------------------------------------
# Finite-difference coefficients


def _solve_rational(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over exact rationals."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def fd_coefficients(derivative_order: int, accuracy_order: int) -> list[Fraction]:
    """Central-difference weights over offsets -r..+r, r = accuracy/2.

    The weights satisfy the moment conditions
    ``sum c_k k^m == m! if m == derivative_order else 0`` for m up to 2r,
    so applying them and dividing by ``h**derivative_order`` approximates
    the derivative to the requested accuracy.
    """
    if derivative_order not in (1, 2):
        raise UnsupportedDerivative(
            f"derivative order {derivative_order} unsupported (expected 1 or 2)")
    if accuracy_order < 2 or accuracy_order % 2:
        raise UnsupportedDerivative(
            f"accuracy order {accuracy_order} must be even and >= 2")
    r = accuracy_order // 2
    ks = list(range(-r, r + 1))
    mat = [[Fraction(k) ** m for k in ks] for m in range(2 * r + 1)]
    rhs = [Fraction(math.factorial(derivative_order)) if m == derivative_order
           else Fraction(0) for m in range(2 * r + 1)]
    return _solve_rational(mat, rhs)


# ---------------------------------------------------------------------------
# Discretization


def _spacing_symbol(axis: int) -> Symbol:
    return Symbol(f"h_{AXIS_NAMES[axis]}")


DT = Symbol("dt")


def _term(coeff: Fraction, rfac: Expr, body: Expr) -> Expr:
    # Keeps the coefficient attached to the body (not folded into rfac) so
    # shared sub-terms like -2*u[t0,...] survive for CSE across axes.
    if coeff == 1:
        return Product((rfac, body))
    if coeff == -1:
        return Product((rfac, Neg(body)))
    return Product((rfac, Product((Const(coeff), body))))


def _offset_order(coeffs: list[Fraction]) -> list[tuple[int, Fraction]]:
    # Center first, then outward with the negative side leading; mirrors
    # the generated-code ordering this package's goldens pin down.
    r = (len(coeffs) - 1) // 2
    order = [0] + [s * k for k in range(1, r + 1) for s in (-1, +1)]
    return [(k, coeffs[k + r]) for k in order if coeffs[k + r] != 0]


def _space_order_of(e: Expr) -> int:
    orders = {a.spec.space_order for a in accesses(e)}
    if not orders:
        raise SymbolicsError("derivative of an expression with no field access")
    if len(orders) > 1:
        raise SymbolicsError(f"mixed space orders {sorted(orders)} under one derivative")
    return orders.pop()


def _expand_deriv(d: Deriv) -> Expr:
    arg = discretize_expr(d.arg)
    if d.axis == TIME_AXIS:
        if not isinstance(arg, FieldAccess) or arg.tshift != 0:
            raise SymbolicsError("time derivative applies to a current-time access")
        if arg.spec.time_order < d.order:
            raise SymbolicsError(
                f"{arg.spec.name}: time derivative order {d.order} needs "
                f"time_order >= {d.order}")
        if d.order == 1:
            r = Recip(DT)
            return Sum((_term(Fraction(1), r, FieldAccess(arg.spec, +1, arg.offsets)),
                        _term(Fraction(-1), r, arg)))
        if d.order == 2:
            r = Recip(Product((DT, DT)))
            return Sum((_term(Fraction(1), r, FieldAccess(arg.spec, +1, arg.offsets)),
                        _term(Fraction(-2), r, arg),
                        _term(Fraction(1), r, FieldAccess(arg.spec, -1, arg.offsets))))
        raise UnsupportedDerivative(f"time derivative order {d.order}")

    sdo = _space_order_of(arg)
    coeffs = fd_coefficients(d.order, sdo)
    h = _spacing_symbol(d.axis)
    rfac = Recip(h) if d.order == 1 else Recip(Product((h, h)))
    terms = [_term(c, rfac, shift(arg, d.axis, k)) for k, c in _offset_order(coeffs)]
    return Sum(tuple(terms)) if len(terms) > 1 else terms[0]


def discretize_expr(e: Expr) -> Expr:
    """Replace every derivative placeholder with weighted field accesses."""

    def lower(n: Expr) -> Expr:
        if isinstance(n, Deriv):
            return _expand_deriv(n)
        return n

    # transform() is bottom-up, so nested derivatives expand innermost-first
    # and the outer expansion shifts the already-lowered inner stencil.
    return transform(e, lower)


def _check_halo(e: Expr, grid: GridSpec) -> None:
    for acc in accesses(e):
        for axis, (off, h) in enumerate(zip(acc.offsets, acc.spec.halo)):
            if abs(off) > h:
                raise StencilExceedsHalo(
                    f"field {acc.spec.name}, axis {AXIS_NAMES[axis]}: stencil "
                    f"radius {abs(off)} exceeds halo {h}")


def discretize(eq: Eq, grid: GridSpec) -> Eq:
    """Discretize both sides of an equation on ``grid``."""
    lhs = discretize_expr(eq.lhs)
    rhs = discretize_expr(eq.rhs)
    _check_halo(lhs, grid)
    _check_halo(rhs, grid)
    return Eq(lhs, rhs)


# ---------------------------------------------------------------------------
# Solving for the forward update


def _addends(e: Expr) -> list[Expr]:
    if isinstance(e, Sum):
        out = []
        for t in e.terms:
            out.extend(_addends(t))
        return out
    if isinstance(e, Neg):
        return [neg(a) for a in _addends(e.arg)]
    return [e]


def _contains(e: Expr, target: FieldAccess) -> bool:
    return any(n == target for n in walk(e))


def _distribute_on(e: Expr, target: FieldAccess) -> list[Expr]:
    """Split ``e`` into addends, distributing products only along the path
    that contains ``target`` so unrelated sub-structure is preserved."""
    out: list[Expr] = []
    for a in _addends(e):
        if not _contains(a, target) or isinstance(a, FieldAccess):
            out.append(a)
            continue
        if isinstance(a, Product):
            idx = next(i for i, f in enumerate(a.factors) if _contains(f, target))
            f = a.factors[idx]
            if isinstance(f, FieldAccess):
                out.append(a)
                continue
            for piece in _distribute_on(f, target):
                out.append(mul(*a.factors[:idx], piece, *a.factors[idx + 1:]))
            continue
        if isinstance(a, Recip):
            raise NotAffineError("unknown appears under a reciprocal")
        raise NotAffineError(f"cannot isolate unknown inside {type(a).__name__}")
    return out


def solve_forward(equation, unknown: FieldAccess, grid: GridSpec = None) -> StencilEquation:
    """Rearrange an affine equation into ``unknown = rhs``.

    Accepts a symbolic or discretized :class:`Eq` (or a bare expression,
    read as ``expr == 0``); derivatives are discretized first.
    """
    if isinstance(equation, StencilEquation):
        if equation.lhs == unknown:
            return equation
        equation = Eq(equation.lhs, equation.rhs)
    if isinstance(equation, Expr):
        equation = Eq(equation)
    if grid is None:
        grid = unknown.spec.grid
    eq = discretize(equation, grid)

    residual = add(eq.lhs, neg(eq.rhs))
    coeff_terms: list[Expr] = []
    rest: list[Expr] = []
    for a in _distribute_on(residual, unknown):
        if not _contains(a, unknown):
            rest.append(a)
            continue
        if a == unknown:
            coeff_terms.append(Const(Fraction(1)))
        elif isinstance(a, Neg) and a.arg == unknown:
            coeff_terms.append(Const(Fraction(-1)))
        elif isinstance(a, Product):
            hits = [i for i, f in enumerate(a.factors) if f == unknown]
            if len(hits) != 1 or any(
                    _contains(f, unknown) for i, f in enumerate(a.factors) if i != hits[0]):
                raise NotAffineError("equation is nonlinear in the unknown")
            i = hits[0]
            coeff_terms.append(mul(*a.factors[:i], *a.factors[i + 1:]))
        else:
            raise NotAffineError("equation is nonlinear in the unknown")

    if not coeff_terms:
        raise NotAffineError("unknown has zero coefficient")
    coeff = add(*coeff_terms)
    if isinstance(coeff, Const) and coeff.value == 0:
        raise NotAffineError("unknown has zero coefficient")

    moved = add(*(neg(a) for a in rest))
    rhs = moved if (isinstance(coeff, Const) and coeff.value == 1) else mul(recip(coeff), moved)
    return StencilEquation(lhs=unknown, rhs=rhs)


# ---------------------------------------------------------------------------
# Common-subexpression extraction


def _count_compound(exprs: Iterable[Expr]) -> dict[Expr, int]:
    counts: dict[Expr, int] = {}
    for e in exprs:
        for n in walk(e):
            if isinstance(n, (Sum, Product, Neg, Recip)):
                counts[n] = counts.get(n, 0) + 1
    return counts


def apply_cse(eq: StencilEquation) -> StencilEquation:
    """Extract every compound subexpression occurring at least twice.

    Evaluating the temporaries then the rhs performs exactly the same
    scalar operation tree as the input, so results are bit-identical.
    """
    counts = _count_compound(eq.exprs())
    existing = len(eq.temporaries)
    new_temps: list[tuple[str, Expr]] = []
    replaced: dict[Expr, Symbol] = {}

    def rewrite(n: Expr) -> Expr:
        ch = children(n)
        if ch:
            new = tuple(rewrite(c) for c in ch)
            out = rebuild(n, new) if new != ch else n
        else:
            out = n
        if counts.get(n, 0) >= 2:
            if n not in replaced:
                name = f"r{existing + len(new_temps)}"
                new_temps.append((name, out))
                replaced[n] = Symbol(name)
            return replaced[n]
        return out

    temps = [(name, rewrite(expr)) for name, expr in eq.temporaries]
    rhs = rewrite(eq.rhs)
    if not new_temps:
        return eq
    return StencilEquation(eq.lhs, rhs, tuple(temps) + tuple(new_temps))


# ---------------------------------------------------------------------------
# Exact evaluation (testing and symbolic verification support)


def eval_exact(e: Expr, bindings: Mapping[Expr, Fraction]) -> Fraction:
    """Evaluate over exact rationals; every symbol/access must be bound."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, (Symbol, FieldAccess)):
        try:
            return Fraction(bindings[e])
        except KeyError:
            raise SymbolicsError(f"unbound leaf {e}") from None
    if isinstance(e, Sum):
        total = Fraction(0)
        for t in e.terms:
            total += eval_exact(t, bindings)
        return total
    if isinstance(e, Product):
        total = Fraction(1)
        for f in e.factors:
            total *= eval_exact(f, bindings)
        return total
    if isinstance(e, Neg):
        return -eval_exact(e.arg, bindings)
    if isinstance(e, Recip):
        return 1 / eval_exact(e.arg, bindings)
    raise SymbolicsError(f"cannot evaluate {type(e).__name__}")


def substitute(e: Expr, mapping: Mapping[Expr, Expr]) -> Expr:
    """Replace leaves (symbols/accesses) according to ``mapping``."""

    def sub(n: Expr) -> Expr:
        return mapping.get(n, n)

    return transform(e, sub)


# ---------------------------------------------------------------------------
# Pretty-printing (shared by plan dumps and goldens)


def _time_label(acc: FieldAccess) -> str:
    if acc.spec.is_static:
        return ""
    return {0: "t0", 1: "t1", -1: "t2"}.get(acc.tshift, f"t{acc.tshift:+d}")


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        v = float(e.value)
        return f"{v:g}" if v != int(v) else f"{v:.1f}"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, FieldAccess):
        idx = []
        t = _time_label(e)
        if t:
            idx.append(t)
        for axis, off in enumerate(e.offsets):
            name = AXIS_NAMES[axis]
            if off == 0:
                idx.append(name)
            elif off > 0:
                idx.append(f"{name} + {off}")
            else:
                idx.append(f"{name} - {-off}")
        return f"{e.name}[{', '.join(idx)}]"
    if isinstance(e, Sum):
        parts = [format_expr(t) for t in e.terms]
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out
    if isinstance(e, Product):
        return "*".join(_paren(f) for f in e.factors)
    if isinstance(e, Neg):
        return f"-{_paren(e.arg)}"
    if isinstance(e, Recip):
        return f"1/{_paren(e.arg)}"
    if isinstance(e, Deriv):
        ax = "t" if e.axis == TIME_AXIS else AXIS_NAMES[e.axis]
        return f"d{'' if e.order == 1 else e.order}/d{ax}({format_expr(e.arg)})"
    return repr(e)


def _paren(e: Expr) -> str:
    s = format_expr(e)
    if isinstance(e, (Sum, Neg)) or (isinstance(e, Const) and e.value < 0):
        return f"({s})"
    return s


def format_equation(eq: StencilEquation) -> list[str]:
    lines = [f"{name} = {format_expr(expr)}" for name, expr in eq.temporaries]
    lines.append(f"{format_expr(eq.lhs)} = {format_expr(eq.rhs)}")
    return lines
