"""Expression trees for meromorphic functions of one complex variable.

Everything downstream (Weierstrass data, Riccati solutions, Gauss maps)
is built from these trees, because the geometric identities need exact
symbolic derivatives, not finite differences of black-box callables.

Grammar accepted by :func:`parse_expr` (EBNF):

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = "-" , unary | power ;
    power    = atom , [ "^" , exponent ] ;
    exponent = [ "-" ] , NUMBER
             | "(" , [ "-" ] , NUMBER , ")" ;
    atom     = NUMBER | "i" | "z" | "(" , expr , ")"
             | ( "exp" | "log" ) , "(" , expr , ")" ;

NUMBER is a decimal literal with optional e-exponent and optional
trailing "i" marking an imaginary value: ``2``, ``0.5``, ``1e-3``,
``2.5i``.  Complex constants are written additively, e.g. ``1+2i``.
Exponents must be numeric literals; ``z^z`` is rejected.  ``log`` is
the principal branch.  ``str()`` of any tree re-parses to an equivalent
tree, which is how expressions are serialized in config files.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "MeroExpr", "Const", "Var", "Add", "Sub", "Mul", "Div", "Pow",
    "Exp", "Log", "Neg", "Z",
    "PoleSignal", "ExprSyntaxError", "QuadratureError", "OrderError", "PathError",
    "parse_expr", "eval_expr", "diff_expr", "compiled", "local_order",
    "LineSeg", "ArcSeg", "PathSpec", "LoopSpec",
    "integrate_path", "loop_integral", "path_from_points", "avoiding_path",
    "locate_zeros_poles",
]

# Scale-aware pole detection: |denominator| < POLE_EPS * (1 + |numerator|).
POLE_EPS = 1e-13


class PoleSignal(ArithmeticError):
    """Evaluation hit a pole (or an overflow that makes the point unusable)."""

    def __init__(self, where, detail="pole"):
        super().__init__(f"{detail} at z = {where!r}")
        self.where = where
        self.detail = detail


class ExprSyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class OrderError(ArithmeticError):
    """Winding number did not settle to an integer (branch point or bad radius)."""


class PathError(ValueError):
    """Integration path is discontinuous or violates a puncture clearance."""


def _as_expr(x):
    if isinstance(x, MeroExpr):
        return x
    if isinstance(x, (int, float, complex)):
        return Const(complex(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to MeroExpr")


class MeroExpr:
    """Base node.  Immutable; all operators build new (lightly folded) trees."""

    __slots__ = ()
    prec = 4

    # -- construction with constant folding ------------------------------

    def __add__(self, other):
        other = _as_expr(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value + other.value)
        if isinstance(other, Const) and other.value == 0:
            return self
        if isinstance(self, Const) and self.value == 0:
            return other
        return Add(self, other)

    def __radd__(self, other):
        return _as_expr(other) + self

    def __sub__(self, other):
        other = _as_expr(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value - other.value)
        if isinstance(other, Const) and other.value == 0:
            return self
        if isinstance(self, Const) and self.value == 0:
            return -other
        return Sub(self, other)

    def __rsub__(self, other):
        return _as_expr(other) - self

    def __mul__(self, other):
        other = _as_expr(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value * other.value)
        for a, b in ((self, other), (other, self)):
            if isinstance(a, Const):
                if a.value == 0:
                    return Const(0.0)
                if a.value == 1:
                    return b
                if a.value == -1:
                    return -b
        return Mul(self, other)

    def __rmul__(self, other):
        return _as_expr(other) * self

    def __truediv__(self, other):
        other = _as_expr(other)
        if isinstance(other, Const) and other.value == 1:
            return self
        if isinstance(self, Const) and self.value == 0:
            return Const(0.0)
        return Div(self, other)

    def __rtruediv__(self, other):
        return _as_expr(other) / self

    def __pow__(self, expo):
        if isinstance(expo, Const):
            if expo.value.imag != 0:
                raise ValueError("exponent must be a real number")
            expo = expo.value.real
        if not isinstance(expo, (int, float)):
            raise TypeError("exponent must be an integer or real literal")
        if float(expo).is_integer():
            expo = int(expo)
        if expo == 0:
            return Const(1.0)
        if expo == 1:
            return self
        if isinstance(self, Const) and isinstance(expo, int):
            return Const(self.value ** expo)
        return Pow(self, expo)

    def __neg__(self):
        if isinstance(self, Const):
            return Const(-self.value)
        if isinstance(self, Neg):
            return self.arg
        return Neg(self)

    def __pos__(self):
        return self

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        return self._ev(complex(z))

    def eval(self, z):
        return self._ev(complex(z))

    def _ev(self, z):
        raise NotImplementedError

    def is_finite_at(self, z):
        """True when evaluation succeeds (no pole) at z."""
        try:
            self._ev(complex(z))
            return True
        except PoleSignal:
            return False

    # -- calculus ---------------------------------------------------------

    def diff(self):
        raise NotImplementedError

    def substitute(self, replacement):
        """Replace the variable by another expression (composition)."""
        raise NotImplementedError

    # -- structure --------------------------------------------------------

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, MeroExpr) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _fmt(self, parent_prec):
        s = self._text()
        return f"({s})" if self.prec < parent_prec else s

    def _text(self):
        raise NotImplementedError

    def _pysrc(self):
        raise NotImplementedError

    def __str__(self):
        return self._text()

    def __repr__(self):
        return f"<MeroExpr {self._text()}>"


def _fmt_number(x):
    if isinstance(x, int):
        return str(x)
    return repr(x)


def _fmt_complex(v):
    re, im = v.real, v.imag
    if im == 0:
        return repr(re) if re >= 0 else f"({re!r})"
    if re == 0:
        return f"{im!r}i" if im >= 0 else f"({im!r}i)"
    sign = "+" if im >= 0 else "-"
    return f"({re!r}{sign}{abs(im)!r}i)"


class Const(MeroExpr):
    __slots__ = ("value",)
    prec = 4

    def __init__(self, value):
        object.__setattr__(self, "value", complex(value))

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _ev(self, z):
        return self.value

    def diff(self):
        return Const(0.0)

    def substitute(self, replacement):
        return self

    def _key(self):
        return ("const", self.value)

    def _text(self):
        return _fmt_complex(self.value)

    def _pysrc(self):
        return repr(self.value)


class Var(MeroExpr):
    __slots__ = ()
    prec = 4

    def _ev(self, z):
        return z

    def diff(self):
        return Const(1.0)

    def substitute(self, replacement):
        return replacement

    def _key(self):
        return ("var",)

    def _text(self):
        return "z"

    def _pysrc(self):
        return "z"


Z = Var()


class _Binary(MeroExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        object.__setattr__(self, "a", _as_expr(a))
        object.__setattr__(self, "b", _as_expr(b))

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _key(self):
        return (type(self).__name__, self.a._key(), self.b._key())


class Add(_Binary):
    __slots__ = ()
    prec = 1

    def _ev(self, z):
        return self.a._ev(z) + self.b._ev(z)

    def diff(self):
        return self.a.diff() + self.b.diff()

    def substitute(self, r):
        return self.a.substitute(r) + self.b.substitute(r)

    def _text(self):
        return f"{self.a._fmt(1)}+{self.b._fmt(2)}"

    def _pysrc(self):
        return f"({self.a._pysrc()}+{self.b._pysrc()})"


class Sub(_Binary):
    __slots__ = ()
    prec = 1

    def _ev(self, z):
        return self.a._ev(z) - self.b._ev(z)

    def diff(self):
        return self.a.diff() - self.b.diff()

    def substitute(self, r):
        return self.a.substitute(r) - self.b.substitute(r)

    def _text(self):
        return f"{self.a._fmt(1)}-{self.b._fmt(2)}"

    def _pysrc(self):
        return f"({self.a._pysrc()}-{self.b._pysrc()})"


class Mul(_Binary):
    __slots__ = ()
    prec = 2

    def _ev(self, z):
        return self.a._ev(z) * self.b._ev(z)

    def diff(self):
        return self.a.diff() * self.b + self.a * self.b.diff()

    def substitute(self, r):
        return self.a.substitute(r) * self.b.substitute(r)

    def _text(self):
        return f"{self.a._fmt(2)}*{self.b._fmt(3)}"

    def _pysrc(self):
        return f"({self.a._pysrc()}*{self.b._pysrc()})"


class Div(_Binary):
    __slots__ = ()
    prec = 2

    def _ev(self, z):
        num = self.a._ev(z)
        den = self.b._ev(z)
        if abs(den) < POLE_EPS * (1.0 + abs(num)):
            raise PoleSignal(z)
        return num / den

    def diff(self):
        return (self.a.diff() * self.b - self.a * self.b.diff()) / (self.b * self.b)

    def substitute(self, r):
        return self.a.substitute(r) / self.b.substitute(r)

    def _text(self):
        return f"{self.a._fmt(2)}/{self.b._fmt(3)}"

    def _pysrc(self):
        return f"({self.a._pysrc()}/{self.b._pysrc()})"


class Pow(MeroExpr):
    """Power with a numeric exponent.

    Integer exponents are exact (negative allowed, pole-guarded); a
    non-integer real exponent means the principal branch exp(a*log(.)).
    """

    __slots__ = ("base", "expo")
    prec = 3

    def __init__(self, base, expo):
        object.__setattr__(self, "base", _as_expr(base))
        if isinstance(expo, float) and expo.is_integer():
            expo = int(expo)
        object.__setattr__(self, "expo", expo)

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _ev(self, z):
        b = self.base._ev(z)
        n = self.expo
        if isinstance(n, int):
            try:
                if n >= 0:
                    return b ** n
                den = b ** (-n)
            except OverflowError:
                raise PoleSignal(z, "overflow in power") from None
            if abs(den) < 2.0 * POLE_EPS:
                raise PoleSignal(z)
            return 1.0 / den
        if b == 0:
            if n > 0:
                return 0j
            raise PoleSignal(z)
        try:
            return cmath.exp(n * cmath.log(b))
        except OverflowError:
            raise PoleSignal(z, "overflow in power") from None

    def diff(self):
        n = self.expo
        return Const(n) * self.base ** (n - 1) * self.base.diff()

    def substitute(self, r):
        return self.base.substitute(r) ** self.expo

    def _key(self):
        return ("pow", self.base._key(), float(self.expo))

    def _text(self):
        e = self.expo
        etxt = _fmt_number(e) if (isinstance(e, int) and e >= 0) or (
            isinstance(e, float) and e >= 0) else f"({_fmt_number(e)})"
        return f"{self.base._fmt(4)}^{etxt}"

    def _pysrc(self):
        return f"({self.base._pysrc()})**({self.expo!r})"


class Exp(MeroExpr):
    __slots__ = ("arg",)
    prec = 4

    def __init__(self, arg):
        object.__setattr__(self, "arg", _as_expr(arg))

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _ev(self, z):
        try:
            return cmath.exp(self.arg._ev(z))
        except OverflowError:
            raise PoleSignal(z, "overflow in exp") from None

    def diff(self):
        return self * self.arg.diff()

    def substitute(self, r):
        return Exp(self.arg.substitute(r))

    def _key(self):
        return ("exp", self.arg._key())

    def _text(self):
        return f"exp({self.arg})"

    def _pysrc(self):
        return f"_exp({self.arg._pysrc()})"


class Log(MeroExpr):
    """Principal-branch logarithm; log at 0 signals a pole."""

    __slots__ = ("arg",)
    prec = 4

    def __init__(self, arg):
        object.__setattr__(self, "arg", _as_expr(arg))

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _ev(self, z):
        v = self.arg._ev(z)
        if abs(v) < 1e-280:
            raise PoleSignal(z, "log of zero")
        return cmath.log(v)

    def diff(self):
        return self.arg.diff() / self.arg

    def substitute(self, r):
        return Log(self.arg.substitute(r))

    def _key(self):
        return ("log", self.arg._key())

    def _text(self):
        return f"log({self.arg})"

    def _pysrc(self):
        return f"_log({self.arg._pysrc()})"


class Neg(MeroExpr):
    __slots__ = ("arg",)
    prec = 1.9

    def __init__(self, arg):
        object.__setattr__(self, "arg", _as_expr(arg))

    def __setattr__(self, *a):
        raise AttributeError("MeroExpr nodes are immutable")

    def _ev(self, z):
        return -self.arg._ev(z)

    def diff(self):
        return -self.arg.diff()

    def substitute(self, r):
        return -self.arg.substitute(r)

    def _key(self):
        return ("neg", self.arg._key())

    def _text(self):
        return f"-{self.arg._fmt(2)}"

    def _pysrc(self):
        return f"(-{self.arg._pysrc()})"


# ---------------------------------------------------------------------------
# Parsing


_WHITESPACE = " \t\r\n"
_DIGITS = "0123456789"


def _tokenize(text):
    """Return a list of (kind, value, position) with kind in
    {'num', 'name', 'op'}; numbers carry (value: float, is_int, is_imag)."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in _WHITESPACE:
            i += 1
            continue
        if c in "+-*/^()":
            tokens.append(("op", c, i))
            i += 1
            continue
        if c in _DIGITS or (c == "." and i + 1 < n and text[i + 1] in _DIGITS):
            start = i
            seen_dot = False
            while i < n and (text[i] in _DIGITS or (text[i] == "." and not seen_dot)):
                seen_dot = seen_dot or text[i] == "."
                i += 1
            has_exp = False
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j] in _DIGITS:
                    has_exp = True
                    i = j
                    while i < n and text[i] in _DIGITS:
                        i += 1
            literal = text[start:i]
            is_imag = False
            if i < n and text[i] == "i" and (i + 1 >= n or not text[i + 1].isalnum()):
                is_imag = True
                i += 1
            is_int = not seen_dot and not has_exp
            tokens.append(("num", (float(literal), is_int, is_imag), start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(("name", text[start:i], start))
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos]

    def _advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect_op(self, op):
        kind, val, pos = self._peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        return self._advance()

    def parse(self):
        e = self._expr()
        kind, _, pos = self._peek()
        if kind != "end":
            raise ExprSyntaxError("unexpected trailing input", pos)
        return e

    def _expr(self):
        e = self._term()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "+-":
                self._advance()
                rhs = self._term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def _term(self):
        e = self._unary()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "*/":
                self._advance()
                rhs = self._unary()
                e = e * rhs if val == "*" else e / rhs
            else:
                return e

    def _unary(self):
        kind, val, _ = self._peek()
        if kind == "op" and val == "-":
            self._advance()
            return -self._unary()
        return self._power()

    def _power(self):
        base = self._atom()
        kind, val, _ = self._peek()
        if kind == "op" and val == "^":
            self._advance()
            expo = self._exponent()
            return base ** expo
        return base

    def _exponent(self):
        kind, val, pos = self._peek()
        if kind == "op" and val == "(":
            self._advance()
            e = self._exponent_number()
            self._expect_op(")")
            return e
        return self._exponent_number()

    def _exponent_number(self):
        sign = 1.0
        kind, val, pos = self._peek()
        if kind == "op" and val == "-":
            self._advance()
            sign = -1.0
            kind, val, pos = self._peek()
        if kind != "num":
            raise ExprSyntaxError("exponent must be an integer or real literal", pos)
        value, is_int, is_imag = val
        if is_imag:
            raise ExprSyntaxError("exponent must be an integer or real literal", pos)
        self._advance()
        return int(sign * value) if is_int else sign * value

    def _atom(self):
        kind, val, pos = self._advance()
        if kind == "num":
            value, _, is_imag = val
            return Const(value * 1j) if is_imag else Const(value)
        if kind == "name":
            if val == "z":
                return Z
            if val == "i":
                return Const(1j)
            if val in ("exp", "log"):
                self._expect_op("(")
                arg = self._expr()
                self._expect_op(")")
                return Exp(arg) if val == "exp" else Log(arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            e = self._expr()
            self._expect_op(")")
            return e
        raise ExprSyntaxError("expected a value", pos)


def parse_expr(text):
    """Parse a grammar string into a MeroExpr tree."""
    return _Parser(text).parse()


def eval_expr(e, z):
    """Value of e at z; raises PoleSignal at (numerically detected) poles."""
    return e._ev(complex(z))


def diff_expr(e):
    """Exact symbolic derivative de/dz."""
    return e.diff()


@lru_cache(maxsize=1024)
def _compiled_raw(e):
    return eval(f"lambda z: {e._pysrc()}",
                {"_exp": cmath.exp, "_log": cmath.log})


def compiled(e):
    """Fast evaluation callable for e.

    Uses plain complex arithmetic (no scale-aware pole thresholds, unlike
    eval_expr); exact division by zero, log(0) and overflow surface as
    PoleSignal.  This is what quadrature and ODE right-hand sides call.
    """
    fn = _compiled_raw(e)

    def call(z, _fn=fn):
        try:
            return _fn(z)
        except (ZeroDivisionError, OverflowError, ValueError):
            raise PoleSignal(z) from None

    return call


# ---------------------------------------------------------------------------
# Paths and quadrature

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)
_GL_X = [float(x) for x in _GL_X]
_GL_W = [float(w) for w in _GL_W]


class LineSeg:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = complex(a)
        self.b = complex(b)

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return self.b

    def point(self, t):
        return self.a + t * (self.b - self.a)

    def velocity(self, t):
        return self.b - self.a

    def length(self):
        return abs(self.b - self.a)

    def min_distance(self, p):
        d = self.b - self.a
        L2 = (d * d.conjugate()).real
        if L2 == 0.0:
            return abs(p - self.a)
        t = ((p - self.a) * d.conjugate()).real / L2
        t = min(1.0, max(0.0, t))
        return abs(p - self.point(t))

    def reversed(self):
        return LineSeg(self.b, self.a)

    def __repr__(self):
        return f"LineSeg({self.a!r}, {self.b!r})"


class ArcSeg:
    """Circular arc from angle t0 to t1 (radians); sign of t1-t0 orients it."""

    __slots__ = ("center", "radius", "t0", "t1")

    def __init__(self, center, radius, t0, t1):
        if radius <= 0:
            raise ValueError("arc radius must be positive")
        self.center = complex(center)
        self.radius = float(radius)
        self.t0 = float(t0)
        self.t1 = float(t1)

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    def _angle(self, t):
        return self.t0 + t * (self.t1 - self.t0)

    def point(self, t):
        return self.center + self.radius * cmath.exp(1j * self._angle(t))

    def velocity(self, t):
        return 1j * (self.t1 - self.t0) * self.radius * cmath.exp(1j * self._angle(t))

    def length(self):
        return abs(self.t1 - self.t0) * self.radius

    def min_distance(self, p):
        rel = p - self.center
        rho = abs(rel)
        if rho == 0.0:
            return self.radius
        sweep = self.t1 - self.t0
        if abs(sweep) >= 2 * math.pi - 1e-12:
            return abs(rho - self.radius)
        phi = cmath.phase(rel)
        psi = math.remainder(phi - self.t0, 2 * math.pi)
        if sweep > 0:
            t = psi / sweep if psi >= 0 else (psi + 2 * math.pi) / sweep
        else:
            t = psi / sweep if psi <= 0 else (psi - 2 * math.pi) / sweep
        if 0.0 <= t <= 1.0:
            return abs(rho - self.radius)
        return min(abs(p - self.start), abs(p - self.end))

    def reversed(self):
        return ArcSeg(self.center, self.radius, self.t1, self.t0)

    def __repr__(self):
        return f"ArcSeg({self.center!r}, {self.radius!r}, {self.t0!r}, {self.t1!r})"


class PathSpec:
    """Chain of line segments and arcs; consecutive endpoints must match.

    Optional punctures with an exclusion radius are enforced at
    construction time: the path must stay clear of all of them.
    """

    def __init__(self, segments, tolerance=1e-12, punctures=(), exclusion=0.0):
        segments = tuple(segments)
        if not segments:
            raise PathError("path needs at least one segment")
        scale = 1.0 + max(abs(s.start) + abs(s.end) for s in segments)
        for prev, nxt in zip(segments, segments[1:]):
            if abs(prev.end - nxt.start) > 1e-9 * scale:
                raise PathError(
                    f"segments do not chain: {prev.end!r} -> {nxt.start!r}")
        self.segments = segments
        self.tolerance = float(tolerance)
        self.punctures = tuple(complex(p) for p in punctures)
        self.exclusion = float(exclusion)
        if self.exclusion > 0.0:
            for p in self.punctures:
                d = self.min_distance(p)
                if d < self.exclusion * (1 - 1e-9):
                    raise PathError(
                        f"path passes within {d:.3g} of puncture {p!r} "
                        f"(exclusion radius {self.exclusion:.3g})")

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    def min_distance(self, p):
        return min(s.min_distance(p) for s in self.segments)

    def length(self):
        return sum(s.length() for s in self.segments)

    def reversed(self):
        return PathSpec(
            [s.reversed() for s in reversed(self.segments)],
            tolerance=self.tolerance, punctures=self.punctures,
            exclusion=self.exclusion)

    def __add__(self, other):
        return PathSpec(self.segments + other.segments,
                        tolerance=min(self.tolerance, other.tolerance))

    def __repr__(self):
        return f"PathSpec({list(self.segments)!r})"


def path_from_points(points, tolerance=1e-12, punctures=(), exclusion=0.0):
    """Polyline path through the given complex waypoints."""
    pts = [complex(p) for p in points]
    if len(pts) < 2:
        raise PathError("need at least two waypoints")
    segs = [LineSeg(a, b) for a, b in zip(pts, pts[1:])]
    return PathSpec(segs, tolerance=tolerance, punctures=punctures,
                    exclusion=exclusion)


def avoiding_path(z_from, z_to, punctures=(), exclusion=0.05, tolerance=1e-12):
    """Deterministic path from z_from to z_to clearing all punctures.

    Candidates, in order: the straight segment, then a radial move plus a
    circular arc in log-polar coordinates around each puncture (sorted by
    distance to z_to, both sweep directions).  The first candidate whose
    distance to every puncture exceeds the exclusion radius wins.
    """
    z0, z1 = complex(z_from), complex(z_to)
    punctures = tuple(complex(p) for p in punctures)
    if abs(z1 - z0) < 1e-15:
        raise PathError("degenerate path: endpoints coincide")

    candidates = [[LineSeg(z0, z1)]]
    for c in sorted(punctures, key=lambda p: abs(p - z1)):
        r0, r1 = abs(z0 - c), abs(z1 - c)
        if r0 < 1e-12 or r1 < 1e-12:
            continue
        th0 = cmath.phase(z0 - c)
        th1 = cmath.phase(z1 - c)
        sweep = math.remainder(th1 - th0, 2 * math.pi)
        for dth in (sweep, sweep - math.copysign(2 * math.pi, sweep or 1.0)):
            segs = []
            knee = c + r1 * cmath.exp(1j * th0)
            if abs(knee - z0) > 1e-14:
                segs.append(LineSeg(z0, knee))
            if abs(dth) > 1e-14:
                segs.append(ArcSeg(c, r1, th0, th0 + dth))
            if segs:
                candidates.append(segs)

    for segs in candidates:
        try:
            return PathSpec(segs, tolerance=tolerance, punctures=punctures,
                            exclusion=exclusion)
        except PathError:
            continue
    raise PathError(f"no puncture-avoiding path from {z0!r} to {z1!r}")


class LoopSpec:
    """Positively or negatively oriented circle."""

    def __init__(self, center, radius, orientation=1):
        if radius <= 0:
            raise ValueError("loop radius must be positive")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.center = complex(center)
        self.radius = float(radius)
        self.orientation = int(orientation)

    def to_path(self, tolerance=1e-12, start_angle=0.0):
        quarters = []
        step = self.orientation * math.pi / 2
        for j in range(4):
            quarters.append(ArcSeg(self.center, self.radius,
                                   start_angle + j * step,
                                   start_angle + (j + 1) * step))
        return PathSpec(quarters, tolerance=tolerance)

    def __repr__(self):
        return f"LoopSpec({self.center!r}, {self.radius!r}, {self.orientation})"


def _gl15(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    acc = 0j
    for x, w in zip(_GL_X, _GL_W):
        acc += w * f(mid + half * x)
    return acc * half


def _adaptive(f, a, b, tol, depth):
    whole = _gl15(f, a, b)
    mid = 0.5 * (a + b)
    fine = _gl15(f, a, mid) + _gl15(f, mid, b)
    err = abs(fine - whole)
    # The relative floor keeps panels near strong poles from chasing an
    # absolute tolerance below their own evaluation noise.
    if err <= tol or err <= 4e-15 * (abs(fine) + abs(whole)) or (b - a) < 1e-14:
        return fine
    if depth <= 0:
        raise QuadratureError(
            f"tolerance not reached after max subdivisions on [{a}, {b}]")
    return (_adaptive(f, a, mid, 0.5 * tol, depth - 1)
            + _adaptive(f, mid, b, 0.5 * tol, depth - 1))


def integrate_path(e, path, tolerance=None):
    """Contour integral of e along the path, by adaptive Gauss-Legendre.

    e may be a MeroExpr or any callable z -> complex.
    """
    fn = compiled(e) if isinstance(e, MeroExpr) else e
    tol = path.tolerance if tolerance is None else float(tolerance)
    total = 0j
    per_seg = tol / len(path.segments)
    for seg in path.segments:
        def f(t, _seg=seg):
            return fn(_seg.point(t)) * _seg.velocity(t)
        total += _adaptive(f, 0.0, 1.0, per_seg, 40)
    return total


def loop_integral(e, loop, tolerance=1e-12):
    """Integral of e around the circle described by the loop."""
    return integrate_path(e, loop.to_path(tolerance=tolerance))


# ---------------------------------------------------------------------------
# Argument principle: local orders and zero/pole location


def _winding_on_path(e, ep, path, tol=1e-7):
    val = integrate_path(Div(ep, e), path, tolerance=tol)
    return val / (2j * math.pi)


def local_order(e, z0, radius=1e-2, max_halvings=24):
    """Order of e at z0: n > 0 for a zero of order n, n < 0 for a pole.

    Computed as the winding number (1/2*pi*i) of e'/e on small circles,
    the radius halved until two consecutive radii agree on the same
    integer.  A persistent non-integral winding (residual > 0.1) raises
    OrderError: branch point or badly chosen radius.
    """
    ep = e.diff()
    z0 = complex(z0)
    r = float(radius)
    prev = None
    last_residual = None
    for _ in range(max_halvings):
        try:
            w = _winding_on_path(e, ep, LoopSpec(z0, r).to_path(tolerance=1e-8))
        except (PoleSignal, QuadratureError):
            r *= 0.5
            prev = None
            continue
        n = round(w.real)
        residual = abs(w - n)
        last_residual = residual
        if residual > 0.1:
            r *= 0.5
            prev = None
            continue
        if prev is not None and prev == n:
            return n
        prev = n
        r *= 0.5
    raise OrderError(
        f"winding number near {z0!r} did not settle "
        f"(last residual {last_residual}); branch point or bad radius?")


def _newton_refine(e, z_init, max_iter=60):
    """Newton iteration on u = e/e' (simple zero at any zero/pole of e)."""
    ep = e.diff()
    u = compiled(Div(e, ep))
    up = compiled(Const(1.0) - Div(Mul(e, ep.diff()), Mul(ep, ep)))
    z = complex(z_init)
    for _ in range(max_iter):
        try:
            step = u(z) / up(z)
        except (PoleSignal, ZeroDivisionError):
            return None
        z -= step
        if not (abs(z.real) < 1e12 and abs(z.imag) < 1e12):
            return None
        if abs(step) < 1e-13 * (1.0 + abs(z)):
            return z
    return None


def _rect_path(cx, cy, half):
    corners = [complex(cx - half, cy - half), complex(cx + half, cy - half),
               complex(cx + half, cy + half), complex(cx - half, cy + half)]
    return PathSpec([LineSeg(corners[j], corners[(j + 1) % 4]) for j in range(4)])


def _rect_winding(e, ep, cx, cy, half):
    """Integer winding over a rectangle, inflating slightly when the
    boundary grazes a zero or pole.  Returns (n, used_half) or (None, half)."""
    scale = half
    for inflate in (1.0, 1.031, 1.073, 1.129):
        h = scale * inflate
        try:
            w = _winding_on_path(e, ep, _rect_path(cx, cy, h), tol=1e-6)
        except (PoleSignal, QuadratureError):
            continue
        n = round(w.real)
        if abs(w - n) < 0.05:
            return n, h
    return None, half


@lru_cache(maxsize=128)
def locate_zeros_poles(e, center=0j, half_width=4.0, min_half=0.03,
                       isolate_half=0.25):
    """Locate zeros and poles of e in the square of the given half-width.

    The region is tiled unconditionally into boxes of half-size
    isolate_half (so that a zero and a pole closer together than a box
    diagonal cannot mask each other through a zero winding number); each
    box with a nonzero argument-principle winding is then refined by
    subdivision down to min_half and finished with Newton iteration on
    e/e'.  Zeros and poles separated by less than ~2*isolate_half may be
    missed; the closed forms this package ships are well clear of that.
    Returns (zeros, poles) as lists of (location, order).
    """
    ep = e.diff()
    found = []

    def refine(cx, cy, half, depth):
        n, used = _rect_winding(e, ep, cx, cy, half)
        if n is None or n == 0:
            return
        if half <= min_half or depth >= 12:
            z = _newton_refine(e, complex(cx, cy))
            if z is None:
                return
            pad = used * 1.3
            if not (abs(z.real - cx) <= pad and abs(z.imag - cy) <= pad):
                return
            found.append(z)
            return
        q = half / 2
        for dx in (-q, q):
            for dy in (-q, q):
                refine(cx + dx, cy + dy, q, depth + 1)

    hw = float(half_width)
    per_side = max(1, math.ceil(hw / float(isolate_half)))
    side = 2.0 * hw / per_side
    for jx in range(per_side):
        for jy in range(per_side):
            cx = center.real - hw + (jx + 0.5) * side
            cy = center.imag - hw + (jy + 0.5) * side
            refine(cx, cy, side / 2 * 1.0001, 0)

    unique = []
    for z in found:
        if all(abs(z - u) > 1e-7 * (1 + abs(z)) for u in unique):
            unique.append(z)

    zeros, poles = [], []
    for z in unique:
        try:
            n = local_order(e, z, radius=min(min_half, 0.02))
        except OrderError:
            continue
        if n > 0:
            zeros.append((z, n))
        elif n < 0:
            poles.append((z, -n))

    key = lambda t: (abs(t[0]), cmath.phase(t[0]) if t[0] != 0 else 0.0)
    return sorted(zeros, key=key), sorted(poles, key=key)
