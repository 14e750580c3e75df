"""Exact p-adic scalars, truncated series, Newton polygons and root lifting.

Values are scaled residues: a unit digit string known modulo p^rel, an
integer valuation (negative allowed) and an absolute precision.  Arithmetic
never claims more absolute precision than the propagation rules allow, and
zeros below precision stay flagged with their valuation lower bound instead
of collapsing to the integer 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class PrecisionExhausted(ArithmeticError):
    """Division by (or decision on) a value that is zero to its precision.

    Carries the valuation lower bound of the offending value.
    """

    def __init__(self, msg, val_lower_bound=None):
        super().__init__(msg)
        self.val_lower_bound = val_lower_bound


class EscalatePrecision(ArithmeticError):
    """A decision needs more p-adic digits; carries the shortfall estimate."""

    def __init__(self, msg, extra_digits=None):
        super().__init__(msg)
        self.extra_digits = extra_digits


class NotInvertible(ArithmeticError):
    pass


class SlopeUndetermined(ArithmeticError):
    """Newton polygon ambiguous because of a below-precision coefficient."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class NotLiftableHere(ArithmeticError):
    """Root refinement refused (repeated residual root or fractional slope)."""


@dataclass(frozen=True)
class ValuationBound:
    """Sentinel for "valuation >= bound" (value is zero at its precision)."""

    bound: int

    def __repr__(self):
        return f">= {self.bound}"


def _vp(n, p):
    """Valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicNumber:
    """Scaled residue u * p^v with u a unit mod p^(absprec - v).

    Immutable.  ``unit == 0`` flags a value that is zero at its precision;
    its valuation is only known to be >= absprec.  ``absprec`` may be
    ``math.inf`` for exact values.
    """

    __slots__ = ("p", "unit", "val", "absprec")

    def __init__(self, p, unit, val, absprec):
        if p < 2:
            raise ValueError("prime must be >= 2")
        if unit == 0:
            val = absprec
        else:
            if absprec is not math.inf:
                rel = absprec - val
                if rel <= 0:
                    unit, val = 0, absprec
                else:
                    unit %= p ** rel
                    if unit == 0:
                        val = absprec
                    elif unit % p == 0:
                        # shift p-part of the representative into val
                        shift = _vp(unit, p)
                        val += shift
                        unit //= p ** shift
                        unit %= p ** (absprec - val)
                        if unit == 0:
                            unit, val = 0, absprec
            else:
                if unit % p == 0:
                    shift = _vp(unit, p)
                    val += shift
                    unit //= p ** shift
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "absprec", absprec)

    def __setattr__(self, *a):
        raise AttributeError("PadicNumber is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_int(cls, p, n, absprec=math.inf):
        if n == 0:
            return cls(p, 0, absprec, absprec)
        v = _vp(n, p)
        return cls(p, n // p ** v, v, absprec)

    @classmethod
    def from_rational(cls, p, value, absprec):
        """Exact rational reduced at finite absolute precision."""
        value = Fraction(value)
        if value == 0:
            return cls.zero(p, absprec)
        num, den = value.numerator, value.denominator
        v = (_vp(num, p) if num else 0) - _vp(den, p)
        num //= p ** max(_vp(num, p), 0)
        den //= p ** max(_vp(den, p), 0)
        rel = absprec - v
        if rel <= 0:
            return cls.zero(p, absprec)
        unit = num * pow(den, -1, p ** rel) % p ** rel
        return cls(p, unit, v, absprec)

    @classmethod
    def zero(cls, p, absprec=math.inf):
        return cls(p, 0, absprec, absprec)

    @classmethod
    def one(cls, p, absprec=math.inf):
        return cls(p, 1, 0, absprec)

    # -- predicates --------------------------------------------------------

    @property
    def is_zero_at_precision(self):
        return self.unit == 0

    def is_provably_nonzero(self, margin=0):
        """Nonzero with at least ``margin`` digits of headroom."""
        return self.unit != 0 and self.val <= self.absprec - 1 - margin

    @property
    def relprec(self):
        return self.absprec - self.val if self.unit else 0

    # -- valuation ---------------------------------------------------------

    def valuation(self):
        """Exact valuation, or a ValuationBound for below-precision zeros."""
        if self.unit == 0:
            return ValuationBound(self.absprec)
        return self.val

    # -- conversions -------------------------------------------------------

    def lift(self):
        """Smallest nonnegative integer representative times p^val.

        Only valid for val >= 0 (integral values); returns a plain int
        representative modulo p^absprec.
        """
        if self.unit == 0:
            return 0
        if self.val < 0:
            raise ValueError("no integer representative: negative valuation")
        return self.unit * self.p ** self.val

    def reduce(self, absprec):
        """Forget digits beyond ``absprec``."""
        if absprec >= self.absprec:
            return self
        return PadicNumber(self.p, self.unit, self.val, absprec)

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, PadicNumber):
            raise TypeError(f"expected PadicNumber, got {type(other)!r}")
        if other.p != self.p:
            raise ValueError("mixed primes")

    def __add__(self, other):
        self._check_same(other)
        p = self.p
        absprec = min(self.absprec, other.absprec)
        if self.unit == 0 and other.unit == 0:
            return PadicNumber(p, 0, absprec, absprec)
        if self.unit == 0:
            return other.reduce(absprec)
        if other.unit == 0:
            return self.reduce(absprec)
        v0 = min(self.val, other.val)
        if absprec is math.inf:
            scaled = self.unit * p ** (self.val - v0) + other.unit * p ** (other.val - v0)
            if scaled == 0:
                return PadicNumber.zero(p)
            return PadicNumber(p, scaled, v0, math.inf)
        rel = absprec - v0
        scaled = (self.unit * p ** (self.val - v0) + other.unit * p ** (other.val - v0)) % p ** rel
        return PadicNumber(p, scaled, v0, absprec)

    def __neg__(self):
        if self.unit == 0:
            return self
        if self.absprec is math.inf:
            return PadicNumber(self.p, -self.unit, self.val, math.inf)
        return PadicNumber(self.p, -self.unit % self.p ** self.relprec, self.val, self.absprec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_same(other)
        p = self.p
        if self.unit == 0 or other.unit == 0:
            # valuation lower bounds add; vb of a nonzero value is its val
            lb = (self.val if self.unit else self.absprec) + (
                other.val if other.unit else other.absprec
            )
            return PadicNumber(p, 0, lb, lb)
        v = self.val + other.val
        rel = min(self.relprec, other.relprec)
        if rel is math.inf:
            return PadicNumber(p, self.unit * other.unit, v, math.inf)
        unit = self.unit * other.unit % p ** rel
        return PadicNumber(p, unit, v, v + rel)

    def __truediv__(self, other):
        self._check_same(other)
        p = self.p
        if other.unit == 0:
            raise PrecisionExhausted(
                f"division by a value that is zero at absolute precision {other.absprec}",
                val_lower_bound=other.absprec,
            )
        if self.unit == 0:
            lb = self.absprec - other.val
            return PadicNumber(p, 0, lb, lb)
        v = self.val - other.val
        rel = min(self.relprec, other.relprec)
        if rel is math.inf:
            q = Fraction(self.unit, other.unit)
            if q.denominator == 1:
                return PadicNumber(p, q.numerator, v, math.inf)
            unit = q  # keep exact rational unit (p-unit numerator/denominator)
            raise NotImplementedError(
                "exact division with non-trivial denominator: reduce to finite precision first"
            )
        unit = self.unit * pow(other.unit, -1, p ** rel) % p ** rel
        return PadicNumber(p, unit, v, v + rel)

    def mul_int(self, n):
        """Multiply by an exact integer without losing absolute digits."""
        if n == 0:
            inf_like = math.inf if self.absprec is math.inf else self.absprec
            return PadicNumber(self.p, 0, inf_like, inf_like)
        v = _vp(n, self.p)
        u = n // self.p ** v
        if self.unit == 0:
            lb = self.absprec + v
            return PadicNumber(self.p, 0, lb, lb)
        if self.absprec is math.inf:
            return PadicNumber(self.p, self.unit * u, self.val + v, math.inf)
        rel = self.relprec
        return PadicNumber(self.p, self.unit * u % self.p ** rel, self.val + v, self.absprec + v)

    def __pow__(self, n):
        if n < 0:
            return PadicNumber.one(self.p) / self.__pow__(-n)
        out = PadicNumber.one(self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / rendering -------------------------------------------

    def congruent_to(self, other, absprec=None):
        """Equality modulo p^min(absprec) (or modulo p^absprec if given)."""
        self._check_same(other)
        a = min(self.absprec, other.absprec)
        if absprec is not None:
            if absprec > a:
                raise PrecisionExhausted(
                    f"cannot compare mod p^{absprec}: operands only known mod p^{a}"
                )
            a = absprec
        d = self - other
        return d.unit == 0 or d.val >= a

    def __eq__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (self.p, self.unit, self.val, self.absprec) == (
            other.p,
            other.unit,
            other.val,
            other.absprec,
        )

    def __hash__(self):
        return hash((self.p, self.unit, self.val, self.absprec))

    def digits(self, count=None):
        """Base-p digit expansion [(digit, exponent), ...], low to high."""
        if self.unit == 0:
            return []
        n = self.unit
        if count is None:
            count = self.relprec if self.relprec is not math.inf else 32
        out = []
        e = self.val
        for _ in range(count):
            n, d = divmod(n, self.p)
            if d:
                out.append((d, e))
            e += 1
            if n == 0:
                break
        return out

    def digit_string(self, count=None):
        parts = []
        for d, e in self.digits(count):
            if e == 0:
                parts.append(f"{d}")
            elif e == 1:
                parts.append(f"{d}*{self.p}" if d != 1 else f"{self.p}")
            else:
                parts.append(f"{d}*{self.p}^{e}" if d != 1 else f"{self.p}^{e}")
        if not parts:
            return f"O({self.p}^{self.absprec})"
        tail = "" if self.absprec is math.inf else f" + O({self.p}^{self.absprec})"
        return " + ".join(parts) + tail

    def __repr__(self):
        if self.unit == 0:
            return f"O({self.p}^{self.absprec})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.absprec})"

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "unit": str(self.unit),
            "val": None if self.unit == 0 else self.val,
            "absprec": None if self.absprec is math.inf else self.absprec,
        }

    @classmethod
    def from_json(cls, p, obj):
        absprec = math.inf if obj["absprec"] is None else obj["absprec"]
        unit = int(obj["unit"])
        if unit == 0:
            return cls(p, 0, absprec, absprec)
        return cls(p, unit, obj["val"], absprec)


def val(x):
    """Valuation of a PadicNumber, or a lower bound for a precision-zero."""
    return x.valuation()


class TruncatedSeries:
    """Polynomial truncation of a series in one variable over PadicNumber.

    Coefficients share the uniform absolute precision ``prec``; every stored
    coefficient has absprec >= prec.  Multiplication truncates at the smaller
    of the two operand degrees.
    """

    __slots__ = ("var", "p", "coeffs", "prec")

    def __init__(self, var, p, coeffs, prec):
        assert var in ("q", "t", "x")
        self.var = var
        self.p = p
        self.coeffs = tuple(coeffs)
        self.prec = prec
        for c in self.coeffs:
            assert c.p == p
            assert c.absprec >= prec

    @classmethod
    def from_ints(cls, var, p, ints, prec):
        return cls(var, p, [PadicNumber.from_int(p, c, prec) for c in ints], prec)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def truncate(self, degree):
        if degree >= self.degree:
            return self
        return TruncatedSeries(self.var, self.p, self.coeffs[: degree + 1], self.prec)

    def _check(self, other):
        if self.var != other.var or self.p != other.p:
            raise ValueError("incompatible series")

    def __add__(self, other):
        self._check(other)
        d = min(self.degree, other.degree)
        prec = min(self.prec, other.prec)
        return TruncatedSeries(
            self.var, self.p, [self.coeffs[i] + other.coeffs[i] for i in range(d + 1)], prec
        )

    def __sub__(self, other):
        self._check(other)
        d = min(self.degree, other.degree)
        prec = min(self.prec, other.prec)
        return TruncatedSeries(
            self.var, self.p, [self.coeffs[i] - other.coeffs[i] for i in range(d + 1)], prec
        )

    def __mul__(self, other):
        self._check(other)
        d = min(self.degree, other.degree)
        prec = min(self.prec, other.prec)
        out = []
        for k in range(d + 1):
            acc = PadicNumber.zero(self.p, math.inf)
            for i in range(k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return TruncatedSeries(self.var, self.p, out, prec)

    def scale(self, c):
        return TruncatedSeries(self.var, self.p, [x * c for x in self.coeffs], min(self.prec, min((x * c).absprec for x in self.coeffs) if self.coeffs else self.prec))

    def derivative(self, n=1):
        """Formal derivative; exact integer multipliers, degree drops by n."""
        coeffs = self.coeffs
        for _ in range(n):
            if len(coeffs) <= 1:
                coeffs = (PadicNumber.zero(self.p, self.prec),)
                continue
            coeffs = tuple(coeffs[i].mul_int(i) for i in range(1, len(coeffs)))
        return TruncatedSeries(self.var, self.p, coeffs, self.prec)

    def to_json(self):
        return {
            "var": self.var,
            "prec": self.prec,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, p, obj):
        return cls(
            obj["var"], p, [PadicNumber.from_json(p, c) for c in obj["coeffs"]], obj["prec"]
        )

    def __repr__(self):
        return f"TruncatedSeries({self.var}, deg={self.degree}, prec={self.prec})"


def series_inv(f):
    """Inverse of a series with unit constant term, to f's degree and prec."""
    p = f.p
    c0 = f.coeffs[0]
    if c0.unit == 0 or c0.val != 0:
        raise NotInvertible("constant term is not a p-adic unit")
    one = PadicNumber.one(p)
    b0 = one / c0
    out = [b0]
    for n in range(1, f.degree + 1):
        acc = PadicNumber.zero(p, math.inf)
        for k in range(1, n + 1):
            if k <= f.degree:
                acc = acc + f.coeffs[k] * out[n - k]
        out.append(-(b0 * acc))
    return TruncatedSeries(f.var, p, out, f.prec)


def rev_eval(B, a):
    """sum_i B_i * a^(D - i), i.e. a^D * B(1/a), without forming 1/a.

    ``a`` must have nonnegative valuation.  The result's absolute precision
    follows from the term bounds min_i(absprec_i + (D-i) val(a)) >= prec(B).
    """
    if isinstance(a, int):
        a = PadicNumber.from_int(B.p, a)
    if a.unit != 0 and a.val < 0:
        raise ValueError("rev_eval requires val(a) >= 0")
    acc = PadicNumber.zero(B.p, math.inf)
    for c in B.coeffs:
        acc = acc * a + c
    return acc


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull data of (index, valuation) points.

    ``vertices`` are hull vertices left to right; ``slopes`` is the slope
    multiset as Fractions in the paper's decreasing order (one entry per
    root of the monic reversed polynomial sum c_n x^(d-n)).
    """

    vertices: tuple
    slopes: tuple

    def slope_multiplicities(self):
        out = {}
        for s in self.slopes:
            out[s] = out.get(s, 0) + 1
        return out


def newton_polygon(coeffs):
    """Newton polygon of c_0..c_d (c_0 a unit), points (n, val(c_n)).

    Below-precision coefficients participate only as valuation lower bounds;
    if such a point could alter the hull, SlopeUndetermined names it.
    """
    d = len(coeffs) - 1
    if d < 1:
        return NewtonPolygon(vertices=((0, coeffs[0].val),), slopes=())
    c0 = coeffs[0]
    if c0.unit == 0 or c0.val != 0:
        raise ValueError("leading coefficient c_0 must be a unit")
    known = []
    bounds = []
    for n, c in enumerate(coeffs):
        if c.unit == 0:
            bounds.append((n, c.absprec))
        else:
            known.append((n, c.val))
    if known[-1][0] != d:
        raise SlopeUndetermined(
            f"trailing coefficient {d} is zero to precision; polygon endpoint unknown",
            index=d,
        )
    # lower convex hull of the known points, left to right
    hull = []
    for pt in known:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep hull lower-convex; drop x2 if pt makes it non-vertex
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    def hull_height(x):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= x <= x2:
                return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
        raise AssertionError
    for n, lb in bounds:
        if n < hull[0][0] or n > hull[-1][0]:
            raise SlopeUndetermined(
                f"coefficient {n} zero to precision outside hull span", index=n
            )
        if Fraction(lb) < hull_height(n):
            raise SlopeUndetermined(
                f"coefficient {n} known only to valuation >= {lb}, below the hull",
                index=n,
            )
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        lam = Fraction(y2 - y1, x2 - x1)
        slopes.extend([lam] * (x2 - x1))
    slopes.sort(reverse=True)
    return NewtonPolygon(vertices=tuple(hull), slopes=tuple(slopes))


def _poly_eval_int(coeffs, x, mod):
    acc = 0
    for c in coeffs:
        acc = (acc * x + c) % mod
    return acc


def hensel_root(coeffs, slope):
    """Lift the simple residual roots on the integer-slope segment ``slope``.

    ``coeffs`` are c_0..c_d of the monic reversed polynomial sum c_n x^(d-n).
    Returns a list of PadicNumber roots (one per simple root of the segment's
    reduced polynomial).  Raises NotLiftableHere if the slope is fractional
    or no simple residual root exists.
    """
    p = coeffs[0].p
    d = len(coeffs) - 1
    if isinstance(slope, Fraction):
        if slope.denominator != 1:
            raise NotLiftableHere(f"slope {slope} is not an integer")
        slope = int(slope)
    lam = int(slope)
    # substitute x = p^lam * y and clear the common p-power c:
    # coefficient of y^(d-n) is c_n * p^(lam*(d-n)), valuations minimized on
    # the slope-lam segment of the polygon.
    vals = []
    for n, c in enumerate(coeffs):
        if c.unit == 0:
            vals.append(None)
        else:
            vals.append(c.val + lam * (d - n))
    base = min(v for v in vals if v is not None)
    # usable precision of the substituted polynomial
    prec = min(
        (c.absprec + lam * (d - n)) for n, c in enumerate(coeffs)
    ) - base
    if prec <= 1:
        raise EscalatePrecision("insufficient precision to lift roots", extra_digits=2 - prec)
    mod = p ** prec
    g = []
    for n, c in enumerate(coeffs):
        if c.unit == 0:
            g.append(0)
        else:
            e = c.val + lam * (d - n) - base
            g.append(c.unit * pow(p, e, mod) % mod if e < prec else 0)
    gbar = [c % p for c in g]
    gprime = [(d - n) * g[n] % mod for n in range(d)]  # derivative wrt y
    roots = []
    # residual roots are units: r = 0 would mean valuation above the segment
    for r in range(1, p):
        if _poly_eval_int(gbar, r, p) % p != 0:
            continue
        if _poly_eval_int([c % p for c in gprime], r, p) % p == 0:
            continue  # repeated residual root: not liftable here
        y = r
        k = 1
        while k < prec:
            k = min(2 * k, prec)
            m2 = p ** k
            fy = _poly_eval_int([c % m2 for c in g], y, m2)
            dfy = _poly_eval_int([c % m2 for c in gprime], y, m2)
            y = (y - fy * pow(dfy, -1, m2)) % m2
        roots.append(PadicNumber(p, y, lam, lam + prec))
    if not roots:
        raise NotLiftableHere(
            f"no simple residual root on the slope-{lam} segment"
        )
    return roots


def poly_divide_linear(coeffs, root):
    """Divide sum c_n x^(d-n) by (x - root); returns quotient coefficients.

    Synthetic division; the remainder (the value at the root) is discarded,
    so this is only meaningful when root is a root to working precision.
    """
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * root)
    return out
