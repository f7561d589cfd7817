"""Grassmann algebra on two odd generators eps, delta, and supermatrices.

Elements are a0 + a1*eps + a2*delta + a3*eps*delta with complex components.
eps^2 = delta^2 = 0 and eps*delta = -delta*eps; the body is a0, the even part
is a0 + a3*eps*delta, the odd part a1*eps + a2*delta.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _c(x):
    return complex(x)


class GrassmannNumber:
    """An element of the complex Grassmann algebra on eps and delta."""

    __slots__ = ("c0", "ce", "cd", "ced")

    def __init__(self, c0=0.0, ce=0.0, cd=0.0, ced=0.0):
        self.c0 = _c(c0)
        self.ce = _c(ce)
        self.cd = _c(cd)
        self.ced = _c(ced)

    # -- structure ---------------------------------------------------------

    @property
    def body(self):
        return self.c0

    def nilpotent(self):
        return GrassmannNumber(0, self.ce, self.cd, self.ced)

    def even_part(self):
        return GrassmannNumber(self.c0, 0, 0, self.ced)

    def odd_part(self):
        return GrassmannNumber(0, self.ce, self.cd, 0)

    def is_even(self, tol=0.0):
        return abs(self.ce) <= tol and abs(self.cd) <= tol

    def is_odd(self, tol=0.0):
        return abs(self.c0) <= tol and abs(self.ced) <= tol

    def components(self):
        return (self.c0, self.ce, self.cd, self.ced)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, GrassmannNumber):
            return x
        if isinstance(x, (int, float, complex, Fraction)):
            return GrassmannNumber(_c(x))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GrassmannNumber(self.c0 + o.c0, self.ce + o.ce,
                               self.cd + o.cd, self.ced + o.ced)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannNumber(-self.c0, -self.ce, -self.cd, -self.ced)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a0, a1, a2, a3 = self.components()
        b0, b1, b2, b3 = o.components()
        return GrassmannNumber(
            a0 * b0,
            a0 * b1 + a1 * b0,
            a0 * b2 + a2 * b0,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        )

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def inverse(self):
        """Inverse via the terminating geometric series (the nilpotent part
        squares into the top component and cubes to zero)."""
        if self.c0 == 0:
            raise ZeroDivisionError("Grassmann number with zero body")
        inv0 = 1.0 / self.c0
        n = self.nilpotent() * (-inv0)
        # (c0 (1 - n'))^{-1} = inv0 (1 + n + n^2), n^3 = 0
        out = GrassmannNumber(1.0) + n + n * n
        return out * inv0

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = GrassmannNumber(1.0)
        for _ in range(k):
            out = out * self
        return out

    def sqrt(self):
        """Principal square root (body must be nonzero)."""
        import cmath
        r0 = cmath.sqrt(self.c0)
        # (r0 + u)^2 = c0 + 2 r0 u + u^2 with u nilpotent: solve to top order
        n = self.nilpotent()
        u = n * (0.5 / r0)
        # correction for the eps*delta component of u^2 (odd parts of n square)
        u2 = u * u
        u = u - u2 * (0.5 / r0)
        return GrassmannNumber(r0) + u

    # -- comparison --------------------------------------------------------

    def max_abs(self):
        return max(abs(self.c0), abs(self.ce), abs(self.cd), abs(self.ced))

    def distance(self, other):
        o = self._coerce(other)
        return (self - o).max_abs()

    def approx_equal(self, other, tol=1e-12):
        o = self._coerce(other)
        scale = max(self.max_abs(), o.max_abs(), 1.0)
        return self.distance(o) <= tol * scale

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.components() == o.components()

    def __repr__(self):
        return (f"G({self.c0:.6g} + ({self.ce:.6g})e + ({self.cd:.6g})d"
                f" + ({self.ced:.6g})ed)")


EPS = GrassmannNumber(0, 1, 0, 0)
DELTA = GrassmannNumber(0, 0, 1, 0)
ONE = GrassmannNumber(1)
ZERO = GrassmannNumber(0)


def odd(a, b=0.0):
    """The odd element a*eps + b*delta."""
    return GrassmannNumber(0, a, b, 0)


class SuperMatrix:
    """A square matrix with GrassmannNumber entries.

    The default use is 2x2 matrices in (1|1) block format (even entries on
    the diagonal, odd entries off it), but entries are not constrained and
    larger sizes are supported for jet matrices.
    """

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = [[GrassmannNumber._coerce(x) for x in row] for row in rows]
        n = len(self.rows)
        for row in self.rows:
            if len(row) != n or any(x is None for x in row):
                raise ValueError("SuperMatrix requires a square array of "
                                 "Grassmann or scalar entries")

    @property
    def size(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n=2):
        return cls([[1.0 if i == j else 0.0 for j in range(n)]
                    for i in range(n)])

    @classmethod
    def zero(cls, n=2):
        return cls([[0.0] * n for _ in range(n)])

    def __add__(self, other):
        if not isinstance(other, SuperMatrix) or other.size != self.size:
            return NotImplemented
        return SuperMatrix([[self.rows[i][j] + other.rows[i][j]
                             for j in range(self.size)]
                            for i in range(self.size)])

    def __sub__(self, other):
        if not isinstance(other, SuperMatrix) or other.size != self.size:
            return NotImplemented
        return SuperMatrix([[self.rows[i][j] - other.rows[i][j]
                             for j in range(self.size)]
                            for i in range(self.size)])

    def __neg__(self):
        return SuperMatrix([[-x for x in row] for row in self.rows])

    def __mul__(self, other):
        if isinstance(other, SuperMatrix):
            if other.size != self.size:
                return NotImplemented
            n = self.size
            return SuperMatrix([
                [sum((self.rows[i][k] * other.rows[k][j] for k in range(n)),
                     GrassmannNumber(0))
                 for j in range(n)]
                for i in range(n)])
        o = GrassmannNumber._coerce(other)
        if o is None:
            return NotImplemented
        return SuperMatrix([[x * o for x in row] for row in self.rows])

    def __rmul__(self, other):
        o = GrassmannNumber._coerce(other)
        if o is None:
            return NotImplemented
        return SuperMatrix([[o * x for x in row] for row in self.rows])

    def inverse(self):
        """Inverse of a 2x2 matrix via the block (Schur complement) formula.

        Entry products are ordered so the formula is valid when the diagonal
        entries are even and the off-diagonal entries are odd.
        """
        if self.size != 2:
            raise NotImplementedError("inverse implemented for 2x2 only")
        a, b = self.rows[0]
        c, d = self.rows[1]
        sa = (a - b * d.inverse() * c).inverse()
        sd = (d - c * a.inverse() * b).inverse()
        return SuperMatrix([
            [sa, -(a.inverse() * b * sd)],
            [-(d.inverse() * c * sa), sd],
        ])

    def max_abs(self):
        return max(x.max_abs() for row in self.rows for x in row)

    def distance(self, other):
        return (self - other).max_abs()

    def approx_equal(self, other, tol=1e-12):
        scale = max(self.max_abs(), other.max_abs(), 1.0)
        return self.distance(other) <= tol * scale

    def __repr__(self):
        return "SuperMatrix(" + ", ".join(repr(r) for r in self.rows) + ")"


def berezinian(m):
    """Berezinian of a 2x2 matrix [[A, B], [C, D]] in (1|1) format:
    A*D^{-1} + C*B*D^{-2}.

    The odd entries enter in the order C*B; with that ordering the Berezinian
    of the coordinate-change matrix q[[1, eps], [delta, y - eps*delta]] is
    exactly y^{-1} and the map is multiplicative.
    """
    if m.size != 2:
        raise ValueError("berezinian is defined for 2x2 (1|1) matrices")
    a, b = m.rows[0]
    c, d = m.rows[1]
    dinv = d.inverse()
    return a * dinv + c * b * dinv * dinv


def exp_nilpotent(m, max_terms=8):
    """Matrix exponential of a nilpotent matrix by summing powers until a
    power vanishes exactly; raises if it fails to terminate."""
    n = m.size
    out = SuperMatrix.identity(n)
    term = SuperMatrix.identity(n)
    for k in range(1, max_terms + 2):
        term = term * m * (1.0 / k)
        if term.max_abs() == 0.0:
            return out
        if k > max_terms:
            raise ValueError(
                f"matrix is not nilpotent within {max_terms} powers")
        out = out + term
    return out
