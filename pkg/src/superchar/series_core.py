"""Truncated bivariate Laurent series in q and y^(1/2), series in (t, q),
evaluation points on the upper half plane, and guarded infinite products.

A ``QYSeries`` stores complex coefficients keyed by ``(n, r2)`` where the
monomial is ``q^n * y^(r2/2)``: y-exponents are doubled so that half-integral
powers of y stay integer keys.  Series are truncated at q-order ``q_order``
(terms with q-exponent > q_order are dropped) and carry a ``half_integral``
flag saying whether odd ``r2`` keys are permitted.
"""

from __future__ import annotations

import cmath
import json
import math
from fractions import Fraction


DEFAULT_Q_ORDER = 20
Y_EXPONENT_GUARD = 200  # |r2| <= 2 * Y_EXPONENT_GUARD
COEFF_TOL = 1e-12


class EvalPoint:
    """A numeric evaluation point (tau, alpha) with tau in the upper half
    plane; q = exp(2 pi i tau), y = exp(2 pi i alpha)."""

    __slots__ = ("tau", "alpha")

    def __init__(self, tau, alpha=0.0):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {tau}")
        self.tau = tau
        self.alpha = complex(alpha)

    @property
    def q(self):
        return cmath.exp(2j * cmath.pi * self.tau)

    @property
    def y(self):
        return cmath.exp(2j * cmath.pi * self.alpha)

    def as_tuple(self):
        return (self.tau.real, self.tau.imag, self.alpha.real, self.alpha.imag)

    def __repr__(self):
        return f"EvalPoint(tau={self.tau}, alpha={self.alpha})"


def _check_y_guard(r2):
    if abs(r2) > 2 * Y_EXPONENT_GUARD:
        raise OverflowError(
            f"y-exponent {r2}/2 exceeds the guard +-{Y_EXPONENT_GUARD}")


class QYSeries:
    """Truncated Laurent series sum_{n, r2} c_{n,r2} q^n y^(r2/2).

    q-exponents are integers >= some (possibly negative) minimum and are
    truncated above ``q_order``.  Coefficients are complex doubles.
    """

    __slots__ = ("q_order", "half_integral", "coeffs")

    def __init__(self, coeffs=None, q_order=DEFAULT_Q_ORDER, half_integral=False):
        self.q_order = int(q_order)
        self.half_integral = bool(half_integral)
        self.coeffs = {}
        if coeffs:
            for (n, r2), c in coeffs.items():
                self._set(int(n), int(r2), complex(c))

    def _set(self, n, r2, c):
        if n > self.q_order:
            return
        _check_y_guard(r2)
        if r2 % 2 != 0 and not self.half_integral:
            raise ValueError(
                f"odd doubled y-exponent {r2} in an integral-y series")
        if c != 0:
            self.coeffs[(n, r2)] = c
        else:
            self.coeffs.pop((n, r2), None)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, q_order=DEFAULT_Q_ORDER, half_integral=False):
        return cls({}, q_order, half_integral)

    @classmethod
    def one(cls, q_order=DEFAULT_Q_ORDER, half_integral=False):
        return cls({(0, 0): 1.0}, q_order, half_integral)

    @classmethod
    def monomial(cls, coeff, n, r2, q_order=DEFAULT_Q_ORDER, half_integral=None):
        if half_integral is None:
            half_integral = (r2 % 2 != 0)
        return cls({(n, r2): coeff}, q_order, half_integral)

    def copy(self):
        out = QYSeries.zero(self.q_order, self.half_integral)
        out.coeffs = dict(self.coeffs)
        return out

    # -- basic queries -----------------------------------------------------

    def coeff(self, n, r2=0):
        return self.coeffs.get((int(n), int(r2)), 0j)

    def q_row(self, n):
        """Coefficients of q^n as a dict {r2: c}."""
        return {r2: c for (m, r2), c in self.coeffs.items() if m == n}

    def q_min(self):
        return min((n for (n, _) in self.coeffs), default=0)

    def is_zero(self, tol=0.0):
        return all(abs(c) <= tol for c in self.coeffs.values())

    def max_abs_coeff(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def trim(self, tol=COEFF_TOL):
        """Drop coefficients at or below ``tol`` (relative to the largest)."""
        scale = self.max_abs_coeff()
        if scale == 0.0:
            return self
        out = QYSeries.zero(self.q_order, self.half_integral)
        out.coeffs = {k: c for k, c in self.coeffs.items()
                      if abs(c) > tol * scale}
        return out

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QYSeries):
            return other
        if isinstance(other, (int, float, complex, Fraction)):
            return QYSeries({(0, 0): complex(other)}, self.q_order,
                            self.half_integral)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        q_order = min(self.q_order, other.q_order)
        out = QYSeries.zero(q_order, self.half_integral or other.half_integral)
        for (n, r2), c in self.coeffs.items():
            if n <= q_order:
                out.coeffs[(n, r2)] = out.coeffs.get((n, r2), 0j) + c
        for (n, r2), c in other.coeffs.items():
            if n <= q_order:
                out.coeffs[(n, r2)] = out.coeffs.get((n, r2), 0j) + c
        out.coeffs = {k: c for k, c in out.coeffs.items() if c != 0}
        return out

    __radd__ = __add__

    def __neg__(self):
        out = QYSeries.zero(self.q_order, self.half_integral)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            s = complex(other)
            out = QYSeries.zero(self.q_order, self.half_integral)
            if s != 0:
                out.coeffs = {k: c * s for k, c in self.coeffs.items()}
            return out
        if not isinstance(other, QYSeries):
            return NotImplemented
        q_order = min(self.q_order, other.q_order)
        # half + half = integral under multiplication of pure parities, but a
        # general product may mix; permit odd keys if either factor does.
        out = QYSeries.zero(q_order, self.half_integral or other.half_integral)
        acc = {}
        for (n1, r1), c1 in self.coeffs.items():
            for (n2, r2), c2 in other.coeffs.items():
                n = n1 + n2
                if n > q_order:
                    continue
                key = (n, r1 + r2)
                _check_y_guard(key[1])
                acc[key] = acc.get(key, 0j) + c1 * c2
        out.coeffs = {k: c for k, c in acc.items() if c != 0}
        return out

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        result = QYSeries.one(self.q_order, self.half_integral)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            return self * (1.0 / complex(other))
        if isinstance(other, QYSeries):
            return self * other.invert()
        return NotImplemented

    def invert(self):
        """Multiplicative inverse.

        Requires the lowest q-row to be a single nonzero monomial c*y^(r0/2);
        otherwise the inverse would need unbounded y-exponents at fixed
        q-order.
        """
        if not self.coeffs:
            raise ZeroDivisionError("cannot invert the zero series")
        n0 = self.q_min()
        row0 = self.q_row(n0)
        if len(row0) != 1:
            raise ValueError(
                "inverse requires a monomial lowest q-row, got "
                f"{len(row0)} terms at q^{n0}")
        (r0, c0), = row0.items()
        # a = c0 q^n0 y^(r0/2) (1 + u) with u of positive q-order after
        # factoring; solve b row by row: b_m = -b_0 sum_{j>=1} a_{n0+j} b_{m-j}
        q_order = self.q_order
        out = QYSeries.zero(q_order, self.half_integral)
        rows = {}  # q-exponent offset m >= 0 -> {r2: coeff} of inverse mantissa
        inv0 = {-r0: 1.0 / c0}
        rows[0] = inv0
        # mantissa rows of a relative to the leading monomial
        a_rows = {}
        for (n, r2), c in self.coeffs.items():
            a_rows.setdefault(n - n0, {})[r2] = c
        max_m = q_order + abs(n0)  # generous; out-of-range rows are dropped
        for m in range(1, max_m + 1):
            acc = {}
            for j in range(1, m + 1):
                aj = a_rows.get(j)
                if not aj:
                    continue
                bm = rows.get(m - j)
                if not bm:
                    continue
                for r2a, ca in aj.items():
                    for r2b, cb in bm.items():
                        key = r2a + r2b
                        acc[key] = acc.get(key, 0j) + ca * cb
            new = {}
            for r2, c in acc.items():
                for r0b, c0b in inv0.items():
                    key = r2 + r0b
                    new[key] = new.get(key, 0j) - c * c0b
            if new:
                rows[m] = new
        for m, row in rows.items():
            for r2, c in row.items():
                out._set(m - n0, r2, out.coeff(m - n0, r2) + c)
        return out

    # -- calculus ----------------------------------------------------------

    def q_d_dq(self):
        """q d/dq: multiplies each term by its q-exponent."""
        out = QYSeries.zero(self.q_order, self.half_integral)
        out.coeffs = {k: c * k[0] for k, c in self.coeffs.items() if k[0] != 0}
        return out

    def y_d_dy(self):
        """y d/dy: multiplies each term by its y-exponent r2/2."""
        out = QYSeries.zero(self.q_order, self.half_integral)
        out.coeffs = {k: c * (k[1] / 2.0) for k, c in self.coeffs.items()
                      if k[1] != 0}
        return out

    def y_substitute_one(self):
        """Set y = 1: collapse to a pure q-series."""
        out = QYSeries.zero(self.q_order, half_integral=False)
        acc = {}
        for (n, r2), c in self.coeffs.items():
            acc[n] = acc.get(n, 0j) + c
        out.coeffs = {(n, 0): c for n, c in acc.items() if c != 0}
        return out

    # -- evaluation --------------------------------------------------------

    def evaluate(self, point):
        """Numerically evaluate at ``point``.

        Returns ``(value, bound)`` where ``bound`` is the magnitude of the
        last retained q-shell, a heuristic truncation error estimate.
        Raises if |q| >= 1.
        """
        q = point.q
        y = point.y
        if abs(q) >= 1.0:
            raise ValueError(f"|q| = {abs(q)} >= 1: series diverges")
        value = 0j
        shells = {}
        # y^(1/2) is defined through alpha, not a branch cut in y
        sqrt_y = cmath.exp(1j * cmath.pi * point.alpha)
        for (n, r2), c in self.coeffs.items():
            term = c * q ** n * sqrt_y ** r2
            value += term
            shells[n] = shells.get(n, 0.0) + abs(term)
        if shells:
            bound = shells.get(max(shells), 0.0)
        else:
            bound = 0.0
        return value, bound

    # -- comparison and serialization --------------------------------------

    def normalized_distance(self, other):
        """Max coefficient difference after normalizing by the largest
        coefficient magnitude of the two series."""
        scale = max(self.max_abs_coeff(), other.max_abs_coeff())
        if scale == 0.0:
            return 0.0
        keys = set(self.coeffs) | set(other.coeffs)
        return max(abs(self.coeff(*k) - other.coeff(*k)) for k in keys) / scale

    def approx_equal(self, other, tol=COEFF_TOL):
        return self.normalized_distance(other) <= tol

    def __eq__(self, other):
        if not isinstance(other, QYSeries):
            return NotImplemented
        return self.trim(0.0).coeffs == other.trim(0.0).coeffs

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        body = " + ".join(f"({c:.6g})q^{n}y^{r2}/2" for (n, r2), c in items)
        more = "..." if len(self.coeffs) > 6 else ""
        return f"QYSeries[{body}{more}; q_order={self.q_order}]"

    def to_json_obj(self):
        terms = [[n, r2, c.real, c.imag]
                 for (n, r2), c in sorted(self.coeffs.items())]
        return {"q_order": self.q_order,
                "half_integral": self.half_integral,
                "terms": terms}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        out = cls.zero(obj["q_order"], obj["half_integral"])
        for n, r2, re, im in obj["terms"]:
            out._set(int(n), int(r2), complex(re, im))
        return out

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def infinite_product(factor, n_q, exponent=1, min_degree=None, max_factors=None):
    """Product over n >= 1 of ``factor(n)``, truncated at q-order ``n_q``,
    raised to an integer ``exponent``.

    ``min_degree(n)`` must give a lower bound for the q-order of
    ``factor(n) - 1`` that grows without bound (stabilization); factors are
    consumed until ``min_degree(n) > n_q``.  Defaults to ``n``.
    """
    if min_degree is None:
        min_degree = lambda n: n
    if max_factors is None:
        max_factors = 10 * n_q + 100
    result = QYSeries.one(n_q)
    n = 1
    while min_degree(n) <= n_q:
        if n > max_factors:
            raise RuntimeError(
                "infinite product failed to stabilize within "
                f"{max_factors} factors at q-order {n_q}")
        f = factor(n)
        if f.q_order > n_q:
            f = f.copy()
            f.q_order = n_q
            f.coeffs = {k: c for k, c in f.coeffs.items() if k[0] <= n_q}
        result = result * f
        n += 1
    if exponent == 1:
        return result
    if exponent < 0:
        return result.invert() ** (-exponent)
    return result ** exponent


def euler_product(n_q):
    """prod_{n>=1} (1 - q^n), truncated at q-order n_q."""
    return infinite_product(
        lambda n: QYSeries({(0, 0): 1.0, (n, 0): -1.0}, n_q), n_q)


class TXSeries:
    """Truncated series sum_{k, n} c_{k,n} t^k q^n with integer t-exponents
    (bounded both ways by ``t_range``) and q-exponents 0 <= n <= q_order.

    Used both for annulus expansions in x (with t playing the role of x) and
    for short Taylor/Laurent expansions in a formal variable t.
    """

    __slots__ = ("q_order", "t_range", "coeffs")

    def __init__(self, coeffs=None, q_order=DEFAULT_Q_ORDER, t_range=20):
        self.q_order = int(q_order)
        self.t_range = int(t_range)
        self.coeffs = {}
        if coeffs:
            for (k, n), c in coeffs.items():
                self._set(int(k), int(n), complex(c))

    def _set(self, k, n, c):
        if n > self.q_order or n < 0 or abs(k) > self.t_range:
            return
        if c != 0:
            self.coeffs[(k, n)] = c
        else:
            self.coeffs.pop((k, n), None)

    @classmethod
    def zero(cls, q_order=DEFAULT_Q_ORDER, t_range=20):
        return cls({}, q_order, t_range)

    @classmethod
    def one(cls, q_order=DEFAULT_Q_ORDER, t_range=20):
        return cls({(0, 0): 1.0}, q_order, t_range)

    @classmethod
    def monomial(cls, coeff, k, n=0, q_order=DEFAULT_Q_ORDER, t_range=20):
        return cls({(k, n): coeff}, q_order, t_range)

    def coeff(self, k, n=0):
        return self.coeffs.get((int(k), int(n)), 0j)

    def t_row(self, k):
        """Coefficient of t^k as a pure q-series (QYSeries, y-free)."""
        out = QYSeries.zero(self.q_order)
        out.coeffs = {(n, 0): c for (kk, n), c in self.coeffs.items()
                      if kk == k and c != 0}
        return out

    def residue_t(self):
        """Coefficient of t^(-1) as a q-series."""
        return self.t_row(-1)

    def max_abs_coeff(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def _coerce(self, other):
        if isinstance(other, TXSeries):
            return other
        if isinstance(other, (int, float, complex, Fraction)):
            return TXSeries({(0, 0): complex(other)}, self.q_order,
                            self.t_range)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = TXSeries.zero(min(self.q_order, other.q_order),
                            min(self.t_range, other.t_range))
        for (k, n), c in self.coeffs.items():
            out._set(k, n, c)
        for (k, n), c in other.coeffs.items():
            out._set(k, n, out.coeff(k, n) + c)
        out.coeffs = {key: c for key, c in out.coeffs.items() if c != 0}
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TXSeries.zero(self.q_order, self.t_range)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            s = complex(other)
            out = TXSeries.zero(self.q_order, self.t_range)
            if s != 0:
                out.coeffs = {k: c * s for k, c in self.coeffs.items()}
            return out
        if not isinstance(other, TXSeries):
            return NotImplemented
        out = TXSeries.zero(min(self.q_order, other.q_order),
                            min(self.t_range, other.t_range))
        acc = {}
        for (k1, n1), c1 in self.coeffs.items():
            for (k2, n2), c2 in other.coeffs.items():
                n = n1 + n2
                k = k1 + k2
                if n > out.q_order or abs(k) > out.t_range:
                    continue
                acc[(k, n)] = acc.get((k, n), 0j) + c1 * c2
        out.coeffs = {key: c for key, c in acc.items() if c != 0}
        return out

    __rmul__ = __mul__

    def d_dt(self):
        """Formal derivative in t: t^k -> k t^(k-1)."""
        out = TXSeries.zero(self.q_order, self.t_range)
        for (k, n), c in self.coeffs.items():
            if k != 0:
                out._set(k - 1, n, out.coeff(k - 1, n) + k * c)
        return out

    def t_d_dt(self):
        """t d/dt: multiplies each term by its t-exponent."""
        out = TXSeries.zero(self.q_order, self.t_range)
        out.coeffs = {k: c * k[0] for k, c in self.coeffs.items()
                      if k[0] != 0}
        return out

    def mul_t_power(self, j):
        out = TXSeries.zero(self.q_order, self.t_range)
        for (k, n), c in self.coeffs.items():
            out._set(k + j, n, c)
        return out

    def normalized_distance(self, other, k_window=None):
        """Max coefficient difference over a t-window (defaults to the common
        guaranteed window where both truncations are faithful), normalized by
        the largest coefficient."""
        scale = max(self.max_abs_coeff(), other.max_abs_coeff())
        if scale == 0.0:
            return 0.0
        if k_window is None:
            k_window = min(self.t_range, other.t_range)
        keys = set(self.coeffs) | set(other.coeffs)
        worst = 0.0
        for (k, n) in keys:
            if abs(k) > k_window:
                continue
            worst = max(worst, abs(self.coeff(k, n) - other.coeff(k, n)))
        return worst / scale

    def approx_equal(self, other, tol=COEFF_TOL, k_window=None):
        return self.normalized_distance(other, k_window) <= tol

    def evaluate(self, t, q):
        """Numeric evaluation (no error bound; caller controls truncation)."""
        if abs(q) >= 1.0:
            raise ValueError(f"|q| = {abs(q)} >= 1: series diverges")
        return sum(c * t ** k * q ** n for (k, n), c in self.coeffs.items())

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        body = " + ".join(f"({c:.6g})t^{k}q^{n}" for (k, n), c in items)
        more = "..." if len(self.coeffs) > 6 else ""
        return f"TXSeries[{body}{more}; q_order={self.q_order}, t_range={self.t_range}]"
