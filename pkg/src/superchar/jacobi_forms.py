"""Eta, theta, Eisenstein and weak Jacobi forms, quasi-periodicity ratios,
and numeric verification of Jacobi transformation laws.

Conventions: q = e^{2 pi i tau}, y = e^{2 pi i alpha};
eta = q^{1/24} prod (1 - q^n);
theta(tau, alpha) = (1/sqrt(-1)) sum_k (-1)^k q^{(k+1/2)^2/2} y^{k+1/2}.

Fractional q-exponents are carried as an exact rational offset next to an
integer-exponent mantissa series, and y^{1/2} as doubled integer exponents,
so that products cancel offsets exactly or fail loudly.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .report import VerificationRow
from .series_core import (DEFAULT_Q_ORDER, EvalPoint, QYSeries, euler_product)

TWO_PI_I = 2j * math.pi


class OffsetSeries:
    """A QYSeries mantissa together with an exact rational q-offset:
    the object q^(q_offset) * mantissa."""

    __slots__ = ("series", "q_offset")

    def __init__(self, series, q_offset=0):
        self.series = series
        self.q_offset = Fraction(q_offset)

    @property
    def q_order(self):
        return self.series.q_order

    def __mul__(self, other):
        if isinstance(other, OffsetSeries):
            return OffsetSeries(self.series * other.series,
                                self.q_offset + other.q_offset)
        if isinstance(other, QYSeries):
            return OffsetSeries(self.series * other, self.q_offset)
        return OffsetSeries(self.series * other, self.q_offset)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return OffsetSeries(self.series ** k, self.q_offset * k)

    def invert(self):
        return OffsetSeries(self.series.invert(), -self.q_offset)

    def __truediv__(self, other):
        if isinstance(other, OffsetSeries):
            return self * other.invert()
        return OffsetSeries(self.series / other, self.q_offset)

    def require_integral(self):
        """Assert that the fractional offset has cancelled exactly and
        return the plain series."""
        if self.q_offset.denominator != 1:
            raise ValueError(
                f"fractional q-offset {self.q_offset} has not cancelled")
        n = int(self.q_offset)
        if n == 0:
            return self.series
        return self.series * QYSeries.monomial(1.0, n, 0, self.series.q_order)

    def alpha_derivative(self):
        """d/d alpha = 2 pi i * (y d/dy) on the mantissa."""
        return OffsetSeries(self.series.y_d_dy() * TWO_PI_I, self.q_offset)

    def evaluate(self, point):
        value, bound = self.series.evaluate(point)
        scale = cmath.exp(TWO_PI_I * point.tau * float(self.q_offset))
        return value * scale, bound * abs(scale)


def eta_series(n_q=DEFAULT_Q_ORDER):
    """Dedekind eta as an OffsetSeries: q^{1/24} prod (1 - q^n)."""
    return OffsetSeries(euler_product(n_q), Fraction(1, 24))


def discriminant_series(n_q=DEFAULT_Q_ORDER):
    """The normalized cusp form q prod (1 - q^n)^24 (integer coefficients
    1, -24, 252, ...) as a plain QYSeries."""
    return (eta_series(n_q) ** 24).require_integral()


def _theta_mantissa(n_q):
    """sum_k (-i)(-1)^k q^{k(k+1)/2} y^{k+1/2} (the q^{1/8} offset removed)."""
    out = QYSeries.zero(n_q, half_integral=True)
    k = 0
    while k * (k + 1) // 2 <= n_q:
        for kk in (k, -k - 1):
            n = kk * (kk + 1) // 2
            coeff = -1j * (-1) ** (kk % 2)
            out._set(n, 2 * kk + 1, out.coeff(n, 2 * kk + 1) + coeff)
        k += 1
    return out


def theta_offset_series(n_q=DEFAULT_Q_ORDER):
    """The odd Jacobi theta function as an OffsetSeries (offset 1/8)."""
    return OffsetSeries(_theta_mantissa(n_q), Fraction(1, 8))


def theta_prime_zero(n_q=DEFAULT_Q_ORDER):
    """d/d alpha theta at alpha = 0, an OffsetSeries in q alone:
    2 pi sum_k (-1)^k (2k+1) q^{k(k+1)/2 + 1/8} (equal to 2 pi eta^3)."""
    d = theta_offset_series(n_q).alpha_derivative()
    return OffsetSeries(d.series.y_substitute_one(), d.q_offset)


class JacobiForm:
    """A (weak/quasi) Jacobi form: weight, index, and either an exact series
    representation or a numeric evaluator."""

    __slots__ = ("name", "weight", "index", "offset_series", "evaluator")

    def __init__(self, name, weight, index, offset_series=None, evaluator=None):
        if offset_series is None and evaluator is None:
            raise ValueError("a JacobiForm needs a series or an evaluator")
        self.name = name
        self.weight = weight
        self.index = Fraction(index)
        self.offset_series = offset_series
        self.evaluator = evaluator

    def evaluate(self, point):
        if self.offset_series is not None:
            return self.offset_series.evaluate(point)[0]
        return self.evaluator(point)

    def alpha_derivative_at_zero(self, order, tau):
        """Numeric value of (d/d alpha)^order f at (tau, 0)."""
        if self.offset_series is not None:
            d = self.offset_series
            for _ in range(order):
                d = d.alpha_derivative()
            return d.evaluate(EvalPoint(tau, 0.0))[0]
        # central finite differences as a fallback for numeric-only forms
        h = 1e-3
        weights = {0: [1], 1: [-0.5, 0, 0.5], 2: [1, -2, 1],
                   3: [-0.5, 1, 0, -1, 0.5]}
        if order not in weights:
            raise NotImplementedError
        w = weights[order]
        half = len(w) // 2
        total = 0j
        for j, c in enumerate(w):
            if c:
                total += c * self.evaluator(EvalPoint(tau, (j - half) * h))
        return total / h ** order


def theta_form(n_q=DEFAULT_Q_ORDER):
    return JacobiForm("theta", Fraction(1, 2), Fraction(1, 2),
                      theta_offset_series(n_q))


# ---------------------------------------------------------------------------
# classical Eisenstein series and the Jacobi-Eisenstein numeric sum
# ---------------------------------------------------------------------------

def _sigma(k, m):
    return sum(d ** k for d in range(1, m + 1) if m % d == 0)


def eisenstein_e4(n_q=DEFAULT_Q_ORDER):
    coeffs = {(0, 0): 1.0}
    for m in range(1, n_q + 1):
        coeffs[(m, 0)] = 240.0 * _sigma(3, m)
    return QYSeries(coeffs, n_q)


def eisenstein_e6(n_q=DEFAULT_Q_ORDER):
    coeffs = {(0, 0): 1.0}
    for m in range(1, n_q + 1):
        coeffs[(m, 0)] = -504.0 * _sigma(5, m)
    return QYSeries(coeffs, n_q)


def _ext_gcd(a, b):
    """Returns (g, u, v) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r != 0:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_u, u = u, old_u - qt * u
        old_v, v = v, old_v - qt * v
    return old_r, old_u, old_v


def _completion_min_b(c, d):
    """An SL2 completion (a, b) of the coprime bottom row (c, d) with
    a*d - b*c = 1 and |b| minimal."""
    g, u, v = _ext_gcd(d, c)
    if g < 0:
        g, u, v = -g, -u, -v
    if g != 1:
        raise ValueError("row (c, d) is not coprime")
    a, b = u, -v
    if d != 0:
        t = round(-b / d)
        best = None
        for tt in (t - 1, t, t + 1):
            cand = (a + tt * c, b + tt * d)
            if best is None or abs(cand[1]) < abs(best[1]):
                best = cand
        a, b = best
    return a, b


def jacobi_eisenstein_numeric(k, m, point, cutoff=40):
    """Numeric Jacobi-Eisenstein series of weight k and index m:

    E_{k,m}(tau, alpha) = 1/2 sum_{(c,d) coprime} sum_{lambda}
        (c tau + d)^{-k}
        e^{2 pi i m (lambda^2 tau' + 2 lambda alpha' - c alpha^2/(c tau + d))}

    with tau' = (a tau + b)/(c tau + d), alpha' = alpha/(c tau + d), the
    completion (a, b) chosen with |b| minimal; both the (c, d) box and the
    lambda range are truncated at ``cutoff``.
    """
    tau = point.tau
    alpha = point.alpha
    lam = np.arange(-cutoff, cutoff + 1, dtype=float)
    total = 0j
    for c in range(-cutoff, cutoff + 1):
        for d in range(-cutoff, cutoff + 1):
            if c == 0 and d == 0:
                continue
            if math.gcd(abs(c), abs(d)) != 1:
                continue
            a, b = _completion_min_b(c, d)
            denom = c * tau + d
            tau_p = (a * tau + b) / denom
            alpha_p = alpha / denom
            phase = (lam * lam * tau_p + 2.0 * lam * alpha_p
                     - c * alpha * alpha / denom)
            total += denom ** (-k) * np.exp(TWO_PI_I * m * phase).sum()
    return 0.5 * total


# ---------------------------------------------------------------------------
# weak Jacobi forms
# ---------------------------------------------------------------------------

def phi_weak(name, n_q=DEFAULT_Q_ORDER, cutoff=40):
    """The standard generators of weak Jacobi forms:

    * ``phi_m1_half``: weight -1 index 1/2, theta / theta'(tau, 0)
      (leading Taylor coefficient in alpha exactly 1);
    * ``phi_m2_1``: weight -2 index 1, (2 pi i)^2 phi_m1_half^2;
    * ``phi_10_1``: weight 10 index 1, the cusp form Delta * phi_m2_1
      with Delta = q prod (1-q^n)^24;
    * ``phi_12_1``: weight 12 index 1, numeric,
      (E_4^2 E_{4,1} - E_6 E_{6,1}) / 144;
    * ``phi_0_1``: weight 0 index 1, numeric, phi_12_1 / Delta.
    """
    if name == "phi_m1_half":
        num = theta_offset_series(n_q)
        den = theta_prime_zero(n_q)
        ratio = (num / den).require_integral()
        return JacobiForm(name, -1, Fraction(1, 2),
                          OffsetSeries(ratio, 0))
    if name == "phi_m2_1":
        base = phi_weak("phi_m1_half", n_q)
        series = base.offset_series.series ** 2 * (TWO_PI_I ** 2)
        return JacobiForm(name, -2, 1, OffsetSeries(series, 0))
    if name == "phi_10_1":
        base = phi_weak("phi_m2_1", n_q)
        series = base.offset_series.series * discriminant_series(n_q)
        return JacobiForm(name, 10, 1, OffsetSeries(series, 0))
    if name == "phi_12_1":
        e4 = eisenstein_e4(n_q)
        e6 = eisenstein_e6(n_q)

        def evaluator(point):
            e41 = jacobi_eisenstein_numeric(4, 1, point, cutoff)
            e61 = jacobi_eisenstein_numeric(6, 1, point, cutoff)
            v4 = e4.evaluate(point)[0]
            v6 = e6.evaluate(point)[0]
            return (v4 * v4 * e41 - v6 * e61) / 144.0

        return JacobiForm(name, 12, 1, evaluator=evaluator)
    if name == "phi_0_1":
        inner = phi_weak("phi_12_1", n_q, cutoff)
        delta = discriminant_series(n_q)

        def evaluator(point):
            return inner.evaluate(point) / delta.evaluate(point)[0]

        return JacobiForm(name, 0, 1, evaluator=evaluator)
    raise ValueError(f"unknown weak Jacobi form {name!r}")


def phi_10_1_eisenstein_numeric(point, cutoff=40, n_q=DEFAULT_Q_ORDER):
    """phi_10_1 from the Eisenstein side: (E_6 E_{4,1} - E_4 E_{6,1})/144."""
    e41 = jacobi_eisenstein_numeric(4, 1, point, cutoff)
    e61 = jacobi_eisenstein_numeric(6, 1, point, cutoff)
    v4 = eisenstein_e4(n_q).evaluate(point)[0]
    v6 = eisenstein_e6(n_q).evaluate(point)[0]
    return (v6 * e41 - v4 * e61) / 144.0


# ---------------------------------------------------------------------------
# quasi-periodicity ratios and their Taylor data
# ---------------------------------------------------------------------------

def lemma_ratio(form, t, point, pole_guard=1e-10):
    """The ratio f(tau, t + alpha) / f(tau, t)."""
    den = form.evaluate(EvalPoint(point.tau, t))
    if abs(den) < pole_guard:
        raise ZeroDivisionError(
            f"evaluation point t = {t} is within {pole_guard} of a zero")
    num = form.evaluate(EvalPoint(point.tau, t + point.alpha))
    return num / den


def lemma_shift_residual(form, t, point, lam, mu=0):
    """Relative residual of the ratio transformation law
    R(t + lam tau + mu) = e^{-4 pi i m lam alpha} R(t)."""
    shifted = lemma_ratio(form, t + lam * point.tau + mu, point)
    base = lemma_ratio(form, t, point)
    factor = cmath.exp(-2.0 * TWO_PI_I * float(form.index) * lam * point.alpha)
    rhs = factor * base
    return abs(shifted - rhs) / max(abs(shifted), abs(rhs), 1e-30)


def quasi_jacobi_coeffs(form, i_max, point, radius=0.02, samples=64):
    """Taylor coefficients F_1..F_{i_max} of the normalized ratio

        g(t) = [f(tau, t+alpha)/f(tau, t)] * t^{2m} * a_{2m} / f(tau, alpha),

    where 2m is the order of vanishing of f at alpha = 0 and a_{2m} its
    leading Taylor coefficient; g(0) = 1 and g(t) = 1 + sum F_i t^i.
    Extracted by sampling g on a circle |t| = radius and taking an FFT.
    """
    two_m = int(2 * form.index)
    fact = math.factorial(two_m)
    a_lead = form.alpha_derivative_at_zero(two_m, point.tau) / fact
    f_alpha = form.evaluate(point)
    ts = radius * np.exp(TWO_PI_I * np.arange(samples) / samples)
    vals = np.empty(samples, dtype=complex)
    for j, t in enumerate(ts):
        r = lemma_ratio(form, t, point)
        vals[j] = r * t ** two_m * a_lead / f_alpha
    taylor = np.fft.fft(vals) / samples
    coeffs = [taylor[i] / radius ** i for i in range(i_max + 1)]
    return [complex(c) for c in coeffs]


def expected_f1(form, point):
    """The closed-form first Taylor coefficient
    F_1 = f'(alpha)/f(alpha) - f^{(2m+1)}(0) / ((2m+1) f^{(2m)}(0))."""
    two_m = int(2 * form.index)
    h = 1e-5
    up = form.evaluate(EvalPoint(point.tau, point.alpha + h))
    dn = form.evaluate(EvalPoint(point.tau, point.alpha - h))
    log_deriv = (up - dn) / (2 * h) / form.evaluate(point)
    d_hi = form.alpha_derivative_at_zero(two_m + 1, point.tau)
    d_lo = form.alpha_derivative_at_zero(two_m, point.tau)
    return log_deriv - d_hi / ((two_m + 1) * d_lo)


# ---------------------------------------------------------------------------
# transformation-law verification
# ---------------------------------------------------------------------------

def _transform_residual(form, element, point):
    """Returns (lhs, rhs) for one group element at one point; the law is
    lhs = (character) * rhs with a unimodular character constant."""
    kind = element[0]
    k = form.weight
    l = float(form.index)
    tau, alpha = point.tau, point.alpha
    if kind == "shift":
        lam, mu = element[1], element[2]
        lhs = form.evaluate(EvalPoint(tau, alpha + lam * tau + mu))
        factor = cmath.exp(-TWO_PI_I * l * (lam * lam * tau + 2 * lam * alpha))
        rhs = factor * form.evaluate(point)
        return lhs, rhs
    if kind == "sl2":
        a, b, c, d = element[1:5]
        if a * d - b * c != 1:
            raise ValueError("not a unimodular matrix")
        denom = c * tau + d
        tau_p = (a * tau + b) / denom
        alpha_p = alpha / denom
        lhs = form.evaluate(EvalPoint(tau_p, alpha_p))
        factor = denom ** float(k) * cmath.exp(
            TWO_PI_I * l * c * alpha * alpha / denom)
        rhs = factor * form.evaluate(point)
        return lhs, rhs
    raise ValueError(f"unknown element kind {element[0]!r}")


def _element_label(element):
    if element[0] == "shift":
        return f"shift({element[1]},{element[2]})"
    return "sl2({},{};{},{})".format(*element[1:5])


def transformation_check(form, elements, points, tol, suite="jacobi_forms",
                         paper_ref=""):
    """Verify the Jacobi transformation laws of ``form`` for the given group
    elements at the given points.

    For each element a best-fit unimodular character constant is measured
    from the sample points (half-integral index forms transform with a
    nontrivial character); the reported residual is relative to that
    constant, which is recorded in the element label.
    """
    rows = []
    for element in elements:
        pairs = [_transform_residual(form, element, p) for p in points]
        num = sum(lhs * rhs.conjugate() for lhs, rhs in pairs)
        if abs(num) == 0:
            char = 1.0 + 0j
        else:
            char = num / abs(num)
        label = _element_label(element)
        label_c = f"{label}[char={char.real:+.6f}{char.imag:+.6f}j]"
        for p, (lhs, rhs) in zip(points, pairs):
            resid = abs(lhs - char * rhs) / max(abs(lhs), abs(rhs), 1e-30)
            rows.append(VerificationRow(
                suite=suite,
                identity=f"{form.name}-transformation",
                paper_ref=paper_ref,
                element=label_c,
                point=p.as_tuple(),
                residual=resid,
                tolerance=tol,
                passed=resid <= tol,
            ))
    return rows
