"""Special functions: Gamma, Pochhammer, Bessel J of real order, the scaled
radial Bessel kernel, hypergeometric-type polynomials, Legendre polynomials and
spherical harmonics.

Everything here is a pure function of its arguments; PolySpec caches its
coefficients once at construction and is immutable afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

# Power series is used up to max(SERIES_RADIUS, 2*nu); beyond that the series
# loses digits to cancellation and we switch to scipy's large-argument code.
SERIES_RADIUS = 12.0
SERIES_TERM_CAP = 200
SERIES_RELATIVE_FLOOR = 1e-17


def gamma_fn(x: float) -> float:
    """Gamma function for real x away from the poles at 0, -1, -2, ..."""
    if not math.isfinite(x):
        raise ValueError(f"gamma_fn requires finite x, got {x!r}")
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"gamma_fn pole at non-positive integer x={x}")
    return math.gamma(x)


def pochhammer(s: float, i: int) -> float:
    """Rising factorial (s)_i = s (s+1) ... (s+i-1), with (s)_0 = 1."""
    if i < 0:
        raise ValueError("pochhammer requires i >= 0")
    out = 1.0
    for j in range(i):
        out *= s + j
    return out


def bessel_j_series(nu: float, r) -> np.ndarray | float:
    """J_nu(r) by direct summation of the ascending power series.

    Accurate for moderate r; terms are added until they fall below
    SERIES_RELATIVE_FLOOR of the running sum (hard cap SERIES_TERM_CAP).
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    half = r / 2.0
    # term_0 = (r/2)^nu / Gamma(nu+1); recurrence term_{k+1} = -term_k (r/2)^2/(k+1)(k+nu+1)
    with np.errstate(divide="ignore"):
        log_t0 = nu * np.log(np.where(half > 0, half, 1.0)) - math.lgamma(nu + 1.0)
    term = np.where(half > 0, np.exp(log_t0), 1.0 if nu == 0 else 0.0)
    total = term.copy()
    h2 = half * half
    live = np.ones_like(r, dtype=bool)
    for k in range(SERIES_TERM_CAP):
        term = -term * h2 / ((k + 1.0) * (k + 1.0 + nu))
        total += np.where(live, term, 0.0)
        live &= np.abs(term) > SERIES_RELATIVE_FLOOR * np.maximum(np.abs(total), 1e-300)
        if not live.any():
            break
    return float(total[0]) if scalar else total


def bessel_j(nu: float, r) -> np.ndarray | float:
    """Bessel function of the first kind J_nu(r), nu >= 0, r >= 0.

    Uses the power series for r <= max(12, 2 nu) and scipy's large-argument
    evaluation beyond; the two branches agree to ~1e-9 in the overlap band.
    """
    if not (math.isfinite(nu) and nu >= 0):
        raise ValueError(f"bessel_j requires finite nu >= 0, got {nu!r}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("bessel_j requires r >= 0")
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    cut = max(SERIES_RADIUS, 2.0 * nu)
    out = np.empty_like(r_arr)
    small = r_arr <= cut
    if small.any():
        out[small] = bessel_j_series(nu, r_arr[small])
    if (~small).any():
        out[~small] = sp.jv(nu, r_arr[~small])
    return float(out[0]) if scalar else out


def j_scaled(N: int, alpha: float, r, weighted: bool = False):
    """Radial kernel j_{-alpha}(r) = r^{-(N-2)/2} J_{-alpha+(N-2)/2}(r).

    Near r=0 the unweighted value behaves like c r^{-alpha}.  With
    ``weighted=True`` returns r^alpha * j_{-alpha}(r), which extends
    continuously to r=0 (value 2^{-order}/Gamma(order+1) there).
    """
    if N < 2:
        raise ValueError("j_scaled requires N >= 2")
    order = -alpha + (N - 2) / 2.0
    if order < 0:
        raise ValueError(f"j_scaled requires -alpha+(N-2)/2 >= 0, got {order}")
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    if weighted:
        # r^alpha j_{-alpha}(r) = r^{-order} J_order(r); sum the scaled series
        # directly for small r where the direct quotient would be 0/0.
        out = np.empty_like(r_arr)
        small = r_arr < 0.5
        if small.any():
            rs = r_arr[small]
            h2 = (rs / 2.0) ** 2
            term = np.full_like(rs, 2.0 ** (-order) / math.gamma(order + 1.0))
            total = term.copy()
            for k in range(40):
                term = -term * h2 / ((k + 1.0) * (k + 1.0 + order))
                total += term
                if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
                    break
            out[small] = total
        if (~small).any():
            rb = r_arr[~small]
            out[~small] = rb ** (-order) * bessel_j(order, rb)
        return float(out[0]) if scalar else out
    if np.any(r_arr <= 0):
        raise ValueError("j_scaled (unweighted) requires r > 0")
    out = r_arr ** (-(N - 2) / 2.0) * bessel_j(order, r_arr)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PolySpec:
    """Degree-n polynomial sum_i (-n)_i / (b)_i * t^i / i!  (b > 0).

    Up to normalization this is the generalized Laguerre polynomial
    L_n^{b-1}(t) / binom(n+b-1, n); coefficients are cached at construction
    and evaluation is by Horner's rule.
    """

    n: int
    b: float
    coeffs: tuple = field(init=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("PolySpec requires degree n >= 0")
        if not (self.b > 0):
            raise ValueError(f"PolySpec requires b > 0, got {self.b}")
        c = [1.0]
        for i in range(self.n):
            # c_{i+1} = c_i * (-n + i) / ((b + i)(i + 1))
            c.append(c[-1] * (-self.n + i) / ((self.b + i) * (i + 1.0)))
        object.__setattr__(self, "coeffs", tuple(c))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.full_like(t_arr, self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            out = out * t_arr + c
        return float(out) if np.ndim(t) == 0 else out


def eval_P(spec: PolySpec, t):
    """Evaluate the cached polynomial at t >= 0."""
    return spec(t)


def legendre_p(l: int, x):
    """Legendre polynomial P_l(x) on [-1, 1] by upward recurrence."""
    if l < 0:
        raise ValueError("legendre_p requires l >= 0")
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > 1.0 + 1e-14):
        raise ValueError("legendre_p requires |x| <= 1")
    p0 = np.ones_like(x_arr)
    if l == 0:
        return float(p0) if np.ndim(x) == 0 else p0
    p1 = x_arr.copy()
    for k in range(1, l):
        p0, p1 = p1, ((2 * k + 1) * x_arr * p1 - k * p0) / (k + 1.0)
    return float(p1) if np.ndim(x) == 0 else p1


def sph_harm(l: int, m: int, theta, phi):
    """Orthonormal complex spherical harmonic Y_l^m(theta, phi).

    theta is the colatitude, phi the longitude; Condon-Shortley phase.
    """
    if abs(m) > l:
        raise ValueError(f"sph_harm requires |m| <= l, got l={l}, m={m}")
    theta_arr = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    ma = abs(m)
    # lpmv carries the Condon-Shortley (-1)^m already
    norm = math.sqrt(
        (2 * l + 1) / (4 * math.pi) * math.exp(math.lgamma(l - ma + 1) - math.lgamma(l + ma + 1))
    )
    val = norm * sp.lpmv(ma, l, np.cos(theta_arr)) * np.exp(1j * ma * phi_arr)
    if m < 0:
        val = (-1) ** ma * np.conj(val)
    if np.ndim(theta) == 0 and np.ndim(phi) == 0:
        return complex(val)
    return val


def real_sph_harm(l: int, m: int, theta, phi):
    """Real orthonormal spherical harmonic basis (m<0: sine, m>0: cosine)."""
    if abs(m) > l:
        raise ValueError(f"real_sph_harm requires |m| <= l, got l={l}, m={m}")
    if m == 0:
        return np.real(sph_harm(l, 0, theta, phi))
    y = sph_harm(l, abs(m), theta, phi)
    if m > 0:
        return math.sqrt(2.0) * (-1) ** m * np.real(y)
    return math.sqrt(2.0) * (-1) ** m * np.imag(y)
