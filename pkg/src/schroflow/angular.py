"""Angular eigenproblems on the unit sphere.

Three regimes are covered:

* ``assemble_circle`` -- Fourier-Galerkin matrix of the magnetic operator
  (-i d/dtheta + alpha(theta))^2 + a(theta) on the circle (N=2);
* ``assemble_sphere`` -- spherical-harmonic Galerkin matrix of
  -Laplace_{S^2} + a(theta) (N=3, no magnetic term);
* ``constant_a_spectrum`` -- closed-form spectrum l(l+N-2) + a for constant a.

``eigensolve`` turns an assembled Hermitian matrix into a deterministic,
ascending, orthonormal eigensystem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import real_sph_harm, sph_harm

HERMITICITY_TOL = 1e-12


class AngularProblemError(ValueError):
    """Invalid coefficients or truncation for an angular problem."""


@dataclass(frozen=True)
class AngularProblem:
    """Definition of the operator (-i grad_S + A)^2 + a on S^{N-1}.

    ``scalar_coeff`` is a constant, a dict of circle Fourier coefficients
    {q: a_hat_q}, or a callable a(theta) on the sphere.  ``magnetic_coeff``
    (circle only) is a dict of Fourier coefficients of the scalar tangential
    component alpha(theta).  ``truncation`` is the Fourier cutoff K on the
    circle or the harmonic degree cutoff L_max on the sphere.
    """

    N: int
    scalar_coeff: object
    magnetic_coeff: dict | None = None
    truncation: int = 16

    def __post_init__(self):
        if self.N < 2:
            raise AngularProblemError("dimension N must be >= 2")
        if self.N >= 3 and self.magnetic_coeff:
            raise AngularProblemError("magnetic coefficients are supported only for N=2")
        for coeffs in (self._scalar_fourier(), self.magnetic_coeff):
            if isinstance(coeffs, dict):
                _check_real_symmetry(coeffs)

    def _scalar_fourier(self):
        if isinstance(self.scalar_coeff, dict):
            return self.scalar_coeff
        return None


def _check_real_symmetry(coeffs: dict, tol: float = 1e-12) -> None:
    for q, c in coeffs.items():
        if abs(np.conj(coeffs.get(-q, 0.0)) - c) > tol:
            raise AngularProblemError(
                f"Fourier coefficients are not conjugate-symmetric at q={q}; "
                "the coefficient function must be real-valued"
            )


def circle_coeffs_from_samples(samples) -> dict:
    """Fourier coefficients f_hat_q = (1/2pi) int f e^{-iq theta} of a real
    function given by uniform samples on [0, 2pi)."""
    samples = np.asarray(samples, dtype=complex)
    n = len(samples)
    theta = 2.0 * math.pi * np.arange(n) / n
    qmax = (n - 1) // 2
    return {
        q: complex(np.sum(samples * np.exp(-1j * q * theta)) / n)
        for q in range(-qmax, qmax + 1)
    }


@dataclass(frozen=True)
class AngularEigensystem:
    """Eigenvalues/eigenvectors of the angular operator, ascending, with
    eigenvalues repeated according to multiplicity.

    ``basis_tag`` is one of ``circle_fourier`` (coefficients on e^{im theta}
    modes, m = -K..K), ``sphere_harmonic`` (real harmonics, (l, m) pairs in
    lexicographic order) or ``analytic_constant`` (exact degree-l harmonics,
    ``mode_labels`` carries (l, m)).
    """

    basis_tag: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual_bound: float
    N: int
    mode_labels: tuple = ()
    constant_shift: float = 0.0

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def angular_value(self, k: int, theta, phi=None):
        """Value of the k-th (1-based) normalized eigenfunction."""
        idx = k - 1
        if idx < 0 or idx >= len(self.eigenvalues):
            raise IndexError(f"mode index k={k} out of range")
        if self.basis_tag == "analytic_constant":
            l, m = self.mode_labels[idx]
            if self.N == 3:
                return sph_harm(l, m, theta, 0.0 if phi is None else phi)
            if self.N == 2:
                return np.exp(1j * m * np.asarray(theta)) / math.sqrt(2 * math.pi)
            raise NotImplementedError(
                "analytic eigenfunction evaluation is provided for N in {2, 3}"
            )
        if self.basis_tag == "circle_fourier":
            coeffs = self.eigenvectors[:, idx]
            K = (len(coeffs) - 1) // 2
            ms = np.arange(-K, K + 1)
            th = np.asarray(theta, dtype=float)
            return np.tensordot(coeffs, np.exp(1j * np.outer(ms, th)), axes=(0, 0)) / math.sqrt(
                2 * math.pi
            )
        if self.basis_tag == "sphere_harmonic":
            coeffs = self.eigenvectors[:, idx]
            out = 0.0
            for c, (l, m) in zip(coeffs, self.mode_labels):
                if c != 0.0:
                    out = out + c * real_sph_harm(l, m, theta, 0.0 if phi is None else phi)
            return out
        raise ValueError(f"unknown basis_tag {self.basis_tag!r}")

    def sup_abs(self, k: int, samples: int = 256) -> float:
        """Grid estimate of max |psi_k| over the sphere."""
        if self.basis_tag == "analytic_constant" and self.N == 3:
            l, m = self.mode_labels[k - 1]
            theta = np.linspace(0.0, math.pi, samples)
            return float(np.max(np.abs(sph_harm(l, m, theta, 0.0))))
        if self.N == 2 or self.basis_tag == "circle_fourier":
            theta = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
            return float(np.max(np.abs(self.angular_value(k, theta))))
        theta = np.linspace(0.0, math.pi, samples)
        phi = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        return float(np.max(np.abs(self.angular_value(k, tt, pp))))


def assemble_circle(problem: AngularProblem) -> np.ndarray:
    """Fourier-Galerkin matrix of (-i d/dtheta + alpha)^2 + a on modes
    e^{im theta}, m = -K..K.

    M_{mn} = m^2 delta_{mn} + (n+m) alpha_hat_{m-n} + g_hat_{m-n} with
    g = alpha^2 + a.
    """
    if problem.N != 2:
        raise AngularProblemError("assemble_circle requires N=2")
    K = problem.truncation
    a_hat = _as_fourier(problem.scalar_coeff)
    al_hat = dict(problem.magnetic_coeff or {})
    _check_real_symmetry(a_hat)
    _check_real_symmetry(al_hat)
    # g = alpha^2 + a via coefficient convolution
    g_hat: dict = dict(a_hat)
    for p, cp in al_hat.items():
        for q, cq in al_hat.items():
            g_hat[p + q] = g_hat.get(p + q, 0.0) + cp * cq
    ms = np.arange(-K, K + 1)
    M = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
    for i, m in enumerate(ms):
        for j, n in enumerate(ms):
            val = g_hat.get(m - n, 0.0) + (n + m) * al_hat.get(m - n, 0.0)
            if m == n:
                val += m * m
            M[i, j] = val
    _require_hermitian(M)
    return M


def _as_fourier(scalar_coeff) -> dict:
    if isinstance(scalar_coeff, dict):
        return dict(scalar_coeff)
    if np.isscalar(scalar_coeff):
        return {0: complex(scalar_coeff)}
    raise AngularProblemError(
        "circle problems take a constant or Fourier-coefficient dict for a(theta)"
    )


def sphere_quadrature(L_max: int, n_theta: int | None = None, n_phi: int | None = None):
    """Gauss-Legendre x trapezoid product quadrature on S^2.

    Returns (theta, phi, w) flattened node arrays with sum(w) = 4 pi.
    """
    nt = n_theta if n_theta is not None else 2 * L_max + 2
    np_ = n_phi if n_phi is not None else 4 * L_max + 4
    if nt < 2 * L_max + 2 or np_ < 4 * L_max + 4:
        raise AngularProblemError(
            f"sphere quadrature needs >= {2*L_max+2} colatitude and >= {4*L_max+4} "
            f"longitude nodes for L_max={L_max}"
        )
    x, wx = np.polynomial.legendre.leggauss(nt)
    theta = np.arccos(x)
    phi = 2.0 * math.pi * np.arange(np_) / np_
    wphi = 2.0 * math.pi / np_
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.repeat(wx * wphi, np_)
    return tt.ravel(), pp.ravel(), ww


def sphere_mode_labels(L_max: int) -> tuple:
    return tuple((l, m) for l in range(L_max + 1) for m in range(-l, l + 1))


def assemble_sphere(problem: AngularProblem, n_theta: int | None = None,
                    n_phi: int | None = None) -> np.ndarray:
    """Galerkin matrix of -Laplace_{S^2} + a(theta) over real harmonics up to
    degree L_max: diag(l(l+1)) plus the quadrature Gram of a."""
    if problem.N != 3:
        raise AngularProblemError("assemble_sphere requires N=3")
    L_max = problem.truncation
    labels = sphere_mode_labels(L_max)
    theta, phi, w = sphere_quadrature(L_max, n_theta, n_phi)
    a = problem.scalar_coeff
    a_vals = np.full_like(theta, float(a)) if np.isscalar(a) else np.asarray(
        [a(t) for t in theta]
    )
    Y = np.empty((len(labels), len(theta)))
    for i, (l, m) in enumerate(labels):
        Y[i] = real_sph_harm(l, m, theta, phi)
    M = (Y * (w * a_vals)) @ Y.T
    M[np.diag_indices_from(M)] += [l * (l + 1) for l, _ in labels]
    M = 0.5 * (M + M.T)
    return M


def _require_hermitian(M: np.ndarray) -> None:
    dev = np.max(np.abs(M - M.conj().T))
    if dev > HERMITICITY_TOL * max(1.0, np.max(np.abs(M))):
        raise AngularProblemError(f"matrix is not Hermitian (deviation {dev:.3e})")


class EigensolveError(RuntimeError):
    """Eigendecomposition failed to reach the requested residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def eigensolve(M: np.ndarray, tol: float = 1e-11, basis_tag: str | None = None,
               N: int = 2, mode_labels: tuple = ()) -> AngularEigensystem:
    """Full eigendecomposition of a Hermitian matrix.

    Output is deterministic for identical input: eigenvalues ascending,
    degenerate clusters ordered by the basis index of the dominant
    coefficient, each vector rotated so its first significant coefficient is
    positive real.
    """
    M = np.asarray(M)
    _require_hermitian(M)
    vals, vecs = np.linalg.eigh(M)
    scale = max(np.max(np.abs(vals)), 1.0)
    # order degenerate clusters by dominant-coefficient index
    order = list(range(len(vals)))
    i = 0
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[j + 1] - vals[i] <= 10 * tol * scale:
            j += 1
        if j > i:
            order[i:j + 1] = sorted(
                order[i:j + 1], key=lambda k: int(np.argmax(np.abs(vecs[:, k])))
            )
        i = j + 1
    vals = vals[order]
    vecs = vecs[:, order]
    # fix the free phase: first coefficient above threshold is positive real
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-8)) if np.any(np.abs(col) > 1e-8) else 0
        pivot = col[idx]
        if pivot != 0:
            vecs[:, k] = col * (np.conj(pivot) / abs(pivot))
    residual = float(
        np.max(np.linalg.norm(M @ vecs - vecs * vals, axis=0))
    )
    norm_M = float(np.linalg.norm(M, 2)) if M.size else 0.0
    if residual > tol * max(norm_M, 1.0):
        raise EigensolveError(
            f"eigensolve residual {residual:.3e} exceeds tol*|M| = {tol * norm_M:.3e}",
            residual,
        )
    gram_dev = float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(vecs.shape[1]))))
    if basis_tag is None:
        basis_tag = "circle_fourier" if np.iscomplexobj(M) else "sphere_harmonic"
    return AngularEigensystem(
        basis_tag=basis_tag,
        eigenvalues=vals,
        eigenvectors=vecs,
        residual_bound=max(residual, gram_dev),
        N=N,
        mode_labels=mode_labels,
    )


def harmonic_multiplicity(l: int, N: int) -> int:
    """Dimension of the space of degree-l spherical harmonics on S^{N-1}."""
    if l < 0:
        raise ValueError("degree l must be >= 0")
    low = math.comb(N + l - 3, l - 2) if l >= 2 else 0
    return int(math.comb(N + l - 1, l) - low)


def constant_a_spectrum(N: int, a: float, count: int) -> AngularEigensystem:
    """Exact spectrum mu = l(l+N-2) + a of -Laplace_{S^{N-1}} + a, each
    eigenvalue repeated with its harmonic multiplicity, at least ``count``
    entries (whole degree blocks are kept)."""
    if N < 3:
        raise AngularProblemError("constant_a_spectrum requires N >= 3")
    if count < 1:
        raise AngularProblemError("count must be >= 1")
    eigenvalues = []
    labels = []
    l = 0
    while len(eigenvalues) < count:
        mult = harmonic_multiplicity(l, N)
        eigenvalues.extend([l * (l + N - 2) + a] * mult)
        if N == 3:
            labels.extend((l, m) for m in range(-l, l + 1))
        else:
            labels.extend((l, i) for i in range(mult))
        l += 1
    return AngularEigensystem(
        basis_tag="analytic_constant",
        eigenvalues=np.array(eigenvalues),
        eigenvectors=None,
        residual_bound=0.0,
        N=N,
        mode_labels=tuple(labels),
        constant_shift=a,
    )
