"""Truncated Fock-space linear algebra.

Dense complex matrices throughout; the dimensions used by the package stay
below a few hundred, so there is no sparse path.  State vectors and density
matrices are plain ``numpy`` arrays; the helpers here construct and validate
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from .errors import ContractViolation, InvalidDimensionError, TruncationError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockSpace:
    """Operator algebra of one bosonic mode truncated to ``dim`` levels."""

    dim: int
    lowering: np.ndarray = field(repr=False)
    raising: np.ndarray = field(repr=False)
    number: np.ndarray = field(repr=False)

    @property
    def identity(self):
        return np.eye(self.dim, dtype=complex)

    @property
    def parity(self):
        """exp(iπ n̂) as a diagonal ±1 matrix."""
        return np.diag((-1.0) ** np.arange(self.dim)).astype(complex)

    def basis(self, n):
        if not 0 <= n < self.dim:
            raise InvalidDimensionError(f"level {n} outside truncation dim={self.dim}")
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1.0
        return v


def make_fock_space(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    ad = a.conj().T.copy()
    num = ad @ a
    return FockSpace(dim, _frozen(a), _frozen(ad), _frozen(num))


def required_dim(alpha):
    """Truncation rule: dim >= ceil(|α|² + 10|α| + 10)."""
    r = abs(alpha)
    return math.ceil(r * r + 10.0 * r + 10.0)


def check_truncation(alpha, space):
    need = required_dim(alpha)
    if space.dim < need:
        raise TruncationError(
            f"Fock dim {space.dim} too small for |alpha|={abs(alpha):.4g}; need >= {need}"
        )


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ContractViolation("cannot normalize the zero vector")
    return psi / nrm


def coherent_state(alpha, space):
    """|α⟩ from its Poisson amplitudes, renormalized on the truncated space."""
    check_truncation(alpha, space)
    alpha = complex(alpha)
    c = np.empty(space.dim, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, space.dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return normalize(c)


def displace(beta, space):
    """D(β) = exp(β a† − β* a) on the truncated space.

    Accurate only for states well inside the truncation; used as an oracle.
    """
    gen = beta * space.raising - np.conj(beta) * space.lowering
    return scipy.linalg.expm(gen)


def ket2dm(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def expect(op, state):
    """⟨op⟩ for a ket (1-D) or a density matrix (2-D)."""
    state = np.asarray(state)
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.trace(op @ state))


def commutator(a, b):
    return a @ b - b @ a


def hermiticity_defect(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def density_defects(rho):
    """(Hermiticity defect, |Tr ρ − 1|, minimum eigenvalue)."""
    rho = np.asarray(rho, dtype=complex)
    herm = hermiticity_defect(rho)
    tr = abs(np.trace(rho) - 1.0)
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return herm, float(tr), float(lam[0])


def check_density(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, pos_tol=POSITIVITY_TOL):
    herm, tr, lam_min = density_defects(rho)
    if herm > herm_tol or tr > trace_tol or lam_min < -pos_tol:
        raise ContractViolation(
            f"invalid density matrix: hermiticity {herm:.2e}, trace {tr:.2e}, min eig {lam_min:.2e}"
        )
    return rho


def eigh(h, herm_tol=1e-8):
    """Hermitian eigendecomposition with a Hermiticity precondition.

    The defect is measured relative to the largest entry so that matrices in
    joules and in rad/s are treated alike.

    Returns
    -------
    eigenvalues : ndarray, ascending
    eigenvectors : ndarray, columns orthonormal
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {h.shape}")
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    if hermiticity_defect(h) > herm_tol * max(scale, np.finfo(float).tiny):
        raise ContractViolation("eigh called on a non-Hermitian matrix")
    return np.linalg.eigh(0.5 * (h + h.conj().T))


@dataclass(frozen=True)
class WignerResult:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray  # shape (len(p), len(x))
    grid_too_small: bool
    required_extent: float

    def integral(self):
        from scipy.integrate import trapezoid

        return float(trapezoid(trapezoid(self.values, self.x, axis=1), self.p))


def wigner(rho, x, p):
    """Wigner function W(β) = (2/π) Tr[ρ D(β) Π D(−β)] on the grid β = x + i p.

    With this convention the vacuum peaks at 2/π and |α⟩ is centred at
    (Re α, Im α).  Evaluated with the Laguerre recurrence for the matrix
    elements of the displaced parity, which avoids building D(β) per point.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = ket2dm(rho)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    dim = rho.shape[0]
    X, P = np.meshgrid(x, p)
    beta = X + 1j * P

    # w[n] holds the (m, n) element function for the current row m.
    w = [None] * dim
    w[0] = (2.0 / np.pi) * np.exp(-2.0 * np.abs(beta) ** 2)
    W = rho[0, 0].real * w[0]
    for n in range(1, dim):
        w[n] = 2.0 * beta * w[n - 1] / math.sqrt(n)
        W = W + 2.0 * np.real(rho[0, n] * w[n])
    for m in range(1, dim):
        prev = w[m]
        w[m] = (2.0 * np.conj(beta) * prev - math.sqrt(m) * w[m - 1]) / math.sqrt(m)
        W = W + np.real(rho[m, m] * w[m])
        for n in range(m + 1, dim):
            nxt = (2.0 * beta * w[n - 1] - math.sqrt(m) * prev) / math.sqrt(n)
            prev = w[n]
            w[n] = nxt
            W = W + 2.0 * np.real(rho[m, n] * w[n])

    nbar = float(np.real(np.trace(rho @ np.diag(np.arange(dim)))))
    ext = math.sqrt(max(nbar, 0.0)) + 3.0
    too_small = bool(x.min() > -ext or x.max() < ext or p.min() > -ext or p.max() < ext)
    return WignerResult(x, p, np.real(W), too_small, ext)
