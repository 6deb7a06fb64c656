import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import perm

from modules.analytic import Analytic, TaylorSeries, QUADRATURE_POINTS
from modules.blaschke import Blaschke, BlaschkeProduct, NodeSet, times_factor, times_kernel
from modules.module import Module, DomainError, NumericalError

RADIAL_STEPS = 20
GRID_ANGLES = 512
DEPENDENCY_THRESHOLD = 1e-12

"""
Orthonormal Malmquist basis e_1..e_n of K_B, rows of coefficients up to degree_cap.
The basis depends on the order of sigma.
"""
@dataclass(frozen=True, eq=False)
class MalmquistBasis:
    sigma : NodeSet
    coefficients : np.ndarray
    degree_cap : int

    @property
    def basis(self) -> list[TaylorSeries]:
        return [TaylorSeries(row, self.degree_cap, False) for row in self.coefficients]


"""
Kernel k^alpha_l(z) = sum (k+1)^(-2 alpha) conj(l)^k z^k of WeightedA2(alpha).
"""
@dataclass(frozen=True)
class KernelSpec:
    alpha : float

    def __post_init__(self):
        if not -1 <= self.alpha <= 0:
            raise DomainError(f"Kernel exponent must lie in [-1, 0], got {self.alpha}")


def powers(c : complex, length : int) -> np.ndarray:
    out = np.empty(length, dtype=complex)
    out[0] = 1
    out[1:] = c
    return np.cumprod(out)

def kernel_weights(alpha : float, D : int) -> np.ndarray:
    return np.arange(1, D + 2, dtype=float) ** (-2 * alpha)

def metric_weights(alpha : float, D : int) -> np.ndarray:
    return np.arange(1, D + 2, dtype=float) ** (2 * alpha)

def orthonormalize(vectors : np.ndarray, metric : np.ndarray) -> np.ndarray:
    """
    Classical Gram-Schmidt with one reorthogonalization pass in the inner product
    sum v conj(u) metric. Inputs are normalized first, so the first pivot is 1.
    """
    basis = []
    for vector in vectors:
        v = vector / np.sqrt(np.sum(np.abs(vector) ** 2 * metric))

        for _ in range(2):
            if basis:
                Q = np.array(basis)
                v = v - ((Q.conj() * metric) @ v) @ Q

        pivot = np.sqrt(np.sum(np.abs(v) ** 2 * metric))
        if pivot < DEPENDENCY_THRESHOLD:
            raise NumericalError("kernel sequence numerically dependent")

        basis.append(v / pivot)

    return np.array(basis)

def evaluate_rows(rows : np.ndarray, z : np.ndarray) -> np.ndarray:
    """Evaluate each coefficient row at every point of z; shape (rows, points)."""
    return np.polynomial.polynomial.polyval(z, rows.T)


"""
The model space K_B: Malmquist basis, trace projection and reproducing kernels.
"""
class ModelSpace(Module):
    def __init__(self):
        super().__init__("model_space")

    @staticmethod
    def degree_cap_for(sigma : NodeSet, extra : int = 0) -> int:
        return Analytic.default_degree_cap(sigma.n, sigma.r, extra)

    """
    Radii 1 - 2^-j (j = 1..20) times 512 angles, flattened.
    """
    @staticmethod
    def disc_grid() -> np.ndarray:
        radii = 1 - 2.0 ** -np.arange(1, RADIAL_STEPS + 1)
        angles = np.exp(2j * np.pi * np.arange(GRID_ANGLES) / GRID_ANGLES)
        return (radii[:, None] * angles[None, :]).ravel()

    @staticmethod
    def malmquist_basis(sigma : NodeSet, D : int|None = None) -> MalmquistBasis:
        logger = logging.getLogger(__name__)

        default = ModelSpace.degree_cap_for(sigma)
        if D is None:
            D = default
        elif D < default:
            raise DomainError(f"Degree cap {D} is below the default {default} for n={sigma.n}, r={sigma.r:.6g}")

        partial = np.zeros(D + 1, dtype=complex)
        partial[0] = 1

        rows = []
        for lam in sigma.flat:
            rows.append(np.sqrt(1 - abs(lam) ** 2) * times_kernel(partial, lam))
            partial = times_factor(partial, lam)

        logger.debug(f"Malmquist basis for n={sigma.n}, r={sigma.r:.6g} at degree {D}")

        return MalmquistBasis(sigma, np.array(rows), D)

    """
    e_k(z) from its closed form; k counts from 0 and z may lie anywhere off the poles.
    """
    @staticmethod
    def malmquist_eval(sigma : NodeSet, k : int, z):
        flat = sigma.flat
        if not 0 <= k < len(flat):
            raise DomainError(f"Basis index {k} out of range for n={len(flat)}")

        z = np.asarray(z, dtype=complex)
        value = np.sqrt(1 - abs(flat[k]) ** 2) / (1 - np.conj(flat[k]) * z)
        for lam in flat[:k]:
            value = value * Blaschke.eval_factor(lam, z)

        return value

    @staticmethod
    def project_trace(f : TaylorSeries, basis : MalmquistBasis) -> TaylorSeries:
        E = basis.coefficients
        coordinates = E.conj() @ f.padded(basis.degree_cap)
        return TaylorSeries(coordinates @ E, basis.degree_cap, False)

    """
    (1 - conj(B(z)) B(zeta)) / (1 - conj(z) zeta) expanded in zeta.
    """
    @staticmethod
    def projected_szego_closed_form(B : BlaschkeProduct, z : complex, D : int|None = None) -> TaylorSeries:
        z = complex(z)
        if abs(z) >= 1:
            raise DomainError(f"Point {z} is outside the open unit disc")

        if D is None:
            D = ModelSpace.degree_cap_for(B.sigma)

        numerator = -np.conj(Blaschke.eval_product(B, z)) * Blaschke.expand_product(B, D).coeffs
        numerator[0] += 1
        return TaylorSeries(times_kernel(numerator, z), D, False)

    @staticmethod
    def projected_szego_norm(B : BlaschkeProduct, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1):
            raise DomainError("Projected kernel norm needs points in the open unit disc")

        value = np.sqrt((1 - np.abs(Blaschke.eval_product(B, z)) ** 2) / (1 - np.abs(z) ** 2))
        return float(value) if value.ndim == 0 else value

    """
    Reproducing kernel of WeightedA2(alpha) at lam. The weight (k+1)^(-2 alpha) makes
    (f, k_lam) = f(lam) in the inner product sum f(k) conj(g(k)) (k+1)^(2 alpha);
    alpha = -1/2 gives the Bergman kernel (1 - conj(lam) z)^-2.
    """
    @staticmethod
    def reproducing_kernel(spec : KernelSpec, lam : complex, D : int) -> TaylorSeries:
        lam = complex(lam)
        if abs(lam) >= 1:
            raise DomainError(f"Node {lam} is outside the open unit disc")

        coeffs = kernel_weights(spec.alpha, D) * powers(lam.conjugate(), D + 1)
        return TaylorSeries(coeffs, D, False)

    @staticmethod
    def derivative_kernel(spec : KernelSpec, lam : complex, order : int, D : int) -> np.ndarray:
        k = np.arange(D + 1)
        shifted = np.zeros(D + 1, dtype=complex)
        shifted[order:] = powers(complex(lam).conjugate(), D + 1 - order)
        return kernel_weights(spec.alpha, D) * perm(k, order) * shifted

    """
    Gram-Schmidt (in WeightedA2(alpha)) of the derivative kernels k_{l,i}, i below the
    multiplicity of l, taken in the order of sigma.
    """
    @staticmethod
    def gram_schmidt_kernels(sigma : NodeSet, spec : KernelSpec, D : int|None = None) -> list[TaylorSeries]:
        if D is None:
            D = ModelSpace.degree_cap_for(sigma, extra=2)

        seen = {}
        vectors = []
        for lam in sigma.flat:
            order = seen.get(lam, 0)
            seen[lam] = order + 1
            vectors.append(ModelSpace.derivative_kernel(spec, lam, order, D))

        rows = orthonormalize(np.array(vectors), metric_weights(spec.alpha, D))
        return [TaylorSeries(row, D, False) for row in rows]

    """
    Orthonormal basis (rows) of the weighted model space. Multiplying the k-th coefficient
    of every Malmquist function by (k+1)^(-2 alpha) gives the same span as the derivative
    kernels, without their ill-conditioning at high multiplicity.
    """
    @staticmethod
    def weighted_model_basis(sigma : NodeSet, spec : KernelSpec, D : int|None = None) -> np.ndarray:
        if D is None:
            D = ModelSpace.degree_cap_for(sigma, extra=2)

        E = ModelSpace.malmquist_basis(sigma, D).coefficients
        if spec.alpha == 0:
            return E

        return orthonormalize(E * kernel_weights(spec.alpha, D), metric_weights(spec.alpha, D))

    """
    Disc grid, the nodes and the QUADRATURE_POINTS roots of unity, flattened.
    """
    @staticmethod
    def closed_disc_points(sigma : NodeSet) -> np.ndarray:
        circle = np.exp(2j * np.pi * np.arange(QUADRATURE_POINTS) / QUADRATURE_POINTS)
        return np.concatenate([ModelSpace.disc_grid(), sigma.flat, circle])

    """
    Supremum of ||P k_z|| in WeightedA2(alpha) over the closed disc, computed as
    sqrt(sum |u_i(z)|^2) over the orthonormal basis u_i of the weighted model space.
    The basis functions are analytic across the circle, so their boundary values give
    the radial limit.
    """
    @staticmethod
    def projected_kernel_bound(sigma : NodeSet, spec : KernelSpec) -> float:
        logger = logging.getLogger(__name__)

        values = evaluate_rows(ModelSpace.weighted_model_basis(sigma, spec), ModelSpace.closed_disc_points(sigma))
        bound = float(np.sqrt(np.max(np.sum(np.abs(values) ** 2, axis=0))))

        logger.debug(f"Projected kernel bound {bound:.12g} for alpha={spec.alpha:g}")

        return bound

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("The model_space module has no commands; it provides Malmquist bases, projections and kernels.")
