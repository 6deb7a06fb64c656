import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from modules.analytic import TaylorSeries, parse_complex, read_json
from modules.module import Module, DomainError, InputError

POLE_TOLERANCE = 1e-15
SEPARATION = 1e-10

"""
Finite multiset of nodes in the unit disc, in insertion order.
n and r are derived from nodes on every access.
"""
@dataclass(frozen=True)
class NodeSet:
    nodes : tuple[tuple[complex, int], ...]

    def __post_init__(self):
        nodes = tuple((complex(lam), int(mult)) for lam, mult in self.nodes)

        if len(nodes) == 0:
            raise DomainError("A node set needs at least one node")

        for lam, mult in nodes:
            if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
                raise DomainError(f"Node {lam} is not a finite complex number")
            if abs(lam) >= 1:
                raise DomainError(f"Node {lam} is outside the open unit disc")
            if mult < 1:
                raise DomainError(f"Multiplicity of node {lam} must be positive, got {mult}")

        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def from_points(cls, points) -> "NodeSet":
        return cls(tuple((complex(lam), 1) for lam in points))

    @classmethod
    def single(cls, lam : complex, mult : int) -> "NodeSet":
        return cls(((complex(lam), mult),))

    """
    Parse [{"re": float, "im": float, "mult": int}, ...]; mult defaults to 1.
    """
    @classmethod
    def from_json(cls, payload) -> "NodeSet":
        if not isinstance(payload, list) or len(payload) == 0:
            raise InputError("Expected a non-empty JSON list of nodes")

        nodes = []
        for entry in payload:
            mult = entry.get("mult", 1) if isinstance(entry, dict) else 1
            if isinstance(mult, bool) or not isinstance(mult, int):
                raise InputError(f"Multiplicity must be an integer: {entry}")
            nodes.append((parse_complex(entry), mult))

        try:
            return cls(tuple(nodes))
        except DomainError as e:
            raise InputError(f"Invalid node set: {e}")

    @classmethod
    def load(cls, path : str) -> "NodeSet":
        return cls.from_json(read_json(path))

    @property
    def n(self) -> int:
        return sum(mult for _, mult in self.nodes)

    @property
    def r(self) -> float:
        return max(abs(lam) for lam, _ in self.nodes)

    """
    Nodes repeated according to multiplicity, in order.
    """
    @property
    def flat(self) -> np.ndarray:
        return np.array([lam for lam, mult in self.nodes for _ in range(mult)], dtype=complex)

    @property
    def distinct(self) -> bool:
        flat = self.flat
        if len(flat) < 2:
            return True

        gaps = np.abs(flat[:, None] - flat[None, :]) + np.eye(len(flat))
        return bool(gaps.min() >= SEPARATION)

    def to_json(self) -> list[dict]:
        return [{"re": lam.real, "im": lam.imag, "mult": mult} for lam, mult in self.nodes]


@dataclass(frozen=True)
class BlaschkeProduct:
    sigma : NodeSet


def times_factor(coeffs : np.ndarray, lam : complex) -> np.ndarray:
    """Multiply a truncated series by b_lam = (lam - z)/(1 - conj(lam) z)."""
    shifted = lam * coeffs
    shifted[1:] -= coeffs[:-1]
    return lfilter([1.0], [1.0, -np.conj(lam)], shifted)

def times_kernel(coeffs : np.ndarray, lam : complex) -> np.ndarray:
    """Multiply a truncated series by 1/(1 - conj(lam) z)."""
    return lfilter([1.0], [1.0, -np.conj(lam)], np.asarray(coeffs, dtype=complex))


"""
Finite Blaschke products: factors, products with multiplicities and boundary derivatives.
"""
class Blaschke(Module):
    COMMANDS = ("evaluate",)

    def __init__(self):
        super().__init__("blaschke")

    @staticmethod
    def eval_factor(lam : complex, z):
        lam = complex(lam)
        if abs(lam) >= 1:
            raise DomainError(f"Node {lam} is outside the open unit disc")

        z = np.asarray(z, dtype=complex)
        denominator = 1 - np.conj(lam) * z

        if np.any(np.abs(denominator) < POLE_TOLERANCE):
            raise DomainError(f"Evaluation at the pole 1/conj({lam})")

        value = (lam - z) / denominator
        return complex(value) if value.ndim == 0 else value

    @staticmethod
    def eval_product(B : BlaschkeProduct, z):
        value = np.ones_like(np.asarray(z, dtype=complex))
        for lam in B.sigma.flat:
            value = value * Blaschke.eval_factor(lam, z)

        return complex(value) if np.ndim(value) == 0 else value

    """
    B'(w) = -sum_i (1 - |l_i|^2)(1 - conj(l_i) w)^-2 prod_{j != i} b_{l_j}(w) on the unit circle.
    w is normalized to unit modulus; arrays of points are evaluated at once.
    """
    @staticmethod
    def boundary_derivative(B : BlaschkeProduct, w):
        w = np.asarray(w, dtype=complex)
        scalar = w.ndim == 0
        w = np.atleast_1d(w)

        if np.any(w == 0):
            raise DomainError("Boundary derivative needs a nonzero point")

        w = w / np.abs(w)
        lam = B.sigma.flat[:, None]

        denominator = 1 - np.conj(lam) * w
        factors = (lam - w) / denominator
        weights = (1 - np.abs(lam) ** 2) / denominator ** 2

        ones = np.ones((1, w.size), dtype=complex)
        before = np.vstack([ones, np.cumprod(factors, axis=0)])
        after = np.vstack([np.cumprod(factors[::-1], axis=0)[::-1], ones])
        others = before[:-1] * after[1:]

        value = -np.sum(weights * others, axis=0)
        return complex(value[0]) if scalar else value

    """
    Both sides of |b_l(z)|^2 = 1 + (|z|^2 - 1)(1 - |l|^2)/|1 - conj(l) z|^2 on |z| < 1/|l|.
    """
    @staticmethod
    def modulus_identity(lam : complex, z : complex) -> tuple[float, float]:
        lam, z = complex(lam), complex(z)

        if abs(lam) * abs(z) >= 1:
            raise DomainError(f"Point {z} is outside the disc of radius 1/|{lam}|")

        lhs = abs(Blaschke.eval_factor(lam, z)) ** 2
        rhs = 1 + (abs(z) ** 2 - 1) * (1 - abs(lam) ** 2) / abs(1 - lam.conjugate() * z) ** 2
        return float(lhs), float(rhs)

    """
    Taylor coefficients of B up to degree D.
    """
    @staticmethod
    def expand_product(B : BlaschkeProduct, D : int) -> TaylorSeries:
        coeffs = np.zeros(D + 1, dtype=complex)
        coeffs[0] = 1
        for lam in B.sigma.flat:
            coeffs = times_factor(coeffs, lam)

        return TaylorSeries(coeffs, D, False)

    """
    Evaluate the Blaschke product of a node set at one point of the disc

    @param sigma: Path to the node set JSON file
    @param re: Real part of the point
    @param im: Imaginary part of the point
    """
    @staticmethod
    def evaluate(sigma : str, re : float, im : float = 0.0):
        logger = logging.getLogger(__name__)

        B = BlaschkeProduct(NodeSet.load(sigma))
        value = Blaschke.eval_product(B, complex(re, im))

        logger.info(f"B({complex(re, im)}) for n={B.sigma.n}, r={B.sigma.r:.6g}")
        print(json.dumps({"re": value.real, "im": value.imag, "abs": abs(value)}, sort_keys=True))

        return value

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("Available commands for blaschke module:")
        logger.info("  evaluate <sigma(str)> <re(float)> [im(float)]: Evaluate B_sigma at re + i im")
