import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from modules.module import Module, DomainError, InputError, NotOuterSafeError

DEFAULT_DEGREE_CAP = 256
MAX_DEGREE_CAP = 1 << 15
LOG_TAIL_TOLERANCE = math.log(1e-16)
QUADRATURE_POINTS = 4096
OUTER_MARGIN_RADIUS = 1.02

HARDY = "hardy"
WEIGHTED = "weighted"

"""
Truncated Taylor series: coefficient of z^k at index k, up to degree_cap.
exact is true when the stored polynomial is the whole function.
"""
@dataclass(frozen=True, eq=False)
class TaylorSeries:
    coeffs : np.ndarray
    degree_cap : int
    exact : bool = True

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).ravel()

        if self.degree_cap < 0 or len(coeffs) != self.degree_cap + 1:
            raise DomainError(f"Expected {self.degree_cap + 1} coefficients, got {len(coeffs)}")

        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs, degree_cap : int|None = None, exact : bool = True) -> "TaylorSeries":
        coeffs = np.array(coeffs, dtype=complex).ravel()
        if len(coeffs) == 0:
            coeffs = np.zeros(1, dtype=complex)

        if degree_cap is None:
            degree_cap = len(coeffs) - 1

        if len(coeffs) > degree_cap + 1:
            if np.any(coeffs[degree_cap + 1:] != 0):
                exact = False
            coeffs = coeffs[:degree_cap + 1]
        else:
            coeffs = np.concatenate([coeffs, np.zeros(degree_cap + 1 - len(coeffs), dtype=complex)])

        return cls(coeffs, degree_cap, exact)

    """
    Build a series from JSON entries: numbers, [re, im] pairs or {"re": .., "im": ..} objects.
    """
    @classmethod
    def from_json(cls, payload) -> "TaylorSeries":
        return cls.from_coeffs(parse_complex_list(payload))

    @classmethod
    def load(cls, path : str) -> "TaylorSeries":
        return cls.from_json(read_json(path))

    @property
    def degree(self) -> int:
        nonzero = np.flatnonzero(self.coeffs)
        return int(nonzero[-1]) if len(nonzero) else 0

    def padded(self, degree_cap : int) -> np.ndarray:
        out = np.zeros(degree_cap + 1, dtype=complex)
        keep = min(degree_cap, self.degree_cap) + 1
        out[:keep] = self.coeffs[:keep]
        return out

    def to_json(self) -> list[dict]:
        return [{"re": float(c.real), "im": float(c.imag)} for c in self.coeffs[:self.degree + 1]]


"""
The coefficient space X: Hardy H^p (p in [1, inf]) or the weighted space
l^2_a((k+1)^alpha) with alpha in [-1, 0].
"""
@dataclass(frozen=True)
class SpaceSpec:
    kind : str
    value : float

    def __post_init__(self):
        if self.kind == HARDY:
            if not 1 <= self.value <= math.inf:
                raise DomainError(f"Hardy exponent must lie in [1, inf], got {self.value}")
        elif self.kind == WEIGHTED:
            if not -1 <= self.value <= 0:
                raise DomainError(f"Weight exponent must lie in [-1, 0], got {self.value}")
        else:
            raise DomainError(f"Unknown space kind {self.kind}")

    @classmethod
    def hardy(cls, p : float) -> "SpaceSpec":
        return cls(HARDY, float(p))

    @classmethod
    def weighted(cls, alpha : float) -> "SpaceSpec":
        return cls(WEIGHTED, float(alpha))

    """
    Parse h2, h1, hinf, hp:<p>, bergman or w2:<alpha>.
    """
    @classmethod
    def parse(cls, text : str) -> "SpaceSpec":
        label = text.strip().lower()

        try:
            if label == "h2":
                return cls.hardy(2)
            if label == "h1":
                return cls.hardy(1)
            if label in ("hinf", "h-infinity", "hinfty"):
                return cls.hardy(math.inf)
            if label == "bergman":
                return cls.weighted(-0.5)
            if label.startswith("hp:"):
                return cls.hardy(float(label[3:]))
            if label.startswith("w2:"):
                return cls.weighted(float(label[3:]))
        except (ValueError, DomainError) as e:
            raise InputError(f"Invalid space {text}: {e}")

        raise InputError(f"Unknown space {text} (expected h2, h1, hinf, hp:<p>, bergman or w2:<alpha>)")

    @property
    def p(self) -> float:
        return self.value if self.kind == HARDY else 2.0

    @property
    def alpha(self) -> float:
        if self.kind == WEIGHTED:
            return self.value
        if self.value == 2:
            return 0.0
        raise DomainError(f"{self.label} is not a weighted Hilbert space")

    @property
    def is_hilbert(self) -> bool:
        return self.kind == WEIGHTED or self.value == 2

    @property
    def is_even_hardy(self) -> bool:
        return self.kind == HARDY and math.isfinite(self.value) and self.value % 2 == 0

    @property
    def label(self) -> str:
        if self.kind == HARDY:
            if self.value == 2:
                return "h2"
            if self.value == 1:
                return "h1"
            if math.isinf(self.value):
                return "hinf"
            return f"hp:{self.value:g}"

        if self.value == -0.5:
            return "bergman"
        return f"w2:{self.value:g}"


def read_json(path : str):
    try:
        with open(path, "r") as file:
            return json.load(file)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {path}: {e}")

def parse_part(part, entry) -> float:
    if isinstance(part, bool) or not isinstance(part, (int, float)):
        raise InputError(f"Not a complex number: {entry}")
    if not math.isfinite(part):
        raise InputError(f"Non-finite complex number: {entry}")
    return float(part)

def parse_complex(entry) -> complex:
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(parse_part(entry[0], entry), parse_part(entry[1], entry))
    if isinstance(entry, dict) and "re" in entry:
        return complex(parse_part(entry["re"], entry), parse_part(entry.get("im", 0.0), entry))

    return complex(parse_part(entry, entry))

def parse_complex_list(payload) -> list[complex]:
    if not isinstance(payload, list) or len(payload) == 0:
        raise InputError("Expected a non-empty JSON list of complex numbers")

    return [parse_complex(entry) for entry in payload]


"""
Function arithmetic on truncated Taylor series.
"""
class Analytic(Module):
    def __init__(self):
        super().__init__("analytic")

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("The analytic module has no commands; it provides Taylor series, space norms and Fejer multipliers to the other modules.")

    """
    Global truncation degree for a problem with n nodes of modulus at most r.
    Starts at max(256, 8n) and grows until the coefficient tail C(D+k, k) r^D of the
    slowest-decaying expansion (k = n + extra) drops below 1e-16.
    """
    @staticmethod
    def default_degree_cap(n : int, r : float = 0.0, extra : int = 0) -> int:
        logger = logging.getLogger(__name__)

        degree_cap = max(DEFAULT_DEGREE_CAP, 8 * n)
        if r <= 0:
            return degree_cap

        k = n + extra
        log_r = math.log(r)

        def log_tail(d):
            return gammaln(d + k + 1) - gammaln(d + 1) - gammaln(k + 1) + d * log_r

        while log_tail(degree_cap) > LOG_TAIL_TOLERANCE:
            degree_cap = int(degree_cap * 1.25) + 1

            if degree_cap > MAX_DEGREE_CAP:
                logger.warning(f"Degree cap clamped to {MAX_DEGREE_CAP} for n={n}, r={r}")
                return MAX_DEGREE_CAP

        return degree_cap

    @staticmethod
    def quadrature_size(degree : int) -> int:
        return max(QUADRATURE_POINTS, 8 * (degree + 1))

    @staticmethod
    def evaluate(f : TaylorSeries, z : complex) -> complex:
        z = complex(z)
        if abs(z) >= 1:
            raise DomainError(f"Evaluation point {z} is outside the open unit disc")

        return complex(np.polynomial.polynomial.polyval(z, f.coeffs))

    @staticmethod
    def cauchy_pairing(h : TaylorSeries, g : TaylorSeries) -> complex:
        shared = min(len(h.coeffs), len(g.coeffs))
        return complex(np.vdot(g.coeffs[:shared], h.coeffs[:shared]))

    """
    Inner product of WeightedA2(alpha): sum of h(k) conj(g(k)) (k+1)^(2 alpha).
    """
    @staticmethod
    def weighted_pairing(h : TaylorSeries, g : TaylorSeries, alpha : float) -> complex:
        shared = min(len(h.coeffs), len(g.coeffs))
        weights = np.arange(1, shared + 1, dtype=float) ** (2 * alpha)
        return complex(np.sum(h.coeffs[:shared] * np.conj(g.coeffs[:shared]) * weights))

    """
    Values of the stored polynomial at the M-th roots of unity, index j at exp(2 pi i j / M).
    """
    @staticmethod
    def boundary_values(f : TaylorSeries, M : int|None = None) -> np.ndarray:
        degree = f.degree
        if M is None:
            M = Analytic.quadrature_size(degree)

        if M < degree + 1:
            raise RuntimeError(f"Quadrature size {M} is below the Nyquist threshold for degree {degree}")

        padded = np.zeros(M, dtype=complex)
        padded[:degree + 1] = f.coeffs[:degree + 1]
        return np.fft.ifft(padded) * M

    @staticmethod
    def space_norm(f : TaylorSeries, X : SpaceSpec) -> float:
        logger = logging.getLogger(__name__)

        if X.kind == WEIGHTED or (X.value == 2 and not f.exact):
            weights = np.arange(1, len(f.coeffs) + 1, dtype=float) ** (2 * X.alpha)
            return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2 * weights)))

        modulus = np.abs(Analytic.boundary_values(f))

        if math.isinf(X.value):
            return float(np.max(modulus))

        if not f.exact:
            raise DomainError("Hardy norms with p < inf, p != 2 need an exact polynomial")

        if not X.is_even_hardy:
            logger.debug(f"H^{X.value:g} norm of a degree {f.degree} polynomial is a quadrature approximation ({len(modulus)} points)")

        return float(np.mean(modulus ** X.value) ** (1 / X.value))

    @staticmethod
    def derivative(f : TaylorSeries) -> TaylorSeries:
        if f.degree_cap == 0:
            return TaylorSeries(np.zeros(1), 0, f.exact)

        k = np.arange(1, f.degree_cap + 1)
        return TaylorSeries(f.coeffs[1:] * k, f.degree_cap - 1, f.exact)

    """
    m = n/2 for even n and (n+1)/2 for odd n.
    """
    @staticmethod
    def fejer_order(n : int) -> int:
        if n < 1:
            raise DomainError(f"Fejer order needs n >= 1, got {n}")

        return n // 2 if n % 2 == 0 else (n + 1) // 2

    """
    Analytic-side coefficients of F_n = Phi_m + z^m Phi_m for j = 0..n, with the Fejer
    window Phi_m(j) = 1 - |j|/(m+1) on |j| <= m.
    """
    @staticmethod
    def fejer_multiplier(n : int) -> TaylorSeries:
        m = Analytic.fejer_order(n)
        j = np.arange(n + 1)

        def window(k):
            return np.clip(1.0 - np.abs(k) / (m + 1), 0.0, None)

        return TaylorSeries(window(j) + window(j - m), n, True)

    @staticmethod
    def multiplier_apply(f : TaylorSeries, mult : TaylorSeries) -> TaylorSeries:
        degree_cap = min(f.degree_cap, mult.degree_cap)
        coeffs = f.coeffs[:degree_cap + 1] * mult.coeffs[:degree_cap + 1]
        exact = mult.exact or (f.exact and f.degree <= degree_cap)
        return TaylorSeries(coeffs, degree_cap, exact)

    """
    True when f has no zero in the closed disc of radius 1.02: the minimum modulus on that
    circle is bounded away from zero and the winding number of f around 0 is zero.
    """
    @staticmethod
    def is_outer_safe(f : TaylorSeries) -> bool:
        logger = logging.getLogger(__name__)

        circle = OUTER_MARGIN_RADIUS * np.exp(2j * np.pi * np.arange(QUADRATURE_POINTS) / QUADRATURE_POINTS)
        values = np.polynomial.polynomial.polyval(circle, f.coeffs[:f.degree + 1])
        modulus = np.abs(values)

        if modulus.min() <= 1e-12 * max(1.0, modulus.max()):
            logger.debug("Zero on the margin circle")
            return False

        phase = np.unwrap(np.angle(np.append(values, values[0])))
        winding = int(round((phase[-1] - phase[0]) / (2 * np.pi)))

        if winding != 0:
            logger.debug(f"Winding number {winding} on the margin circle")

        return winding == 0

    """
    Truncation to degree D of exp(exponent * log f), principal branch fixed by f(0).

    @param f: exact polynomial without zeros in the closed disc of radius 1.02
    @param exponent: positive rational (Fraction, int or float)
    @param D: degree cap of the result (default: 256)
    """
    @staticmethod
    def zero_free_power(f : TaylorSeries, exponent : Fraction|float, D : int|None = None) -> TaylorSeries:
        logger = logging.getLogger(__name__)

        if D is None:
            D = DEFAULT_DEGREE_CAP

        exponent = Fraction(exponent).limit_denominator(10 ** 9) if not isinstance(exponent, Fraction) else exponent
        if exponent <= 0:
            raise DomainError(f"Exponent must be positive, got {exponent}")

        if not f.exact:
            raise DomainError("zero_free_power needs an exact polynomial")

        if not Analytic.is_outer_safe(f):
            raise NotOuterSafeError("not outer-safe: f has a zero in the closed unit disc (margin 0.02)")

        coeffs = f.coeffs[:f.degree + 1]

        if exponent.denominator == 1:
            power = np.polynomial.polynomial.polypow(coeffs, int(exponent))
            exact = len(power) <= D + 1
            return TaylorSeries.from_coeffs(power[:D + 1], D, exact)

        # log f from the coefficients of f'/f sampled on the unit circle
        M = 1 << math.ceil(math.log2(Analytic.quadrature_size(max(D, f.degree))))
        circle = np.exp(2j * np.pi * np.arange(M) / M)
        values = np.polynomial.polynomial.polyval(circle, coeffs)
        slopes = np.polynomial.polynomial.polyval(circle, np.polynomial.polynomial.polyder(coeffs)) if len(coeffs) > 1 else np.zeros(M)

        ratio = np.fft.fft(slopes / values) / M
        log_coeffs = np.zeros(M, dtype=complex)
        log_coeffs[0] = np.log(coeffs[0])
        log_coeffs[1:] = ratio[:M - 1] / np.arange(1, M)

        log_values = np.fft.ifft(log_coeffs) * M
        power = np.fft.fft(np.exp(float(exponent) * log_values)) / M

        logger.debug(f"Fractional power {exponent} of a degree {f.degree} polynomial on {M} points")

        return TaylorSeries(power[:D + 1], D, False)
