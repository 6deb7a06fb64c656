import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from config import RunConfig
from modules.analytic import Analytic, SpaceSpec, TaylorSeries, HARDY, QUADRATURE_POINTS
from modules.blaschke import Blaschke, BlaschkeProduct, NodeSet
from modules.model_space import GRID_ANGLES, RADIAL_STEPS, KernelSpec, ModelSpace, evaluate_rows
from modules.module import Module, DomainError, InputError, NotOuterSafeError, OrderingViolation, UnsupportedSpaceError
from modules.report import Report
from modules.solvers import DEFAULT_BUDGET, Solvers, run_ordered

ORDERING_TOLERANCE = 1e-6
NORM_SLACK = 1e-8
C1_LIMIT_RADIUS = 0.05
DISC_GRID_SIZE = RADIAL_STEPS * GRID_ANGLES

LOWER = "lower"
UPPER = "upper"
CONSTANT = "constant"
CONJECTURE = "conjecture"

"""
One named value of a bound or estimate for a node family (n, r) in a space.
grid is the number of sample points behind a supremum (0 for closed forms).
"""
@dataclass
class BoundReport:
    name : str
    side : str
    space : str
    n : int
    r : float
    value : float
    grid : int = 0
    note : str = ""

    def to_row(self) -> list:
        return [self.name, self.side, self.space, self.n, Report.format_float(self.r), Report.format_float(self.value), self.grid]

    def to_dict(self) -> dict:
        payload = {"name": self.name, "side": self.side, "space": self.space, "n": self.n, "r": self.r, "value": self.value, "grid": self.grid}
        if self.note:
            payload["note"] = self.note
        return payload


@dataclass(frozen=True)
class BernsteinConstant:
    value : float
    cap : float
    exact : bool


"""
Lower-bound witness for the node family {-r mult n}: psi lives on the composed side
(quotient over z^n), Psi = b Q^N is the function of norm at most 1 in the space.
"""
@dataclass(frozen=True, eq=False)
class Witness:
    psi : TaylorSeries
    Psi : TaylorSeries
    scale : float
    weighted_norm : float


@dataclass(frozen=True)
class PartialSumCheck:
    total : float
    floor : float
    combinatorial : Fraction
    combinatorial_floor : Fraction


def circle_points(M : int = QUADRATURE_POINTS) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(M) / M)

def check_ordering(rows : list[BoundReport]):
    """Every lower row must sit below every upper row of the same space."""
    for space in dict.fromkeys(row.space for row in rows):
        lower = [row for row in rows if row.space == space and row.side == LOWER]
        upper = [row for row in rows if row.space == space and row.side == UPPER]

        for low in lower:
            for high in upper:
                if low.value > high.value + ORDERING_TOLERANCE:
                    raise OrderingViolation(f"{low.name}={low.value:.12g} exceeds {high.name}={high.value:.12g} in {space}")

def check_chain(rows : list[BoundReport]):
    """Consecutive rows must be nondecreasing."""
    for low, high in zip(rows, rows[1:]):
        if low.value > high.value + ORDERING_TOLERANCE:
            raise OrderingViolation(f"{low.name}={low.value:.12g} exceeds {high.name}={high.value:.12g} in {low.space}")

def convolve_prefix(a : list, b : list, length : int) -> list:
    """First length coefficients of a * b in exact arithmetic."""
    out = []
    for j in range(length):
        out.append(sum(a[i] * b[j - i] for i in range(max(0, j - len(b) + 1), min(j, len(a) - 1) + 1)))
    return out

def parse_grid(text : str) -> list[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise InputError(f"Malformed r grid: {text}")

    if not values:
        raise InputError("The r grid is empty")

    for r in values:
        if not 0 <= r < 1:
            raise InputError(f"r must lie in [0, 1), got {r}")

    return values

def random_sigma(rng : np.random.Generator, n : int, r : float) -> NodeSet:
    """n simple nodes; the first has modulus exactly r, the others modulus at most r."""
    moduli = r * np.sqrt(rng.uniform(size=n))
    moduli[0] = r
    angles = rng.uniform(0, 2 * np.pi, size=n)
    return NodeSet.from_points(moduli * np.exp(1j * angles))


"""
Closed-form upper bounds, the lower-bound witness pipeline and the Bernstein constant,
plus the report, sandwich, table and bernstein commands.
"""
class Bounds(Module):
    COMMANDS = ("report", "sandwich", "table", "bernstein")

    def __init__(self):
        super().__init__("bounds")

    """
    sup ((1 - |B(z)|^2) / (1 - |z|^2))^(1/2) over the disc grid, together with its radial
    boundary limit |B'(w)|^(1/2) on the circle.
    """
    @staticmethod
    def ub_energy(B : BlaschkeProduct) -> float:
        z = ModelSpace.disc_grid()
        inside = (1 - np.abs(Blaschke.eval_product(B, z)) ** 2) / (1 - np.abs(z) ** 2)
        boundary = np.abs(Blaschke.boundary_derivative(B, circle_points()))
        return float(np.sqrt(max(np.max(inside), np.max(boundary), 0.0)))

    @staticmethod
    def ub_bprime(B : BlaschkeProduct) -> float:
        return float(math.sqrt(2) * np.sqrt(np.max(np.abs(Blaschke.boundary_derivative(B, circle_points())))))

    @staticmethod
    def ub_poisson(sigma : NodeSet) -> float:
        w = circle_points()[None, :]
        lam = sigma.flat[:, None]
        total = np.sum((1 - np.abs(lam) ** 2) / np.abs(w - lam) ** 2, axis=0)
        return float(np.sqrt(np.max(total)))

    @staticmethod
    def ub_simple(sigma : NodeSet) -> float:
        moduli = np.abs(sigma.flat)
        return float(np.sqrt(np.sum((1 + moduli) / (1 - moduli))))

    """
    sup |e_k| on the unit circle, attained at w = lam/|lam|.
    """
    @staticmethod
    def malmquist_sup_norm(lam : complex) -> float:
        t = abs(complex(lam))
        if t >= 1:
            raise DomainError(f"Node {lam} is outside the open unit disc")
        return math.sqrt((1 + t) / (1 - t))

    """
    (sum_k ||e_k||_inf^2)^(1/2) with each sup taken on the circle grid.
    """
    @staticmethod
    def ub_basis_sup(sigma : NodeSet) -> float:
        w = circle_points()
        total = 0.0
        for k in range(sigma.n):
            total += float(np.max(np.abs(ModelSpace.malmquist_eval(sigma, k, w)))) ** 2
        return math.sqrt(total)

    """
    (sum_k ||u_k||_inf^2)^(1/2) over the orthonormal basis u_k of the model space in
    WeightedA2(alpha), each sup taken on the closed disc points of the model space.
    """
    @staticmethod
    def ub_weighted_basis_sup(sigma : NodeSet, space : SpaceSpec) -> float:
        if not space.is_hilbert:
            raise UnsupportedSpaceError(f"No weighted basis bound for {space.label}")

        U = ModelSpace.weighted_model_basis(sigma, KernelSpec(space.alpha))
        values = evaluate_rows(U, ModelSpace.closed_disc_points(sigma))
        return float(np.sqrt(np.sum(np.max(np.abs(values), axis=1) ** 2)))

    """
    Closed-form upper bound of C_{n,r}(X, H^inf)

    @param space: Hardy or weighted space; general H^p uses the heuristic constant 2^(1/p)
    """
    @staticmethod
    def ub_cnr(space : SpaceSpec, n : int, r : float) -> float:
        logger = logging.getLogger(__name__)

        if n < 1 or not 0 <= r < 1:
            raise DomainError(f"Need n >= 1 and r in [0, 1), got n={n}, r={r}")

        ratio = n / (1 - r)

        if space.kind == HARDY:
            p = space.p
            if math.isinf(p):
                return 1.0
            if p == 1:
                return 2 * ratio
            if p == 2:
                return math.sqrt(2) * math.sqrt(ratio)

            logger.warning(f"ub_cnr for {space.label} uses the heuristic constant 2^(1/p)")
            return 2 ** (1 / p) * ratio ** (1 / p)

        alpha = space.alpha
        if alpha == 0:
            return math.sqrt(2) * math.sqrt(ratio)
        if alpha == -0.5:
            return 10 ** 0.25 * math.sqrt(2) * ratio
        if alpha == -1:
            return 2 * math.sqrt(10) * ratio ** 1.5

        theta = -alpha
        constant = math.sqrt(2) ** (1 - theta) * (2 * math.sqrt(10)) ** theta
        return constant * ratio ** ((1 - theta) / 2 + 3 * theta / 2)

    """
    ||f'||_2 <= alpha ||f||_2 on K_B for n >= 2; below that only the cap 3n/(1-r) is available.
    """
    @staticmethod
    def bernstein_alpha(n : int, r : float) -> BernsteinConstant:
        logger = logging.getLogger(__name__)

        if n < 1 or not 0 <= r < 1:
            raise DomainError(f"Need n >= 1 and r in [0, 1), got n={n}, r={r}")

        cap = 3 * n / (1 - r)
        if n < 2:
            logger.warning(f"Bernstein constant for n={n} falls back to the cap 3n/(1-r)")
            return BernsteinConstant(cap, cap, False)

        value = (1 + (1 + r) * (n - 1) + math.sqrt(n - 2)) / (1 - r)
        return BernsteinConstant(value, cap, True)

    """
    Largest ||f'||_2 / ||f||_2 over random f in K_B for a random node set with first
    modulus r.
    """
    @staticmethod
    def bernstein_empirical(n : int, r : float, trials : int = 1000, seed : int = 0) -> float:
        logger = logging.getLogger(__name__)

        if trials < 1:
            raise InputError(f"trials must be at least 1, got {trials}")

        rng = np.random.default_rng(seed)
        sigma = random_sigma(rng, n, r)

        D = ModelSpace.degree_cap_for(sigma, extra=2)
        E = ModelSpace.malmquist_basis(sigma, D).coefficients

        A = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
        F = A @ E
        derivative = F[:, 1:] * np.arange(1, D + 1)

        ratios = np.linalg.norm(derivative, axis=1) / np.linalg.norm(F, axis=1)
        worst = float(np.max(ratios))

        logger.debug(f"Bernstein ratio {worst:.12g} over {trials} trials, n={n}, r={r}")

        return worst

    @staticmethod
    def eval_functional_norm(space : SpaceSpec, t : float) -> float:
        if not 0 <= t < 1:
            raise DomainError(f"t must lie in [0, 1), got {t}")

        if not space.is_hilbert:
            raise UnsupportedSpaceError(f"No evaluation functional norm for {space.label}")

        alpha = space.alpha
        x = t * t
        if alpha == 0:
            return 1 / math.sqrt(1 - x)
        if alpha == -0.5:
            return 1 / (1 - x)
        if alpha == -1:
            return math.sqrt((1 + x) / (1 - x) ** 3)

        D = Analytic.default_degree_cap(1, x, extra=1)
        k = np.arange(D + 1)
        return float(np.sqrt(np.sum((k + 1.0) ** (-2 * alpha) * x ** k)))

    """
    Evaluation functional norm at 1 - (1-r)/n; a display value, never asserted.
    """
    @staticmethod
    def conjecture_envelope(space : SpaceSpec, n : int, r : float) -> float:
        return Bounds.eval_functional_norm(space, 1 - (1 - r) / n)

    """
    psi = b (1-r^2)^(-N/2) psi_1^N with psi_1 = 1 + (1+r)(z + ... + z^(n-1)) + r z^n and
    b = n^(-N/2). Psi = b Q^N with Q the sum of the Malmquist functions of {-r mult n};
    its norm in the weighted space of exponent (1-N)/2 must not exceed 1.
    """
    @staticmethod
    def lower_witness(n : int, r : float, N : int) -> Witness:
        logger = logging.getLogger(__name__)

        if n < 1 or not 0 <= r < 1 or N not in (1, 2):
            raise DomainError(f"Witness needs n >= 1, r in [0, 1), N in (1, 2); got n={n}, r={r}, N={N}")

        psi_1 = np.full(n + 1, 1 + r)
        psi_1[0] = 1
        psi_1[n] = r

        scale = n ** (-N / 2)
        psi = scale * (1 - r * r) ** (-N / 2) * np.polynomial.polynomial.polypow(psi_1, N)

        sigma = NodeSet.single(-r, n)
        D = ModelSpace.degree_cap_for(sigma, extra=2)
        Q = np.sum(ModelSpace.malmquist_basis(sigma, D).coefficients, axis=0)
        Psi = scale * (Q if N == 1 else fftconvolve(Q, Q)[:D + 1])

        alpha = (1 - N) / 2
        norm = float(np.sqrt(np.sum(np.abs(Psi) ** 2 * np.arange(1, D + 2, dtype=float) ** (2 * alpha))))
        if norm ** 2 > 1 + NORM_SLACK:
            raise OrderingViolation(f"Witness norm squared {norm ** 2:.12g} exceeds 1 (n={n}, r={r}, N={N})")

        logger.debug(f"Witness for n={n}, r={r}, N={N}: weighted norm {norm:.12g}")

        return Witness(TaylorSeries.from_coeffs(psi), TaylorSeries(Psi, D, False), scale, norm)

    """
    Partial sum of the witness coefficients up to m against its floor, with the
    intermediate floors checked in exact rational arithmetic.
    """
    @staticmethod
    def partial_sum_check(n : int, r : float, N : int) -> PartialSumCheck:
        if n < 1 or not 0 <= r < 1 or N not in (1, 2):
            raise DomainError(f"Partial sums need n >= 1, r in [0, 1), N in (1, 2); got n={n}, r={r}, N={N}")

        m = Analytic.fejer_order(n)
        exact_r = Fraction(repr(r))

        psi_1 = [Fraction(1)] + [1 + exact_r] * (n - 1) + [exact_r]
        ones = [Fraction(1)] * n
        if N == 2:
            psi_1 = convolve_prefix(psi_1, psi_1, m + 1)
            ones = convolve_prefix(ones, ones, m + 1)

        partial = sum(psi_1[:m + 1])
        combinatorial = sum(ones[:m + 1])
        combinatorial_floor = Fraction(n, 2) if N == 1 else Fraction(n * n, 8)

        if combinatorial < combinatorial_floor:
            raise OrderingViolation(f"Combinatorial partial sum {combinatorial} is below {combinatorial_floor} (n={n}, N={N})")
        if partial < combinatorial:
            raise OrderingViolation(f"Witness partial sum {partial} is below the combinatorial sum {combinatorial} (n={n}, N={N})")

        scale = n ** (-N / 2) * (1 - r * r) ** (-N / 2)
        total = scale * float(partial)
        if N == 1:
            floor = math.sqrt(n / (1 - r)) / (2 * math.sqrt(2))
        else:
            floor = n / (16 * (1 - r))

        if total < floor * (1 - 1e-12):
            raise OrderingViolation(f"Partial sum {total:.12g} is below its floor {floor:.12g} (n={n}, r={r}, N={N})")

        return PartialSumCheck(total, floor, combinatorial, combinatorial_floor)

    """
    Half the sup norm of (psi mod z^n) * F_n on the circle. Only coefficients below n
    enter the multiplier, so the value stays below the quotient norm over z^n.
    """
    @staticmethod
    def fejer_lower_estimate(psi : TaylorSeries, n : int) -> float:
        m = Analytic.fejer_order(n)
        reduced = TaylorSeries.from_coeffs(psi.coeffs[:n], n)
        smoothed = Analytic.multiplier_apply(reduced, Analytic.fejer_multiplier(n))
        value = 0.5 * float(np.max(np.abs(Analytic.boundary_values(smoothed))))

        floor = 0.5 * float(np.sum(psi.coeffs[:min(m, n - 1) + 1].real))
        if value < floor - ORDERING_TOLERANCE:
            raise OrderingViolation(f"Fejer estimate {value:.12g} is below the partial sum floor {floor:.12g}")

        return value

    @staticmethod
    def lb_closed(space : SpaceSpec, n : int, lam_abs : float) -> float:
        if n < 1 or not 0 <= lam_abs < 1:
            raise DomainError(f"Need n >= 1 and |lambda| in [0, 1), got n={n}, |lambda|={lam_abs}")

        ratio = n / (1 - lam_abs)

        if space.is_even_hardy:
            return 32 ** (-1 / space.p) * ratio ** (1 / space.p)
        if space.kind != HARDY and space.alpha == 0:
            return ratio ** 0.5 / (4 * math.sqrt(2))
        if space.kind != HARDY and space.alpha == -0.5:
            return ratio / 32

        raise UnsupportedSpaceError(f"No closed lower bound for {space.label}")

    """
    F = f^(q/p) for p/q a positive integer. ||F||_p^p = ||f||_q^q is checked by quadrature.
    """
    @staticmethod
    def outer_power_witness(f : TaylorSeries, p : float, q : float, D : int|None = None) -> TaylorSeries:
        logger = logging.getLogger(__name__)

        ratio = Fraction(p).limit_denominator(10 ** 6) / Fraction(q).limit_denominator(10 ** 6)
        if ratio.denominator != 1 or ratio < 1:
            raise DomainError(f"p/q must be a positive integer, got p={p}, q={q}")

        F = Analytic.zero_free_power(f, Fraction(1, int(ratio)), D)

        lhs = float(np.mean(np.abs(Analytic.boundary_values(F)) ** p))
        rhs = float(np.mean(np.abs(Analytic.boundary_values(f)) ** q))
        if abs(lhs - rhs) > 1e-8 * max(1.0, rhs):
            logger.warning(f"||F||_p^p = {lhs:.12g} differs from ||f||_q^q = {rhs:.12g}")

        return F

    """
    Growth factor of the Malmquist functions on the circle of radius 2/(1+r):
    (1+r)/(1-r) (2 (1 + (3+r)(1+r))^(n-1))^(1/2), the exact maximum of the modulus
    identity on that circle over |lambda| <= r.
    """
    @staticmethod
    def malmquist_growth_factor(n : int, r : float) -> float:
        if n < 1 or not 0 <= r < 1:
            raise DomainError(f"Need n >= 1 and r in [0, 1), got n={n}, r={r}")

        log_factor = math.log((1 + r) / (1 - r)) + 0.5 * (math.log(2) + (n - 1) * math.log(1 + (3 + r) * (1 + r)))
        return float(np.exp(log_factor))

    """
    Explicit bound of the Malmquist functions on the circle of radius 2/(r+1):
    (1 - 2r/(r+1))^-1 (2 prod_{j<n} (1 + 2(1/r^2 - 1)/(1 - 4r^2/(r+1)^2)))^(1/2).
    The factor is singular at r = 0, so below C1_LIMIT_RADIUS the limit form (the growth
    factor, which uses the exact per-factor maximum) is returned instead.
    """
    @staticmethod
    def c1_factor(n : int, r : float) -> float:
        logger = logging.getLogger(__name__)

        if n < 1 or not 0 <= r < 1:
            raise DomainError(f"Need n >= 1 and r in [0, 1), got n={n}, r={r}")

        if r < C1_LIMIT_RADIUS:
            logger.warning(f"c1_factor for r={r:g} < {C1_LIMIT_RADIUS} uses the limit form")
            return Bounds.malmquist_growth_factor(n, r)

        term = 2 * (1 / (r * r) - 1) / (1 - 4 * r * r / (r + 1) ** 2)
        log_factor = -math.log(1 - 2 * r / (r + 1)) + 0.5 * (math.log(2) + (n - 1) * math.log1p(term))
        return float(np.exp(log_factor))

    """
    Rows of the bound report for one node set; ordering is checked before returning.
    """
    @staticmethod
    def bound_rows(sigma : NodeSet, space : SpaceSpec) -> list[BoundReport]:
        logger = logging.getLogger(__name__)

        B = BlaschkeProduct(sigma)
        n, r = sigma.n, sigma.r
        circle = QUADRATURE_POINTS

        rows = [
            BoundReport("ub_energy", UPPER, "h2", n, r, Bounds.ub_energy(B), DISC_GRID_SIZE + circle),
            BoundReport("ub_bprime", UPPER, "h2", n, r, Bounds.ub_bprime(B), circle),
            BoundReport("ub_poisson", UPPER, "h2", n, r, Bounds.ub_poisson(sigma), circle),
            BoundReport("ub_simple", UPPER, "h2", n, r, Bounds.ub_simple(sigma)),
            BoundReport("ub_basis_sup", UPPER, "h2", n, r, Bounds.ub_basis_sup(sigma), circle),
            BoundReport("ub_cnr", UPPER, space.label, n, r, Bounds.ub_cnr(space, n, r)),
        ]

        if space.kind == HARDY and space.p not in (1, 2, math.inf):
            rows[-1].note = "heuristic constant"

        bernstein = Bounds.bernstein_alpha(n, r)
        rows.append(BoundReport("bernstein_alpha", CONSTANT, "h2", n, r, bernstein.value, note="" if bernstein.exact else "cap"))
        rows.append(BoundReport("c1_factor", CONSTANT, "h2", n, r, Bounds.c1_factor(n, r), note="limit-form" if r < C1_LIMIT_RADIUS else ""))
        rows.append(BoundReport("malmquist_growth_factor", CONSTANT, "h2", n, r, Bounds.malmquist_growth_factor(n, r)))

        moduli = np.abs(sigma.flat)
        rows.append(BoundReport("eval_functional_norm", LOWER, "h2", n, r, Bounds.eval_functional_norm(SpaceSpec.hardy(2), float(moduli.max()))))

        if space.is_hilbert and space.label != "h2":
            rows.append(BoundReport("eval_functional_norm", LOWER, space.label, n, r, Bounds.eval_functional_norm(space, float(moduli.max()))))

        if space.is_hilbert:
            spec = KernelSpec(space.alpha)
            grid = DISC_GRID_SIZE + n + circle
            rows.append(BoundReport("projected_kernel_bound", UPPER, space.label, n, r, ModelSpace.projected_kernel_bound(sigma, spec), grid))
            rows.append(BoundReport("ub_weighted_basis_sup", UPPER, space.label, n, r, Bounds.ub_weighted_basis_sup(sigma, space), grid))

        check_ordering(rows)

        logger.debug(f"{len(rows)} bound rows for n={n}, r={r:.6g} in {space.label}")

        return rows

    """
    Rows of the sandwich experiment for the family {-r mult n}.
    """
    @staticmethod
    def sandwich_rows(n : int, r : float, space : SpaceSpec, N : int|None = None, seed : int = 0, budget : int = DEFAULT_BUDGET) -> list[BoundReport]:
        logger = logging.getLogger(__name__)

        label = space.label
        sigma = NodeSet.single(-r, n)

        if space.kind == HARDY and math.isinf(space.p):
            one = TaylorSeries.from_coeffs([1.0])
            rows = [
                BoundReport("eval_functional_norm", LOWER, label, n, r, 1.0),
                BoundReport("witness_quotient", LOWER, label, n, r, Solvers.quotient_norm(one, NodeSet.single(0, n))),
                BoundReport("c_sigma_estimate", LOWER, label, n, r, 1.0),
                BoundReport("ub_cnr", UPPER, label, n, r, Bounds.ub_cnr(space, n, r)),
            ]
            check_chain(rows)
            return rows

        if space.is_even_hardy and label != "h2":
            return Bounds._even_hardy_sandwich(n, r, space, N, seed, budget)

        if label in ("h2", "w2:0"):
            expected = 1
        elif label == "bergman":
            expected = 2
        else:
            raise InputError(f"The sandwich supports h2, bergman, hinf and hp:<even p>, got {label}")

        if N is None:
            N = expected
        elif N != expected:
            raise InputError(f"The {label} sandwich uses N={expected}, got N={N}")

        witness = Bounds.lower_witness(n, r, N)
        quotient = Solvers.quotient_norm(witness.psi, NodeSet.single(0, n))
        fejer = Bounds.fejer_lower_estimate(witness.psi, n)
        estimate = Solvers.c_sigma_estimate(sigma, space, budget, seed, extra_starts=(witness.Psi,))

        lower = BoundReport("lb_closed", LOWER, label, n, r, Bounds.lb_closed(space, n, r))
        fejer_row = BoundReport("fejer_lower_estimate", LOWER, label, n, r, fejer, QUADRATURE_POINTS)
        witness_row = BoundReport("witness_quotient", LOWER, label, n, r, quotient)
        estimate_row = BoundReport("c_sigma_estimate", LOWER, label, n, r, estimate.value, note=estimate.route)
        upper = BoundReport("ub_cnr", UPPER, label, n, r, Bounds.ub_cnr(space, n, r))

        check_chain([lower, witness_row, estimate_row, upper])
        check_chain([fejer_row, witness_row])

        logger.debug(f"Sandwich n={n}, r={r}, {label}: {lower.value:.6g} <= {quotient:.6g} <= {estimate.value:.6g} <= {upper.value:.6g}")

        return [lower, fejer_row, witness_row, estimate_row, upper]

    """
    Sandwich rows in H^p for even p. The witness is Psi^(2/p) for the N=1 witness Psi,
    which needs Psi zero-free on the closed disc; otherwise the row is left out. ub_cnr
    carries the heuristic constant, so the estimate is only compared against it in the log.
    """
    @staticmethod
    def _even_hardy_sandwich(n : int, r : float, space : SpaceSpec, N : int|None, seed : int, budget : int) -> list[BoundReport]:
        logger = logging.getLogger(__name__)

        if N not in (None, 1):
            raise InputError(f"The {space.label} sandwich builds on the N=1 witness, got N={N}")

        label = space.label
        sigma = NodeSet.single(-r, n)

        lower = BoundReport("lb_closed", LOWER, label, n, r, Bounds.lb_closed(space, n, r))
        chain = [lower]

        Psi = Bounds.lower_witness(n, r, 1).Psi
        try:
            F = Bounds.outer_power_witness(TaylorSeries.from_coeffs(Psi.coeffs), space.p, 2, Psi.degree_cap)
            chain.append(BoundReport("witness_quotient", LOWER, label, n, r, Solvers.quotient_norm(F, sigma)))
        except NotOuterSafeError as e:
            logger.info(f"No witness row for n={n}, r={r} in {label}: {e}")

        estimate = Solvers.c_sigma_estimate(sigma, space, budget, seed)
        estimate_row = BoundReport("c_sigma_estimate", LOWER, label, n, r, estimate.value, note=estimate.route)
        upper = BoundReport("ub_cnr", UPPER, label, n, r, Bounds.ub_cnr(space, n, r), note="heuristic constant")

        check_chain(chain + [upper])

        if not lower.value - ORDERING_TOLERANCE <= estimate.value <= upper.value + ORDERING_TOLERANCE:
            logger.warning(f"c_sigma_estimate {estimate.value:.6g} lies outside [{lower.value:.6g}, {upper.value:.6g}] in {label}")

        return chain + [estimate_row, upper]

    @staticmethod
    def table_cell(n : int, r : float, space : SpaceSpec, seed : int, budget : int, estimate : bool) -> list[BoundReport]:
        label = space.label
        sigma = NodeSet.single(-r, n)

        rows = [BoundReport("ub_cnr", UPPER, label, n, r, Bounds.ub_cnr(space, n, r))]

        try:
            rows.append(BoundReport("lb_closed", LOWER, label, n, r, Bounds.lb_closed(space, n, r)))
        except UnsupportedSpaceError:
            pass

        rows.append(BoundReport("ub_simple", UPPER, "h2", n, r, Bounds.ub_simple(sigma)))
        rows.append(BoundReport("ub_poisson", UPPER, "h2", n, r, Bounds.ub_poisson(sigma), QUADRATURE_POINTS))

        if space.is_hilbert:
            rows.append(BoundReport("conjecture_envelope", CONJECTURE, label, n, r, Bounds.conjecture_envelope(space, n, r)))

        N = {"h2": 1, "w2:0": 1, "bergman": 2}.get(label)
        if N is not None:
            witness = Bounds.lower_witness(n, r, N)
            rows.append(BoundReport("witness_quotient", LOWER, label, n, r, Solvers.quotient_norm(witness.psi, NodeSet.single(0, n))))

            if estimate:
                result = Solvers.c_sigma_estimate(sigma, space, budget, seed, extra_starts=(witness.Psi,))
                rows.append(BoundReport("c_sigma_estimate", LOWER, label, n, r, result.value, note=result.route))

        check_ordering(rows)
        return rows

    """
    Bound report for a node set

    @param sigma: Path to the node set JSON
    @param space: h2, h1, hinf, hp:<p>, bergman or w2:<alpha> (default: h2)
    @param out: Output file (default: stdout)
    @param fmt: csv or json (default: csv)
    """
    @staticmethod
    def report(sigma : str, space : str = "h2", out : str|None = None, fmt : str = "csv"):
        logger = logging.getLogger(__name__)

        cfg = RunConfig("bounds", sigma_path=sigma, space=space, out_path=out, fmt=fmt).validate()
        nodes = NodeSet.load(cfg.sigma_path)
        rows = Bounds.bound_rows(nodes, SpaceSpec.parse(cfg.space))

        logger.info(f"Bound report for n={nodes.n}, r={nodes.r:.6g}: {len(rows)} rows")

        Report.write_rows(rows, cfg.out_path, cfg.fmt)
        return rows

    """
    Sandwich experiment on {-r mult n}

    @param n: Number of nodes counted with multiplicity
    @param r: Node modulus
    @param space: h2, bergman, hinf or hp:<even p> (default: h2)
    @param N: Witness power, 1 for h2 and hp, 2 for bergman (default: by space)
    @param seed: Random seed of the estimator (default: 0)
    @param budget: Estimator budget (default: 6400)
    @param out: Output file (default: stdout)
    @param fmt: csv or json (default: csv)
    """
    @staticmethod
    def sandwich(n : int, r : float, space : str = "h2", N : int|None = None, seed : int = 0, budget : int = DEFAULT_BUDGET, out : str|None = None, fmt : str = "csv"):
        logger = logging.getLogger(__name__)

        cfg = RunConfig("sandwich", n=n, r=r, space=space, N=N, seed=seed, budget=budget, out_path=out, fmt=fmt).validate()
        rows = Bounds.sandwich_rows(cfg.n, cfg.r, SpaceSpec.parse(cfg.space), cfg.N, cfg.seed, cfg.budget)

        logger.info(f"Sandwich for n={cfg.n}, r={cfg.r} in {rows[0].space} holds")

        Report.write_rows(rows, cfg.out_path, cfg.fmt)
        return rows

    """
    Bound table over n = 1, 2, 4, ... up to nmax and a grid of r

    @param nmax: Largest n (powers of two up to nmax)
    @param rgrid: Comma separated r values, e.g. 0,0.5,0.9
    @param space: Space of the table (default: h2)
    @param out: Output file (default: stdout)
    @param fmt: csv or json (default: csv)
    @param seed: Random seed of the estimator (default: 0)
    @param estimate: Add c_sigma_estimate rows (default: False)
    @param budget: Estimator budget (default: 6400)
    """
    @staticmethod
    def table(nmax : int, rgrid : str, space : str = "h2", out : str|None = None, fmt : str = "csv", seed : int = 0, estimate : bool = False, budget : int = DEFAULT_BUDGET):
        logger = logging.getLogger(__name__)

        cfg = RunConfig("table", space=space, seed=seed, budget=budget, out_path=out, fmt=fmt).validate()
        if nmax < 1:
            raise InputError(f"nmax must be at least 1, got {nmax}")

        X = SpaceSpec.parse(cfg.space)
        sizes = [1 << k for k in range(nmax.bit_length()) if 1 << k <= nmax]
        cells = [(n, r) for n in sizes for r in parse_grid(rgrid)]

        jobs = [lambda n=n, r=r: Bounds.table_cell(n, r, X, cfg.seed, cfg.budget, estimate) for n, r in cells]
        rows = [row for cell in run_ordered(jobs) for row in cell]

        logger.info(f"Table for {X.label}: {len(cells)} cells, {len(rows)} rows")

        Report.write_rows(rows, cfg.out_path, cfg.fmt)
        return rows

    """
    Empirical Bernstein ratio on K_B against the closed-form constant

    @param n: Number of nodes
    @param r: Largest node modulus
    @param trials: Number of random functions (default: 1000)
    @param seed: Random seed (default: 0)
    @param out: Output file (default: stdout)
    @param fmt: csv or json (default: csv)
    """
    @staticmethod
    def bernstein(n : int, r : float, trials : int = 1000, seed : int = 0, out : str|None = None, fmt : str = "csv"):
        logger = logging.getLogger(__name__)

        cfg = RunConfig("bernstein", n=n, r=r, seed=seed, out_path=out, fmt=fmt).validate()
        constant = Bounds.bernstein_alpha(cfg.n, cfg.r)
        worst = Bounds.bernstein_empirical(cfg.n, cfg.r, trials, cfg.seed)

        if worst > constant.value * (1 + 1e-12):
            raise OrderingViolation(f"Bernstein ratio {worst:.12g} exceeds the constant {constant.value:.12g}")

        rows = [
            BoundReport("bernstein_empirical", LOWER, "h2", cfg.n, cfg.r, worst, trials),
            BoundReport("bernstein_alpha", UPPER, "h2", cfg.n, cfg.r, constant.value, note="" if constant.exact else "cap"),
            BoundReport("bernstein_cap", UPPER, "h2", cfg.n, cfg.r, constant.cap),
        ]

        logger.info(f"Bernstein ratio {worst:.6g} <= {constant.value:.6g} over {trials} trials")

        Report.write_rows(rows, cfg.out_path, cfg.fmt)
        return rows

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("Available commands for bounds module:")
        logger.info("  report <sigma(str)> [space(str)] [out(str)] [fmt(str)]: Upper and lower bounds for a node set")
        logger.info("  sandwich <n(int)> <r(float)> [space(str)] [N(int)] [seed(int)] [budget(int)] [out(str)] [fmt(str)]: Lower bound, witness, estimate and upper bound for {-r mult n}")
        logger.info("  table <nmax(int)> <rgrid(str)> [space(str)] [out(str)] [fmt(str)] [seed(int)] [estimate(bool)] [budget(int)]: Bound table over n and r")
        logger.info("  bernstein <n(int)> <r(float)> [trials(int)] [seed(int)] [out(str)] [fmt(str)]: Empirical Bernstein ratio against its constant")
