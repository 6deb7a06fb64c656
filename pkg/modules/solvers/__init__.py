import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg
from scipy.signal import fftconvolve
from scipy.special import binom

import config
from config import RunConfig
from modules.analytic import Analytic, SpaceSpec, TaylorSeries, parse_complex_list, read_json
from modules.blaschke import SEPARATION, NodeSet
from modules.model_space import KernelSpec, MalmquistBasis, ModelSpace, evaluate_rows, metric_weights
from modules.module import Module, DomainError, InputError, NumericalError, OrderingViolation, UnsupportedSpaceError
from modules.report import Report

PSD_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-13
MAX_BISECTIONS = 200
MAX_DOUBLINGS = 60
ESTIMATE_STARTS = 32
CARLESON_STARTS = 64
DEFAULT_BUDGET = 6400
CONVERGENCE = 1e-13
MIN_STEP = 1e-9

"""
Nevanlinna-Pick data: distinct nodes and the values to interpolate there.
"""
@dataclass(frozen=True, eq=False)
class PickProblem:
    nodes : np.ndarray
    values : np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=complex).ravel()
        values = np.array(self.values, dtype=complex).ravel()

        if len(nodes) == 0 or len(nodes) != len(values):
            raise DomainError(f"Pick problem needs as many values as nodes ({len(nodes)} nodes, {len(values)} values)")

        if np.any(np.abs(nodes) >= 1):
            raise DomainError("Pick nodes must lie in the open unit disc")

        if len(nodes) > 1:
            gaps = np.abs(nodes[:, None] - nodes[None, :]) + np.eye(len(nodes))
            if gaps.min() < SEPARATION:
                raise DomainError("Pick nodes must be distinct")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_sigma(cls, sigma : NodeSet, values) -> "PickProblem":
        if any(mult > 1 for _, mult in sigma.nodes):
            raise DomainError("Pick nodes must be distinct")

        return cls(sigma.flat, values)


"""
Compressed multiplication by symbol in the Malmquist basis: entries[j][k] = <f e_k, e_j>.
"""
@dataclass(frozen=True, eq=False)
class CompressionMatrix:
    entries : np.ndarray
    basis_ref : MalmquistBasis
    symbol : TaylorSeries

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


@dataclass
class SolverResult:
    value : float
    route : str
    tol : float|None = None
    seed : int|None = None
    witness : TaylorSeries|None = None
    details : dict|None = None

    def to_dict(self) -> dict:
        payload = {"value": self.value, "route": self.route, "tol": self.tol, "seed": self.seed}
        if self.witness is not None:
            payload["witness_coeffs"] = self.witness.to_json()
        if self.details:
            payload.update(self.details)
        return payload


def multiply_truncated(a : np.ndarray, b : np.ndarray, D : int) -> np.ndarray:
    product = np.convolve(a, b) if min(len(a), len(b)) <= 64 else fftconvolve(a, b)
    out = np.zeros(D + 1, dtype=complex)
    keep = min(D + 1, len(product))
    out[:keep] = product[:keep]
    return out

def compression_tensor(U : np.ndarray, E : np.ndarray) -> np.ndarray:
    """tensor[l, j, k] = <u_l e_k, e_j> for coefficient rows U and basis rows E."""
    D = E.shape[1] - 1
    size = scipy.fft.next_fast_len(2 * D + 1)
    spectrum_u = np.fft.fft(U, size, axis=1)
    spectrum_e = np.fft.fft(E, size, axis=1)

    tensor = np.empty((len(U), len(E), len(E)), dtype=complex)
    for l in range(len(U)):
        products = np.fft.ifft(spectrum_u[l] * spectrum_e, axis=1)[:, :D + 1]
        tensor[l] = E.conj() @ products.T

    return tensor

def ascend_compression(tensor : np.ndarray, a : np.ndarray, sweeps : int) -> tuple[float, np.ndarray]:
    """
    Maximize the spectral norm of sum a_l T_l over unit a by alternating between the top
    singular pair and the best coefficient vector for that pair; every step is monotone.
    """
    a = a / np.linalg.norm(a)
    best_value, best_a = 0.0, a

    for _ in range(sweeps):
        left, singular, right = np.linalg.svd(np.tensordot(a, tensor, axes=1))
        value = float(singular[0])

        improved = value > best_value * (1 + CONVERGENCE)
        if value > best_value:
            best_value, best_a = value, a
        if not improved:
            break

        gradient = np.einsum("i,lij,j->l", left[:, 0].conj(), tensor, right[0].conj())
        size = np.linalg.norm(gradient)
        if size == 0:
            break
        a = gradient.conj() / size

    return best_value, best_a

def coordinate_ascent(objective, x : np.ndarray, sweeps : int, step : float, directions : tuple, frozen : int = 0) -> tuple[float, np.ndarray]:
    """First-improvement coordinate search; the step halves after a sweep without gain."""
    value = objective(x)

    for _ in range(sweeps):
        improved = False
        for i in range(frozen, len(x)):
            for direction in directions:
                trial = x.copy()
                trial[i] += step * direction
                trial_value = objective(trial)
                if trial_value > value:
                    x, value, improved = trial, trial_value, True
                    break

        if not improved:
            step *= 0.5
            if step < MIN_STEP:
                break

    return value, x

def run_ordered(jobs : list) -> list:
    """Run jobs on the configured thread pool; results come back in job order."""
    threads = config.get_threads()
    if threads == 1 or len(jobs) == 1:
        return [job() for job in jobs]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda job: job(), jobs))

def best_start(results : list) -> int:
    """Index of the largest value; the lowest index wins ties."""
    best = 0
    for index, (value, _) in enumerate(results):
        if value > results[best][0]:
            best = index
    return best

def start_generators(seed : int, count : int) -> list:
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]

def split_budget(budget : int, max_starts : int) -> tuple[int, int]:
    starts = max(1, min(max_starts, budget))
    return starts, max(1, budget // starts)

def unique_nodes(sigma : NodeSet) -> list[complex]:
    return [lam for lam, _ in sigma.nodes]


"""
Quotient norms by three routes (Pick, Schur, compressed multiplication) and the
multistart estimators of c(sigma, X, H^inf) and the Carleson constant.
"""
class Solvers(Module):
    COMMANDS = ("np", "cs", "quotient", "carleson", "estimate")

    def __init__(self):
        super().__init__("solvers")

    """
    ((c^2 - conj(w_i) w_j) / (1 - conj(l_i) l_j))_{i,j}
    """
    @staticmethod
    def pick_matrix(prob : PickProblem, c : float) -> np.ndarray:
        lam, w = prob.nodes, prob.values
        matrix = (c ** 2 - np.conj(w)[:, None] * w[None, :]) / (1 - np.conj(lam)[:, None] * lam[None, :])

        asymmetry = np.max(np.abs(matrix - matrix.conj().T))
        if asymmetry > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(matrix))):
            raise NumericalError(f"Pick matrix asymmetry {asymmetry:.3g} exceeds tolerance")

        return (matrix + matrix.conj().T) / 2

    @staticmethod
    def is_psd(matrix : np.ndarray) -> bool:
        smallest = scipy.linalg.eigvalsh(matrix, subset_by_index=[0, 0])[0]
        return bool(smallest >= -PSD_TOLERANCE * np.linalg.norm(matrix, "fro"))

    @staticmethod
    def cauchy_gram(nodes : np.ndarray) -> np.ndarray:
        return 1 / (1 - np.conj(nodes)[:, None] * nodes[None, :])

    """
    Upper bracket for the bisection: (sum (1+|l|)/(1-|l|))^(1/2) times the norm of the
    minimal H^2 interpolant, inflated by 1e-3.
    """
    @staticmethod
    def np_seed(prob : PickProblem) -> float:
        moduli = np.abs(prob.nodes)
        simple = np.sqrt(np.sum((1 + moduli) / (1 - moduli)))

        try:
            energy = np.real(np.vdot(prob.values, scipy.linalg.solve(Solvers.cauchy_gram(prob.nodes).conj(), prob.values, assume_a="her")))
        except (np.linalg.LinAlgError, ValueError):
            energy = 1.0

        return float(max(simple * np.sqrt(max(energy, 0.0)) * (1 + 1e-3), 1e-300))

    """
    Smallest c with a positive semidefinite Pick matrix, by bisection to width tol.
    """
    @staticmethod
    def np_value(prob : PickProblem, tol : float = 1e-8) -> float:
        logger = logging.getLogger(__name__)

        if tol <= 0:
            raise InputError(f"tol must be positive, got {tol}")

        def feasible(c):
            return Solvers.is_psd(Solvers.pick_matrix(prob, c))

        lo = float(np.max(np.abs(prob.values)))
        if feasible(lo):
            return lo

        hi = max(Solvers.np_seed(prob), lo * (1 + 1e-3))
        doublings = 0
        while not feasible(hi):
            hi *= 2
            doublings += 1
            if doublings > MAX_DOUBLINGS:
                raise NumericalError("No feasible upper bracket for the Pick bisection")

        logger.debug(f"Pick bisection bracket [{lo:.12g}, {hi:.12g}]")

        for _ in range(MAX_BISECTIONS):
            if hi - lo <= tol:
                break
            mid = (lo + hi) / 2
            if feasible(mid):
                hi = mid
            else:
                lo = mid

        if hi - lo > tol:
            raise NumericalError(f"Pick bisection did not reach width {tol} in {MAX_BISECTIONS} steps")

        for factor in (1 + tol, 1.5, 2.0):
            if not feasible(hi * factor):
                raise OrderingViolation(f"Pick feasibility is not monotone in c: feasible at {hi:.12g}, infeasible at {hi * factor:.12g}")

        return hi

    """
    NP value as the square root of the top generalized eigenvalue of the pencil
    (diag(conj w) K diag(w), K); same criterion as the bisection.
    """
    @staticmethod
    def np_pencil(prob : PickProblem) -> float:
        gram = Solvers.cauchy_gram(prob.nodes)
        data = np.conj(prob.values)[:, None] * gram * prob.values[None, :]

        try:
            top = scipy.linalg.eigh(data, gram, eigvals_only=True)[-1]
        except np.linalg.LinAlgError:
            return Solvers.np_value(prob, 1e-12)

        return float(np.sqrt(max(top, 0.0)))

    """
    Spectral norm of the lower-triangular Toeplitz matrix with first column w.
    """
    @staticmethod
    def cs_value(w) -> float:
        column = np.array(w, dtype=complex).ravel()
        matrix = scipy.linalg.toeplitz(column, np.zeros_like(column))
        return float(np.linalg.norm(matrix, 2))

    @staticmethod
    def compression_matrix(f : TaylorSeries, basis : MalmquistBasis) -> CompressionMatrix:
        E = basis.coefficients
        degree = f.degree

        if degree + len(E) > basis.degree_cap:
            raise DomainError(f"Degree cap {basis.degree_cap} is too small for a degree {degree} symbol and n={len(E)}")

        symbol = f.coeffs[:degree + 1]
        products = np.array([multiply_truncated(symbol, e, basis.degree_cap) for e in E])
        return CompressionMatrix(E.conj() @ products.T, basis, f)

    @staticmethod
    def quotient_norm(f : TaylorSeries, sigma : NodeSet, tol : float = 1e-10) -> float:
        logger = logging.getLogger(__name__)

        if not f.exact:
            logger.debug("Quotient norm of a truncated symbol")

        D = max(ModelSpace.degree_cap_for(sigma), f.degree + sigma.n)
        basis = ModelSpace.malmquist_basis(sigma, D)

        tail = float(np.max(np.abs(basis.coefficients[:, -1])))
        if tail > tol:
            logger.warning(f"Malmquist coefficients at degree {D} are still {tail:.3g}")

        return Solvers.compression_matrix(f, basis).norm

    """
    Certified lower estimate of c(sigma, space, H^inf): the best quotient norm over the
    unit-norm functions reached from deterministic starts (normalized kernels at the
    nodes, then extra_starts) and seeded random starts.

    @param budget: total ascent sweeps, split over at most 32 starts
    @param extra_starts: functions projected onto the model space and used as starts
    """
    @staticmethod
    def c_sigma_estimate(sigma : NodeSet, space : SpaceSpec, budget : int = DEFAULT_BUDGET, seed : int = 0, extra_starts : tuple = ()) -> SolverResult:
        if budget < 1:
            raise InputError(f"budget must be at least 1, got {budget}")

        if space.is_hilbert:
            return Solvers._estimate_hilbert(sigma, space, budget, seed, extra_starts)
        if space.is_even_hardy:
            return Solvers._estimate_even_hardy(sigma, space, budget, seed)

        raise UnsupportedSpaceError(f"No estimator for {space.label}")

    @staticmethod
    def _estimate_hilbert(sigma : NodeSet, space : SpaceSpec, budget : int, seed : int, extra_starts : tuple) -> SolverResult:
        logger = logging.getLogger(__name__)

        alpha = space.alpha
        D = ModelSpace.degree_cap_for(sigma, extra=2)
        E = ModelSpace.malmquist_basis(sigma, D).coefficients
        U = ModelSpace.weighted_model_basis(sigma, KernelSpec(alpha), D)
        tensor = compression_tensor(U, E)
        metric = metric_weights(alpha, D)

        starts = [np.conj(evaluate_rows(U, np.array([lam]))[:, 0]) for lam in unique_nodes(sigma)]
        starts += [(U.conj() * metric) @ f.padded(D) for f in extra_starts]

        count, sweeps = split_budget(budget, ESTIMATE_STARTS)
        for rng in start_generators(seed, count):
            starts.append(rng.standard_normal(len(U)) + 1j * rng.standard_normal(len(U)))

        jobs = [lambda a=a: ascend_compression(tensor, a, sweeps) for a in starts]
        results = run_ordered(jobs)
        index = best_start(results)
        value, a = results[index]

        logger.debug(f"c_sigma estimate {value:.12g} from start {index} of {len(starts)} ({space.label})")

        witness = TaylorSeries(a @ U, D, False)
        return SolverResult(value, f"multistart-{space.label}", seed=seed, witness=witness, details={"start": index})

    @staticmethod
    def _estimate_even_hardy(sigma : NodeSet, space : SpaceSpec, budget : int, seed : int) -> SolverResult:
        logger = logging.getLogger(__name__)

        p = space.p
        size = min(2 * sigma.n + 8, ModelSpace.degree_cap_for(sigma))
        D = max(ModelSpace.degree_cap_for(sigma), size + sigma.n)
        E = ModelSpace.malmquist_basis(sigma, D).coefficients
        tensor = compression_tensor(np.eye(size, D + 1, dtype=complex), E)
        M = Analytic.quadrature_size(size)

        def objective(a):
            values = np.abs(np.fft.ifft(a, M) * M)
            norm = np.mean(values ** p) ** (1 / p)
            if norm == 0:
                return 0.0
            return float(np.linalg.norm(np.tensordot(a, tensor, axes=1), 2) / norm)

        k = np.arange(size)
        starts = [np.eye(1, size, dtype=complex)[0]]
        for lam in unique_nodes(sigma):
            starts.append(binom(2 / p + k - 1, k) * np.conj(lam) ** k)

        count, sweeps = split_budget(budget, ESTIMATE_STARTS)
        for rng in start_generators(seed, count):
            starts.append(rng.standard_normal(size) + 1j * rng.standard_normal(size))

        directions = (1, -1, 1j, -1j)
        jobs = [lambda a=a: coordinate_ascent(objective, a / np.linalg.norm(a), sweeps, 0.5, directions) for a in starts]
        results = run_ordered(jobs)
        index = best_start(results)
        value, a = results[index]

        witness = TaylorSeries.from_coeffs(a, size - 1)
        witness = TaylorSeries(a / Analytic.space_norm(witness, space), size - 1, True)

        logger.debug(f"c_sigma estimate {value:.12g} from start {index} of {len(starts)} ({space.label})")

        return SolverResult(value, f"multistart-{space.label}", seed=seed, witness=witness, details={"start": index})

    """
    Lower estimate of the Carleson constant: the largest NP value over unimodular data,
    by multistart coordinate search over the phases (the first phase is held at 0).
    """
    @staticmethod
    def carleson_estimate(sigma : NodeSet, budget : int = DEFAULT_BUDGET, seed : int = 0) -> SolverResult:
        logger = logging.getLogger(__name__)

        if not sigma.distinct or any(mult > 1 for _, mult in sigma.nodes):
            raise DomainError("The Carleson constant is defined for distinct nodes")

        if budget < 1:
            raise InputError(f"budget must be at least 1, got {budget}")

        nodes = sigma.flat
        if len(nodes) == 1:
            return SolverResult(1.0, "carleson-single-node", seed=seed)

        def objective(theta):
            return Solvers.np_pencil(PickProblem(nodes, np.exp(1j * theta)))

        count, sweeps = split_budget(budget, CARLESON_STARTS)
        starts = [np.zeros(len(nodes))]
        for rng in start_generators(seed, count - 1):
            theta = rng.uniform(0, 2 * np.pi, len(nodes))
            theta[0] = 0.0
            starts.append(theta)

        jobs = [lambda theta=theta: coordinate_ascent(objective, theta, sweeps, np.pi / 2, (1, -1), frozen=1) for theta in starts]
        results = run_ordered(jobs)
        index = best_start(results)
        value, theta = results[index]

        logger.debug(f"Carleson estimate {value:.12g} from start {index} of {len(starts)}")

        phases = [float(t) for t in np.mod(theta, 2 * np.pi)]
        return SolverResult(value, "carleson-multistart", seed=seed, details={"start": index, "phases": phases})

    """
    Evaluation-functional sandwich on distinct nodes: max ||phi_l|| <= c_sigma_estimate is
    enforced; c_sigma_estimate <= carleson * max ||phi_l|| + 1e-3 is only reported, since
    both sides are lower estimates.
    """
    @staticmethod
    def interpolation_sandwich(sigma : NodeSet, budget : int = DEFAULT_BUDGET, seed : int = 0) -> dict:
        logger = logging.getLogger(__name__)

        evaluation = float(np.max(1 / np.sqrt(1 - np.abs(sigma.flat) ** 2)))
        estimate = Solvers.c_sigma_estimate(sigma, SpaceSpec.hardy(2), budget, seed).value
        carleson = Solvers.carleson_estimate(sigma, budget, seed).value

        if evaluation > estimate + 1e-6:
            raise OrderingViolation(f"Evaluation functional norm {evaluation:.12g} exceeds the estimate {estimate:.12g}")

        consistent = estimate <= carleson * evaluation + 1e-3
        if not consistent:
            logger.warning(f"Estimate {estimate:.12g} exceeds Carleson estimate times evaluation norm {carleson * evaluation:.12g}")

        return {"evaluation": evaluation, "estimate": estimate, "carleson": carleson, "consistent": consistent}

    """
    Nevanlinna-Pick value of the data in a values file

    @param sigma: Path to the node set JSON (distinct nodes)
    @param values: Path to the JSON list of values
    @param tol: Bisection width (default: 1e-8)
    @param out: Output file (default: stdout)
    """
    @staticmethod
    def np(sigma : str, values : str, tol : float = 1e-8, out : str|None = None):
        cfg = RunConfig("np", sigma_path=sigma, tol=tol, out_path=out, fmt="json").validate()
        nodes = NodeSet.load(cfg.sigma_path)
        data = parse_complex_list(read_json(values))

        try:
            prob = PickProblem.from_sigma(nodes, data)
        except DomainError as e:
            raise InputError(str(e))

        result = SolverResult(Solvers.np_value(prob, cfg.tol), "pick-bisection", tol=cfg.tol)
        Report.write_json(result.to_dict(), cfg.out_path)
        return result

    """
    Caratheodory-Schur value of a coefficient list

    @param coeffs: Path to the JSON list of coefficients w_0..w_n
    @param out: Output file (default: stdout)
    """
    @staticmethod
    def cs(coeffs : str, out : str|None = None):
        cfg = RunConfig("cs", out_path=out, fmt="json").validate()
        data = parse_complex_list(read_json(coeffs))

        result = SolverResult(Solvers.cs_value(data), "schur-toeplitz")
        Report.write_json(result.to_dict(), cfg.out_path)
        return result

    """
    Quotient norm of a polynomial modulo B_sigma H^inf

    @param sigma: Path to the node set JSON
    @param f: Path to the JSON list of Taylor coefficients
    @param tol: Tail tolerance of the basis expansion (default: 1e-10)
    @param out: Output file (default: stdout)
    """
    @staticmethod
    def quotient(sigma : str, f : str, tol : float = 1e-10, out : str|None = None):
        cfg = RunConfig("quotient", sigma_path=sigma, tol=tol, out_path=out, fmt="json").validate()
        nodes = NodeSet.load(cfg.sigma_path)
        symbol = TaylorSeries.load(f)

        result = SolverResult(Solvers.quotient_norm(symbol, nodes, cfg.tol), "compressed-multiplication", tol=cfg.tol)
        Report.write_json(result.to_dict(), cfg.out_path)
        return result

    """
    Lower estimate of the Carleson interpolation constant

    @param sigma: Path to the node set JSON (distinct nodes)
    @param budget: Total coordinate sweeps (default: 6400)
    @param seed: Random seed (default: 0)
    @param out: Output file (default: stdout)
    """
    @staticmethod
    def carleson(sigma : str, budget : int = DEFAULT_BUDGET, seed : int = 0, out : str|None = None):
        cfg = RunConfig("carleson", sigma_path=sigma, budget=budget, seed=seed, out_path=out, fmt="json").validate()
        nodes = NodeSet.load(cfg.sigma_path)

        try:
            result = Solvers.carleson_estimate(nodes, cfg.budget, cfg.seed)
        except DomainError as e:
            raise InputError(str(e))

        Report.write_json(result.to_dict(), cfg.out_path)
        return result

    """
    Lower estimate of c(sigma, X, H^inf) with its witness

    @param sigma: Path to the node set JSON
    @param space: h2, bergman, w2:<alpha> or hp:<even p> (default: h2)
    @param budget: Total ascent sweeps (default: 6400)
    @param seed: Random seed (default: 0)
    @param out: Output file (default: stdout)
    """
    @staticmethod
    def estimate(sigma : str, space : str = "h2", budget : int = DEFAULT_BUDGET, seed : int = 0, out : str|None = None):
        cfg = RunConfig("estimate", sigma_path=sigma, space=space, budget=budget, seed=seed, out_path=out, fmt="json").validate()
        nodes = NodeSet.load(cfg.sigma_path)

        result = Solvers.c_sigma_estimate(nodes, SpaceSpec.parse(cfg.space), cfg.budget, cfg.seed)
        Report.write_json(result.to_dict(), cfg.out_path)
        return result

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("Available commands for solvers module:")
        logger.info("  np <sigma(str)> <values(str)> [tol(float)] [out(str)]: Nevanlinna-Pick value by Pick-matrix bisection")
        logger.info("  cs <coeffs(str)> [out(str)]: Caratheodory-Schur value of a coefficient list")
        logger.info("  quotient <sigma(str)> <f(str)> [tol(float)] [out(str)]: Quotient norm modulo B_sigma H^inf")
        logger.info("  carleson <sigma(str)> [budget(int)] [seed(int)] [out(str)]: Lower estimate of the Carleson constant")
        logger.info("  estimate <sigma(str)> [space(str)] [budget(int)] [seed(int)] [out(str)]: Lower estimate of c(sigma, X, H^inf)")
