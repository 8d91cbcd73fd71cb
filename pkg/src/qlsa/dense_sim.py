"""Desk-scale dense execution of the full solver protocol.

Everything here works on explicit matrices: the Hermitian embedding of the
input system, the interpolating Hamiltonians H(s) with their two-dimensional
nullspace, the randomized-time adiabatic walk (exact unitaries, or emulated
finite-accuracy simulation blocks with post-selection weights), the final
Chebyshev filter, and a direct classical solve as ground truth.

States are pure trajectories; the random-time channel is realized by Monte
Carlo over trials with per-trial derived seeds, and post-selection is tracked
as an accumulated weight rather than rejection-sampled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceCapError, SingularMatrixError, StructureError
from . import sampling
from .schedule import ScheduleGrid, build_grid, num_steps_analytic
from .cost_model import ErrorBudget
from .polyapprox import FilterSpec, filter_spec_for_gap, filter_value, oaa_scalar_map

MAX_EMBEDDED_DIM = 128

_SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class LinearSystem:
    """Raw linear system A y = b with user-supplied norm and condition bounds.

    ``kappa_bound`` is trusted, never derived from the matrix (so the solver
    can be costed without knowing the exact spectrum); ``validate_strict``
    checks it against the true condition number of the rescaled matrix.
    """

    a_matrix: np.ndarray
    b_vector: np.ndarray
    norm_bound: float
    kappa_bound: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a_matrix, dtype=complex)
        b = np.asarray(self.b_vector, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("a_matrix square")
        if b.shape != (a.shape[0],):
            raise DomainError("b_vector length matches a_matrix")
        if np.linalg.norm(b) == 0.0:
            raise DomainError("b_vector nonzero")
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise SingularMatrixError("a_matrix invertible (min sv > 1e-12 max sv)")
        if self.norm_bound < sv[0] * (1.0 - 1e-12):
            raise DomainError("norm_bound >= ||A||")
        if self.kappa_bound < 1.0:
            raise DomainError("kappa_bound >= 1")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_vector", b)

    def validate_strict(self) -> None:
        sv = np.linalg.svd(self.a_matrix / self.norm_bound, compute_uv=False)
        if 1.0 / sv[-1] > self.kappa_bound * (1.0 + 1e-10):
            raise DomainError("kappa_bound >= condition number after rescaling")


@dataclass(frozen=True)
class EmbeddedSystem:
    """Hermitian-embedded, rescaled system padded to a power-of-two dimension."""

    abar: np.ndarray = field(repr=False)
    bbar: np.ndarray = field(repr=False)
    n_qubits: int
    kappa_bound: float

    def __post_init__(self) -> None:
        assert np.allclose(self.abar, self.abar.conj().T, atol=1e-13)
        assert abs(np.linalg.norm(self.bbar) - 1.0) < 1e-12

    @property
    def dim(self) -> int:
        return self.abar.shape[0]


@dataclass(frozen=True)
class AdiabaticState:
    """Trajectory state on C^2 (x) C^2 (x) C^dim plus post-selection weight."""

    psi: np.ndarray = field(repr=False)
    weight: float

    def __post_init__(self) -> None:
        assert abs(np.linalg.norm(self.psi) - 1.0) <= 1e-10
        assert 0.0 < self.weight <= 1.0


@dataclass(frozen=True)
class Stats:
    mean: float
    stderr: float


@dataclass(frozen=True)
class SimulationResult:
    """Aggregated Monte Carlo outcome of the end-to-end protocol."""

    trials: int
    seed: int
    q: int
    embedded_dim: int
    mode: str
    kind: str
    fidelity_pre_filter: Stats
    success_rate: Stats
    trace_distance_post: Stats

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "q": self.q,
            "embedded_dim": self.embedded_dim,
            "mode": self.mode,
            "dist": self.kind,
            "fidelity_pre_filter": {"mean": self.fidelity_pre_filter.mean,
                                    "stderr": self.fidelity_pre_filter.stderr},
            "success_rate": {"mean": self.success_rate.mean,
                             "stderr": self.success_rate.stderr},
            "trace_distance_post": {"mean": self.trace_distance_post.mean,
                                    "stderr": self.trace_distance_post.stderr},
        }


def classical_solve(sys: LinearSystem) -> np.ndarray:
    """Normalized A^{-1} b by direct dense solve (ground truth)."""
    x = np.linalg.solve(sys.a_matrix, sys.b_vector)
    return x / np.linalg.norm(x)


def hermitian_embed(sys: LinearSystem, strict: bool = False) -> EmbeddedSystem:
    """Embed A into the rescaled Hermitian extension [[0, A], [A^dag, 0]]/N_A.

    The dimension is padded to the next power of two with an identity block
    (and zero right-hand-side extension), which leaves the norm bound,
    spectrum window and solution untouched.
    """
    if strict:
        sys.validate_strict()
    m = sys.a_matrix.shape[0]
    a_scaled = sys.a_matrix / sys.norm_bound
    two_m = 2 * m
    padded = 1 << (two_m - 1).bit_length()
    abar = np.eye(padded, dtype=complex)
    abar[:m, :m] = 0.0
    abar[m:two_m, m:two_m] = 0.0
    abar[:m, m:two_m] = a_scaled
    abar[m:two_m, :m] = a_scaled.conj().T
    bbar = np.zeros(padded, dtype=complex)
    bbar[:m] = sys.b_vector / np.linalg.norm(sys.b_vector)
    return EmbeddedSystem(abar=abar, bbar=bbar,
                          n_qubits=int(math.log2(padded)),
                          kappa_bound=sys.kappa_bound)


def embedded_rhs(sys: LinearSystem) -> np.ndarray:
    """Right-hand side [b/N_A; 0; ...] of the embedded system (unnormalized)."""
    m = sys.a_matrix.shape[0]
    padded = 1 << (2 * m - 1).bit_length()
    rhs = np.zeros(padded, dtype=complex)
    rhs[:m] = sys.b_vector / sys.norm_bound
    return rhs


def _interpolated_matrix(emb: EmbeddedSystem, s: float) -> np.ndarray:
    """A(s) = (1-s) Z (x) I + s X (x) Abar on dimension 2*dim."""
    d = emb.dim
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = (1.0 - s) * np.eye(d)
    out[d:, d:] = -(1.0 - s) * np.eye(d)
    out[:d, d:] = s * emb.abar
    out[d:, :d] = s * emb.abar
    return out


def _bbar_state(emb: EmbeddedSystem) -> np.ndarray:
    """|+, b> on dimension 2*dim."""
    d = emb.dim
    v = np.zeros(2 * d, dtype=complex)
    v[:d] = emb.bbar / math.sqrt(2.0)
    v[d:] = emb.bbar / math.sqrt(2.0)
    return v


def build_hamiltonian(emb: EmbeddedSystem, s: float) -> np.ndarray:
    """H(s) = sigma_+ (x) A(s) P + sigma_- (x) P A(s), P = I - |+,b><+,b|."""
    if not (0.0 <= s <= 1.0):
        raise DomainError("s in [0, 1]")
    a_s = _interpolated_matrix(emb, s)
    bb = _bbar_state(emb)
    proj = np.eye(2 * emb.dim, dtype=complex) - np.outer(bb, bb.conj())
    block = a_s @ proj
    return np.kron(_SIGMA_PLUS, block) + np.kron(_SIGMA_PLUS.T, block.conj().T)


def solution_state(emb: EmbeddedSystem, s: float) -> np.ndarray:
    """Instantaneous zero-eigenvalue solution state |0> (x) A(s)^{-1}|+,b>."""
    a_s = _interpolated_matrix(emb, s)
    v = np.linalg.solve(a_s, _bbar_state(emb))
    v /= np.linalg.norm(v)
    out = np.zeros(4 * emb.dim, dtype=complex)
    out[: 2 * emb.dim] = v
    return out


def spurious_state(emb: EmbeddedSystem) -> np.ndarray:
    """The s-independent nullspace companion |1> (x) |+,b>."""
    out = np.zeros(4 * emb.dim, dtype=complex)
    out[2 * emb.dim:] = _bbar_state(emb)
    return out


def nullspace_and_gap(h: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, float]:
    """Orthonormal nullspace basis (must be 2-dimensional) and spectral gap."""
    evals, evecs = np.linalg.eigh(h)
    scale = float(np.max(np.abs(evals))) or 1.0
    if tol is None:
        tol = 1e-10 * scale
    null = np.abs(evals) < tol
    ndim = int(np.count_nonzero(null))
    if ndim != 2:
        raise StructureError(f"nullspace dimension {ndim} != 2")
    gap = float(np.min(np.abs(evals[~null])))
    if gap < 10.0 * tol:
        warnings.warn("spectral gap within 10x of nullspace tolerance", RuntimeWarning)
    return evecs[:, null], gap


class ProtocolOperators:
    """Precomputed per-step eigendecompositions shared across trials."""

    def __init__(self, emb: EmbeddedSystem, grid: ScheduleGrid):
        if emb.dim > MAX_EMBEDDED_DIM:
            raise ResourceCapError(f"embedded dimension {emb.dim} > {MAX_EMBEDDED_DIM}")
        self.emb = emb
        self.grid = grid
        self.y0 = solution_state(emb, 0.0)
        self.y1 = solution_state(emb, 1.0)
        self.ybar = spurious_state(emb)
        self.evals = []
        self.evecs = []
        for j in range(1, grid.q + 1):
            w, v = np.linalg.eigh(build_hamiltonian(emb, float(grid.s[j])))
            self.evals.append(w)
            self.evecs.append(v)


def _run_trial(ops: ProtocolOperators, kind: sampling.Kind, mode: str,
               rng: np.random.Generator, delta_step: float | None) -> AdiabaticState:
    psi = ops.y0.copy()
    weight = 1.0
    for j in range(ops.grid.q):
        delta_j = float(ops.grid.delta[j + 1])
        dist = sampling.TimeDistribution(kind, delta_j)
        t = sampling.sample(dist, rng)
        w, v = ops.evals[j], ops.evecs[j]
        amp = v.conj().T @ psi
        if mode == "ideal":
            psi = v @ (np.exp(-1j * t * w) * amp)
        else:
            block = oaa_scalar_map(w, t, delta_step / 2.0)
            psi = v @ (block * amp)
            norm = np.linalg.norm(psi)
            weight *= min(float(norm) ** 2, 1.0)
            psi = psi / norm
    return AdiabaticState(psi=psi, weight=weight)


def run_protocol(emb: EmbeddedSystem, grid: ScheduleGrid, dist_kind: sampling.Kind,
                 mode: str, rng: np.random.Generator,
                 delta_step: float | None = None) -> AdiabaticState:
    """One stochastic pass of the randomized adiabatic walk.

    ``mode`` is "ideal" (exact unitaries exp(-i t H(s_j))) or "emulated"
    (finite-accuracy simulation blocks with per-step error ``delta_step`` and
    post-selection weight tracking).
    """
    if mode not in ("ideal", "emulated"):
        raise DomainError("mode in {'ideal', 'emulated'}")
    if mode == "emulated":
        if delta_step is None or not (0.0 < delta_step <= 0.01):
            raise DomainError("delta_step in (0, 0.01] for emulated mode")
    ops = ProtocolOperators(emb, grid)
    return _run_trial(ops, dist_kind, mode, rng, delta_step)


@dataclass(frozen=True)
class FilterOutcome:
    accept_prob: float
    state: np.ndarray = field(repr=False)
    trace_distance: float


def filter_and_postselect(state: AdiabaticState, spec: FilterSpec,
                          emb: EmbeddedSystem) -> FilterOutcome:
    """Apply the nullspace filter to a trajectory state and post-select.

    Acceptance probability is the accumulated weight times ||R psi||^2; the
    reported distance is the pure-state 1-norm distance 2 sqrt(1 - F) to the
    true solution state.
    """
    h1 = build_hamiltonian(emb, 1.0)
    evals, evecs = np.linalg.eigh(h1)
    vals = filter_value(np.clip(evals, -1.0, 1.0), spec)
    amp = evecs.conj().T @ state.psi
    filtered = evecs @ (vals * amp)
    norm = float(np.linalg.norm(filtered))
    out = filtered / norm
    y1 = solution_state(emb, 1.0)
    fid = float(np.abs(np.vdot(y1, out)) ** 2)
    return FilterOutcome(
        accept_prob=state.weight * norm ** 2,
        state=out,
        trace_distance=2.0 * math.sqrt(max(0.0, 1.0 - fid)),
    )


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream for trial ``index``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, index))))


def run_simulation(sys: LinearSystem, eps: float, trials: int,
                   kind: sampling.Kind = sampling.Kind.MEAN_OPTIMIZED,
                   mode: str = "ideal", gamma: float = 0.61,
                   master_seed: int = 0, threads: int = 1) -> SimulationResult:
    """Full pipeline: embed, walk the schedule, filter, aggregate statistics."""
    if trials < 1:
        raise DomainError("trials >= 1")
    emb = hermitian_embed(sys)
    if emb.dim > MAX_EMBEDDED_DIM:
        raise ResourceCapError(f"embedded dimension {emb.dim} > {MAX_EMBEDDED_DIM}")
    kappa = sys.kappa_bound
    q = num_steps_analytic(kappa)
    grid = build_grid(kappa, q)
    budget = ErrorBudget.for_run(eps, gamma, q)
    spec = filter_spec_for_gap(1.0 / kappa, budget.eps_p)
    delta_step = budget.delta_step if mode == "emulated" else None

    ops = ProtocolOperators(emb, grid)
    h1 = build_hamiltonian(emb, 1.0)
    evals1, evecs1 = np.linalg.eigh(h1)
    fvals = filter_value(np.clip(evals1, -1.0, 1.0), spec)
    y1 = ops.y1

    def one(i: int) -> tuple[float, float, float]:
        state = _run_trial(ops, kind, mode, trial_rng(master_seed, i), delta_step)
        fid_pre = float(np.abs(np.vdot(y1, state.psi)) ** 2)
        amp = evecs1.conj().T @ state.psi
        filtered = evecs1 @ (fvals * amp)
        norm = float(np.linalg.norm(filtered))
        fid_post = float(np.abs(np.vdot(y1, filtered / norm)) ** 2)
        dist = 2.0 * math.sqrt(max(0.0, 1.0 - fid_post))
        return fid_pre, state.weight * norm ** 2, dist

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(trials)))
    else:
        rows = [one(i) for i in range(trials)]

    fid = np.array([r[0] for r in rows])
    acc = np.array([r[1] for r in rows])
    dist = np.array([r[2] for r in rows])
    wsum = float(np.sum(acc))
    dmean = float(np.sum(acc * dist) / wsum)
    dvar = float(np.sum(acc * (dist - dmean) ** 2) / wsum)
    dstderr = math.sqrt(dvar * float(np.sum(acc ** 2))) / wsum
    return SimulationResult(
        trials=trials, seed=master_seed, q=q, embedded_dim=emb.dim,
        mode=mode, kind=kind.value,
        fidelity_pre_filter=Stats(float(np.mean(fid)),
                                  float(np.std(fid, ddof=1) / math.sqrt(trials))),
        success_rate=Stats(float(np.mean(acc)),
                           float(np.std(acc, ddof=1) / math.sqrt(trials))),
        trace_distance_post=Stats(dmean, dstderr),
    )


# ---------------------------------------------------------------------------
# randomized matrix-inequality suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    instances: int
    violations: dict
    min_slack: dict


def _random_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def _random_density(rng: np.random.Generator, d: int) -> np.ndarray:
    g = _random_matrix(rng, d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _nuclear(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def lemma_property_suite(rng: np.random.Generator, instances: int = 500) -> LemmaReport:
    """Randomized checks of the norm inequalities the error analysis rests on.

    Each inequality is evaluated on random matrices / density operators with
    random perturbations; slack below -1e-12 counts as a violation.
    """
    names = ("product_1norm", "perturb_1norm", "perturb_prob", "filter_sandwich")
    violations = {n: 0 for n in names}
    min_slack = {n: math.inf for n in names}

    def record(name: str, slack: float) -> None:
        if slack < -1e-12:
            violations[name] += 1
        min_slack[name] = min(min_slack[name], slack)

    for _ in range(instances):
        d = int(rng.integers(2, 17))
        a = _random_matrix(rng, d)
        b = _random_matrix(rng, d)
        lhs = _nuclear(a @ b)
        rhs = min(_nuclear(a) * np.linalg.norm(b, 2), np.linalg.norm(a, 2) * _nuclear(b))
        record("product_1norm", rhs - lhs)

        delta = float(rng.uniform(0.0, 0.5))
        rho = _random_density(rng, d)
        ea = _random_matrix(rng, d)
        eb = _random_matrix(rng, d)
        ea *= delta / np.linalg.norm(ea, 2)
        eb *= delta / np.linalg.norm(eb, 2)
        lhs = _nuclear((a + ea) @ rho @ (b + eb) - a @ rho @ b)
        rhs = delta * (np.linalg.norm(a, 2) + np.linalg.norm(b, 2)) + delta ** 2
        record("perturb_1norm", rhs - lhs)

        val = float(np.trace(rho @ (a + ea).conj().T @ (a + ea)).real)
        base = float(np.trace(rho @ a.conj().T @ a).real)
        na = np.linalg.norm(a, 2)
        record("perturb_prob", min(val - (base - 2.0 * delta * na),
                                   (base + 2.0 * delta * na + delta ** 2) - val))

        # filter sandwich ||R xi R - P0 xi P0||_1 <= 2 eps_p + eps_p^2 on a
        # Hermitian with a known nullspace and gap
        gap = float(rng.uniform(0.08, 0.28))
        eps_p = float(rng.uniform(1e-4, 0.2))
        spec = filter_spec_for_gap(gap, eps_p)
        nz = d - 2 if d > 2 else 1
        mags = rng.uniform(gap, 1.0, size=nz) * rng.choice([-1.0, 1.0], size=nz)
        evals = np.concatenate([np.zeros(2 if d > 2 else 1), mags])
        u = np.linalg.qr(_random_matrix(rng, evals.size))[0]
        h = (u * evals) @ u.conj().T
        h = (h + h.conj().T) / 2.0
        rvals = filter_value(np.clip(evals, -1.0, 1.0), spec)
        pvals = (evals == 0.0).astype(float)
        xi = _random_density(rng, evals.size)
        rmat = (u * rvals) @ u.conj().T
        pmat = (u * pvals) @ u.conj().T
        lhs = _nuclear(rmat @ xi @ rmat - pmat @ xi @ pmat)
        record("filter_sandwich", 2.0 * eps_p + eps_p ** 2 - lhs)

    return LemmaReport(instances=instances, violations=violations, min_slack=min_slack)


# ---------------------------------------------------------------------------
# helpers: random problem generation, problem-file (de)serialization
# ---------------------------------------------------------------------------

def make_random_system(m: int, kappa: float, rng: np.random.Generator) -> LinearSystem:
    """Random m x m system whose rescaled singular values span [1/kappa, 1]."""
    if m < 2:
        raise DomainError("m >= 2")
    u = np.linalg.qr(_random_matrix(rng, m))[0]
    v = np.linalg.qr(_random_matrix(rng, m))[0]
    sv = np.concatenate([[1.0], rng.uniform(1.0 / kappa, 1.0, size=m - 2), [1.0 / kappa]])
    a = (u * sv) @ v.conj().T
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    return LinearSystem(a_matrix=a, b_vector=b / np.linalg.norm(b),
                        norm_bound=1.0, kappa_bound=kappa)


def _complex_pairs(arr: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in arr]


def linear_system_to_dict(sys: LinearSystem) -> dict:
    return {
        "matrix": [_complex_pairs(row) for row in sys.a_matrix],
        "b": _complex_pairs(sys.b_vector),
        "norm_bound": float(sys.norm_bound),
        "kappa_bound": float(sys.kappa_bound),
    }


def linear_system_from_dict(doc: dict) -> LinearSystem:
    try:
        matrix = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]])
        b = np.array([complex(re, im) for re, im in doc["b"]])
        norm_bound = float(doc["norm_bound"])
        kappa_bound = float(doc["kappa_bound"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed problem document: {exc}") from exc
    return LinearSystem(a_matrix=matrix, b_vector=b,
                        norm_bound=norm_bound, kappa_bound=kappa_bound)
