"""Frequency identification by residue voting with CRT fusion, and
coefficient estimation by coordinate-wise medians.

Identification walks every coarse group j: the largest bins are taken as
anchors, each anchor votes for the refinement bin closest to it at every
level l (revealing the anchored frequency mod p_l), and the residues fuse
into a candidate frequency by the CRT.  A frequency that was genuinely
isolated in a group produces an exact vote there, so any sufficiently
energetic frequency is reconstructed in more than two-thirds of the K
groups.  Estimation keeps exactly those candidates that clear the strict
2K/3 count and takes medians of their anchor values, which tolerates the
minority of collision-contaminated anchors.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .design import PrimePlan, plan_parameters
from .measurement import (
    MeasurementSet,
    measure_from_grid,
    measure_function,
    measure_vector,
)
from .number_theory import ResidueSystem, crt_combine
from .signals import (
    UNSIGNED_WINDOW,
    CompressibilityModel,
    ExplicitSpectrum,
    ExplicitTimeVector,
    FunctionSampler,
    SignalSource,
    SparseRepresentation,
)

_SQRT2 = float(np.sqrt(2.0))


@dataclass
class Candidate:
    """One reconstructed frequency: which group and anchor rank produced it,
    and the anchor measurement that doubles as a coefficient estimate."""

    omega: int
    j: int
    rank: int
    anchor: complex


@dataclass
class RecoveryParameters:
    """Recovery knobs: output size b, separation sparsity b_prime, and the
    precision constant c that scales the coefficient error budget."""

    b: int
    b_prime: int
    c: float = 1.0
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.b < 1:
            raise ValueError(f"output term count must be >= 1, got {self.b}")
        if self.b_prime < self.b:
            raise ValueError(
                f"separation sparsity {self.b_prime} must be >= output count {self.b}"
            )
        if self.c < 1.0:
            raise ValueError(f"precision constant must be >= 1, got {self.c}")


@dataclass
class RecoveryReport:
    """Bookkeeping from one recovery run."""

    plan_summary: dict
    candidate_counts: dict[int, int]
    sample_count: int
    convention: str
    timings_ms: dict[str, float] = field(default_factory=dict)
    measurements: MeasurementSet | None = None

    def to_json(self, include_timings: bool = True) -> dict:
        doc = {
            "plan": self.plan_summary,
            "candidate_counts": {str(w): c for w, c in sorted(self.candidate_counts.items())},
            "sample_count": self.sample_count,
            "convention": self.convention,
        }
        if include_timings:
            doc["timings_ms"] = self.timings_ms
        return doc


def _window_representative(x: int, modulus_product: int, n: int, convention: str):
    """Map a CRT result in [0, modulus_product) into the frequency window,
    or None when no representative exists (a spurious reconstruction)."""
    if convention == UNSIGNED_WINDOW:
        return x if x < n else None
    if x <= n // 2:
        return x
    low = x - modulus_product
    if low > -((n + 1) // 2):  # window is open at -ceil(n/2)
        return low
    return None


def identify(ms: MeasurementSet, plan: PrimePlan, b_prime: int) -> list[Candidate]:
    """Reconstruct candidate frequencies from every coarse group.

    Per group j the q_j coarse bins are ordered by magnitude (ties broken
    by ascending residue) and the top min(b_prime + 1, q_j) become anchors.
    Each anchor scans the p_l refinement bins above its residue, votes for
    the closest one (smallest offset wins ties), and the voted residues
    combine by the CRT.  Candidates whose CRT value has no representative
    in the frequency window are dropped; duplicates are preserved so the
    caller can count multiplicities.
    """
    if plan.k != b_prime:
        raise ValueError(
            f"plan was built for sparsity {plan.k}, not {b_prime}"
        )
    p_product = plan.p_product
    candidates: list[Candidate] = []
    for j in range(1, plan.K + 1):
        q = plan.q(j)
        level0 = ms.bins[(j, 0)]
        order = np.lexsort((np.arange(q), -np.abs(level0)))
        take = min(b_prime + 1, q)
        modulus_product = q * p_product
        for rank in range(1, take + 1):
            r0 = int(order[rank - 1])
            anchor = complex(level0[r0])
            residues = [r0]
            moduli = [q]
            for l in range(1, plan.m + 1):
                p = plan.p(l)
                lane = ms.bins[(j, l)][r0::q]  # refinement bins r0 + t*q, t in [0, p)
                t_min = int(np.argmin(np.abs(lane - anchor)))
                if p == q:
                    # The smallest coarse prime may coincide with the largest
                    # fine prime; the refinement lane then pins the frequency
                    # mod q^2 and replaces the coarse residue, keeping the
                    # modulus set coprime and its product at q * p_product.
                    residues[0] = (r0 + t_min * q) % (q * q)
                    moduli[0] = q * q
                else:
                    residues.append((r0 + t_min * q) % p)
                    moduli.append(p)
            x = crt_combine(ResidueSystem(residues=tuple(residues), moduli=tuple(moduli)))
            omega = _window_representative(x, modulus_product, plan.n, ms.convention)
            if omega is not None:
                candidates.append(Candidate(omega=omega, j=j, rank=rank, anchor=anchor))
    return candidates


def estimate(
    candidates: list[Candidate],
    plan: PrimePlan,
    b: int,
    convention: str = UNSIGNED_WINDOW,
) -> SparseRepresentation:
    """Median-estimate coefficients for majority candidates and keep the top b.

    A frequency qualifies only when reconstructed strictly more than 2K/3
    times; its coefficient is the median of the real parts plus i times the
    median of the imaginary parts of its anchors.  More than half of those
    anchors are collision-free, so each median lands within the accurate
    anchors' spread.  Output is the b largest-magnitude terms, ties broken
    by ascending frequency; fewer than b may qualify.
    """
    groups: dict[int, list[complex]] = {}
    for cand in candidates:
        groups.setdefault(cand.omega, []).append(cand.anchor)
    kept: list[tuple[int, complex]] = []
    for omega, anchors in groups.items():
        if 3 * len(anchors) <= 2 * plan.K:  # strict threshold, exact arithmetic
            continue
        arr = np.asarray(anchors, dtype=np.complex128)
        coeff = complex(float(np.median(arr.real)), float(np.median(arr.imag)))
        kept.append((omega, coeff))
    kept.sort(key=lambda term: (-abs(term[1]), term[0]))
    return SparseRepresentation(terms=kept[:b], convention=convention, b=b)


def compute_epsilon_bprime(
    sorted_magnitudes, b: int, c: float
) -> tuple[float, int]:
    """Derive the precision target and separation sparsity from a spectrum.

    epsilon is the b-th largest magnitude divided by sqrt(2)*c; the
    separation sparsity is the smallest rank whose magnitude tail (1-norm
    from that rank on) drops below epsilon/2.  If no rank within the
    spectrum qualifies the full length is returned, which callers must
    treat as a degenerate signal.
    """
    mags = np.asarray(sorted_magnitudes, dtype=np.float64)
    if mags.ndim != 1 or mags.size < 1:
        raise ValueError("magnitudes must be a non-empty 1-d array")
    if b < 1 or b > mags.size:
        raise ValueError(f"term count {b} out of range [1, {mags.size}]")
    if c < 1.0:
        raise ValueError(f"precision constant must be >= 1, got {c}")
    if np.any(np.diff(mags) > 0):
        raise ValueError("magnitudes must be sorted in descending order")
    epsilon = float(mags[b - 1]) / (_SQRT2 * c)
    n = mags.size
    tails = np.concatenate([np.cumsum(mags[::-1])[::-1], [0.0]])
    if epsilon > 0.0:
        hits = np.nonzero(tails[:n] < epsilon / 2.0)[0]
        if hits.size:
            return epsilon, int(hits[0]) + 1
    return epsilon, n


def select_parameters(
    b: int, delta: float, model: CompressibilityModel
) -> RecoveryParameters:
    """Choose the separation sparsity and precision constant for a target
    relative accuracy delta under a known decay model.

    Exact-sparse signals need only b_prime = b + 1 and c = 1.  For decaying
    models c grows like 1/delta (algebraic) or b/delta (exponential) and
    b_prime is the smallest integer whose integral tail bound drops below
    epsilon/2.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if b < 1:
        raise ValueError(f"output term count must be >= 1, got {b}")

    if model.kind == "exact":
        return RecoveryParameters(b=b, b_prime=b + 1, c=1.0)

    if model.kind == "algebraic":
        c_const = float(np.ceil(6.0 / delta))
        epsilon = model.c * b ** (-model.p) / (_SQRT2 * c_const)

        def tail_ok(bp: int) -> bool:
            return model.c * bp ** (1.0 - model.p) / (model.p - 1.0) < epsilon / 2.0

        guess = (2.0 * model.c / ((model.p - 1.0) * epsilon)) ** (1.0 / (model.p - 1.0))
    elif model.kind == "exponential":
        c_const = float(np.ceil(6.0 * b / delta))
        epsilon = model.c * 2.0 ** (-model.alpha * b) / (_SQRT2 * c_const)
        ln2 = float(np.log(2.0))

        def tail_ok(bp: int) -> bool:
            return model.c * 2.0 ** (-model.alpha * bp) / (model.alpha * ln2) < epsilon / 2.0

        guess = np.log2(2.0 * model.c / (epsilon * model.alpha * ln2)) / model.alpha
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")

    b_prime = max(1, int(np.ceil(guess)))
    while b_prime > 1 and tail_ok(b_prime - 1):
        b_prime -= 1
    while not tail_ok(b_prime):
        b_prime += 1
    return RecoveryParameters(b=b, b_prime=b_prime, c=c_const, epsilon=epsilon)


def sparse_approximate(
    src: SignalSource,
    params: RecoveryParameters,
    kappa: int = 8,
    threads: int = 1,
    keep_measurements: bool = False,
) -> tuple[SparseRepresentation, RecoveryReport]:
    """End-to-end recovery: plan, measure, identify, estimate.

    The measurement path follows the source type: explicit spectra are
    summed directly, samplable functions go through aliased small DFTs,
    and grid-bound time vectors additionally interpolate off-grid sample
    positions with a 2*kappa-point stencil.
    """
    n = src.n
    # Plan construction needs sparsity >= 2; a degenerate b_prime of 1 is
    # served by the smallest valid plan.
    b_prime = max(2, params.b_prime)
    if b_prime >= n:
        raise ValueError(
            f"separation sparsity {b_prime} must stay below signal length {n}"
        )

    timings: dict[str, float] = {}
    start = time.perf_counter()
    plan = plan_parameters(n, b_prime)
    timings["plan_ms"] = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    if isinstance(src, ExplicitSpectrum):
        ms = measure_vector(src, plan, threads=threads)
    elif isinstance(src, FunctionSampler):
        ms = measure_function(src, plan, threads=threads)
    elif isinstance(src, ExplicitTimeVector):
        ms = measure_from_grid(src, plan, kappa=kappa, threads=threads)
    else:
        raise TypeError(f"unsupported signal source {type(src).__name__}")
    timings["measure_ms"] = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    candidates = identify(ms, plan, b_prime)
    timings["identify_ms"] = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    rep = estimate(candidates, plan, params.b, convention=ms.convention)
    timings["estimate_ms"] = (time.perf_counter() - start) * 1e3

    counts = Counter(cand.omega for cand in candidates)
    summary = {
        "n": plan.n,
        "k": plan.k,
        "m": plan.m,
        "K": plan.K,
        "q_first": plan.q(1),
        "q_last": plan.q(plan.K),
        "total_measurements": plan.total_measurements,
    }
    report = RecoveryReport(
        plan_summary=summary,
        candidate_counts=dict(counts),
        sample_count=ms.sample_count,
        convention=ms.convention,
        timings_ms=timings,
        measurements=ms if keep_measurements else None,
    )
    return rep, report
