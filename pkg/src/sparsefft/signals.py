"""Signal sources, compressible test-signal generators, a brute-force
spectral oracle, error metrics, and local polynomial interpolation.

Conventions
-----------
A spectrum is stored as a length-n complex array indexed by 0..n-1.  Under
the "unsigned_window" convention index i is frequency i; under
"signed_window" index i is frequency i for i <= n//2 and i - n otherwise,
so the recoverable frequencies are (-ceil(n/2), floor(n/2)].  Either way a
frequency w occupies index w mod n.

Spectrum values are Fourier-series coefficients: the associated function
is f(x) = sum of values[i] * exp(1j * freq(i) * x) on [0, 2*pi).  The
symmetric-normalization transform pair (oracle_dft / oracle_idft) relates
to these coefficients by a factor of sqrt(n).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

UNSIGNED_WINDOW = "unsigned_window"
SIGNED_WINDOW = "signed_window"

_TWO_PI = 2.0 * np.pi


def signed_frequencies(n: int) -> np.ndarray:
    """Frequency value of each spectrum index under the signed convention."""
    idx = np.arange(n, dtype=np.int64)
    return np.where(idx <= n // 2, idx, idx - n)


@dataclass
class ExplicitSpectrum:
    """A fully materialized length-n spectrum of Fourier coefficients."""

    values: np.ndarray
    convention: str = UNSIGNED_WINDOW

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("spectrum must be a non-empty 1-d array")
        if self.convention not in (UNSIGNED_WINDOW, SIGNED_WINDOW):
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def n(self) -> int:
        return self.values.size

    def frequencies(self) -> np.ndarray:
        """Integer frequency of every index, per the convention tag."""
        if self.convention == SIGNED_WINDOW:
            return signed_frequencies(self.n)
        return np.arange(self.n, dtype=np.int64)


@dataclass
class ExplicitTimeVector:
    """Samples of a periodic function on the uniform n-point grid of [0, 2*pi)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("time vector must be a non-empty 1-d array")

    @property
    def n(self) -> int:
        return self.values.size


@dataclass
class FunctionSampler:
    """A pure, vectorized callable t -> f(t) on [0, 2*pi) with a declared
    bandwidth window of n frequency slots.

    The callable must accept an ndarray of positions and may be invoked
    concurrently.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    n: int


SignalSource = Union[ExplicitSpectrum, ExplicitTimeVector, FunctionSampler]


@dataclass
class SparseRepresentation:
    """A list of (frequency, coefficient) terms standing for a mostly-zero
    spectrum, at most b of them, frequencies distinct."""

    terms: list[tuple[int, complex]]
    convention: str = UNSIGNED_WINDOW
    b: int = 0

    def __post_init__(self) -> None:
        self.terms = [(int(w), complex(c)) for w, c in self.terms]
        freqs = [w for w, _ in self.terms]
        if len(set(freqs)) != len(freqs):
            raise ValueError("representation frequencies must be distinct")
        if self.b and len(self.terms) > self.b:
            raise ValueError(f"{len(self.terms)} terms exceed requested count {self.b}")

    def frequency_set(self) -> set[int]:
        return {w for w, _ in self.terms}

    def as_dense(self, n: int) -> np.ndarray:
        """Zero-extended length-n spectrum (frequency w lands at index w mod n)."""
        dense = np.zeros(n, dtype=np.complex128)
        for w, c in self.terms:
            dense[w % n] = c
        return dense

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "convention": self.convention,
            "terms": [[w, [c.real, c.imag]] for w, c in self.terms],
        }


@dataclass(frozen=True)
class CompressibilityModel:
    """Decay law for the sorted spectrum magnitudes of a test signal."""

    kind: str
    sparsity: int = 0
    p: float = 0.0
    alpha: float = 0.0
    c: float = 1.0

    @staticmethod
    def exact(sparsity: int) -> "CompressibilityModel":
        if sparsity < 1:
            raise ValueError("exact-sparse model needs at least one term")
        return CompressibilityModel(kind="exact", sparsity=sparsity)

    @staticmethod
    def algebraic(p: float, c: float = 1.0) -> "CompressibilityModel":
        if p <= 1.0:
            raise ValueError("algebraic decay exponent must exceed 1")
        if c <= 0.0:
            raise ValueError("decay scale must be positive")
        return CompressibilityModel(kind="algebraic", p=p, c=c)

    @staticmethod
    def exponential(alpha: float, c: float = 1.0) -> "CompressibilityModel":
        if alpha <= 0.0:
            raise ValueError("exponential decay rate must be positive")
        if c <= 0.0:
            raise ValueError("decay scale must be positive")
        return CompressibilityModel(kind="exponential", alpha=alpha, c=c)

    def describe(self) -> str:
        if self.kind == "exact":
            return f"exact:b={self.sparsity}"
        if self.kind == "algebraic":
            return f"algebraic:p={self.p},c={self.c}"
        return f"exponential:alpha={self.alpha},c={self.c}"


def gen_signal(
    n: int,
    model: CompressibilityModel,
    seed: int,
    convention: str = UNSIGNED_WINDOW,
) -> ExplicitSpectrum:
    """Generate a random spectrum whose sorted magnitudes follow `model`.

    Exact-sparse signals place `sparsity` spikes with magnitudes in [1, 2]
    at distinct random frequencies; decaying signals permute the full decay
    law over all n slots.  Phases are uniform.  Deterministic given seed.
    """
    if n < 4:
        raise ValueError(f"signal length must be at least 4, got {n}")
    rng = np.random.default_rng(seed)
    values = np.zeros(n, dtype=np.complex128)
    if model.kind == "exact":
        b = model.sparsity
        if b > n:
            raise ValueError(f"cannot place {b} spikes in {n} frequency slots")
        slots = rng.choice(n, size=b, replace=False)
        magnitudes = rng.uniform(1.0, 2.0, size=b)
        phases = rng.uniform(0.0, _TWO_PI, size=b)
        values[slots] = magnitudes * np.exp(1j * phases)
    else:
        ranks = np.arange(1, n + 1, dtype=np.float64)
        if model.kind == "algebraic":
            law = model.c * ranks ** (-model.p)
        elif model.kind == "exponential":
            law = model.c * np.exp2(-model.alpha * ranks)
        else:
            raise ValueError(f"unknown model kind {model.kind!r}")
        phases = rng.uniform(0.0, _TWO_PI, size=n)
        slots = rng.permutation(n)
        values[slots] = law * np.exp(1j * phases)
    return ExplicitSpectrum(values=values, convention=convention)


def _dft_block(a: np.ndarray, sign: float) -> np.ndarray:
    """Direct O(n^2) transform, row-blocked to cap memory at large n."""
    n = a.size
    out = np.empty(n, dtype=np.complex128)
    idx = np.arange(n)
    block = max(1, min(n, (1 << 21) // max(n, 1)))
    scale = 1.0 / math.sqrt(n)
    for start in range(0, n, block):
        rows = idx[start:start + block]
        # exact residue reduction keeps phases small for large n
        phase = (np.outer(rows, idx) % n).astype(np.float64)
        out[start:start + block] = (np.exp((sign * 2j * np.pi / n) * phase) @ a) * scale
    return out


def oracle_dft(time_vector: np.ndarray) -> np.ndarray:
    """Direct-evaluation DFT with symmetric 1/sqrt(n) normalization."""
    a = np.asarray(time_vector, dtype=np.complex128)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("input must be a non-empty 1-d array")
    return _dft_block(a, sign=-1.0)


def oracle_idft(spectrum: np.ndarray) -> np.ndarray:
    """Inverse of oracle_dft (same normalization, opposite sign)."""
    a = np.asarray(spectrum, dtype=np.complex128)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("input must be a non-empty 1-d array")
    return _dft_block(a, sign=+1.0)


def synthesize_time_vector(spectrum: ExplicitSpectrum) -> ExplicitTimeVector:
    """Evaluate the spectrum's trigonometric polynomial on the uniform grid.

    Equals sqrt(n) * oracle_idft(values) but runs in n log n; frequencies
    reduce mod n on the grid, so the result is convention-independent.
    """
    values = np.fft.ifft(spectrum.values) * spectrum.n
    return ExplicitTimeVector(values=values)


def oracle_top_b(spectrum: ExplicitSpectrum, b: int) -> tuple[SparseRepresentation, float]:
    """The b largest-magnitude terms with true coefficients, plus the exact
    residual energy of everything outside them.

    Magnitude ties are broken by ascending frequency; the residual energy
    does not depend on the tie-break.
    """
    n = spectrum.n
    if not 0 <= b <= n:
        raise ValueError(f"term count {b} out of range [0, {n}]")
    mags = np.abs(spectrum.values)
    freqs = spectrum.frequencies()
    order = np.lexsort((freqs, -mags))
    top = order[:b]
    terms = [(int(freqs[i]), complex(spectrum.values[i])) for i in top]
    tail = order[b:]
    tail_energy = float(np.sum(mags[tail] ** 2))
    rep = SparseRepresentation(terms=terms, convention=spectrum.convention, b=b)
    return rep, tail_energy


def error_l2(spectrum: ExplicitSpectrum, rep: SparseRepresentation) -> float:
    """Squared spectral error: sum over all slots of |true - represented|^2.

    Representation frequencies land at index w mod n, so signed and
    unsigned representations compare identically.
    """
    dense = rep.as_dense(spectrum.n)
    diff = spectrum.values - dense
    return float(np.sum(diff.real ** 2 + diff.imag ** 2))


@lru_cache(maxsize=32)
def _barycentric_weights(count: int) -> np.ndarray:
    # Equispaced-node barycentric weights, common scale dropped.
    w = np.array([math.comb(count - 1, i) for i in range(count)], dtype=np.float64)
    w[1::2] *= -1.0
    return w


def _interpolate_core(values: np.ndarray, ts: np.ndarray, kappa: int) -> np.ndarray:
    """Barycentric evaluation at positions ts using the 2*kappa grid points
    nearest each t, with periodic wrap-around of the sample indices."""
    n = values.size
    step = _TWO_PI / n
    u = ts / step
    nearest = np.rint(u)
    on_grid = np.abs(u - nearest) < 1e-9
    out = np.empty(ts.size, dtype=np.complex128)
    if on_grid.any():
        out[on_grid] = values[nearest[on_grid].astype(np.int64) % n]
    rest = ~on_grid
    if rest.any():
        base = np.floor(u[rest]).astype(np.int64)
        offsets = np.arange(2 * kappa, dtype=np.int64) - (kappa - 1)
        nodes = base[:, None] + offsets[None, :]
        ys = values[nodes % n]
        xs = nodes * step
        d = ts[rest][:, None] - xs
        ratios = _barycentric_weights(2 * kappa) / d
        out[rest] = (ratios * ys).sum(axis=1) / ratios.sum(axis=1)
    return out


def default_kappa(delta: float, p: float) -> int:
    """Stencil half-width that keeps interpolation error below the
    recovery error budget for a p-decaying signal at relative accuracy
    delta: half of log2(1/delta) + p, rounded up, plus one.  The constant
    is heuristic; callers should treat the result as a tunable default."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if p <= 0.0:
        raise ValueError(f"decay exponent must be positive, got {p}")
    return int(math.ceil((math.log2(1.0 / delta) + p) / 2.0)) + 1


def _check_stencil(n: int, kappa: int) -> None:
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if n < 4 * kappa:
        raise ValueError(f"grid of {n} points is too coarse for kappa={kappa}")


def interpolate_sample(time_vector: ExplicitTimeVector, t: float, kappa: int) -> complex:
    """Approximate f(t) from grid samples via a degree-(2*kappa - 1)
    polynomial through the 2*kappa nearest points (real and imaginary
    parts interpolated on the same real nodes).  Exact on grid points."""
    _check_stencil(time_vector.n, kappa)
    return complex(
        _interpolate_core(time_vector.values, np.asarray([float(t)]), kappa)[0]
    )


def interpolate_samples(
    time_vector: ExplicitTimeVector, ts: np.ndarray, kappa: int
) -> np.ndarray:
    """Vectorized interpolate_sample over an array of positions."""
    _check_stencil(time_vector.n, kappa)
    ts = np.asarray(ts, dtype=np.float64)
    return _interpolate_core(time_vector.values, ts, kappa)


def save_signal_csv(path, values: np.ndarray, domain: str) -> None:
    """Write a signal as CSV: a header naming the domain, then one
    're,im' line per index."""
    if domain not in ("spectrum", "time"):
        raise ValueError(f"domain must be 'spectrum' or 'time', got {domain!r}")
    data = np.asarray(values, dtype=np.complex128)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{domain}_re", f"{domain}_im"])
        for v in data:
            writer.writerow([repr(float(v.real)), repr(float(v.imag))])


def load_signal_csv(path) -> tuple[np.ndarray, str]:
    """Read a signal CSV written by save_signal_csv; returns (values, domain)."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError("signal file is empty")
    header = [cell.strip() for cell in rows[0]]
    domain = None
    for candidate in ("spectrum", "time"):
        if header == [f"{candidate}_re", f"{candidate}_im"]:
            domain = candidate
    if domain is None:
        raise ValueError(
            "header must be 'spectrum_re,spectrum_im' or 'time_re,time_im', "
            f"got {','.join(header)!r}"
        )
    if len(rows) < 2:
        raise ValueError("signal file has no samples")
    values = np.empty(len(rows) - 1, dtype=np.complex128)
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValueError(f"line {i}: expected two fields, got {len(row)}")
        try:
            values[i - 2] = complex(float(row[0]), float(row[1]))
        except ValueError as exc:
            raise ValueError(f"line {i}: {exc}") from exc
    return values, domain
