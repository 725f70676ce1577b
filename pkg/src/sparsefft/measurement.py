"""Measurement acquisition.

Every measurement is the sum of spectrum coefficients over one residue
class mod p_l * q_j.  Two acquisition paths produce identical numbers:

* the vector path sums an explicit spectrum directly over residue classes;
* the function path takes p_l * q_j equispaced samples of f and computes a
  small DFT, which aliases every frequency w into bin w mod p_l * q_j.

Bins therefore hold plain sums of Fourier-series coefficients on both
paths (the function path divides its length-n DFT by n).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .design import PrimePlan
from .signals import (
    SIGNED_WINDOW,
    ExplicitSpectrum,
    ExplicitTimeVector,
    FunctionSampler,
    _interpolate_core,
)

_NAIVE_DFT_LIMIT = 256
_TWO_PI = 2.0 * np.pi


@dataclass
class MeasurementSet:
    """All residue-class sums for a plan, keyed by (group j, level l)."""

    plan: PrimePlan
    bins: dict[tuple[int, int], np.ndarray]
    sample_count: int
    convention: str

    def level0(self, j: int) -> np.ndarray:
        """The q_j coarse bins for group j."""
        return self.bins[(j, 0)]

    def to_json(self) -> dict:
        return {
            "convention": self.convention,
            "sample_count": self.sample_count,
            "plan": self.plan.to_json(),
            "bins": {
                f"{j},{l}": [[v.real, v.imag] for v in arr]
                for (j, l), arr in self.bins.items()
            },
        }


def telescoping_residual(ms: MeasurementSet) -> float:
    """Largest violation of the refinement identity: for every group the
    p_l refinement bins of a coarse residue must sum back to the coarse bin."""
    worst = 0.0
    for j in range(1, ms.plan.K + 1):
        q = ms.plan.q(j)
        coarse = ms.bins[(j, 0)]
        for l in range(1, ms.plan.m + 1):
            p = ms.plan.p(l)
            folded = ms.bins[(j, l)].reshape(p, q).sum(axis=0)
            worst = max(worst, float(np.max(np.abs(folded - coarse))))
    return worst


def dft_arbitrary_length(samples: np.ndarray) -> np.ndarray:
    """Unnormalized DFT X[h] = sum_k x[k] exp(-2*pi*i*h*k/n) for any length.

    Small inputs are evaluated directly; longer ones go through a chirp
    convolution on a padded power-of-two FFT, so prime and two-prime
    lengths cost n log n.  Either way the result matches the direct
    formula to within 1e-10 * l1-norm.
    """
    x = np.asarray(samples, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("input must be a non-empty 1-d array")
    if x.size <= _NAIVE_DFT_LIMIT:
        return _dft_direct(x)
    return _dft_chirp(x)


def _dft_direct(x: np.ndarray) -> np.ndarray:
    n = x.size
    idx = np.arange(n)
    phase = (np.outer(idx, idx) % n).astype(np.float64)
    return np.exp((-2j * np.pi / n) * phase) @ x


def _dft_chirp(x: np.ndarray) -> np.ndarray:
    n = x.size
    k = np.arange(n, dtype=np.int64)
    # k^2 reduced mod 2n exactly, so chirp phases stay in [0, 2*pi).
    chirp = np.exp((-1j * np.pi / n) * ((k * k) % (2 * n)).astype(np.float64))
    padded = 1
    while padded < 2 * n - 1:
        padded <<= 1
    a = np.zeros(padded, dtype=np.complex128)
    a[:n] = x * chirp
    b = np.zeros(padded, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[padded - n + 1:] = np.conj(chirp[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:n]
    return chirp * conv


def _acquire(plan: PrimePlan, worker, threads: int) -> dict[tuple[int, int], np.ndarray]:
    keys = list(plan.pairs())
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, keys))
    else:
        results = [worker(key) for key in keys]
    return dict(zip(keys, results))


def measure_vector(
    spectrum: ExplicitSpectrum, plan: PrimePlan, threads: int = 1
) -> MeasurementSet:
    """Sum an explicit spectrum over every residue class of the plan."""
    if spectrum.n != plan.n:
        raise ValueError(
            f"spectrum length {spectrum.n} does not match plan length {plan.n}"
        )
    freqs = spectrum.frequencies()
    vals = spectrum.values

    def one(pair: tuple[int, int]) -> np.ndarray:
        j, l = pair
        modulus = plan.modulus(l, j)
        r = freqs % modulus
        return np.bincount(r, weights=vals.real, minlength=modulus) + 1j * np.bincount(
            r, weights=vals.imag, minlength=modulus
        )

    bins = _acquire(plan, one, threads)
    return MeasurementSet(
        plan=plan, bins=bins, sample_count=plan.n, convention=spectrum.convention
    )


def measure_function(
    sampler: FunctionSampler, plan: PrimePlan, threads: int = 1
) -> MeasurementSet:
    """Acquire every residue class by aliased small DFTs of function samples.

    For each (j, l) the function is sampled at p_l * q_j equispaced points
    and transformed, folding frequency w into bin w mod p_l * q_j.  Each
    pair is sampled independently (no reuse across nested grids), so the
    total sample count equals the plan's measurement count.
    """
    if sampler.n != plan.n:
        raise ValueError(
            f"sampler window {sampler.n} does not match plan length {plan.n}"
        )

    def one(pair: tuple[int, int]) -> np.ndarray:
        j, l = pair
        length = plan.modulus(l, j)
        positions = np.arange(length) * (_TWO_PI / length)
        values = np.asarray(sampler.fn(positions), dtype=np.complex128)
        if values.shape != positions.shape:
            raise ValueError("sampler must return one value per position")
        return dft_arbitrary_length(values) / length

    bins = _acquire(plan, one, threads)
    sample_count = sum(plan.modulus(l, j) for j, l in plan.pairs())
    return MeasurementSet(
        plan=plan, bins=bins, sample_count=sample_count, convention=SIGNED_WINDOW
    )


def measure_from_grid(
    time_vector: ExplicitTimeVector,
    plan: PrimePlan,
    kappa: int,
    threads: int = 1,
) -> MeasurementSet:
    """Like measure_function, but for a function known only on the uniform
    n-point grid: off-grid sample positions are filled in by local
    polynomial interpolation through the 2*kappa nearest grid points.
    Positions that land exactly on the grid read the stored sample."""
    if time_vector.n != plan.n:
        raise ValueError(
            f"time vector length {time_vector.n} does not match plan length {plan.n}"
        )
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    n = plan.n
    if n < 4 * kappa:
        raise ValueError(f"grid of {n} points is too coarse for kappa={kappa}")
    stored = time_vector.values

    def one(pair: tuple[int, int]) -> np.ndarray:
        j, l = pair
        length = plan.modulus(l, j)
        ks = np.arange(length, dtype=np.int64)
        scaled = ks * n  # sample k sits at grid position k*n/length
        on_grid = scaled % length == 0
        samples = np.empty(length, dtype=np.complex128)
        samples[on_grid] = stored[scaled[on_grid] // length]
        off = ~on_grid
        if off.any():
            positions = ks[off] * (_TWO_PI / length)
            samples[off] = _interpolate_core(stored, positions, kappa)
        return dft_arbitrary_length(samples) / length

    bins = _acquire(plan, one, threads)
    return MeasurementSet(
        plan=plan, bins=bins, sample_count=plan.n, convention=SIGNED_WINDOW
    )


def make_trig_sampler(spectrum: ExplicitSpectrum) -> FunctionSampler:
    """Band-limited interpolant of a spectrum as a sampleable function.

    Frequencies are taken in the signed window regardless of the spectrum's
    storage convention (index i contributes frequency i or i - n), which
    leaves every grid sample unchanged and keeps all energy recoverable
    from sub-window sampling.  Cost per sample is proportional to the
    number of nonzero coefficients.
    """
    n = spectrum.n
    idx = np.flatnonzero(spectrum.values)
    coeffs = spectrum.values[idx]
    omegas = np.where(idx <= n // 2, idx, idx - n).astype(np.float64)

    def fn(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.float64)
        out = np.zeros(ts.shape, dtype=np.complex128)
        block = 4096
        for start in range(0, ts.size, block):
            chunk = ts[start:start + block]
            out[start:start + block] = np.exp(1j * np.outer(chunk, omegas)) @ coeffs
        return out

    return FunctionSampler(fn=fn, n=n)
