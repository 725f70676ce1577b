import numpy as np
import pytest

from sparsefft import (
    SIGNED_WINDOW,
    ExplicitSpectrum,
    ExplicitTimeVector,
    dft_arbitrary_length,
    make_trig_sampler,
    measure_from_grid,
    measure_function,
    measure_vector,
    plan_parameters,
    synthesize_time_vector,
    telescoping_residual,
)

TWO_PI = 2.0 * np.pi


def naive_dft(x):
    n = len(x)
    idx = np.arange(n)
    return np.exp((-2j * np.pi / n) * np.outer(idx, idx)) @ np.asarray(x, complex)


def random_signed_spectrum(rng, n, terms):
    values = np.zeros(n, dtype=complex)
    slots = rng.choice(n, size=terms, replace=False)
    values[slots] = rng.uniform(0.5, 2.0, terms) * np.exp(
        1j * rng.uniform(0, TWO_PI, terms)
    )
    return ExplicitSpectrum(values=values, convention=SIGNED_WINDOW)


# ------------------------------------------------------------ arbitrary-length DFT


def test_dft_constant_input():
    c = 0.7 - 0.2j
    out = dft_arbitrary_length(np.full(4, c))
    assert np.allclose(out, [4 * c, 0, 0, 0], atol=1e-12)


def test_dft_pure_tone():
    k = np.arange(6)
    x = np.exp(2j * np.pi * 2 * k / 6)
    out = dft_arbitrary_length(x)
    expected = np.zeros(6, complex)
    expected[2] = 6.0
    assert np.allclose(out, expected, atol=1e-12)


def test_dft_length_seven_matches_naive():
    rng = np.random.default_rng(30)
    x = rng.normal(size=7) + 1j * rng.normal(size=7)
    assert np.max(np.abs(dft_arbitrary_length(x) - naive_dft(x))) <= 1e-10 * np.sum(
        np.abs(x)
    )


@pytest.mark.parametrize("n", [2, 3, 16, 97, 255, 256, 263, 289, 1000, 1909])
def test_dft_matches_naive_various_lengths(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    err = np.max(np.abs(dft_arbitrary_length(x) - naive_dft(x)))
    assert err <= 1e-10 * np.sum(np.abs(x))


def test_dft_parseval():
    rng = np.random.default_rng(31)
    for n in (5, 128, 500):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        out = dft_arbitrary_length(x)
        assert np.isclose(
            np.sum(np.abs(out) ** 2), n * np.sum(np.abs(x) ** 2), rtol=1e-9
        )


def test_dft_rejects_bad_input():
    with pytest.raises(ValueError):
        dft_arbitrary_length(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        dft_arbitrary_length(np.zeros(0))


# ------------------------------------------------------------ vector path


def test_measure_vector_zero_spectrum():
    plan = plan_parameters(30, 2)
    ms = measure_vector(ExplicitSpectrum(values=np.zeros(30)), plan)
    assert all(np.all(arr == 0) for arr in ms.bins.values())
    assert ms.sample_count == 30


def test_measure_vector_single_spike_lands_in_one_bin():
    plan = plan_parameters(30, 2)
    values = np.zeros(30, dtype=complex)
    values[17] = 1.0
    ms = measure_vector(ExplicitSpectrum(values=values), plan)
    for (j, l), arr in ms.bins.items():
        modulus = plan.modulus(l, j)
        expected = np.zeros(modulus, dtype=complex)
        expected[17 % modulus] = 1.0
        assert np.array_equal(arr, expected)


def test_measure_vector_collision_sums():
    plan = plan_parameters(30, 2)  # q_1 = 5
    values = np.zeros(30, dtype=complex)
    values[3] = 1.0
    values[8] = 1.0
    ms = measure_vector(ExplicitSpectrum(values=values), plan)
    assert ms.bins[(1, 0)][3] == 2.0  # 3 and 8 collide mod 5


def test_measure_vector_signed_convention_changes_residues():
    n = 30
    values = np.zeros(n, dtype=complex)
    values[29] = 1.0  # unsigned frequency 29, signed frequency -1
    plan = plan_parameters(n, 2)
    unsigned = measure_vector(ExplicitSpectrum(values=values), plan)
    signed = measure_vector(
        ExplicitSpectrum(values=values, convention=SIGNED_WINDOW), plan
    )
    assert unsigned.bins[(1, 0)][29 % 5] == 1.0
    assert signed.bins[(1, 0)][(-1) % 5] == 1.0


def test_measure_vector_length_mismatch():
    plan = plan_parameters(30, 2)
    with pytest.raises(ValueError):
        measure_vector(ExplicitSpectrum(values=np.zeros(31)), plan)


# ------------------------------------------------------------ function path


def test_two_point_transform_parity():
    # one tone at frequency w sampled twice: bin 0 reads C*(1+(-1)^w)/2
    for omega, coeff in [(4, 1.0 + 0.5j), (7, -0.25j)]:
        samples = coeff * np.exp(1j * omega * np.array([0.0, np.pi]))
        bins = dft_arbitrary_length(samples) / 2
        expected0 = coeff * (1 + (-1) ** omega) / 2
        expected1 = coeff * (1 + (-1) ** (omega - 1)) / 2
        assert np.allclose(bins, [expected0, expected1], atol=1e-12)


def test_measure_function_constant():
    plan = plan_parameters(30, 2)
    c = 1.5 - 2.0j
    sampler = make_trig_sampler(
        ExplicitSpectrum(values=np.array([c] + [0] * 29), convention=SIGNED_WINDOW)
    )
    ms = measure_function(sampler, plan)
    for (j, l), arr in ms.bins.items():
        assert abs(arr[0] - c) < 1e-12
        assert np.max(np.abs(arr[1:])) < 1e-12


def test_measure_function_two_tones_alias():
    plan = plan_parameters(30, 2)  # q_1 = 5
    values = np.zeros(30, dtype=complex)
    values[3] = 1.0
    values[8] = 1.0
    spectrum = ExplicitSpectrum(values=values, convention=SIGNED_WINDOW)
    ms = measure_function(make_trig_sampler(spectrum), plan)
    coarse = ms.bins[(1, 0)]
    assert abs(coarse[3] - 2.0) < 1e-9
    assert np.max(np.abs(np.delete(coarse, 3))) < 1e-9


def test_function_path_sample_count():
    plan = plan_parameters(210, 3)
    spectrum = random_signed_spectrum(np.random.default_rng(1), 210, 2)
    ms = measure_function(make_trig_sampler(spectrum), plan)
    assert ms.sample_count == plan.total_measurements


def test_aliasing_equivalence_and_telescoping():
    rng = np.random.default_rng(32)
    for n, k in [(210, 3), (1000, 4)]:
        plan = plan_parameters(n, k)
        spectrum = random_signed_spectrum(rng, n, 4)
        ms_vec = measure_vector(spectrum, plan)
        ms_fun = measure_function(make_trig_sampler(spectrum), plan)
        for key, vec_arr in ms_vec.bins.items():
            fun_arr = ms_fun.bins[key]
            assert np.all(
                np.abs(fun_arr - vec_arr) <= 1e-9 * (1.0 + np.abs(vec_arr))
            )
        assert telescoping_residual(ms_vec) < 1e-9
        assert telescoping_residual(ms_fun) < 1e-9


def test_threads_produce_identical_results():
    plan = plan_parameters(210, 3)
    spectrum = random_signed_spectrum(np.random.default_rng(2), 210, 3)
    seq = measure_vector(spectrum, plan, threads=1)
    par = measure_vector(spectrum, plan, threads=4)
    for key in seq.bins:
        assert np.array_equal(seq.bins[key], par.bins[key])
    fun_seq = measure_function(make_trig_sampler(spectrum), plan, threads=1)
    fun_par = measure_function(make_trig_sampler(spectrum), plan, threads=4)
    for key in fun_seq.bins:
        assert np.array_equal(fun_seq.bins[key], fun_par.bins[key])


# ------------------------------------------------------------ grid path


def test_grid_path_close_to_function_path():
    n = 210
    plan = plan_parameters(n, 2)
    grid = np.arange(n) * TWO_PI / n
    tv = ExplicitTimeVector(values=np.exp(1j * 5 * grid))
    values = np.zeros(n, dtype=complex)
    values[5] = 1.0
    sampler = make_trig_sampler(ExplicitSpectrum(values=values, convention=SIGNED_WINDOW))
    ms_fun = measure_function(sampler, plan)
    ms_grid = measure_from_grid(tv, plan, kappa=6)
    for key in ms_fun.bins:
        assert np.max(np.abs(ms_grid.bins[key] - ms_fun.bins[key])) < 1e-6
    assert ms_grid.sample_count == n


def test_grid_path_on_grid_positions_bypass_interpolation():
    # with every modulus dividing n, all sample positions are grid points
    n = 210
    plan = plan_parameters(n, 2)
    rng = np.random.default_rng(33)
    tv = ExplicitTimeVector(values=rng.normal(size=n) + 1j * rng.normal(size=n))
    ms = measure_from_grid(tv, plan, kappa=6)
    for (j, l), arr in ms.bins.items():
        length = plan.modulus(l, j)
        if n % length == 0:
            gathered = tv.values[:: n // length][:length]
            expected = dft_arbitrary_length(gathered) / length
            assert np.array_equal(arr, expected)


def test_grid_path_discrepancy_shrinks_with_kappa():
    n = 256
    plan = plan_parameters(n, 2)
    values = np.zeros(n, dtype=complex)
    values[9] = 1.0
    values[(-6) % n] = 0.8j
    spectrum = ExplicitSpectrum(values=values, convention=SIGNED_WINDOW)
    tv = synthesize_time_vector(spectrum)
    ms_fun = measure_function(make_trig_sampler(spectrum), plan)
    discrepancies = []
    for kappa in (3, 6):
        ms_grid = measure_from_grid(tv, plan, kappa=kappa)
        worst = max(
            float(np.max(np.abs(ms_grid.bins[key] - ms_fun.bins[key])))
            for key in ms_fun.bins
        )
        discrepancies.append(worst)
    assert discrepancies[1] < discrepancies[0]


def test_grid_path_validates_arguments():
    plan = plan_parameters(30, 2)
    tv = ExplicitTimeVector(values=np.zeros(30, dtype=complex))
    with pytest.raises(ValueError):
        measure_from_grid(tv, plan, kappa=8)  # 30 < 32
    with pytest.raises(ValueError):
        measure_from_grid(tv, plan, kappa=0)
    with pytest.raises(ValueError):
        measure_from_grid(ExplicitTimeVector(values=np.zeros(31)), plan, kappa=2)


# ------------------------------------------------------------ serialization


def test_measurement_set_json_layout():
    plan = plan_parameters(30, 2)
    values = np.zeros(30, dtype=complex)
    values[4] = 1.0 + 2.0j
    ms = measure_vector(ExplicitSpectrum(values=values), plan)
    doc = ms.to_json()
    assert doc["sample_count"] == 30
    assert doc["convention"] == "unsigned_window"
    key = "1,0"
    assert key in doc["bins"]
    assert doc["bins"][key][4 % 5] == [1.0, 2.0]
