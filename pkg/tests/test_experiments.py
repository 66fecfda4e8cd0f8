import numpy as np
import pytest

from ensembles.families import fourier_basis_vector, fourier_weyl_family
from ensembles.rng import stream
from experiments.concentration import run_concentration
from experiments.coupon import hitting_time, output_rank, run_coupon
from experiments.scaling import run_scaling_scan
from experiments.stats import non_increasing, ols_fit, summarize
from linalg.errors import InvalidParameterError, ResourceLimitError
from runtime.settings import Settings


def test_summarize():
    s = summarize([1.0, 2.0, 3.0, 4.0])
    assert (s.count, s.mean, s.median, s.min, s.max) == (4, 2.5, 2.5, 1.0, 4.0)
    assert s.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert summarize([7.0]).stderr == 0.0
    with pytest.raises(ValueError):
        summarize([])


def test_ols_fit_recovers_a_line():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    slope, intercept = ols_fit(x, 3.0 - 0.5 * x)
    assert slope == pytest.approx(-0.5)
    assert intercept == pytest.approx(3.0)
    with pytest.raises(ValueError):
        ols_fit([1.0, 1.0], [2.0, 3.0])


def test_non_increasing():
    assert non_increasing([1.0, 0.5, 0.25], [0.01, 0.01, 0.01])
    assert non_increasing([1.0, 1.01], [0.01, 0.01])
    assert not non_increasing([1.0, 1.5], [0.01, 0.01])


# -------- coupon collector --------

def test_hitting_time_covers_every_residue():
    d = 8
    for t in range(20):
        hit, indices = hitting_time(d, stream(1, 0, d, t))
        assert hit == len(indices) >= d
        assert set(indices // d) == set(range(d))
        assert len(set(indices[:-1] // d)) == d - 1


def test_hitting_time_is_reproducible():
    a = hitting_time(16, stream(4, 0, 16, 3))
    b = hitting_time(16, stream(4, 0, 16, 3))
    assert a[0] == b[0] and np.array_equal(a[1], b[1])


def test_output_rank_follows_distinct_residues():
    d = 4
    family = fourier_weyl_family(d)
    assert output_rank(family, np.array([0, 1, 2]), 1e-8) == 1
    assert output_rank(family, np.array([0, 4, 9]), 1e-8) == 3
    assert output_rank(family, np.array([0, 5, 10, 15]), 1e-8) == 4
    assert np.allclose(family[2 * d + 1] @ fourier_basis_vector(d, 0), fourier_basis_vector(d, 2))


def test_coupon_d2_mean():
    record = run_coupon(2, trials=4000, seed=1, threads=1)
    assert record.summary["mean"] == pytest.approx(3.0, abs=0.1)
    assert all(r["draws"] >= 2 for r in record.rows)


def test_coupon_d64_matches_the_oracle():
    record = run_coupon(64, trials=200, seed=3, threads=1)
    assert record.summary["oracle"] == pytest.approx(303.6, abs=0.1)
    assert record.summary["relative_error_mean"] <= 0.10
    assert record.summary["relative_error_median"] <= 0.15
    assert record.summary["min"] >= 64
    assert len(record.rows) == 200


def test_coupon_cross_check():
    record = run_coupon(4, trials=20, seed=5, cross_check=True, threads=1)
    assert record.summary["cross_check_ok"] is True
    assert all(r["full_rank_at_hit"] for r in record.rows)
    with pytest.raises(InvalidParameterError):
        run_coupon(32, trials=2, seed=5, cross_check=True)


def test_coupon_validation():
    with pytest.raises(InvalidParameterError):
        run_coupon(1, trials=5, seed=1)
    with pytest.raises(ResourceLimitError):
        run_coupon(128, trials=5, seed=1)


def test_coupon_is_independent_of_thread_count():
    a = run_coupon(16, trials=30, seed=9, threads=1)
    b = run_coupon(16, trials=30, seed=9, threads=4)
    assert a.rows == b.rows


# -------- concentration --------

def test_concentration_failure_rate_decreases():
    record = run_concentration(8, [5, 10, 20], delta=0.5, trials=2000, seed=1, threads=1)
    freqs = [c["frequency"] for c in sorted(record.cells, key=lambda c: c["n"])]
    assert freqs[0] > freqs[-1]
    assert record.summary["monotonic"]
    assert record.summary["slope"] < 0
    assert record.summary["fitted_c"] > 0


def test_concentration_censors_cells_without_failures():
    record = run_concentration(4, [2, 200], delta=0.99, trials=200, seed=2, threads=1)
    big = next(c for c in record.cells if c["n"] == 200)
    assert big["censored"] and big["upper_bound"] == pytest.approx(1 / 200)
    assert 200 in record.summary["censored_cells"]
    assert record.summary["slope"] is None


def test_concentration_values_are_probabilities():
    record = run_concentration(3, [4], delta=0.5, trials=50, seed=3, threads=1)
    assert all(0.0 <= r["value"] <= 1.0 for r in record.rows)


def test_concentration_validation():
    with pytest.raises(InvalidParameterError):
        run_concentration(4, [5], delta=1.0, trials=10, seed=1)
    with pytest.raises(InvalidParameterError):
        run_concentration(4, [0], delta=0.5, trials=10, seed=1)


# -------- scaling --------

def small_settings() -> Settings:
    return Settings({"estimator": {"restarts": 4}, "caps": {"max_n": 64}, "threads": 1})


def test_single_unitary_cells_sit_at_the_maximum():
    record = run_scaling_scan("haar", [3], [1], trials=3, seed=1, settings=small_settings(), threads=1)
    assert record.cells[0]["mean"] == pytest.approx(2 / 3, abs=1e-6)
    assert len(record.rows) == 3


def test_full_family_cell_is_zero():
    record = run_scaling_scan(
        "fourier", [2], [4], trials=2, seed=1, settings=small_settings(), threads=1, include_family=True
    )
    family = [c for c in record.cells if c["draw"] == "family"]
    assert len(family) == 1
    assert family[0]["mean"] <= 1e-10
    assert family[0]["n"] == 4


def test_scan_skips_cells_outside_caps_and_bad_dimensions():
    with pytest.warns(RuntimeWarning):
        record = run_scaling_scan("pauli", [3, 4], [2, 128], trials=2, seed=1, settings=small_settings(), threads=1)
    skipped = [(c["d"], c["n"]) for c in record.cells if c["skipped"]]
    assert (3, 2) in skipped and (3, 128) in skipped and (4, 128) in skipped
    assert (4, 2) not in skipped
    assert record.summary["skipped_cells"] == 3


def test_scan_is_reproducible():
    a = run_scaling_scan("haar", [2], [2, 4], trials=3, seed=5, settings=small_settings(), threads=1)
    b = run_scaling_scan("haar", [2], [2, 4], trials=3, seed=5, settings=small_settings(), threads=2)
    assert a.rows == b.rows
    assert a.cells == b.cells


def test_scan_fit_reports_slope():
    record = run_scaling_scan("haar", [2], [4, 16, 64], trials=4, seed=2, settings=small_settings(), threads=1)
    fit = record.summary["fits"][0]
    assert fit["cells"] == 3
    assert fit["slope"] < 0
    assert fit["prefactor"] > 0


@pytest.mark.slow
def test_haar_scaling_slope_d8():
    settings = Settings({"estimator": {"restarts": 8}})
    record = run_scaling_scan("haar", [8], [128, 512, 2048], trials=20, seed=11, settings=settings)
    fit = record.summary["fits"][0]
    assert -0.65 <= fit["slope"] <= -0.35
    assert fit["monotonic"]


@pytest.mark.slow
def test_pauli_scaling_slope_three_qubits():
    settings = Settings({"estimator": {"restarts": 8}})
    record = run_scaling_scan("pauli", [8], [128, 512, 2048], trials=20, seed=12, settings=settings, qubits=3)
    fit = record.summary["fits"][0]
    assert -0.65 <= fit["slope"] <= -0.35
    assert fit["monotonic"]


@pytest.mark.slow
def test_concentration_d8_on_the_resolving_grid():
    record = run_concentration(8, [5, 10, 20, 40], delta=0.5, trials=2000, seed=5)
    ordered = sorted(record.cells, key=lambda c: c["n"])
    assert ordered[0]["failures"] > 0 and ordered[1]["failures"] > 0
    assert record.summary["monotonic"]
    assert record.summary["slope"] < 0
    assert np.isfinite(record.summary["fitted_c"]) and record.summary["fitted_c"] > 0
