"""Baseline detectors: unit behavior against independent simulation oracles."""

import math

import numpy as np
import pytest

from driftbench import ADWIN, CUSUM, DDM, EDDM, RDDM, PageHinkley, Verdict

ALL_DETECTORS = [
    lambda: CUSUM(),
    lambda: PageHinkley(),
    lambda: DDM(),
    lambda: EDDM(),
    lambda: RDDM(),
    lambda: ADWIN(),
]


def run_bits(det, bits):
    return [det.step(b) for b in bits]


def first_drift(det, bits):
    for i, b in enumerate(bits):
        if det.step(b) is Verdict.DRIFT:
            return i
    return None


# --- independent oracles -------------------------------------------------

def cusum_oracle_first_drift(errors, slack=0.005, threshold=50.0, min_instances=30):
    mean = 0.0
    g = 0.0
    for i, e in enumerate(errors):
        mean += (e - mean) / (i + 1)
        g = max(0.0, g + (e - mean - slack))
        if i + 1 >= min_instances and g > threshold:
            return i
    return None


def page_hinkley_oracle_first_drift(errors, slack=0.005, threshold=50.0):
    mean = 0.0
    m = 0.0
    minimum = math.inf
    for i, e in enumerate(errors):
        mean += (e - mean) / (i + 1)
        m += e - mean - slack
        minimum = min(minimum, m)
        if m - minimum > threshold:
            return i
    return None


def ddm_oracle_first_drift(errors, gate=30):
    p = 1.0
    p_min = s_min = math.inf
    for i, e in enumerate(errors):
        t = i + 1
        p += (e - p) / t
        s = math.sqrt(p * (1.0 - p) / t)
        if t < gate:
            continue
        if p + s < p_min + s_min:
            p_min, s_min = p, s
        if p + s > p_min + 3.0 * s_min:
            return i
    return None


def eddm_oracle_first_drift(errors, beta=0.90, gate=30):
    n_err = 0
    last = 0
    mean = 0.0
    m2 = 0.0
    level_max = 0.0
    for i, e in enumerate(errors):
        t = i + 1
        if not e:
            continue
        n_err += 1
        if n_err == 1:
            last = t
            continue
        dist = float(t - last)
        last = t
        gaps = n_err - 1
        delta = dist - mean
        mean += delta / gaps
        m2 += delta * (dist - mean)
        level = mean + 2.0 * math.sqrt(m2 / gaps)
        level_max = max(level_max, level)
        if n_err >= gate and level_max > 0 and level / level_max < beta:
            return i
    return None


def adwin_oracle_first_drift(bits, delta=0.002):
    """Naive re-check of every split with the textbook bound, shedding the
    older part at the first significant split while any exists."""
    window = []
    for i, b in enumerate(bits):
        window.append(float(b))
        dropped = False
        while True:
            W = len(window)
            if W < 2:
                break
            total = sum(window)
            confidence = math.log(4.0 * W / delta)
            found = 0
            prefix = 0.0
            for k in range(1, W):
                prefix += window[k - 1]
                n0, n1 = k, W - k
                mu0 = prefix / n0
                mu1 = (total - prefix) / n1
                harmonic = 2.0 * n0 * n1 / (n0 + n1)
                eps = math.sqrt(confidence / (2.0 * harmonic))
                if abs(mu0 - mu1) >= eps:
                    found = k
                    break
            if not found:
                break
            window = window[found:]
            dropped = True
        if dropped:
            return i
    return None


# --- shared properties ----------------------------------------------------

@pytest.mark.parametrize("make", ALL_DETECTORS)
def test_no_alarm_on_all_correct_stream(make):
    det = make()
    assert all(v is Verdict.NO_CHANGE for v in run_bits(det, [1] * 20_000))


@pytest.mark.parametrize("make", ALL_DETECTORS)
def test_deterministic_verdicts(make):
    bits = (np.random.default_rng(5).random(4_000) < 0.8).astype(int).tolist()
    assert run_bits(make(), bits) == run_bits(make(), bits)


@pytest.mark.parametrize("make,bits", [
    (lambda: CUSUM(), [1] * 300 + [0] * 400),
    (lambda: PageHinkley(), [1] * 300 + [0] * 400),
    (lambda: DDM(), [1] * 300 + [0] * 400),
    (lambda: EDDM(), ([1] * 49 + [0]) * 50 + [0] * 200),
])
def test_post_drift_state_equals_fresh(make, bits):
    det = make()
    drift_at = first_drift(det, bits)
    assert drift_at is not None
    assert vars(det) == vars(make())


# --- CUSUM ----------------------------------------------------------------

class TestCusum:
    def test_matches_oracle_on_step_change(self):
        bits = [1] * 1000 + [0] * 400
        errors = [0.0 if b else 1.0 for b in bits]
        expected = cusum_oracle_first_drift(errors)
        assert expected is not None and expected > 1000
        assert first_drift(CUSUM(), bits) == expected

    def test_stable_error_rate_keeps_statistic_low(self):
        rng = np.random.default_rng(0)
        bits = (rng.random(50_000) < 0.85).astype(int)
        det = CUSUM()
        verdicts = run_bits(det, bits)
        assert verdicts.count(Verdict.DRIFT) <= 1

    def test_never_warns(self):
        bits = [1] * 100 + [0] * 200
        assert Verdict.WARNING not in run_bits(CUSUM(), bits)

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            CUSUM(threshold=0.0)


# --- PageHinkley ------------------------------------------------------------

class TestPageHinkley:
    def test_constant_stream_never_drifts(self):
        for bit in (0, 1):
            det = PageHinkley()
            assert all(v is Verdict.NO_CHANGE for v in run_bits(det, [bit] * 5000))

    def test_matches_oracle_after_error_onset(self):
        bits = [1] * 1000 + [0] * 200
        errors = [0.0 if b else 1.0 for b in bits]
        expected = page_hinkley_oracle_first_drift(errors)
        assert expected is not None and expected > 1000
        assert first_drift(PageHinkley(), bits) == expected

    def test_minimum_below_cumulative(self):
        det = PageHinkley()
        rng = np.random.default_rng(1)
        for b in (rng.random(2000) < 0.7).astype(int):
            det.step(b)
            assert det.minimum <= det.cumulative + 1e-12


# --- DDM --------------------------------------------------------------------

class TestDdm:
    def test_improving_classifier_never_drifts(self):
        bits = [0] * 40 + [1] * 20_000
        assert all(v is not Verdict.DRIFT for v in run_bits(DDM(), bits))

    def test_matches_oracle_on_degradation(self):
        rng = np.random.default_rng(7)
        bits = list((rng.random(1000) < 0.5).astype(int)) + [0] * 300
        errors = [0.0 if b else 1.0 for b in bits]
        expected = ddm_oracle_first_drift(errors)
        assert expected is not None and expected > 1000
        assert first_drift(DDM(), bits) == expected

    def test_warning_precedes_drift_threshold(self):
        det = DDM()
        rng = np.random.default_rng(13)
        bits = list((rng.random(500) < 0.8).astype(int)) + [0] * 300
        verdicts = run_bits(det, bits)
        drift_at = verdicts.index(Verdict.DRIFT)
        assert Verdict.WARNING in verdicts[:drift_at]
        assert Verdict.WARNING is verdicts[drift_at - 1]

    def test_no_verdicts_before_gate(self):
        det = DDM(min_instances=30)
        assert all(v is Verdict.NO_CHANGE for v in run_bits(det, [0] * 29))

    def test_level_domain(self):
        with pytest.raises(ValueError):
            DDM(warning_level=3.0, drift_level=2.0)


# --- EDDM -------------------------------------------------------------------

class TestEddm:
    def test_growing_gaps_never_drift(self):
        bits = []
        gap = 2
        for _ in range(60):
            bits.extend([1] * gap + [0])
            gap += 1
        assert all(v is not Verdict.DRIFT for v in run_bits(EDDM(), bits))

    def test_matches_oracle_on_shrinking_gaps(self):
        bits = ([1] * 99 + [0]) * 50 + [1, 0] * 200
        errors = [0.0 if b else 1.0 for b in bits]
        expected = eddm_oracle_first_drift(errors)
        assert expected is not None and expected > 5000
        assert first_drift(EDDM(), bits) == expected

    def test_needs_two_errors_for_statistics(self):
        det = EDDM()
        assert all(v is Verdict.NO_CHANGE for v in run_bits(det, [0] + [1] * 100))
        assert det.n_errors == 1

    def test_domain(self):
        with pytest.raises(ValueError):
            EDDM(alpha=0.9, beta=0.95)


# --- RDDM -------------------------------------------------------------------

class TestRddm:
    def test_forced_drift_when_concept_exceeds_max(self):
        det = RDDM(max_concept=50)
        verdicts = run_bits(det, [1] * 60)
        assert verdicts[50] is Verdict.DRIFT
        assert all(v is Verdict.NO_CHANGE for v in verdicts[:50])

    def test_statistical_drift_and_rebuild_keeps_recent_bits(self):
        det = RDDM(min_instances=30)
        bits = [1] * 300 + [0] * 300
        drift_at = first_drift(det, bits)
        assert drift_at is not None and drift_at >= 300
        # After the rebuild the stored segment seeds non-fresh statistics.
        assert det.count > 0

    def test_warn_limit_forces_drift(self):
        # Error rate drifts up just enough to sit in the warning band.
        rng = np.random.default_rng(3)
        stream = (rng.random(2000) < 0.7).astype(int).tolist()
        stream += (rng.random(50_000) < 0.64).astype(int).tolist()
        det = RDDM(warn_limit=40)
        verdicts = run_bits(det, stream)
        assert Verdict.DRIFT in verdicts

    def test_warning_between_levels(self):
        det = RDDM()
        rng = np.random.default_rng(8)
        bits = list((rng.random(500) < 0.8).astype(int))
        bits += list((rng.random(2000) < 0.70).astype(int))
        verdicts = run_bits(det, bits)
        assert Verdict.WARNING in verdicts
        if Verdict.DRIFT in verdicts:
            assert verdicts.index(Verdict.WARNING) < verdicts.index(Verdict.DRIFT)


# --- ADWIN ------------------------------------------------------------------

class TestAdwin:
    def test_constant_bits_never_drift(self):
        for bit in (0, 1):
            det = ADWIN()
            assert all(v is Verdict.NO_CHANGE for v in run_bits(det, [bit] * 3000))

    def test_matches_brute_force_oracle_on_step_change(self):
        bits = [1] * 600 + [0] * 200
        expected = adwin_oracle_first_drift(bits, delta=0.002)
        assert expected is not None and expected > 600
        assert first_drift(ADWIN(delta=0.002), bits) == expected

    def test_matches_brute_force_oracle_on_noisy_change(self):
        rng = np.random.default_rng(11)
        bits = list((rng.random(500) < 0.9).astype(int))
        bits += list((rng.random(300) < 0.4).astype(int))
        expected = adwin_oracle_first_drift(bits, delta=0.01)
        got = first_drift(ADWIN(delta=0.01), bits)
        assert got == expected

    def test_step_change_at_spec_scale(self):
        bits = [1] * 2000 + [0] * 2000
        hit = first_drift(ADWIN(delta=0.002), bits)
        assert hit is not None and 2000 < hit < 2100

    def test_window_shrinks_after_drift(self):
        det = ADWIN(delta=0.002)
        for b in [1] * 2000 + [0] * 100:
            det.step(b)
        assert len(det) < 1000

    def test_no_significant_cut_after_each_step(self):
        rng = np.random.default_rng(2)
        bits = list((rng.random(250) < 0.8).astype(int)) + [0] * 60
        det = ADWIN(delta=0.05)
        for b in bits:
            det.step(b)
            window = det.window.tolist()
            W = len(window)
            total = sum(window)
            if W < 2:
                continue
            confidence = math.log(4.0 * W / det.delta)
            prefix = 0.0
            for k in range(1, W):
                prefix += window[k - 1]
                mu0 = prefix / k
                mu1 = (total - prefix) / (W - k)
                harmonic = 2.0 * k * (W - k) / W
                eps = math.sqrt(confidence / (2.0 * harmonic))
                assert abs(mu0 - mu1) < eps + 1e-9

    def test_bounded_window_eviction_is_not_drift(self):
        det = ADWIN(delta=1e-9, max_window=64)
        verdicts = run_bits(det, [1, 0] * 300)
        assert len(det) == 64
        assert Verdict.DRIFT not in verdicts

    def test_domain(self):
        with pytest.raises(ValueError):
            ADWIN(delta=1.5)
        with pytest.raises(ValueError):
            ADWIN(max_window=1)
