import hashlib
import math

import mpmath
import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from chaoslfsr.randstats import (
    KINDS,
    BitSequence,
    SequenceTooShort,
    approx_entropy,
    block_frequency,
    cusum,
    dft_moduli,
    format_report,
    longest_run,
    monobit,
    run_suite,
    run_test,
    runs,
    serial,
)
from chaoslfsr.special import erfc, igamc

from . import oracles

# Binary expansion of pi, the 100-bit sample used throughout SP 800-22.
PI_100 = ("11001001000011111101101010100010001000010110100011"
          "00001000110100110001001100011001100010100010111000")
LONGEST_128 = ("11001100000101010110110001001100111000000000001001"
               "00110101010001000100111101011010000000110101111100"
               "1100111001101101100010110010")


def bits(text):
    return BitSequence.from_string(text).bits


class TestBitSequence:
    def test_round_trip(self):
        s = BitSequence.from_string("1011 0")
        assert len(s) == 5 and s.bits.tolist() == [1, 0, 1, 1, 0]
        assert s.packed == b"\xb0"

    def test_padding_must_be_zero(self):
        with pytest.raises(ValueError):
            BitSequence(b"\xff", 5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            BitSequence.from_bits([])

    def test_from_bytes(self):
        assert BitSequence.from_bytes(b"\x80\xff", 9).bits.tolist() == [1] + [0] * 7 + [1]
        with pytest.raises(ValueError):
            BitSequence.from_bytes(b"\x00", 9)

    def test_equality(self):
        assert BitSequence.from_string("101") == BitSequence.from_bits([1, 0, 1])
        assert len({BitSequence.from_string("101"), BitSequence.from_bits([1, 0, 1])}) == 1


class TestWorkedExamples:
    def test_monobit(self):
        assert monobit(bits("1011010101")).p_value == pytest.approx(0.527089, abs=1e-6)
        assert monobit(bits(PI_100)).p_value == pytest.approx(0.109599, abs=1e-6)

    def test_block_frequency(self):
        assert block_frequency(bits("0110011010"), 3).p_value == pytest.approx(0.801252, abs=1e-6)
        assert block_frequency(bits(PI_100), 10).p_value == pytest.approx(0.706438, abs=1e-6)

    def test_runs(self):
        r = runs(bits("1001101011"))
        assert r.statistic == 7
        assert r.p_value == pytest.approx(0.147232, abs=1e-6)
        assert runs(bits(PI_100)).p_value == pytest.approx(0.500798, abs=1e-6)

    def test_longest_run(self):
        r = longest_run(bits(LONGEST_128))
        assert r.statistic == pytest.approx(4.882605, abs=1e-6)
        assert r.p_value == pytest.approx(0.180598, abs=1e-6)

    def test_cusum(self):
        assert cusum(bits("1011010111")).p_value == pytest.approx(0.4116588, abs=1e-6)
        assert cusum(bits(PI_100)).p_value == pytest.approx(0.219194, abs=1e-6)
        assert cusum(bits(PI_100), backward=True).p_value == pytest.approx(0.114866, abs=1e-6)

    def test_serial(self):
        r = serial(bits("0011011101"), 3)
        assert r.p_value == pytest.approx((0.808792, 0.670320), abs=1e-6)

    def test_approx_entropy(self):
        assert approx_entropy(bits("0100110101"), 3).p_value == pytest.approx(0.261961, abs=1e-6)
        assert approx_entropy(bits(PI_100), 2).p_value == pytest.approx(0.235301, abs=1e-6)


class TestHandDerived:
    def test_monobit_balanced(self):
        r = run_test("monobit", BitSequence.from_bits([1, 0] * 50))
        assert r.statistic == 0 and r.p_value == 1.0

    def test_monobit_58_ones(self):
        r = run_test("monobit", [1] * 58 + [0] * 42)
        assert r.statistic == 1.6
        assert r.p_value == erfc(1.6 / math.sqrt(2))

    def test_runs_alternating(self):
        r = runs(bits("0101010101"))
        assert r.statistic == 10
        # |10 - 2*10*0.25| / (2 * sqrt(20) * 0.25) = 5 / sqrt(5)
        assert r.p_value == erfc(math.sqrt(5))
        assert r.p_value == pytest.approx(0.0015654022580025, abs=1e-15)
        assert not r.passed

    def test_runs_prerequisite(self):
        assert runs(np.ones(100, dtype=np.uint8)).p_value == 0.0

    def test_dft_all_ones(self):
        r = run_test("dft", np.ones(2048, dtype=np.uint8))
        assert r.p_value < 1e-10 and not r.passed

    def test_all_zero_suite_fails(self):
        rep = run_suite(np.zeros(10_000, dtype=np.uint8))
        assert rep["monobit"].p_value < 1e-100 and not rep.all_pass


class TestSpecialFunctions:
    def test_erfc_values(self):
        assert erfc(0) == 1
        assert erfc(1) == pytest.approx(0.15729920705, abs=1e-11)
        for x in np.linspace(-10, 10, 201):
            assert abs(erfc(x) - oracles.erfc_hp(x)) <= 1e-10

    def test_erfc_symmetry(self):
        for x in np.linspace(-6, 6, 100):
            assert abs(erfc(x) + erfc(-x) - 2) <= 1e-9

    def test_igamc_identities(self):
        assert igamc(3.7, 0) == 1
        for x in np.linspace(0, 30, 100):
            assert abs(igamc(1, x) - math.exp(-x)) <= 1e-9
            assert abs(igamc(0.5, x) - erfc(math.sqrt(x))) <= 1e-9

    @settings(max_examples=300)
    @given(st.floats(0.05, 5000), st.floats(0, 6000))
    def test_igamc_matches_reference(self, a, x):
        with mpmath.workdps(30):
            ref = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
        assert abs(igamc(a, x) - ref) <= 1e-10
        assert abs(igamc(a, x) - scipy.special.gammaincc(a, x)) <= 1e-9

    @pytest.mark.parametrize("a, x", [(0, 1), (-1, 1), (1, -0.5)])
    def test_igamc_domain(self, a, x):
        with pytest.raises(ValueError):
            igamc(a, x)


class TestDft:
    @pytest.mark.parametrize("n", [1000, 1024, 2048, 4096])
    def test_peak_count_matches_direct_evaluation(self, n):
        rng = np.random.default_rng(n)
        b = rng.integers(0, 2, n).astype(np.uint8)
        threshold = math.sqrt(math.log(1 / 0.05) * n)
        direct = np.asarray(oracles.dft_moduli_direct(b.tolist()))
        fast = dft_moduli(b)
        assert np.allclose(fast, direct, atol=1e-6)
        assert np.count_nonzero(fast < threshold) == np.count_nonzero(direct < threshold)


class TestLengthRules:
    @pytest.mark.parametrize("kind, n", [("monobit", 99), ("longest_run", 127), ("dft", 999),
                                         ("block_frequency", 127), ("serial", 31), ("approx_entropy", 31)])
    def test_too_short(self, kind, n):
        with pytest.raises(SequenceTooShort):
            run_test(kind, np.zeros(n, dtype=np.uint8))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            run_test("rank", np.zeros(1000, dtype=np.uint8))

    def test_suite_skips_short(self):
        rep = run_suite(BitSequence.from_string("0110" * 30))
        assert set(rep.skipped) == {"longest_run", "dft", "block_frequency"}
        assert {r.name for r in rep.results} | set(rep.skipped) == set(KINDS)


@settings(max_examples=25, deadline=None)
@given(st.binary(min_size=130, max_size=600))
def test_p_values_in_unit_interval(data):
    rep = run_suite(BitSequence.from_bytes(data))
    for r in rep.results:
        assert all(0 <= p <= 1 for p in r.p_values)
        assert r.passed == (min(r.p_values) >= 0.01)
    assert rep.all_pass == all(r.passed for r in rep.results)


@given(st.binary(min_size=13, max_size=400))
def test_monobit_complement_invariant(data):
    b = BitSequence.from_bytes(data).bits
    assert monobit(b).p_value == monobit(1 - b).p_value


def test_suite_is_deterministic():
    b = np.random.default_rng(5).integers(0, 2, 50_000).astype(np.uint8)
    assert format_report(run_suite(b), "kv") == format_report(run_suite(b.copy()), "kv")


class TestFormat:
    def setup_method(self):
        self.report = run_suite(np.random.default_rng(1).integers(0, 2, 20_000).astype(np.uint8))

    def test_text(self):
        lines = format_report(self.report).splitlines()
        names = [ln.split()[0] for ln in lines[:-1]]
        assert names == ["monobit", "block_frequency", "runs", "longest_run", "cusum_forward",
                         "cusum_backward", "serial_1", "serial_2", "approx_entropy", "dft"]
        for ln in lines[:-1]:
            name, p, verdict = ln.split()
            assert verdict == ("PASS" if float(p) >= 0.01 else "FAIL")
        assert lines[-1] == ("ALL PASS" if self.report.all_pass else "ALL FAIL")

    def test_kv(self):
        kv = dict(ln.split("=", 1) for ln in format_report(self.report, "kv").splitlines())
        assert kv["sequence_length"] == "20000"
        assert float(kv["serial_2.p_value"]) == self.report["serial"].p_value[1]
        assert kv["all_pass"] in ("true", "false")

    def test_skip_rows(self):
        text = format_report(run_suite(np.ones(200, dtype=np.uint8)))
        assert "dft - SKIP" in text and text.endswith("ALL FAIL\n")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            format_report(self.report, "json")


def _shake_bits(i, nbits):
    data = hashlib.shake_256(f"reference-{i}".encode()).digest(nbits // 8)
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


@pytest.mark.slow
def test_ideal_source_rejection_rate():
    trials = 200
    fails = {}
    for i in range(trials):
        for r in run_suite(_shake_bits(i, 10**6)).results:
            for j, p in enumerate(r.p_values):
                fails.setdefault((r.name, j), 0)
                fails[(r.name, j)] += p < 0.01
    for part, count in fails.items():
        assert count / trials <= 0.04, (part, count)
