import json

import pytest

from stirling2adic.base2 import Valuation
from stirling2adic.engine import PrecisionPolicy, stirling_exact
from stirling2adic.errors import DomainError, ResourceCapError
from stirling2adic.predictors import CONJECTURAL_EQUALITY, EQUALITY, LOWER_BOUND
from stirling2adic.verify import (
    CONFIRMED,
    CONJECTURE_DEVIATION,
    CONJECTURE_OBSERVED,
    EXIT_CONJECTURE_DEVIATION,
    EXIT_INDETERMINATE,
    EXIT_OK,
    EXIT_VIOLATION,
    INDETERMINATE,
    VIOLATED,
    SweepConfig,
    check_diff_congruence,
    classify,
    cross_validate,
    default_ranges,
    run_sweep,
    scan_conjecture_mersenne,
    sweep_targets,
)

# Cells of the closed difference formula's own grid where exact
# computation disagrees with it.  All have k a power of two and small b*2**n;
# there the even-base terms of the explicit formula are no longer negligible
# and the stated value is wrong (or, once, too low because of a cancellation).
DIFFERENCE_FORMULA_COUNTEREXAMPLES = {
    (2, 1, 2, 4): 2,  # claimed 3
    (3, 1, 2, 4): 2,  # claimed 4
    (5, 1, 2, 4): 2,  # claimed 5
    (5, 1, 3, 4): 11,  # claimed 6
    (5, 1, 3, 8): 6,  # claimed 4
}

# Cells of the difference congruence grid (n <= 6) where the congruence
# fails: its derivation shifts by (2b-a)*2**n, which needs a <= 2b.
DIFF_CONGRUENCE_FAILURES = {(3, 1, 2, 4), (5, 1, 2, 4), (5, 1, 3, 8)}


class TestClassify:
    def test_equality(self):
        assert classify(EQUALITY, 3, Valuation.finite(3)) == CONFIRMED
        assert classify(EQUALITY, 3, Valuation.finite(4)) == VIOLATED
        assert classify(EQUALITY, 3, Valuation.at_least(8)) == VIOLATED
        assert classify(EQUALITY, 3, Valuation.at_least(3)) == INDETERMINATE
        assert classify(EQUALITY, 3, Valuation.infinite()) == VIOLATED

    def test_lower_bound(self):
        assert classify(LOWER_BOUND, 3, Valuation.finite(5)) == CONFIRMED
        assert classify(LOWER_BOUND, 3, Valuation.finite(2)) == VIOLATED
        assert classify(LOWER_BOUND, 3, Valuation.at_least(3)) == CONFIRMED
        assert classify(LOWER_BOUND, 3, Valuation.at_least(2)) == INDETERMINATE
        assert classify(LOWER_BOUND, 3, Valuation.infinite()) == CONFIRMED

    def test_conjectural(self):
        assert classify(CONJECTURAL_EQUALITY, 4, Valuation.finite(4)) == CONJECTURE_OBSERVED
        assert classify(CONJECTURAL_EQUALITY, 4, Valuation.finite(5)) == CONJECTURE_DEVIATION
        assert classify(CONJECTURAL_EQUALITY, 4, Valuation.at_least(8)) == CONJECTURE_DEVIATION
        assert classify(CONJECTURAL_EQUALITY, 4, Valuation.at_least(4)) == INDETERMINATE


class TestRunSweep:
    def test_lengyel_small(self):
        report = run_sweep(SweepConfig("lengyel-eq", {"n": [1, 2, 3, 4], "c": [1, 3]}))
        s = report.summary
        assert s["cells"] == s[CONFIRMED] == 2 * (2 + 4 + 8 + 16)
        assert report.exit_code == EXIT_OK

    def test_all_targets_have_defaults(self):
        for target in sweep_targets():
            assert default_ranges(target)

    def test_records_cover_grid_without_gaps(self):
        report = run_sweep(SweepConfig("thm-diagonal", {"n": [2, 3], "c": [1, 3]}))
        assert report.summary["cells"] == len(report.records) == 2 * (4 + 8)
        keys = [(r.params["n"], r.params["c"], r.params["a"]) for r in report.records]
        assert keys == sorted(keys)

    def test_difference_counterexamples_are_found(self):
        report = run_sweep(
            SweepConfig(
                "thm-difference",
                {"n": [2, 3], "pairs": [(2, 1), (3, 1), (3, 2), (4, 2), (5, 1)]},
            )
        )
        found = {
            (r.params["a"], r.params["b"], r.params["n"], r.params["k"]): r.observed_value
            for r in report.cells(VIOLATED)
        }
        assert found == {
            cell: obs
            for cell, obs in DIFFERENCE_FORMULA_COUNTEREXAMPLES.items()
            if cell[2] <= 3
        }
        assert report.exit_code == EXIT_VIOLATION

    def test_difference_observed_values_match_exact(self):
        for (a, b, n, k), observed in DIFFERENCE_FORMULA_COUNTEREXAMPLES.items():
            d = stirling_exact(a << n, k) - stirling_exact(b << n, k)
            assert d % (1 << observed) == 0 and d % (1 << (observed + 1)) != 0

    def test_unknown_target_or_range(self):
        with pytest.raises(DomainError):
            run_sweep(SweepConfig("nope"))
        with pytest.raises(DomainError):
            run_sweep(SweepConfig("lengyel-eq", {"q": [1]}))

    def test_cell_cap(self):
        with pytest.raises(ResourceCapError):
            run_sweep(SweepConfig("lengyel-eq", {"n": [1, 2, 3]}, cell_cap=5))

    def test_even_c_rejected_where_oddness_matters(self):
        with pytest.raises(DomainError):
            run_sweep(SweepConfig("thm-diagonal", {"n": [2], "c": [2]}))

    def test_indeterminate_cells_are_reported(self):
        policy = PrecisionPolicy(1, 1)  # nu2(S(12, 7)) = 2 is out of reach
        report = run_sweep(
            SweepConfig("lengyel-eq", {"n": [2], "c": [3]}, policy=policy)
        )
        cells = report.cells(INDETERMINATE)
        assert cells and all(r.observed_kind == "at-least" for r in cells)
        assert report.exit_code == EXIT_INDETERMINATE


class TestDeterminism:
    def test_rerun_is_byte_identical(self):
        cfg = {"n": [2, 3, 4], "pairs": [(2, 1), (3, 2)]}
        r1 = run_sweep(SweepConfig("thm-difference", cfg))
        r2 = run_sweep(SweepConfig("thm-difference", cfg))
        assert r1.to_csv() == r2.to_csv()
        assert r1.to_json() == r2.to_json()

    def test_workers_do_not_change_bytes(self):
        cfg = {"n": [1, 2, 3], "c": [1, 3]}
        serial = run_sweep(SweepConfig("lengyel-eq", cfg, workers=1))
        parallel = run_sweep(SweepConfig("lengyel-eq", cfg, workers=4))
        assert serial.to_csv() == parallel.to_csv()
        assert serial.to_json() == parallel.to_json()

    def test_runtime_is_segregated(self):
        report = run_sweep(SweepConfig("count-J", {"n": [0, 1]}))
        assert "runtime" not in json.loads(report.to_json())
        assert "runtime" in json.loads(report.to_json(include_runtime=True))
        assert report.runtime_seconds is not None


class TestReportShape:
    def test_csv_layout(self):
        report = run_sweep(SweepConfig("lengyel-eq", {"n": [1], "c": [1]}))
        lines = report.to_csv().strip().split("\n")
        assert lines[0] == "n,c,k,N,source,claim_kind,claim_value,observed_kind,observed_value,verdict"
        assert len(lines) == 1 + report.summary["cells"]
        assert lines[1] == "1,1,1,2,Lem-Lengyel-Eq,equality,0,finite,0,confirmed"

    def test_json_schema(self):
        report = run_sweep(SweepConfig("count-J", {"n": [0, 1, 2]}))
        obj = json.loads(report.to_json())
        assert obj["schema_version"] == "1"
        assert obj["target"] == "count-J"
        assert obj["summary"]["cells"] == len(obj["records"])
        assert obj["config"]["policy"]["max_bits"] == 4096
        rec = obj["records"][0]
        assert set(rec) == {
            "params",
            "source",
            "claim_kind",
            "claim_value",
            "observed_kind",
            "observed_value",
            "verdict",
        }


class TestIdentitySweeps:
    def test_identities_small(self):
        report = run_sweep(
            SweepConfig(
                "identities",
                {"conv_n": [0, 3], "conv_m": [1, 2], "sym_k1": [0, 2], "sym_k2": [1]},
            )
        )
        assert report.summary[CONFIRMED] == report.summary["cells"]

    def test_junod_small(self):
        report = run_sweep(
            SweepConfig("junod", {"p": [2, 3], "v": [1], "m": [0, 1, 2], "n": [1, 2, 3]})
        )
        assert report.summary[CONFIRMED] == report.summary["cells"] == 18

    def test_count_j_small(self):
        report = run_sweep(SweepConfig("count-J", {"n": [0, 1, 2, 3, 4]}))
        assert report.summary[CONFIRMED] == report.summary["cells"]


class TestLemmaSweeps:
    def test_shifted_power(self):
        report = run_sweep(SweepConfig("lem-shifted-power", {"c": [1, 3, 5], "n": [1, 2, 3, 4, 5]}))
        assert report.summary[CONFIRMED] == report.summary["cells"] == 3 * 15

    def test_theta(self):
        report = run_sweep(SweepConfig("lem-theta", {"c": [1, 3], "n": [3, 4, 5]}))
        assert report.summary[CONFIRMED] == report.summary["cells"]

    def test_shifted_triple(self):
        report = run_sweep(
            SweepConfig(
                "thm-shifted-triple",
                {"n": [1, 2, 3], "b": [1, 2, 3], "c": [1, 3], "m_offsets": [0, 2]},
            )
        )
        assert report.summary[CONFIRMED] == report.summary["cells"]


class TestDiffCongruence:
    def test_examples(self):
        assert check_diff_congruence(2, 1, 4, 5)
        assert check_diff_congruence(3, 1, 3, 3)
        assert check_diff_congruence(2, 1, 3, 8)  # boundary k = 2**n

    def test_known_failures(self):
        for (a, b, n, k) in DIFF_CONGRUENCE_FAILURES:
            assert not check_diff_congruence(a, b, n, k)

    def test_holds_on_derivable_pairs(self):
        # a <= 2b: the shift (2b-a)*2**n is a valid index, so it must hold
        for (a, b) in [(2, 1), (3, 2), (4, 2), (5, 3), (7, 4)]:
            for n in (2, 3, 4):
                for k in range(3, 2**n + 1):
                    assert check_diff_congruence(a, b, n, k), (a, b, n, k)

    def test_sweep_reports_known_failures(self):
        report = run_sweep(
            SweepConfig(
                "diff-congruence",
                {"n": [2, 3], "pairs": [(2, 1), (3, 1), (3, 2), (4, 2), (5, 1)]},
            )
        )
        bad = {
            (r.params["a"], r.params["b"], r.params["n"], r.params["k"])
            for r in report.cells(VIOLATED)
        }
        assert bad == DIFF_CONGRUENCE_FAILURES

    def test_rejects_bad_domain(self):
        with pytest.raises(DomainError):
            check_diff_congruence(1, 1, 4, 5)
        with pytest.raises(DomainError):
            check_diff_congruence(2, 1, 3, 9)


class TestScanner:
    def test_small_scan_all_observed(self):
        report = scan_conjecture_mersenne([2, 3, 4], [(2, 1), (3, 1)])
        s = report.summary
        # n=2: k=3; n=3: k in {3,7}; n=4: k in {3,7,15}; two pairs
        assert s["cells"] == 12
        assert s[CONJECTURE_OBSERVED] == 12
        assert report.exit_code == EXIT_OK

    def test_echoes_raw_arguments(self):
        report = scan_conjecture_mersenne([3], [(2, 1)])
        rec = next(r for r in report.records if r.params["m"] == 3)
        assert rec.params["arg_n1"] == 2 << 4 and rec.params["arg_n2"] == 1 << 4
        assert rec.params["k"] == 7
        assert rec.claim_value == 5  # (n+1) + 1 + nu2(a-b)
        assert rec.observed_value == 5
        d = stirling_exact(32, 7) - stirling_exact(16, 7)
        assert d % 32 == 0 and d % 64 != 0

    def test_deviation_is_exit_3_not_failure(self):
        # far outside the scanned regime the conjectured value genuinely fails
        report = scan_conjecture_mersenne([2], [(33, 1)])
        (rec,) = report.records
        assert rec.verdict == CONJECTURE_DEVIATION
        assert rec.claim_value == 9 and rec.observed_value == 7
        assert report.exit_code == EXIT_CONJECTURE_DEVIATION

    def test_indeterminate_on_tiny_precision(self):
        report = scan_conjecture_mersenne([2], [(2, 1)], policy=PrecisionPolicy(2, 4))
        (rec,) = report.records
        assert rec.verdict == INDETERMINATE
        assert report.exit_code == EXIT_INDETERMINATE

    def test_m_filter(self):
        report = scan_conjecture_mersenne([4, 5], [(2, 1)], m_values=[3])
        assert all(r.params["k"] == 7 for r in report.records)
        assert report.summary["cells"] == 2

    def test_rejects_bad_domain(self):
        with pytest.raises(DomainError):
            scan_conjecture_mersenne([1], [(2, 1)])
        with pytest.raises(DomainError):
            scan_conjecture_mersenne([3], [(1, 1)])


class TestCrossValidate:
    def test_small(self):
        report = cross_validate(n_max=40, k_max=12, bits_list=(8, 32))
        assert report.summary[CONFIRMED] == report.summary["cells"] == 2 * 41
        assert report.exit_code == EXIT_OK

    def test_workers_match_serial(self):
        a = cross_validate(n_max=25, k_max=8, bits_list=(16,), workers=1)
        b = cross_validate(n_max=25, k_max=8, bits_list=(16,), workers=3)
        assert a.to_csv() == b.to_csv()
