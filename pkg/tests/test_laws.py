import pytest

from core.duplication import dup_seq
from core.shared import QedLabError, UnknownLawError
from services.laws import LAW_IDS, LawBudgets, LawChecker, check_law, check_laws, interleavings, with_insertions


class TestEnumerationHelpers:
    def test_interleavings_keep_each_duplicate_after_its_original(self, ridecore, example2):
        m = ridecore.dup_map
        orders = list(interleavings(m, example2))
        assert len(orders) == 2
        assert orders[0] == example2 + dup_seq(m, example2)
        assert orders[1] == (example2[0], dup_seq(m, example2)[0], example2[1], dup_seq(m, example2)[1])
        assert len(list(interleavings(m, example2 + example2[:1]))) == 5

    def test_insertions_stay_strictly_inside(self, ridecore, example2):
        nop = ridecore.system.parse_instruction("NOP")
        seqs = list(with_insertions(example2 * 2, [nop], 1))
        assert len(seqs) == 3
        assert all(s[0] != nop and s[-1] != nop for s in seqs)
        assert list(with_insertions(example2, [nop], 0)) == [example2]


class TestLaws:
    def test_preservation_on_reference_machine(self, toy4):
        report = check_law("lemma2", [toy4])
        assert report.passed
        assert report.instances > 0
        assert report.systems == ["toy4"]

    def test_preservation_skips_buggy_traces_on_injected_systems(self, mulmul4):
        assert check_law("lemma2", [mulmul4]).passed

    def test_corrupted_specification_is_caught(self, corrupted_toy4):
        report = check_law("lemma2", [corrupted_toy4])
        assert not report.passed
        assert report.violation_count >= len(report.violations) > 0

    def test_mirrored_pairs_stay_mirrored(self, toy4, mulmul4):
        report = check_law("lemma1", [toy4, mulmul4], LawBudgets(depth=1))
        assert report.passed
        assert report.instances > 0

    def test_matching_inputs_give_matching_outputs(self, toy4, mulmul4):
        report = check_law("cor1", [toy4, mulmul4], LawBudgets(depth=1))
        assert report.passed
        assert report.instances > 0

    def test_search_failure_is_a_bug_and_bounded(self, toy4, mulmul4):
        report = check_law("thm1", [toy4, mulmul4])
        assert report.passed
        assert report.instances >= 2
        assert report.systems == ["toy4", "mulmul4"]

    def test_interleaved_and_extended_preservation(self, toy4):
        report = check_law("ext", [toy4], LawBudgets(bound=1))
        assert report.passed
        assert report.instances > 0

    def test_extended_preservation_catches_corrupted_spec(self, corrupted_toy4):
        assert not check_law("ext", [corrupted_toy4], LawBudgets(bound=1)).passed

    def test_frame_laws(self, toy4, stomp4):
        for law in ("eq2", "eq3", "eq4"):
            assert check_law(law, [toy4, stomp4]).passed

    def test_bug_specific_case_a(self, mulmul4):
        report = check_law("lemma4a", [mulmul4])
        assert report.passed
        assert report.instances > 0

    def test_bug_specific_case_b(self, stomp4):
        assert check_law("lemma4b", [stomp4]).passed

    def test_missing_case_counts_as_violation(self, toy4):
        assert not check_law("lemma4b", [toy4]).passed

    def test_soft_reset_on_back_to_back_mul(self, mulmul4, stomp4):
        report = check_law("lemma5", [mulmul4, stomp4])
        assert report.passed
        assert report.instances == 1
        assert any("stomp4" in note for note in report.notes)

    def test_hard_reset_completeness(self, toy4, mulmul4, single4):
        report = check_law("thm2", [toy4, mulmul4, single4])
        assert report.passed
        assert report.instances == 3

    def test_search_failures_are_real(self, mulmul4, toy4):
        report = check_law("lemma3", [mulmul4, toy4], LawBudgets(bound=1))
        assert report.passed
        assert report.instances == 1

    def test_oracle_agrees_with_bounded_correctness(self, toy4, mulmul4):
        assert check_law("prop1", [toy4, mulmul4]).passed

    def test_forwarding_needs_extended_tests(self, fwd4):
        report = check_law("fwd_extended", [fwd4])
        assert report.passed
        assert report.instances == 1

    def test_shared_checker_reuses_oracle(self, mulmul4):
        checker = LawChecker([mulmul4])
        first = checker.oracle(mulmul4)
        check_law("prop1", [mulmul4], checker=checker)
        assert checker.oracle(mulmul4) is first

    def test_unknown_law(self, toy4):
        with pytest.raises(UnknownLawError):
            check_law("lemma9", [toy4])

    def test_empty_corpus(self):
        with pytest.raises(QedLabError):
            check_law("lemma2", [])


@pytest.mark.slow
def test_every_law_holds_on_the_corpus(corpus):
    reports = check_laws(None, corpus)
    assert [r.law for r in reports] == list(LAW_IDS)
    failing = {r.law: r.violations for r in reports if not r.passed}
    assert not failing
