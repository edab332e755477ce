"""Drafting, multi-pass verification, screening tallies, and rendering."""

from __future__ import annotations

import pytest

from szfreq import (
    ClientError,
    CoTExemplar,
    DescriptionPair,
    GroupStats,
    Inference,
    LetterRecord,
    MalformedDraft,
    MockTeacherClient,
    ScreeningConfig,
    ScreeningStats,
    ScriptedTeacherClient,
    check_retention_soundness,
    draft_letter,
    find_exemplar,
    parse_label,
    render_screening,
    run_screening,
    verify_letter,
)

EXEMPLAR = CoTExemplar("ex-1", (), "Quote the frequency sentence, then restate it.")
SCOPED = CoTExemplar("ex-t1", ("t1",), "Worked example for template t1.")


def record(rid: str, marker: str, gold: str = "2 per 1 week", template: str = "t1"):
    return LetterRecord(
        id=rid,
        letter_text=f"[{marker}] Dear colleague, the patient was reviewed today.",
        gold_label=parse_label(gold),
        template_id=template,
        base_letter_id="base-1",
    )


class TestLetterRecord:
    def test_dict_round_trip(self):
        rec = LetterRecord(
            "r1", "Dear X", parse_label("2 per week"), "t1", "b1",
            analysis="because", evidence=("two a week",),
        )
        again = LetterRecord.from_dict(rec.to_dict())
        assert again == rec
        assert rec.to_dict()["goldLabel"] == "2 per 1 week"

    def test_optional_fields_omitted(self):
        rec = record("r1", "m")
        d = rec.to_dict()
        assert "analysis" not in d and "evidence" not in d
        assert set(d) == {"id", "letterText", "goldLabel", "templateId", "baseLetterId"}

    def test_evidence_coerced_to_tuple(self):
        rec = LetterRecord("r", "x", parse_label("unknown"), "t", "b", evidence=["a"])
        assert rec.evidence == ("a",)


class TestDraftLetter:
    def test_happy_path(self):
        client = ScriptedTeacherClient()
        pair = DescriptionPair("2 per week", parse_label("2 per week"), "t1", {})
        text, identity = draft_letter(client, "Base letter.", pair)
        assert "2 per week" in text
        assert "@NAME@" in text
        assert identity["NAME"] == "Test"

    def test_empty_base_rejected(self):
        client = ScriptedTeacherClient()
        pair = DescriptionPair("2 per week", parse_label("2 per week"), "t1", {})
        with pytest.raises(ValueError):
            draft_letter(client, "   ", pair)

    def test_draft_without_placeholders_is_malformed(self):
        client = ScriptedTeacherClient(
            draft_script={"2 per week": ("A letter with no tokens.", {})}
        )
        pair = DescriptionPair("2 per week", parse_label("2 per week"), "t1", {})
        with pytest.raises(MalformedDraft):
            draft_letter(client, "Base.", pair)

    def test_empty_draft_is_malformed(self):
        client = ScriptedTeacherClient(draft_script={"2 per week": ("  ", {})})
        pair = DescriptionPair("2 per week", parse_label("2 per week"), "t1", {})
        with pytest.raises(MalformedDraft):
            draft_letter(client, "Base.", pair)

    def test_client_error_propagates(self):
        client = ScriptedTeacherClient(fail_draft=True)
        pair = DescriptionPair("2 per week", parse_label("2 per week"), "t1", {})
        with pytest.raises(ClientError):
            draft_letter(client, "Base.", pair)


class TestFindExemplar:
    def test_first_applicable_in_input_order(self):
        assert find_exemplar([SCOPED, EXEMPLAR], "t1") is SCOPED
        assert find_exemplar([SCOPED, EXEMPLAR], "t2") is EXEMPLAR
        assert find_exemplar([EXEMPLAR, SCOPED], "t1") is EXEMPLAR

    def test_none_applicable(self):
        assert find_exemplar([SCOPED], "t9") is None
        assert find_exemplar([], "t1") is None


class TestVerifyLetter:
    def test_first_pass_match(self):
        client = ScriptedTeacherClient(infer_script={"m1": ["2 per 1 week"]})
        outcome = verify_letter(client, record("r1", "m1"), EXEMPLAR, 3)
        assert outcome.retained
        assert outcome.final_status == "retained"
        assert len(outcome.passes) == 1
        assert outcome.passes[0].matched
        assert not outcome.passes[0].used_exemplar  # pass 1 always runs bare
        assert outcome.record.analysis == "Scripted answer: '2 per 1 week'."

    def test_match_is_canonical_not_textual(self):
        client = ScriptedTeacherClient(infer_script={"m1": ["2 per week"]})
        outcome = verify_letter(client, record("r1", "m1", gold="2 per 1 week"), None, 2)
        assert outcome.retained

    def test_exemplar_joins_from_second_pass(self):
        client = ScriptedTeacherClient(
            infer_script={"m1": ["unknown", "2 per 1 week", "never reached"]}
        )
        outcome = verify_letter(client, record("r1", "m1"), EXEMPLAR, 3)
        assert outcome.retained
        assert [p.matched for p in outcome.passes] == [False, True]
        assert [p.used_exemplar for p in outcome.passes] == [False, True]
        assert [used for (_, _, used) in client.calls] == [False, True]
        assert outcome.record.analysis == "Scripted answer: '2 per 1 week'."

    def test_never_correct_is_discarded(self):
        client = ScriptedTeacherClient(infer_script={"m1": ["unknown"]})
        outcome = verify_letter(client, record("r1", "m1"), EXEMPLAR, 3)
        assert not outcome.retained
        assert outcome.final_status == "discarded"
        assert outcome.record is None
        assert len(outcome.passes) == 3

    def test_without_exemplar_passes_run_bare(self):
        client = ScriptedTeacherClient(infer_script={"m1": ["unknown", "unknown"]})
        outcome = verify_letter(client, record("r1", "m1"), None, 2)
        assert [p.used_exemplar for p in outcome.passes] == [False, False]

    def test_unparseable_prediction_is_a_failed_pass(self):
        client = ScriptedTeacherClient(infer_script={"m1": ["gibberish!!", "2 per 1 week"]})
        outcome = verify_letter(client, record("r1", "m1"), EXEMPLAR, 3)
        first = outcome.passes[0]
        assert first.predicted is None
        assert first.error and not first.matched
        assert outcome.retained and len(outcome.passes) == 2

    def test_max_passes_must_be_positive(self):
        client = ScriptedTeacherClient()
        with pytest.raises(ValueError):
            verify_letter(client, record("r1", "m1"), None, 0)


class TestRunScreening:
    def test_all_correct_no_discards(self):
        records = [record(f"r{i}", f"m{i}") for i in range(4)]
        client = ScriptedTeacherClient(
            infer_script={f"m{i}": ["2 per 1 week"] for i in range(4)}
        )
        result = run_screening(client, records, [EXEMPLAR])
        assert [r.id for r in result.retained] == ["r0", "r1", "r2", "r3"]
        assert result.stats.with_analysis == GroupStats(4, (0, 0, 0))
        assert result.stats.without_analysis == GroupStats(0, ())
        assert result.stats.retained == 4
        check_retention_soundness(result.outcomes)

    def test_groups_split_by_exemplar_applicability(self):
        records = [
            record("r1", "m1", template="t1"),
            record("r2", "m2", template="t2"),
            record("r3", "m3", template="t1"),
        ]
        client = ScriptedTeacherClient(
            infer_script={m: ["2 per 1 week"] for m in ("m1", "m2", "m3")}
        )
        result = run_screening(client, records, [SCOPED])
        assert result.stats.with_analysis.total == 2
        assert result.stats.without_analysis.total == 1
        # groups run different pass budgets
        assert len(result.stats.with_analysis.discarded_per_pass) == 3
        assert len(result.stats.without_analysis.discarded_per_pass) == 2

    def test_per_pass_counts_are_still_failing_after_each_pass(self):
        records = [record("r1", "m1"), record("r2", "m2"), record("r3", "m3")]
        client = ScriptedTeacherClient(
            infer_script={
                "m1": ["2 per 1 week"],                       # right at pass 1
                "m2": ["unknown", "2 per 1 week"],            # right at pass 2
                "m3": ["unknown", "unknown", "2 per 1 week"],  # right at pass 3
            }
        )
        result = run_screening(client, records, [EXEMPLAR])
        assert result.stats.with_analysis.discarded_per_pass == (2, 1, 0)
        assert result.stats.retained == 3

    def test_final_entry_is_final_discards(self):
        records = [record("r1", "m1"), record("r2", "m2")]
        client = ScriptedTeacherClient(
            infer_script={"m1": ["unknown"], "m2": ["2 per 1 week"]}
        )
        result = run_screening(client, records, [EXEMPLAR])
        assert result.stats.with_analysis.discarded_per_pass == (1, 1, 1)
        assert result.stats.with_analysis.final_discards == 1
        assert result.stats.retained == 1

    def test_client_failures_are_collected_not_fatal(self):
        inner = ScriptedTeacherClient(
            infer_script={"m1": ["2 per 1 week"], "m3": ["2 per 1 week"]}
        )

        class Flaky:
            def draft(self, base, description):
                return inner.draft(base, description)

            def infer(self, letter, exemplar=None):
                if "m2" in letter:
                    raise ClientError("socket closed")
                return inner.infer(letter, exemplar)

        records = [record("r1", "m1"), record("r2", "m2"), record("r3", "m3")]
        result = run_screening(Flaky(), records, [EXEMPLAR])
        assert result.failures == (("r2", "socket closed"),)
        assert result.stats.client_failures == ("r2",)
        assert result.stats.total_candidates == 3
        assert result.stats.retained == 2
        # the failed record is in neither group's tallies
        assert result.stats.with_analysis.total == 2

    def test_duplicate_ids_rejected(self):
        records = [record("r1", "m1"), record("r1", "m2")]
        with pytest.raises(ValueError):
            run_screening(ScriptedTeacherClient(), records)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            run_screening(ScriptedTeacherClient(), [])

    def test_concurrency_does_not_change_results(self):
        records = [
            record(f"r{i:02d}", f"m{i:02d}", gold=f"{i % 5 + 1} per 1 week")
            for i in range(24)
        ]
        for rec in records:
            object.__setattr__(
                rec, "letter_text",
                rec.letter_text + f" She has {int(rec.gold_label.count.value)} "
                "seizures per week at present.",
            )
        results = {}
        for workers in (1, 4):
            client = MockTeacherClient(wrong_rate=0.5, stubborn_rate=0.3, salt="cc")
            results[workers] = run_screening(
                client, records, [EXEMPLAR],
                ScreeningConfig(concurrency=workers),
            )
        assert results[1].retained == results[4].retained
        assert results[1].stats == results[4].stats
        assert results[1].outcomes == results[4].outcomes

    def test_runs_are_deterministic(self):
        records = [record("r1", "m1"), record("r2", "m2")]
        script = {"m1": ["unknown", "2 per 1 week"], "m2": ["2 per 1 week"]}
        first = run_screening(ScriptedTeacherClient(infer_script=dict(script)), records, [EXEMPLAR])
        second = run_screening(ScriptedTeacherClient(infer_script=dict(script)), records, [EXEMPLAR])
        assert first == second


class TestRenderScreening:
    def test_reference_table_shape(self):
        stats = ScreeningStats(
            total_candidates=1924,
            with_analysis=GroupStats(577, (211, 150, 127)),
            without_analysis=GroupStats(1347, (250, 190)),
            retained=1607,
        )
        assert render_screening(stats) == (
            "method\tpass 1\tpass 2\tpass 3\n"
            "with analysis\t211\t150\t127\n"
            "without analysis\t250\t190\t-\n"
            "total candidates\t1924\n"
            "retained\t1607\n"
        )

    def test_failures_line_only_when_present(self):
        stats = ScreeningStats(
            total_candidates=10,
            with_analysis=GroupStats(4, (1,)),
            without_analysis=GroupStats(5, (2, 1)),
            retained=7,
            client_failures=("r9",),
        )
        rendered = render_screening(stats)
        assert rendered.endswith("client failures\t1\n")
        assert rendered.splitlines()[1] == "with analysis\t1\t-"

    def test_degenerate_empty_groups(self):
        stats = ScreeningStats(0, GroupStats(0, ()), GroupStats(0, ()), 0)
        assert render_screening(stats) == (
            "method\tpass 1\n"
            "with analysis\t-\n"
            "without analysis\t-\n"
            "total candidates\t0\n"
            "retained\t0\n"
        )


class TestScreeningStats:
    def test_conservation_enforced(self):
        with pytest.raises(ValueError):
            ScreeningStats(
                total_candidates=10,
                with_analysis=GroupStats(5, (1,)),
                without_analysis=GroupStats(5, (1,)),
                retained=9,  # 9 + 1 + 1 != 10
            )

    def test_failures_count_toward_conservation(self):
        ScreeningStats(
            total_candidates=10,
            with_analysis=GroupStats(5, (1,)),
            without_analysis=GroupStats(4, (1,)),
            retained=7,
            client_failures=("r1",),
        )


class TestRetentionSoundness:
    def test_flags_retained_without_match(self):
        from szfreq import PassResult, VerificationOutcome

        bad = VerificationOutcome(
            "r1",
            (PassResult(None, "parse error", False, False),),
            True,
            record("r1", "m1"),
        )
        with pytest.raises(AssertionError):
            check_retention_soundness([bad])


class TestScreeningConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScreeningConfig(max_passes_with_exemplar=0)
        with pytest.raises(ValueError):
            ScreeningConfig(concurrency=0)

    def test_dict_round_trip(self):
        config = ScreeningConfig(4, 3, 2)
        assert ScreeningConfig.from_dict(config.to_dict()) == config
