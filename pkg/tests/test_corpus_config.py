"""JSONL corpus I/O and the run-configuration file."""

from __future__ import annotations

import json

import pytest

from szfreq import (
    BaseLetter,
    ClientConfig,
    CoTExemplar,
    DataError,
    DescriptionPair,
    DescriptionTemplate,
    GoldRecord,
    LetterRecord,
    NormConfig,
    PredictionRecord,
    RunConfig,
    ScreeningConfig,
    SyntheticIdentity,
    align_by_id,
    load_base_letters,
    load_exemplars,
    load_gold,
    load_identities,
    load_letters,
    load_pairs,
    load_predictions,
    load_templates,
    parse_label,
    read_jsonl,
    save_base_letters,
    save_exemplars,
    save_gold,
    save_identities,
    save_letters,
    save_pairs,
    save_predictions,
    save_templates,
    write_jsonl,
)


class TestReadWriteJsonl:
    def test_round_trip_and_blank_lines(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"a": 1}\n\n{"b": "two"}\n', encoding="utf-8")
        assert list(read_jsonl(path)) == [(1, {"a": 1}), (3, {"b": "two"})]

    def test_write_is_compact_and_newline_terminated(self, tmp_path):
        path = tmp_path / "x.jsonl"
        assert write_jsonl(path, [{"a": 1, "b": [2, 3]}]) == 1
        assert path.read_text(encoding="utf-8") == '{"a": 1, "b": [2, 3]}\n'

    def test_bad_json_cites_file_and_line(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"a": 1}\n{broken\n', encoding="utf-8")
        with pytest.raises(DataError, match=rf"{path}:2: not valid JSON"):
            list(read_jsonl(path))

    def test_non_object_line_rejected(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(DataError, match=rf"{path}:1: expected a JSON object"):
            list(read_jsonl(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="nope.jsonl"):
            list(read_jsonl(tmp_path / "nope.jsonl"))

    def test_non_ascii_kept_verbatim(self, tmp_path):
        path = tmp_path / "x.jsonl"
        write_jsonl(path, [{"abbrev": "≥1/D"}])
        assert "≥1/D" in path.read_text(encoding="utf-8")


class TestRecordFiles:
    def test_templates_round_trip(self, tmp_path):
        templates = [
            DescriptionTemplate(
                "t1", "has [1] seizures per week", "[1] per week", {1: ("2", "4 to 5")}
            ),
            DescriptionTemplate("t2", "is seizure free", "seizure free for 1 year", {}),
        ]
        path = tmp_path / "templates.jsonl"
        assert save_templates(path, templates) == 2
        assert load_templates(path) == templates

    def test_pairs_round_trip(self, tmp_path):
        pairs = [
            DescriptionPair("has 2 seizures per week", parse_label("2 per week"), "t1", {1: "2"}),
            DescriptionPair("frequency unknown", parse_label("unknown"), "t2", {}),
        ]
        path = tmp_path / "pairs.jsonl"
        assert save_pairs(path, pairs) == 2
        assert load_pairs(path) == pairs

    def test_pair_label_stored_canonically(self, tmp_path):
        pair = DescriptionPair("d", parse_label("2 per week"), "t1", {})
        path = tmp_path / "pairs.jsonl"
        save_pairs(path, [pair])
        assert json.loads(path.read_text())["label"] == "2 per 1 week"

    def test_base_letters_round_trip(self, tmp_path):
        letters = [BaseLetter("b1", "Dear colleague,\n..."), BaseLetter("b2", "Hi.")]
        path = tmp_path / "bases.jsonl"
        assert save_base_letters(path, letters) == 2
        assert load_base_letters(path) == letters

    def test_base_letter_empty_text_rejected(self):
        with pytest.raises(ValueError):
            BaseLetter("b1", "   ")

    def test_identities_round_trip(self, tmp_path):
        identities = {
            "r1": SyntheticIdentity({"NAME": "Alex", "DOB": "1 Jan 1990"}),
            "r2": SyntheticIdentity({"NAME": "Sam"}),
        }
        path = tmp_path / "identities.jsonl"
        assert save_identities(path, identities) == 2
        assert load_identities(path) == identities

    def test_letters_round_trip(self, tmp_path):
        records = [
            LetterRecord("r1", "Dear @NAME@ ...", parse_label("2 per week"), "t1", "b1"),
            LetterRecord(
                "r2", "Dear @NAME@ ...", parse_label("unknown"), "t2", "b1",
                analysis="states nothing", evidence=("quote",),
            ),
        ]
        path = tmp_path / "letters.jsonl"
        assert save_letters(path, records) == 2
        assert load_letters(path) == records

    def test_exemplars_round_trip(self, tmp_path):
        exemplars = [CoTExemplar("e1", ("t1",), "worked"), CoTExemplar("e2", (), "any")]
        path = tmp_path / "exemplars.jsonl"
        assert save_exemplars(path, exemplars) == 2
        assert load_exemplars(path) == exemplars

    def test_duplicate_id_cites_both_lines(self, tmp_path):
        path = tmp_path / "bases.jsonl"
        path.write_text(
            '{"id": "b1", "text": "one"}\n{"id": "b1", "text": "two"}\n',
            encoding="utf-8",
        )
        with pytest.raises(DataError, match=r":2: duplicate id 'b1' \(first at line 1\)"):
            load_base_letters(path)

    def test_decode_error_cites_line(self, tmp_path):
        path = tmp_path / "letters.jsonl"
        path.write_text('{"id": "r1"}\n', encoding="utf-8")
        with pytest.raises(DataError, match=r":1: "):
            load_letters(path)

    def test_bad_label_in_pair_cites_line(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        rows = [
            {"description": "d", "label": "2 per 1 week", "templateId": "t", "assignment": {}},
            {"description": "d2", "label": "nonsense", "templateId": "t", "assignment": {}},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        with pytest.raises(DataError, match=r":2: "):
            load_pairs(path)


class TestPredictionsAndGold:
    def test_predictions_round_trip(self, tmp_path):
        records = [
            PredictionRecord("r1", "3", "2 per week"),
            PredictionRecord("r2", "1", "4.5"),
        ]
        path = tmp_path / "preds.jsonl"
        assert save_predictions(path, records) == 2
        assert load_predictions(path) == records

    def test_default_format_applies_when_missing(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        path.write_text(
            '{"id": "r1", "raw": "4"}\n{"id": "r2", "format": "3", "raw": "unknown"}\n',
            encoding="utf-8",
        )
        records = load_predictions(path, default_format="1")
        assert [r.format for r in records] == ["1", "3"]

    def test_missing_format_without_default_fails(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        path.write_text('{"id": "r1", "raw": "4"}\n', encoding="utf-8")
        with pytest.raises(DataError, match=r':1: no "format" field'):
            load_predictions(path)

    def test_gold_round_trip_both_kinds(self, tmp_path):
        records = [
            GoldRecord("r1", label=parse_label("2 per week")),
            GoldRecord("r2", x=4.0),
        ]
        path = tmp_path / "gold.jsonl"
        assert save_gold(path, records) == 2
        assert load_gold(path) == records

    def test_gold_needs_exactly_one_of_label_and_x(self):
        with pytest.raises(ValueError):
            GoldRecord("r1")
        with pytest.raises(ValueError):
            GoldRecord("r1", label=parse_label("unknown"), x=1.0)

    def test_align_by_id_pairs_in_gold_order(self):
        golds = [GoldRecord("a", x=1.0), GoldRecord("b", x=2.0)]
        preds = [PredictionRecord("b", "1", "2"), PredictionRecord("a", "1", "1")]
        aligned = align_by_id(golds, preds)
        assert [(g.id, p.id) for g, p in aligned] == [("a", "a"), ("b", "b")]

    def test_align_by_id_missing_prediction(self):
        golds = [GoldRecord("a", x=1.0), GoldRecord("b", x=2.0)]
        with pytest.raises(DataError, match="no prediction.*'b'"):
            align_by_id(golds, [PredictionRecord("a", "1", "1")])

    def test_align_by_id_extra_prediction(self):
        golds = [GoldRecord("a", x=1.0)]
        preds = [PredictionRecord("a", "1", "1"), PredictionRecord("z", "1", "9")]
        with pytest.raises(DataError, match="no gold record.*'z'"):
            align_by_id(golds, preds)


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.client.temperature == 0.0
        assert config.client.credential_env == "SZFREQ_API_KEY"
        assert config.screening.max_passes_with_exemplar == 3
        assert config.screening.max_passes_without_exemplar == 2
        assert config.normalization.multiple_value == 3.0
        assert config.seed == 0

    def test_file_round_trip(self, tmp_path):
        config = RunConfig(
            normalization=NormConfig(multiple_value=2.0),
            client=ClientConfig(endpoint="https://api.test", model="m1", temperature=0.5),
            screening=ScreeningConfig(4, 3, 8),
            seed=17,
        )
        path = tmp_path / "run.json"
        config.to_file(path)
        assert RunConfig.from_file(path) == config

    def test_partial_file_fills_defaults(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"seed": 3}\n', encoding="utf-8")
        config = RunConfig.from_file(path)
        assert config.seed == 3
        assert config.screening == ScreeningConfig()

    def test_bad_json_is_data_error(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{oops\n", encoding="utf-8")
        with pytest.raises(DataError, match="not valid JSON"):
            RunConfig.from_file(path)

    def test_non_object_is_data_error(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1]\n", encoding="utf-8")
        with pytest.raises(DataError, match="expected a JSON object"):
            RunConfig.from_file(path)

    def test_missing_file_is_data_error(self, tmp_path):
        with pytest.raises(DataError):
            RunConfig.from_file(tmp_path / "nope.json")

    def test_credential_never_serialized(self, tmp_path):
        path = tmp_path / "run.json"
        RunConfig().to_file(path)
        text = path.read_text(encoding="utf-8").lower()
        assert "credential_env" in text  # the variable *name* is configurable
        for word in ("api_key_value", "secret", "token", "password"):
            assert word not in text
