import json

import pytest

from kse.corpus import Sample, ingest_corpus, load_dataset
from kse.errors import DuplicateId, EmptyCorpus, MalformedLine, MissingEvidence, PreconditionViolation


def write_lines(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


def test_empty_file(tmp_path):
    p = tmp_path / "corpus.jsonl"
    p.write_text("")
    with pytest.raises(EmptyCorpus):
        ingest_corpus(p)


def test_minimal_split(tmp_path):
    p = tmp_path / "corpus.jsonl"
    write_lines(p, [{"id": "d1", "title": "t", "text": "A. B."}])
    corpus = ingest_corpus(p)
    sents = corpus.sentences["d1"]
    assert [(s.sent_idx, s.text) for s in sents] == [(0, "A."), (1, "B.")]


def test_duplicate_id(tmp_path):
    p = tmp_path / "corpus.jsonl"
    write_lines(p, [{"id": "d1", "title": "", "text": "x."}, {"id": "d1", "title": "", "text": "y."}])
    with pytest.raises(DuplicateId):
        ingest_corpus(p)


def test_malformed_line_number(tmp_path):
    p = tmp_path / "corpus.jsonl"
    p.write_text('{"id": "a", "title": "", "text": "ok."}\nnot json\n')
    with pytest.raises(MalformedLine) as err:
        ingest_corpus(p)
    assert err.value.line_no == 2


def test_missing_field_and_empty_text(tmp_path):
    p = tmp_path / "corpus.jsonl"
    write_lines(p, [{"id": "a", "title": "t"}])
    with pytest.raises(MalformedLine):
        ingest_corpus(p)
    write_lines(p, [{"id": "a", "title": "t", "text": "   "}])
    with pytest.raises(MalformedLine):
        ingest_corpus(p)


def test_fixture_corpus_loads(mini_corpus):
    assert len(mini_corpus) == 120
    assert len(mini_corpus.by_id) == 120


def test_sample_validation():
    with pytest.raises(PreconditionViolation):
        Sample(id="s", question="q?", golden_answers=())
    with pytest.raises(MissingEvidence):
        Sample(id="s", question="claim", golden_answers=("SUPPORTS",), task="fact_check")
    with pytest.raises(PreconditionViolation):
        Sample(id="s", question="q?", golden_answers=("a",), task="quiz")
    ok = Sample(id="s", question="claim", golden_answers=("SUPPORTS",), task="fact_check", evidence="E.")
    assert ok.evidence == "E."


def test_load_dataset(tmp_path):
    p = tmp_path / "data.jsonl"
    write_lines(
        p,
        [
            {"id": "q1", "question": "Who?", "golden_answers": ["A"], "evidence": None, "task": "open_qa"},
            {"id": "q2", "question": "Claim", "golden_answers": ["REFUTES"], "evidence": "E.", "task": "fact_check"},
        ],
    )
    samples = load_dataset(p)
    assert [s.id for s in samples] == ["q1", "q2"]
    assert samples[1].task == "fact_check"


def test_fixture_dataset_loads(mini_samples):
    assert len(mini_samples) == 40
    assert all(s.task == "open_qa" for s in mini_samples)
