#!/usr/bin/env python3
"""Regenerate the bundled fixture data under src/kse/fixtures/.

Builds a 120-document mini corpus in which each of 40 samples has exactly two
planted evidence sentences inside one evidence document, shaped so that the
mock-provider pipeline provably recovers them:

* the two evidence sentences share no content words with each other;
* the first covers under half of the fact's content words (so refinement
  does not stop after one nugget), the pair covers well over half;
* every question carries two coined tokens unique to its evidence document,
  which pins BM25 retrieval;
* distractor documents share no content words with any fact.

The script verifies each constraint with the real mock providers, then runs
the full pipeline end to end and asserts exact recovery for all 40 samples
before writing anything. It also freezes the synthesized-output checksum and
regenerates the 50-case metric fixture from an independent reference
implementation (audited values asserted inline).
"""

import hashlib
import json
import random
import re
import string
import sys
from collections import Counter
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from kse.corpus import Corpus, Document, Sample  # noqa: E402
from kse.index import build_index, retrieve_docs  # noqa: E402
from kse.jsonl import write_jsonl  # noqa: E402
from kse.providers import HashEmbedder, RecallNli, mock_providers, similarity  # noqa: E402
from kse.synthesis import SynthesisConfig, build_fact, synthesize_kse  # noqa: E402

FIXTURE_DIR = REPO / "src" / "kse" / "fixtures"
SEED = 20240817

SYLLABLES = [
    "bal", "dor", "fen", "gri", "hal", "jin", "kex", "lom", "mar", "nor",
    "pel", "quy", "ris", "sul", "tav", "urn", "vex", "wim", "yol", "zan",
    "bre", "cro", "dru", "fla", "gle",
]

# question, first evidence sentence, second evidence sentence, two fillers.
# {u1}/{u2} are coined topic tokens, {first}/{last} the coined answer name.
TEMPLATES = [
    {
        "question": "Which engineer designed the {u1} breakwater protecting {u2} harbour from winter storms?",
        "e1": "{first} {last} designed the {u1} breakwater.",
        "e2": "It was built protecting {u2} harbour from winter storms.",
        "fillers": [
            "Local crews praised the {u1} project during a ceremony.",
            "Tourists visit {u2} each summer.",
        ],
        "title": "{u1} breakwater",
    },
    {
        "question": "Which composer wrote the {u1} anthem performed at {u2} festival every spring evening?",
        "e1": "{first} {last} wrote the {u1} anthem.",
        "e2": "It was performed at {u2} festival each spring evening.",
        "fillers": [
            "Choirs rehearse the {u1} melody weekly.",
            "Crowds gather near {u2} square at dusk.",
        ],
        "title": "{u1} anthem",
    },
    {
        "question": "Which astronomer charted the {u1} nebula above {u2} observatory during cold autumn nights?",
        "e1": "{first} {last} charted the {u1} nebula.",
        "e2": "Observations happened above {u2} observatory during autumn nights.",
        "fillers": [
            "A plaque describes the {u1} survey.",
            "Students tour {u2} telescopes monthly.",
        ],
        "title": "{u1} nebula",
    },
    {
        "question": "Which architect restored the {u1} bridge spanning {u2} valley after severe flood damage?",
        "e1": "{first} {last} restored the {u1} bridge.",
        "e2": "Repairs continued spanning {u2} valley after the flood.",
        "fillers": [
            "Engravings decorate the {u1} arches.",
            "Hikers cross {u2} trails often.",
        ],
        "title": "{u1} bridge",
    },
    {
        "question": "Which botanist catalogued the {u1} orchids inside {u2} reserve before rainy season began?",
        "e1": "{first} {last} catalogued the {u1} orchids.",
        "e2": "Field teams worked inside {u2} reserve before the rainy season.",
        "fillers": [
            "Sketches depict the {u1} petals.",
            "Rangers patrol {u2} paths daily.",
        ],
        "title": "{u1} orchids",
    },
]

DISTRACTOR_SENTENCES = [
    "Dr. {c1} studied the {c2} glacier for nine years.",
    "The {c1} pottery guild met in {c2} hall.",
    "Members debated clay sourcing until midnight.",
    "A {c1} moth colony nested beneath the {c2} mill.",
    "Lanterns lit the {c1} pier while ferries docked.",
    "The {c1} railway closed when the {c2} tunnel collapsed.",
    "Etc. aside, the {c1} archive holds older ledgers.",
    "Volunteers repainted the {c2} lighthouse railings.",
    "Mrs. {c1} donated maps of the {c2} marshland.",
    "The {c1} bakery sells rye loaves on weekdays.",
    "Fog covered the {c2} moor all morning.",
    "A {c1} chess club convenes in the {c2} cellar.",
    "Miners abandoned the {c1} shaft long ago.",
    "The {c2} orchard yields small tart apples.",
    "Bells ring across {c1} rooftops at noon.",
]


class Coiner:
    """Hands out unique coined tokens that are not real template words."""

    def __init__(self, rng: random.Random, forbidden: set[str]):
        self.rng = rng
        self.forbidden = set(forbidden)
        combos = [a + b for a in SYLLABLES for b in SYLLABLES if a != b]
        self.rng.shuffle(combos)
        self.pool = [c for c in combos if c not in self.forbidden]

    def take(self) -> str:
        return self.pool.pop()


def template_words() -> set[str]:
    words = set()
    for tpl in TEMPLATES:
        for key in ("question", "e1", "e2"):
            words.update(re.findall(r"[a-z]+", tpl[key].lower()))
        for filler in tpl["fillers"]:
            words.update(re.findall(r"[a-z]+", filler.lower()))
    for sent in DISTRACTOR_SENTENCES:
        words.update(re.findall(r"[a-z]+", sent.lower()))
    return words


def build_samples_and_docs(rng: random.Random):
    coiner = Coiner(rng, template_words())
    samples, evidence_docs, evidence_info = [], [], {}
    nli = RecallNli()
    for i in range(40):
        tpl = TEMPLATES[i % len(TEMPLATES)]
        slots = {
            "u1": coiner.take(),
            "u2": coiner.take(),
            "first": coiner.take().capitalize(),
            "last": coiner.take().capitalize(),
        }
        question = tpl["question"].format(**slots)
        answer = f"{slots['first']} {slots['last']}"
        e1 = tpl["e1"].format(**slots)
        e2 = tpl["e2"].format(**slots)
        fillers = [f.format(**slots) for f in tpl["fillers"]]
        fact_text = f"{question} {answer}"

        # refinement must not stop before the second evidence sentence,
        # whichever of the pair is picked first
        eta_e1 = nli.support(e1, fact_text)
        eta_e2 = nli.support(e2, fact_text)
        eta_both = nli.support(f"{e1} {e2}", fact_text)
        assert max(eta_e1, eta_e2) < 0.5 <= eta_both, (i, eta_e1, eta_e2, eta_both)

        sentences = [e1, fillers[0], e2, fillers[1]]
        samples.append(
            Sample(id=f"q{i:03d}", question=question, golden_answers=(answer,), task="open_qa")
        )
        evidence_docs.append((tpl["title"].format(**slots).capitalize(), " ".join(sentences), len(sentences)))
        evidence_info[f"q{i:03d}"] = {"evidence": [e1, e2], "answer": answer}

    distractor_docs = []
    for _ in range(80):
        n_sent = rng.randint(2, 6)
        picks = rng.sample(DISTRACTOR_SENTENCES, n_sent)
        c1, c2 = coiner.take(), coiner.take()
        rendered = [s.format(c1=c1.capitalize(), c2=c2) for s in picks]
        title = c1.capitalize() + " notes"
        distractor_docs.append((title, " ".join(rendered), len(rendered)))

    # interleave evidence and distractor documents deterministically
    tagged = [("e", idx, *doc) for idx, doc in enumerate(evidence_docs)]
    tagged += [("d", idx, *doc) for idx, doc in enumerate(distractor_docs)]
    rng.shuffle(tagged)
    documents, manifest = [], {}
    for doc_no, (kind, idx, title, text, n_sent) in enumerate(tagged):
        doc_id = f"d{doc_no:03d}"
        documents.append({"id": doc_id, "title": title, "text": text})
        manifest[doc_id] = n_sent
        if kind == "e":
            evidence_info[f"q{idx:03d}"]["doc_id"] = doc_id
    return samples, documents, manifest, evidence_info


def verify_end_to_end(samples, documents, evidence_info):
    corpus = Corpus([Document(**d) for d in documents])
    index = build_index(corpus)
    markers = []
    for sid in sorted(evidence_info):
        info = evidence_info[sid]
        for sent in info["evidence"]:
            markers.append((sent, info["answer"]))
    providers = mock_providers(markers)
    cfg = SynthesisConfig()
    records = []
    for sample in samples:
        retrieved = retrieve_docs(index, sample.question, cfg.top_k_docs, sample_id=sample.id)
        planted_id = evidence_info[sample.id]["doc_id"]
        assert retrieved.docs[0].id == planted_id, (sample.id, [d.id for d in retrieved.docs])
        record = synthesize_kse(sample, retrieved, cfg, providers)
        kept = sorted(n.text for n in record.pool.selected if n.kept)
        planted = sorted(evidence_info[sample.id]["evidence"])
        assert kept == planted, (sample.id, kept, planted)
        records.append(record.to_record())
    return markers, records


# --- independent reference metrics (kept deliberately separate from kse.metrics) ---

def ref_normalize(s):
    s = s.lower()
    s = "".join(ch for ch in s if ch not in set(string.punctuation))
    s = re.sub(r"\b(a|an|the)\b", " ", s)
    return " ".join(s.split())


def ref_f1(pred, gold):
    pt, gt = ref_normalize(pred).split(), ref_normalize(gold).split()
    if not pt and not gt:
        return 1.0
    common = Counter(pt) & Counter(gt)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pt)
    recall = overlap / len(gt)
    return (2 * precision * recall) / (precision + recall)


def ref_em(pred, golds):
    return int(any(ref_normalize(pred) == ref_normalize(g) for g in golds))


def make_metric_cases():
    em_cases = [
        ("Paris", ["Paris"]), ("the Paris", ["Paris"]), ("PARIS!", ["paris"]),
        ("Paris, France", ["Paris"]), ("paris", ["Lyon", "Paris"]),
        ("", ["Paris"]), ("an apple", ["apple"]), ("apple pie", ["apple"]),
        ("July 4 1776", ["July 4, 1776"]), ("Mount  Fuji", ["Mount Fuji"]),
        ("mount fuji", ["Mt Fuji"]), ("42", ["42"]), ("42.", ["42"]),
        ("forty two", ["42"]), ("U.S.", ["US"]), ("the U.K.", ["UK"]),
    ]
    f1_cases = [
        ("the cat sat", ["the cat ran"]),             # audited: {cat,sat}x{cat,ran} -> P=R=1/2 -> 0.5
        ("the cat sat", ["the cat sat"]),             # audited: identical -> 1.0
        ("dog", ["cat"]),                             # audited: disjoint -> 0.0
        ("red blue green", ["red blue"]),             # audited: P=2/3, R=1 -> 0.8
        ("red red blue", ["red blue blue"]),          # multiset: overlap 2 -> 2/3
        ("a b c d", ["b c"]),                         # P=1/2, R=1 -> 2/3
        ("b c", ["a b c d"]),                         # symmetric of above
        ("x", ["x y z w"]),                           # P=1, R=1/4 -> 0.4
        ("alpha beta gamma delta", ["gamma delta alpha beta"]),  # order-free -> 1.0
        ("one two three", ["four five"]),
        ("the the the", ["the"]),                     # all articles -> both empty -> 1.0
        ("", [""]),                                   # both empty -> 1.0
        ("", ["x"]),
        ("some words here", [""]),
        ("cat sat mat", ["cat mat", "dog"]),          # max over golds
        ("paris france", ["france", "paris france europe"]),
        ("15 men", ["fifteen men"]),                  # overlap 1: P=R=1/2 -> 0.5
        ("big red ball", ["red ball big ball"]),      # overlap 3: P=1, R=3/4 -> 6/7
    ]
    acc_cases = [
        ("SUPPORTS", "SUPPORTS", 1), ("refutes.", "REFUTES", 1),
        ("SUPPORTS", "REFUTES", 0), ("The claim supports this", "SUPPORTS", 1),
        ("I would say it refutes the claim", "REFUTES", 1),
        ("supported", "SUPPORTS", 0), ("REFUTES", "REFUTES", 1),
        ("it is true", "SUPPORTS", 0), ("  supports  ", "SUPPORTS", 1),
        ("Refutes", "REFUTES", 1), ("unsupported", "SUPPORTS", 0),
        ("this neither supports nor refutes", "SUPPORTS", 1),
        ("verdict: supports.", "SUPPORTS", 1), ("no idea", "REFUTES", 0),
        ("REFUTED", "REFUTES", 0), ("yes supports", "SUPPORTS", 1),
    ]
    cases = []
    for pred, golds in em_cases:
        cases.append({"kind": "em", "pred": pred, "golds": golds, "expected": ref_em(pred, golds)})
    for pred, golds in f1_cases:
        expected = max(ref_f1(pred, g) for g in golds)
        cases.append({"kind": "f1", "pred": pred, "golds": golds, "expected": expected})
    for pred, gold, expected in acc_cases:
        cases.append({"kind": "accuracy", "pred": pred, "golds": [gold], "expected": expected})
    assert len(cases) == 50, len(cases)
    # spot checks of the audited comments above
    lookup = {(c["pred"], tuple(c["golds"])): c["expected"] for c in cases if c["kind"] == "f1"}
    assert lookup[("the cat sat", ("the cat ran",))] == 0.5
    assert lookup[("red blue green", ("red blue",))] == 0.8
    assert lookup[("the the the", ("the",))] == 1.0
    assert lookup[("x", ("x y z w",))] == 0.4
    return cases


def main():
    rng = random.Random(SEED)
    samples, documents, manifest, evidence_info = build_samples_and_docs(rng)
    markers, records = verify_end_to_end(samples, documents, evidence_info)
    print(f"verified exact recovery on {len(samples)} samples")

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    write_jsonl(FIXTURE_DIR / "mini_corpus.jsonl", documents)
    write_jsonl(
        FIXTURE_DIR / "mini_dataset.jsonl",
        (
            {
                "id": s.id,
                "question": s.question,
                "golden_answers": list(s.golden_answers),
                "evidence": s.evidence,
                "task": s.task,
            }
            for s in samples
        ),
    )
    (FIXTURE_DIR / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURE_DIR / "evidence_map.json").write_text(
        json.dumps({"markers": markers, "samples": evidence_info}, indent=1), encoding="utf-8"
    )
    kse_path = FIXTURE_DIR / "_tmp_kse.jsonl"
    write_jsonl(kse_path, records)
    digest = hashlib.sha256(kse_path.read_bytes()).hexdigest()
    kse_path.unlink()
    (FIXTURE_DIR / "checksums.json").write_text(
        json.dumps({"kse_jsonl_sha256": digest}, indent=1) + "\n", encoding="utf-8"
    )
    (FIXTURE_DIR / "metric_cases.json").write_text(
        json.dumps(make_metric_cases(), indent=1) + "\n", encoding="utf-8"
    )
    print(f"wrote fixtures to {FIXTURE_DIR} (kse sha256 {digest[:12]}...)")


if __name__ == "__main__":
    main()
