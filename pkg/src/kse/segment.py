"""Rule-based sentence splitter.

Splits on sentence-final punctuation (``.``, ``!``, ``?``) followed by
whitespace and an uppercase letter, digit, or opening quote. Periods that
terminate a known abbreviation (``Mr.``, ``U.S.``, ...) never split.
Deterministic and dependency-free.
"""

# Compared case-insensitively against the whitespace-delimited token that ends
# at the candidate period (leading quotes/brackets stripped).
ABBREVIATIONS = frozenset({
    "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "hon.", "st.", "jr.", "sr.",
    "gen.", "col.", "capt.", "sgt.", "lt.", "gov.", "sen.", "rep.",
    "u.s.", "u.k.", "u.n.", "e.g.", "i.e.", "etc.", "vs.", "al.",
    "no.", "fig.", "vol.", "inc.", "ltd.", "co.", "corp.", "dept.",
    "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.",
    "oct.", "nov.", "dec.",
})

_OPENERS = "\"'“‘([{"
_TERMINAL = ".!?"


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim."""
    return " ".join(text.split())


def _protected(text: str, period_idx: int) -> bool:
    """True when the token ending at text[period_idx] must not end a sentence."""
    if text[period_idx] != ".":
        return False
    start = period_idx
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start : period_idx + 1].lstrip(_OPENERS).lower()
    return token in ABBREVIATIONS


def _is_boundary(text: str, i: int) -> bool:
    """True when a terminal mark at index i ends a sentence."""
    if text[i] not in _TERMINAL:
        return False
    # consume a run of terminal marks ("?!", "...") as one candidate
    if i + 1 < len(text) and text[i + 1] in _TERMINAL:
        return False
    j = i + 1
    if j >= len(text) or not text[j].isspace():
        return False
    while j < len(text) and text[j].isspace():
        j += 1
    if j >= len(text):
        return False
    nxt = text[j]
    if not (nxt.isupper() or nxt.isdigit() or nxt in _OPENERS):
        return False
    return not _protected(text, i)


def split_sentences(text: str) -> list[str]:
    """Split text into sentence strings; whitespace-only input yields []."""
    if not text or not text.strip():
        return []
    sentences = []
    start = 0
    for i in range(len(text)):
        if _is_boundary(text, i):
            piece = text[start : i + 1].strip()
            if piece:
                sentences.append(piece)
            start = i + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
