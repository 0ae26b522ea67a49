"""Text analysis: tokenization with byte spans, and Porter stemming.

Documents and queries pass text through the same pipeline so inflected
word forms match. Spans are byte offsets into the original UTF-8 text and
survive the pipeline, which is what snippet extraction and highlighting
rely on.
"""
from __future__ import annotations

from dataclasses import dataclass

MIN_TOKEN_LEN = 2  # single letters would collide with math variables


@dataclass(frozen=True)
class RawToken:
    text: str  # lowercased
    start: int  # byte offset into the original text
    end: int


@dataclass(frozen=True)
class TextTerm:
    stem: str
    start: int
    end: int


def tokenize_text(text: str) -> list[RawToken]:
    """Split on non-alphanumeric codepoints, lowercase, drop tokens
    shorter than two characters. Spans index the UTF-8 byte encoding."""
    tokens: list[RawToken] = []
    chars: list[str] = []
    byte = 0
    start = 0

    def flush(end_byte: int):
        if len(chars) >= MIN_TOKEN_LEN:
            tokens.append(RawToken("".join(chars).lower(), start, end_byte))
        chars.clear()

    for ch in text:
        width = len(ch.encode("utf-8"))
        if ch.isalnum():
            if not chars:
                start = byte
            chars.append(ch)
        else:
            flush(byte)
        byte += width
    flush(byte)
    return tokens


def analyze(text: str) -> list[TextTerm]:
    """Tokenize and stem; the full text pipeline for both sides."""
    return [TextTerm(stem(tok.text), tok.start, tok.end) for tok in tokenize_text(text)]


# ---------------------------------------------------------------------------
# Porter stemmer. Faithful to the reference realization of the five-step
# suffix-stripping algorithm, including its two classic amendments
# (bli->ble and the logi rule). Words of length <= 2 are left alone.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return True if i == 0 else not _is_cons(word, i - 1)
    return True


def _measure(word: str, end: int) -> int:
    """Number of vowel-consonant transitions in word[:end]."""
    m = 0
    i = 0
    while i < end and _is_cons(word, i):
        i += 1
    while True:
        while i < end and not _is_cons(word, i):
            i += 1
        if i >= end:
            return m
        m += 1
        while i < end and _is_cons(word, i):
            i += 1
        if i >= end:
            return m


def _has_vowel(word: str, end: int) -> bool:
    return any(not _is_cons(word, i) for i in range(end))


def _ends_double_cons(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_cons(word, len(word) - 1)


def _cvc(word: str, i: int) -> bool:
    """consonant-vowel-consonant ending at i, last consonant not w/x/y."""
    if i < 2 or not _is_cons(word, i) or _is_cons(word, i - 1) or not _is_cons(word, i - 2):
        return False
    return word[i] not in "wxy"


def _step1ab(w: str) -> str:
    if w.endswith("s"):
        if w.endswith("sses"):
            w = w[:-2]
        elif w.endswith("ies"):
            w = w[:-3] + "i"
        elif not w.endswith("ss"):
            w = w[:-1]
    if w.endswith("eed"):
        if _measure(w, len(w) - 3) > 0:
            w = w[:-1]
    elif w.endswith("ed") and _has_vowel(w, len(w) - 2):
        w = _restore_e(w[:-2])
    elif w.endswith("ing") and _has_vowel(w, len(w) - 3):
        w = _restore_e(w[:-3])
    return w


def _restore_e(stem: str) -> str:
    if stem.endswith(("at", "bl", "iz")):
        return stem + "e"
    if _ends_double_cons(stem):
        return stem if stem[-1] in "lsz" else stem[:-1]
    if _measure(stem, len(stem)) == 1 and _cvc(stem, len(stem) - 1):
        return stem + "e"
    return stem


def _step1c(w: str) -> str:
    if w.endswith("y") and _has_vowel(w, len(w) - 1):
        return w[:-1] + "i"
    return w


# First matching suffix wins and stops the scan, whether or not the
# measure condition lets it rewrite; longer suffixes precede their
# own suffixes (ational before tional, ization before ation, ...).
_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("bli", "ble"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ("logi", "log"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _apply_rules(w: str, rules, min_measure: int) -> str:
    for suffix, replacement in rules:
        if w.endswith(suffix):
            end = len(w) - len(suffix)
            if _measure(w, end) > min_measure:
                return w[:end] + replacement
            return w
    return w


def _step4(w: str) -> str:
    for suffix in _STEP4:
        if not w.endswith(suffix):
            continue
        end = len(w) - len(suffix)
        if suffix == "ion" and (end == 0 or w[end - 1] not in "st"):
            continue  # ion only strips after s or t
        if _measure(w, end) > 1:
            return w[:end]
        return w
    return w


def _step5(w: str) -> str:
    m_boundary = len(w)  # the reference measures the ll case before the e-drop
    original = w
    if w.endswith("e"):
        a = _measure(w, len(w))
        if a > 1 or (a == 1 and not _cvc(w, len(w) - 2)):
            w = w[:-1]
    if w.endswith("ll") and _measure(original, m_boundary) > 1:
        w = w[:-1]
    return w


def stem(word: str) -> str:
    """Porter stem of a lowercase token; identity on words of length <= 2."""
    if len(word) <= 2:
        return word
    w = _step1ab(word)
    w = _step1c(w)
    w = _apply_rules(w, _STEP2, 0)
    w = _apply_rules(w, _STEP3, 0)
    w = _step4(w)
    w = _step5(w)
    return w
