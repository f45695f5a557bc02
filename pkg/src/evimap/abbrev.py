"""Abbreviation definition detection and short-form -> long-form rewriting.

Detection follows the Schwartz-Hearst long-form matching procedure: scan the
short form right to left and align each alphanumeric character against the
text before the defining parenthesis, requiring the first character to start
a word of the long form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .corpus import Document, Sentence, TokenSpan, segment_sentences

MAX_SHORT_CHARS = 10
MAX_SHORT_WORDS = 2


@dataclass(frozen=True)
class AbbrevPair:
    short_form: str
    long_form: str
    definition_site: TokenSpan  # the parenthetical, including parentheses


@dataclass(frozen=True)
class OffsetMap:
    """Monotone piecewise map from expanded-text offsets back to original offsets.

    Segments are (exp_start, exp_end, orig_start, orig_end).  Copied segments
    have equal lengths and map one-to-one; replacement segments map every
    expanded offset onto the start of the original short form.
    """

    segments: tuple[tuple[int, int, int, int], ...]

    def to_original(self, offset: int) -> int:
        for es, ee, os_, oe in self.segments:
            if es <= offset < ee:
                if ee - es == oe - os_:
                    return os_ + (offset - es)
                return os_
        # one-past-the-end maps to the original end
        if self.segments and offset == self.segments[-1][1]:
            return self.segments[-1][3]
        raise IndexError(f"offset {offset} outside mapped range")

    def span_to_original(self, start: int, end: int) -> tuple[int, int]:
        ostart = self.to_original(start)
        oend = ostart
        for es, ee, os_, oe in self.segments:
            if es < end and start < ee:
                oend = max(oend, oe if ee - es != oe - os_ else os_ + (min(end, ee) - es))
        return ostart, max(oend, ostart)

    @classmethod
    def identity(cls, length: int) -> "OffsetMap":
        return cls(((0, length, 0, length),)) if length else cls(())


@dataclass
class ExpansionResult:
    document: Document
    offset_map: OffsetMap
    warnings: list[str] = field(default_factory=list)


_PAREN = re.compile(r"\(([^()]{1,60})\)")


def _valid_short_form(sf: str) -> bool:
    if not sf or len(sf) > MAX_SHORT_CHARS:
        return False
    if len(sf.split()) > MAX_SHORT_WORDS:
        return False
    if not any(c.isalpha() for c in sf):
        return False
    if not sf[0].isalnum():
        return False
    return True


def _find_long_form(short: str, before: str) -> str | None:
    """Right-to-left character alignment of the short form against `before`."""
    s = len(short) - 1
    l = len(before) - 1
    while s >= 0:
        c = short[s].lower()
        if not c.isalnum():
            s -= 1
            continue
        first = s == 0
        while l >= 0:
            ok = before[l].lower() == c
            if ok and first and l > 0 and before[l - 1].isalnum():
                ok = False  # first short-form char must start a word
            if ok:
                break
            l -= 1
        if l < 0:
            return None
        s -= 1
        l -= 1
    # extend left to the start of the word the match begins in
    start = l + 1
    while start > 0 and not before[start - 1].isspace():
        start -= 1
    long_form = before[start:].strip()
    return long_form or None


def detect_abbreviations(doc: Document) -> list[AbbrevPair]:
    """Find (short form, long form) definition pairs in the abstract."""
    text = doc.abstract
    pairs = []
    for m in _PAREN.finditer(text):
        short = m.group(1).strip()
        if not _valid_short_form(short):
            continue
        # candidate long form: up to min(|sf|+5, |sf|*2) words before the paren
        words_before = text[: m.start()].rstrip()
        n_chars = len([c for c in short if c.isalnum()])
        max_words = min(n_chars + 5, n_chars * 2)
        tokens = words_before.split()
        candidate = " ".join(tokens[-max_words:]) if tokens else ""
        # align within the true text so offsets of whitespace are irrelevant
        long_form = _find_long_form(short, candidate) if candidate else None
        if long_form is None:
            continue
        if len(short) > len(long_form):
            continue
        if long_form.lower() == short.lower():
            continue
        pairs.append(
            AbbrevPair(
                short_form=short,
                long_form=long_form,
                definition_site=TokenSpan.of(text, m.start(), m.end()),
            )
        )
    return pairs


def _occurrence_pattern(short: str) -> re.Pattern:
    flags = 0 if len(short) <= 2 else re.IGNORECASE
    return re.compile(rf"(?<![\w-]){re.escape(short)}(?![\w-])", flags)


def expand_abbreviations(doc: Document, pairs: list[AbbrevPair]) -> ExpansionResult:
    """Replace standalone short-form occurrences at or after their definition.

    The defining parenthetical itself is preserved.  Overlapping candidate
    replacements are resolved in favor of the longest short form; losers are
    recorded as warnings.
    """
    text = doc.abstract
    if not pairs:
        return ExpansionResult(doc, OffsetMap.identity(len(text)))

    candidates = []  # (start, end, long_form, pair)
    for pair in pairs:
        site = pair.definition_site
        for m in _occurrence_pattern(pair.short_form).finditer(text, site.start):
            if site.start <= m.start() < site.end:
                continue  # the definition occurrence stays
            if text[m.start() : m.end()] == pair.long_form:
                continue
            candidates.append((m.start(), m.end(), pair.long_form, pair))

    # longest short form wins on overlap, then leftmost
    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0]))
    chosen: list[tuple[int, int, str, AbbrevPair]] = []
    warnings = []
    for cand in candidates:
        clash = next((c for c in chosen if cand[0] < c[1] and c[0] < cand[1]), None)
        if clash is not None:
            warnings.append(
                f"{doc.doc_id}: skipped overlapping replacement of "
                f"{cand[3].short_form!r} at {cand[0]}"
            )
            continue
        chosen.append(cand)
    chosen.sort(key=lambda c: c[0])

    out = []
    segments = []
    cursor = 0
    exp_pos = 0
    for start, end, long_form, _pair in chosen:
        if start > cursor:
            out.append(text[cursor:start])
            segments.append((exp_pos, exp_pos + (start - cursor), cursor, start))
            exp_pos += start - cursor
        out.append(long_form)
        segments.append((exp_pos, exp_pos + len(long_form), start, end))
        exp_pos += len(long_form)
        cursor = end
    if cursor < len(text):
        out.append(text[cursor:])
        segments.append((exp_pos, exp_pos + (len(text) - cursor), cursor, len(text)))
        exp_pos += len(text) - cursor

    expanded = "".join(out)
    new_doc = Document(
        doc_id=doc.doc_id,
        title=doc.title,
        abstract=expanded,
        sentences=tuple(segment_sentences(expanded)),
        meta=dict(doc.meta),
    )
    return ExpansionResult(new_doc, OffsetMap(tuple(segments)), warnings)
