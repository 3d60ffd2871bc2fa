"""Unicode-aware tokenizer shared by every text-consuming component.

A token is a lowercase run of letters and digits.  Apostrophes and
intra-word hyphens or slashes are deleted so the surrounding fragments
fuse into one token ("state-run" -> "staterun", "china's" -> "chinas");
every other character separates tokens.  The same rules drive both the
plain token stream and the span-annotated variant used for showing
matches in their original, unnormalized context.
"""

from __future__ import annotations

import re

# Hyphen last so the character class needs no escaping.
_CONNECTOR_CHARS = "'’ʼ/-"
_SPAN = re.compile(rf"[^\W_]+(?:[{_CONNECTOR_CHARS}][^\W_]+)*")
_STRIP = re.compile(f"[{_CONNECTOR_CHARS}]")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into normalized tokens."""
    return [token for token, _, _ in tokenize_spans(text)]


def tokenize_spans(text: str) -> list[tuple[str, int, int]]:
    """Tokenize and keep each token's [start, end) span in the original text.

    Spans cover the raw surface form, including any deleted connector
    characters, so callers can excerpt the original text around a match.
    """
    out = []
    for m in _SPAN.finditer(text):
        token = _STRIP.sub("", m.group(0)).lower()
        if token:
            out.append((token, m.start(), m.end()))
    return out


def normalize_phrase(phrase: str) -> str:
    """Canonical form of a phrase: its tokens joined by single spaces."""
    return " ".join(tokenize(phrase))
