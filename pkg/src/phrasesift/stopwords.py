"""Fixed, versioned English stop-word list.

High-frequency function words only; content words never belong here.
The list is part of the package contract: reruns of a recorded
configuration must see the identical list, so edits require a version
bump.  Users can override it with a one-word-per-line file.
"""

from __future__ import annotations

from pathlib import Path

STOPLIST_VERSION = "1"

DEFAULT_STOPWORDS: frozenset[str] = frozenset(
    """
    a about above across after again against all almost along already also
    although always am among an and another any are around as at be because
    been before behind being below besides between beyond both but by can
    cannot could did do does doing down during each either else enough even
    ever every few for from further had has have having he her here hers
    herself him himself his how however i if in instead into is it its itself
    just less many may me might more most much must my myself neither never no
    nor not nothing now of off often on once one only onto or other others our
    ours ourselves out over own per rather same she should since so some
    something sometimes still such than that the their theirs them themselves
    then there therefore these they this those though through throughout thus
    to too toward towards under until up upon us very was we well were what
    when where whether which while who whom whose why will with within without
    would yet you your yours yourself yourselves
    """.split()
)


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line stop list; blank lines and # comments ignored."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.append(word)
    if not words:
        raise ValueError(f"stop list {path} contains no words")
    return frozenset(words)
