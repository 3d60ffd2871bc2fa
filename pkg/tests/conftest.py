import json

import pytest

from phrasesift.corpus import Corpus, Document, ingest_jsonl


def jsonl_lines(records):
    return [json.dumps(r) for r in records]


@pytest.fixture
def tiny_records():
    return [
        {"id": "d1", "body": "Egypt protests spread.\n\nCairo crowds grew.",
         "title": "Egypt erupts", "source": "NYT", "published_at": "2011-01-28T12:00:00Z"},
        {"id": "d2", "body": "Markets rallied on oil prices.",
         "title": "Oil climbs", "source": "WSJ", "published_at": "2011-02-02T09:30:00Z"},
        {"id": "d3", "body": "Egypt elections draw near. Cairo prepares.",
         "title": "Vote ahead", "source": "NYT", "published_at": "2011-11-20T08:00:00Z"},
    ]


@pytest.fixture
def tiny_corpus(tiny_records):
    return ingest_jsonl(jsonl_lines(tiny_records), name="tiny")


def corpus_from_texts(texts, source="S", dates=None, titles=None):
    docs = []
    for i, text in enumerate(texts):
        docs.append(
            Document(
                id=f"t{i}",
                body=text,
                title=titles[i] if titles else None,
                source=source if isinstance(source, str) else source[i],
                published_at=dates[i] if dates else None,
            )
        )
    return Corpus(name="texts", documents=docs)
