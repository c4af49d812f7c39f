import json
import logging
from pathlib import Path

import pytest
import requests
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from reprofeat.ingest import AuthorName
from reprofeat.metaclients import (
    AuthorMetrics,
    FixtureProvider,
    InMemoryGraph,
    JsonTransport,
    MetadataClient,
    ProviderError,
    ProviderRecord,
    ResponseCache,
    TokenBucket,
    VenueMetrics,
    merged_citation_count,
)
from reprofeat.metaclients.cache import normalize_identifier
from reprofeat.metaclients.providers import ScopusProvider, scopus_serial_to_metrics

PROVIDER = FIXTURES / "provider"


class CountingFixture(FixtureProvider):
    def __init__(self, root):
        super().__init__(root)
        self.calls = 0

    def paper(self, doi, title):
        self.calls += 1
        return super().paper(doi, title)


class FakeResponse:
    def __init__(self, status, payload=None):
        self.status_code = status
        self._payload = payload

    def json(self):
        return self._payload


class FakeSession:
    """Routes GET requests to canned responses by URL substring; records every call."""

    def __init__(self, routes):
        self.routes = routes
        self.calls = []

    def get(self, url, params=None, headers=None, timeout=None):
        self.calls.append(url)
        for fragment, responses in self.routes.items():
            if fragment in url:
                item = responses.pop(0) if isinstance(responses, list) and len(responses) > 1 else (
                    responses[0] if isinstance(responses, list) else responses)
                if isinstance(item, Exception):
                    raise item
                return item
        return FakeResponse(404)


def no_sleep(_):
    pass


# ------------------------------------------------------------------ fixture mode


def test_fixture_doi_lookup():
    client = MetadataClient.from_fixtures(PROVIDER)
    rec = client.fetch("10.x/demo1")
    assert (rec.citations_scopus, rec.citations_crossref) == (12, 10)
    assert merged_citation_count(rec) == 12


def test_unknown_doi_gives_empty_record():
    assert MetadataClient.from_fixtures(PROVIDER).fetch("10.x/unknown").is_empty


def test_second_fetch_is_a_cache_hit():
    provider = CountingFixture(PROVIDER)
    client = MetadataClient([provider], offline=True)
    first = client.fetch("10.x/demo1")
    calls = provider.calls
    assert client.fetch("https://doi.org/10.X/DEMO1") == first
    assert provider.calls == calls


def test_persistent_cache_survives_a_new_client(tmp_path):
    MetadataClient([CountingFixture(PROVIDER)], cache=ResponseCache(tmp_path), offline=True).fetch("10.x/demo1")
    provider = CountingFixture(PROVIDER)
    rec = MetadataClient([provider], cache=ResponseCache(tmp_path), offline=True).fetch("10.x/demo1")
    assert provider.calls == 0 and rec.citations_scopus == 12


def test_venue_metrics():
    client = MetadataClient.from_fixtures(PROVIDER)
    assert client.fetch_venue_metrics("1234-5678").sjr == 1.4
    assert client.fetch_venue_metrics("0000-0000") == VenueMetrics()
    assert client.fetch_venue_metrics(None) == VenueMetrics()


def test_author_metrics_in_order():
    client = MetadataClient.from_fixtures(PROVIDER)
    got = client.fetch_author_metrics([AuthorName("Doe", "Jane"), AuthorName("Roe", "Rick"), AuthorName("Nobody", "X")])
    assert [a.h_index for a in got] == [10, 20, None]


def test_fixture_mode_is_deterministic():
    a = MetadataClient.from_fixtures(PROVIDER).fetch("10.x/demo1")
    b = MetadataClient.from_fixtures(PROVIDER).fetch("10.x/demo1")
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)


def test_graph_from_fixture():
    graph = MetadataClient.from_fixtures(PROVIDER).graph
    assert graph.citers("P1") == ["A1", "A2"]
    assert graph.citers("r1") == ["A1", "A2"]
    assert graph.citers("missing") is None
    assert graph.year("r2") == 2021


# ------------------------------------------------------------------ models


def test_merged_citation_count_examples():
    assert merged_citation_count(ProviderRecord(citations_scopus=12, citations_crossref=10)) == 12
    assert merged_citation_count(ProviderRecord(citations_crossref=7)) == 7
    assert merged_citation_count(ProviderRecord()) == 0


counts = st.one_of(st.none(), st.integers(0, 10_000))
provider_records = st.builds(
    ProviderRecord,
    paper_id=st.one_of(st.none(), st.text(min_size=1, max_size=8)),
    title=st.one_of(st.none(), st.text(max_size=20)),
    pub_year=st.one_of(st.none(), st.integers(1900, 2021)),
    citations_scopus=counts,
    citations_crossref=counts,
    citation_velocity=counts,
    per_year_citations=st.dictionaries(st.integers(1990, 2021), st.integers(0, 50), max_size=4),
    references_count=counts,
    open_access=st.one_of(st.none(), st.booleans()),
    citing_paper_ids=st.lists(st.text(min_size=1, max_size=5), max_size=3),
    intents_in=st.one_of(st.none(), st.fixed_dictionaries({k: st.integers(0, 9) for k in ("background", "methodology", "result")})),
)


@settings(max_examples=100, deadline=None)
@given(provider_records)
def test_record_round_trip_and_merge_bound(rec):
    assert ProviderRecord.from_dict(json.loads(json.dumps(rec.to_dict()))) == rec
    merged = merged_citation_count(rec)
    for c in (rec.citations_scopus, rec.citations_crossref):
        if c is not None:
            assert merged >= c


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        ProviderRecord(citations_scopus=-1)
    with pytest.raises(ValueError):
        VenueMetrics(percent_cited=120)


def test_merge_is_first_available_except_references_max():
    a = ProviderRecord(title="S2 title", references_count=30)
    b = ProviderRecord(title="Crossref title", citations_crossref=9, references_count=41)
    merged = a.merged_with(b)
    assert (merged.title, merged.citations_crossref, merged.references_count) == ("S2 title", 9, 41)
    assert AuthorMetrics(h_index=3).merged_with(AuthorMetrics(h_index=5, pub_count=2)) == AuthorMetrics(pub_count=2, h_index=3)


# ------------------------------------------------------------------ cache


def test_cache_stores_misses_and_is_atomic(tmp_path):
    cache = ResponseCache(tmp_path)
    assert cache.get("s2-paper", "10.1/A") == (False, None)
    cache.put("s2-paper", "10.1/A", None)
    assert ResponseCache(tmp_path).get("s2-paper", "doi:10.1/a") == (True, None)
    with pytest.raises(TypeError):
        cache.put("s2-paper", "10.1/B", {"bad": object()})
    assert not list(tmp_path.rglob("*.tmp"))
    assert ResponseCache(tmp_path).get("s2-paper", "10.1/B") == (False, None)


def test_identifier_normalization():
    assert normalize_identifier("https://doi.org/10.1000/ABC") == "10.1000/abc"
    assert normalize_identifier("  The Title: Part II ") == "the title part ii"


# ------------------------------------------------------------------ transport


class FakeClock:
    def __init__(self):
        self.t = 0.0
        self.sleeps = []

    def __call__(self):
        return self.t

    def sleep(self, s):
        self.sleeps.append(s)
        self.t += s


def test_token_bucket_spaces_requests():
    clock = FakeClock()
    bucket = TokenBucket(rate=1.0, clock=clock, sleep=clock.sleep)
    waits = [bucket.acquire() for _ in range(3)]
    assert waits == [0.0, 1.0, 1.0]
    clock.t += 10
    assert bucket.acquire() == 0.0


def test_token_bucket_rejects_bad_rate():
    with pytest.raises(ValueError):
        TokenBucket(rate=0)


def transport(session, sleeps=None):
    clock = FakeClock()
    return JsonTransport(session, TokenBucket(1000, clock=clock, sleep=clock.sleep), sleep=(sleeps.append if sleeps is not None else no_sleep))


def test_transport_retries_with_backoff():
    sleeps = []
    session = FakeSession({"/x": [FakeResponse(503), FakeResponse(429), FakeResponse(200, {"ok": 1})]})
    assert transport(session, sleeps).get_json("http://h/x") == {"ok": 1}
    assert len(session.calls) == 3 and sleeps == [0.5, 1.0]


def test_transport_gives_up_after_three_retries():
    session = FakeSession({"/x": [FakeResponse(500)] * 5 + [FakeResponse(500)]})
    with pytest.raises(ProviderError):
        transport(session).get_json("http://h/x")
    assert len(session.calls) == 4


def test_transport_404_and_client_errors():
    assert transport(FakeSession({})).get_json("http://h/none") is None
    session = FakeSession({"/bad": FakeResponse(400)})
    with pytest.raises(ProviderError):
        transport(session).get_json("http://h/bad")
    assert len(session.calls) == 1


def test_transport_retries_connection_errors():
    session = FakeSession({"/x": [requests.ConnectionError("down"), FakeResponse(200, [1])]})
    assert transport(session).get_json("http://h/x") == [1]


# ------------------------------------------------------------------ live providers (faked HTTP)

S2_PAPER = {
    "paperId": "abc", "title": "Priming effects on intelligence tests", "year": 2015,
    "influentialCitationCount": 4, "referenceCount": 30, "isOpenAccess": False,
    "citations": [
        {"paperId": "c1", "year": 2016, "intents": ["methodology"]},
        {"paperId": "c2", "year": 2016, "intents": ["background", "result"]},
        {"paperId": "c3", "year": 2017, "intents": []},
    ],
    "references": [
        {"paperId": "r1", "intents": ["methodology"], "isInfluential": True},
        {"paperId": "r2", "intents": ["background"], "isInfluential": False},
    ],
}
CROSSREF_WORK = {"message": {"title": ["Priming effects on intelligence tests"], "issued": {"date-parts": [[2015, 3]]},
                             "is-referenced-by-count": 21, "references-count": 33}}


def live_client(session, tmp_path=None):
    return MetadataClient.live(cache_dir=tmp_path, session=session, sleep=no_sleep, rate=1000)


def test_live_merge_precedence(monkeypatch):
    monkeypatch.delenv("ELSEVIER_API_KEY", raising=False)
    session = FakeSession({"semanticscholar": FakeResponse(200, S2_PAPER), "crossref": FakeResponse(200, CROSSREF_WORK)})
    rec = live_client(session).fetch("10.1/p")
    assert rec.paper_id == "abc" and rec.citations_crossref == 21
    assert rec.references_count == 33  # larger of the two providers
    assert rec.per_year_citations == {2016: 2, 2017: 1}
    assert rec.intents_in == {"background": 1, "methodology": 1, "result": 1}
    assert rec.upstream_influential_methodology_count == 1 and rec.influential_references_count == 1
    assert rec.citations_scopus is None  # no Elsevier key, Scopus stays silent


def test_title_search_rejects_mismatched_candidates(monkeypatch, caplog):
    monkeypatch.delenv("ELSEVIER_API_KEY", raising=False)
    wrong = {"data": [dict(S2_PAPER, title="Something else entirely about bees")]}
    session = FakeSession({"paper/search": FakeResponse(200, wrong), "crossref": FakeResponse(200, {"message": {"items": []}})})
    with caplog.at_level(logging.WARNING):
        rec = live_client(session).fetch("Priming effects on intelligence tests")
    assert rec.is_empty
    assert "rejected candidate" in caplog.text


def test_failing_provider_is_logged_and_not_cached(monkeypatch, tmp_path, caplog):
    monkeypatch.delenv("ELSEVIER_API_KEY", raising=False)
    session = FakeSession({"semanticscholar": FakeResponse(500), "crossref": FakeResponse(200, CROSSREF_WORK)})
    with caplog.at_level(logging.WARNING):
        rec = live_client(session, tmp_path).fetch("10.1/p")
    assert rec.citations_crossref == 21 and rec.paper_id is None
    assert "failed" in caplog.text
    healthy = FakeSession({"semanticscholar": FakeResponse(200, S2_PAPER), "crossref": FakeResponse(200, CROSSREF_WORK)})
    assert live_client(healthy, tmp_path).fetch("10.1/p").paper_id == "abc"
    assert not any("crossref" in url for url in healthy.calls)  # crossref answer came from the cache


def test_offline_flag_skips_live_providers():
    session = FakeSession({})
    live = live_client(session)
    offline = MetadataClient(live.providers, offline=True)
    assert offline.providers == [] and offline.fetch("10.1/p").is_empty
    assert session.calls == []


def test_scopus_serial_parsing(monkeypatch):
    entry = {
        "citeScoreYearInfoList": {
            "citeScoreCurrentMetric": "4.5",
            "citeScoreYearInfo": [{"citeScoreInformationList": [{"citeScoreInfo": [
                {"scholarlyOutput": "310", "percentCited": "77", "citationCount": "1395"}]}]}],
        },
        "SNIPList": {"SNIP": [{"$": "1.33"}]},
        "SJRList": {"SJR": [{"$": "2.01"}]},
        "subject-area": [{"@code": "3207"}],
    }
    assert scopus_serial_to_metrics(entry) == {
        "cite_score": 4.5, "snip": 1.33, "sjr": 2.01, "scholarly_output": 310.0,
        "percent_cited": 77.0, "citation_count": 1395.0, "asjc_code": 3207,
    }
    session = FakeSession({"serial/title": FakeResponse(200, {"serial-metadata-response": {"entry": [entry]}})})
    provider = ScopusProvider(transport(session), api_key="k")
    assert provider.venue("1234-5678")["sjr"] == 2.01


def test_in_memory_graph_inverts_references():
    g = InMemoryGraph({"a": {"year": 2000, "references": ["b", "c", "b"]}, "d": {"references": ["b"]}})
    assert g.references("a") == ["b", "c"]
    assert g.citers("b") == ["a", "d"]
    assert g.citers("a") == []
    assert g.nodes() == ["a", "b", "c", "d"]
