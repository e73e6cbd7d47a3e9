import json
from importlib import resources

import httpx
import pytest

from cutaway.errors import (
    ConfigError,
    ProviderAuthError,
    ProviderError,
    ProviderUnreachableError,
)
from cutaway.providers import (
    FixtureProvider,
    ProviderRegistry,
    RemoteConfig,
    RemoteProvider,
    SearchRequest,
    SearchResult,
    fixture_providers_from_catalog,
    load_catalog,
)
from cutaway.session import BRollAsset


def catalog_path():
    return str(resources.files("cutaway.data").joinpath("fixture_catalog.json"))


def _asset(asset_id, style, tags, natural=2.0):
    return BRollAsset(asset_id=asset_id, provider="test", style=style,
                      url=f"https://assets.test/{asset_id}",
                      natural_duration_s=natural, tags=tuple(tags))


class TestSearchRequest:
    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            SearchRequest(query="  ")

    def test_bad_style_rejected(self):
        with pytest.raises(ValueError):
            SearchRequest(query="x", style="grainy")

    def test_bad_limit_rejected(self):
        with pytest.raises(ValueError):
            SearchRequest(query="x", limit=0)

    def test_styles_property(self):
        assert SearchRequest(query="x").styles == ("social_media", "professional")
        assert SearchRequest(query="x", style="professional").styles == ("professional",)


class TestFixtureProvider:
    def test_shipped_catalog_happiness(self):
        providers = fixture_providers_from_catalog(catalog_path())
        social = next(p for p in providers if p.style == "social_media")
        hits = social.search("happiness", limit=5)
        assert [a.asset_id for a in hits] == [
            "gif-001", "gif-002", "gif-003", "gif-004", "gif-005",
        ]

    def test_rank_by_tag_position_then_id(self):
        provider = FixtureProvider("t", "social_media", [
            _asset("b", "social_media", ["other", "cats"]),
            _asset("a", "social_media", ["other", "cats"]),
            _asset("c", "social_media", ["cats", "other"]),
        ])
        hits = provider.search("cats", limit=10)
        assert [a.asset_id for a in hits] == ["c", "a", "b"]

    def test_limit(self):
        providers = fixture_providers_from_catalog(catalog_path())
        social = next(p for p in providers if p.style == "social_media")
        assert len(social.search("happiness", limit=2)) == 2

    def test_no_match_is_empty(self):
        providers = fixture_providers_from_catalog(catalog_path())
        for p in providers:
            assert p.search("zzznothing", limit=5) == []

    def test_query_normalized(self):
        provider = FixtureProvider("t", "social_media", [
            _asset("a", "social_media", ["Coffee"]),
        ])
        assert provider.search("coffee!", limit=5)[0].asset_id == "a"

    def test_other_style_assets_filtered_out(self):
        provider = FixtureProvider("t", "professional", [
            _asset("a", "social_media", ["cats"]),
            _asset("b", "professional", ["cats"]),
        ])
        assert [a.asset_id for a in provider.search("cats", limit=5)] == ["b"]

    def test_bad_style(self):
        with pytest.raises(ConfigError):
            FixtureProvider("t", "webcam", [])

    def test_catalog_loads_all_assets(self):
        assets = load_catalog(catalog_path())
        assert len(assets) == 20
        assert {a.style for a in assets} == {"social_media", "professional"}


class TestSearchResult:
    def test_ranks_contiguous_from_one(self):
        result = SearchResult(social_media=(
            _asset("x", "social_media", []), _asset("y", "social_media", []),
        ))
        ranked = result.ranked("social_media")
        assert [r for r, _ in ranked] == [1, 2]
        assert result.ranked("professional") == []

    def test_unknown_style(self):
        with pytest.raises(ValueError):
            SearchResult().for_style("webcam")


class TestRegistry:
    def _registry(self):
        reg = ProviderRegistry()
        for p in fixture_providers_from_catalog(catalog_path()):
            reg.register(p)
        return reg

    def test_duplicate_name_rejected(self):
        reg = self._registry()
        with pytest.raises(ConfigError):
            reg.register(FixtureProvider("fixture-social_media", "social_media", []))

    def test_both_styles_fan_out(self):
        result = self._registry().search(SearchRequest(query="happiness", limit=5))
        assert [a.asset_id for a in result.social_media] == [
            "gif-001", "gif-002", "gif-003", "gif-004", "gif-005",
        ]
        assert [a.asset_id for a in result.professional] == ["stock-101"]

    def test_single_style(self):
        result = self._registry().search(
            SearchRequest(query="happiness", style="professional", limit=5)
        )
        assert result.social_media == ()
        assert [a.asset_id for a in result.professional] == ["stock-101"]

    def test_limit_applies_per_style(self):
        result = self._registry().search(SearchRequest(query="happiness", limit=3))
        assert len(result.social_media) == 3
        assert len(result.professional) == 1


def _remote(monkeypatch, handler, **cfg_kwargs):
    monkeypatch.setenv("TEST_BROLL_KEY", "sekrit")
    config = RemoteConfig(
        name="remote-sm", style="social_media",
        endpoint="https://api.example.test/search",
        api_key_env="TEST_BROLL_KEY", **cfg_kwargs,
    )
    return RemoteProvider(config, transport=httpx.MockTransport(handler))


class TestRemoteProvider:
    def test_success_parses_assets(self, monkeypatch):
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("authorization")
            seen["params"] = dict(request.url.params)
            return httpx.Response(200, json={"results": [
                {"id": 7, "url": "https://cdn.test/7.mp4", "duration_s": 3.25,
                 "thumbnail_url": "https://cdn.test/7.jpg", "tags": ["cats"]},
            ]})

        provider = _remote(monkeypatch, handler)
        hits = provider.search("cats", limit=4)
        assert seen["auth"] == "Bearer sekrit"
        assert seen["params"] == {"q": "cats", "limit": "4"}
        assert len(hits) == 1
        a = hits[0]
        assert a.asset_id == "7"
        assert a.provider == "remote-sm"
        assert a.style == "social_media"
        assert a.natural_duration_s == 3.25
        assert a.tags == ("cats",)

    def test_limit_truncates_payload(self, monkeypatch):
        def handler(request):
            rows = [{"id": i, "duration_s": 1.0} for i in range(10)]
            return httpx.Response(200, json={"results": rows})

        provider = _remote(monkeypatch, handler)
        assert len(provider.search("x", limit=3)) == 3

    def test_auth_failure(self, monkeypatch):
        provider = _remote(monkeypatch, lambda req: httpx.Response(401))
        with pytest.raises(ProviderAuthError):
            provider.search("x", limit=1)

    def test_server_error(self, monkeypatch):
        provider = _remote(monkeypatch, lambda req: httpx.Response(503))
        with pytest.raises(ProviderError):
            provider.search("x", limit=1)

    def test_unreachable(self, monkeypatch):
        def handler(request):
            raise httpx.ConnectError("no route to host")

        provider = _remote(monkeypatch, handler)
        with pytest.raises(ProviderUnreachableError):
            provider.search("x", limit=1)

    def test_malformed_payload(self, monkeypatch):
        provider = _remote(monkeypatch,
                           lambda req: httpx.Response(200, json={"items": []}))
        with pytest.raises(ProviderError):
            provider.search("x", limit=1)

    def test_caches_identical_queries(self, monkeypatch):
        calls = []

        def handler(request):
            calls.append(str(request.url))
            return httpx.Response(200, json={"results": [{"id": 1, "duration_s": 1.0}]})

        provider = _remote(monkeypatch, handler)
        first = provider.search("cats", limit=2)
        second = provider.search("cats", limit=2)
        assert len(calls) == 1
        assert first == second
        provider.search("cats", limit=3)  # different key -> new request
        assert len(calls) == 2

    def test_missing_credentials(self, monkeypatch):
        monkeypatch.delenv("TEST_BROLL_KEY", raising=False)
        config = RemoteConfig(name="r", style="social_media",
                              endpoint="https://api.example.test/search",
                              api_key_env="TEST_BROLL_KEY")
        with pytest.raises(ConfigError, match="TEST_BROLL_KEY"):
            RemoteProvider(config)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            RemoteConfig(name="r", style="social_media",
                         endpoint="ftp://files.test", api_key_env="K")
        with pytest.raises(ConfigError):
            RemoteConfig(name="r", style="vhs",
                         endpoint="https://api.test", api_key_env="K")
