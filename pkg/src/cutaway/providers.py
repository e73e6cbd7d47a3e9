"""B-roll search providers behind one contract.

Each provider serves a single style (social_media or professional); a
registry fans a search request out to the providers of the requested
style(s) and returns per-style ranked lists. The fixture provider is pure
and file-backed so the whole engine tests offline; the remote adapter is a
thin httpx client with a timeout and a small response cache.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import httpx

from .errors import (
    ConfigError,
    ProviderAuthError,
    ProviderError,
    ProviderUnreachableError,
)
from .session import STYLES, BRollAsset
from .transcript import normalize_token

STYLE_CHOICES = STYLES + ("both",)
DEFAULT_LIMIT = 10


@dataclass(frozen=True)
class SearchRequest:
    query: str
    style: str = "both"
    limit: int = DEFAULT_LIMIT

    def __post_init__(self):
        if not self.query.strip():
            raise ValueError("query must be non-empty")
        if self.style not in STYLE_CHOICES:
            raise ValueError(f"style must be one of {STYLE_CHOICES}")
        if self.limit < 1:
            raise ValueError("limit must be >= 1")

    @property
    def styles(self) -> tuple[str, ...]:
        return STYLES if self.style == "both" else (self.style,)


@dataclass(frozen=True)
class SearchResult:
    """Ranked assets per style; rank is 1 + list position."""

    social_media: tuple[BRollAsset, ...] = ()
    professional: tuple[BRollAsset, ...] = ()

    def for_style(self, style: str) -> tuple[BRollAsset, ...]:
        if style == "social_media":
            return self.social_media
        if style == "professional":
            return self.professional
        raise ValueError(f"unknown style {style!r}")

    def ranked(self, style: str) -> list[tuple[int, BRollAsset]]:
        return [(i + 1, a) for i, a in enumerate(self.for_style(style))]

    def to_dict(self) -> dict:
        return {
            "social_media": [a.to_dict() for a in self.social_media],
            "professional": [a.to_dict() for a in self.professional],
        }


class Provider(Protocol):
    name: str
    style: str

    def search(self, query: str, limit: int) -> list[BRollAsset]: ...


class FixtureProvider:
    """Deterministic catalog-backed provider.

    An asset matches when the normalized query is one of its tags; matches
    rank by the tag's position in the asset's tag list (earlier = more
    relevant), with asset_id breaking ties.
    """

    def __init__(self, name: str, style: str, assets: Sequence[BRollAsset]):
        if style not in STYLES:
            raise ConfigError(f"unknown provider style {style!r}")
        self.name = name
        self.style = style
        self.assets = tuple(a for a in assets if a.style == style)

    def search(self, query: str, limit: int) -> list[BRollAsset]:
        norm = normalize_token(query)
        scored = []
        for asset in self.assets:
            tags = [normalize_token(t) for t in asset.tags]
            if norm in tags:
                scored.append((tags.index(norm), asset.asset_id, asset))
        scored.sort(key=lambda t: (t[0], t[1]))
        return [asset for _, _, asset in scored[:limit]]


def load_catalog(path) -> list[BRollAsset]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    assets = doc["assets"] if isinstance(doc, dict) else doc
    return [BRollAsset.from_dict(a) for a in assets]


def fixture_providers_from_catalog(path, name_prefix: str = "fixture") -> list[FixtureProvider]:
    """One provider per style present in the catalog file."""
    assets = load_catalog(path)
    providers = []
    for style in STYLES:
        styled = [a for a in assets if a.style == style]
        if styled:
            providers.append(FixtureProvider(f"{name_prefix}-{style}", style, styled))
    return providers


@dataclass(frozen=True)
class RemoteConfig:
    name: str
    style: str
    endpoint: str
    api_key_env: str
    timeout_s: float = 5.0

    def __post_init__(self):
        if self.style not in STYLES:
            raise ConfigError(f"unknown provider style {self.style!r}")
        if not self.endpoint.startswith(("http://", "https://")):
            raise ConfigError(f"endpoint must be an http(s) URL: {self.endpoint!r}")


class RemoteProvider:
    """Adapter for a JSON search endpoint.

    Expects ``GET {endpoint}?q=...&limit=...`` returning
    ``{"results": [{"id", "url", "thumbnail_url", "duration_s", "tags"}]}``.
    Responses are cached per (query, limit); transport failures surface as
    provider_unreachable rather than empty results.
    """

    _CACHE_MAX = 256

    def __init__(self, config: RemoteConfig, transport: Optional[httpx.BaseTransport] = None):
        api_key = os.environ.get(config.api_key_env, "")
        if not api_key:
            raise ConfigError(
                f"provider {config.name!r} needs credentials in ${config.api_key_env}"
            )
        self.name = config.name
        self.style = config.style
        self._config = config
        self._client = httpx.Client(
            timeout=config.timeout_s,
            headers={"Authorization": f"Bearer {api_key}"},
            transport=transport,
        )
        self._cache: dict[tuple[str, int], list[BRollAsset]] = {}
        self._lock = threading.Lock()

    def search(self, query: str, limit: int) -> list[BRollAsset]:
        key = (query, limit)
        with self._lock:
            if key in self._cache:
                return list(self._cache[key])
        try:
            resp = self._client.get(self._config.endpoint,
                                    params={"q": query, "limit": limit})
        except httpx.TransportError as exc:
            raise ProviderUnreachableError(
                f"provider {self.name!r} unreachable: {exc}"
            ) from exc
        if resp.status_code in (401, 403):
            raise ProviderAuthError(f"provider {self.name!r} rejected credentials")
        if resp.status_code != 200:
            raise ProviderError(
                f"provider {self.name!r} returned HTTP {resp.status_code}"
            )
        try:
            rows = resp.json()["results"]
            assets = [
                BRollAsset(
                    asset_id=str(row["id"]),
                    provider=self.name,
                    style=self.style,
                    url=str(row.get("url", "")),
                    natural_duration_s=float(row.get("duration_s", 2.0)),
                    thumbnail_url=str(row.get("thumbnail_url", "")),
                    tags=tuple(str(t) for t in row.get("tags", ())),
                )
                for row in rows[:limit]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(
                f"provider {self.name!r} returned a malformed payload: {exc}"
            ) from exc
        with self._lock:
            if len(self._cache) >= self._CACHE_MAX:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = assets
        return list(assets)


@dataclass
class ProviderRegistry:
    providers: dict[str, Provider] = field(default_factory=dict)

    def register(self, provider: Provider):
        if provider.name in self.providers:
            raise ConfigError(f"provider {provider.name!r} already registered")
        self.providers[provider.name] = provider

    def search(self, req: SearchRequest) -> SearchResult:
        by_style: dict[str, list[BRollAsset]] = {s: [] for s in STYLES}
        for provider in self.providers.values():
            if provider.style in req.styles:
                remaining = req.limit - len(by_style[provider.style])
                if remaining > 0:
                    by_style[provider.style].extend(
                        provider.search(req.query, remaining)
                    )
        return SearchResult(
            social_media=tuple(by_style["social_media"]),
            professional=tuple(by_style["professional"]),
        )
