"""Abstractive summarizer backends: local stubs and a remote HTTP client.

Remote protocol (see docs/protocol.md)::

    POST {endpoint}/v1/summarize   {"id", "text", "max_output_tokens"} -> {"id", "summary"}
    POST {endpoint}/v1/embed       {"provider", "tokens"} -> {"provider", "dimension", "vectors"}
    GET  {endpoint}/v1/health      -> {"status": "ok"}
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field

import httpx
import numpy as np

from hybridsum.lexrank import SelectionBudget, extract
from hybridsum.overlap_metrics import EmbeddingProvider, ProviderError
from hybridsum.textproc import segment_sentences

log = logging.getLogger(__name__)

TOKEN_ENV = "HYBRIDSUM_API_TOKEN"
KINDS = ("identity", "lead_k", "extractive_passthrough", "remote")


class BackendConfigError(ValueError):
    pass


class TransportError(RuntimeError):
    """Remote call failed after retries; ``sample_id`` names the affected sample."""

    def __init__(self, message: str, sample_id: str | None = None, retriable: bool = True):
        super().__init__(f"[{sample_id}] {message}" if sample_id else message)
        self.sample_id = sample_id
        self.retriable = retriable


@dataclass(frozen=True)
class SummarizeRequest:
    id: str
    text: str
    backend_id: str
    max_output_tokens: int = 512

    def __post_init__(self):
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if not self.text.strip():
            raise ValueError(f"sample {self.id}: empty text")


@dataclass(frozen=True)
class SummarizeResult:
    id: str
    summary: str
    latency_ms: int
    backend_id: str


_NONSPACE = re.compile(r"\S+")


def truncate_tokens(text: str, max_output_tokens: int) -> str:
    """Keep strictly fewer than ``max_output_tokens`` whitespace tokens, preserving layout."""
    keep = max_output_tokens - 1
    spans = [m.end() for m in _NONSPACE.finditer(text)]
    if len(spans) <= keep:
        return text
    return text[: spans[keep - 1]] if keep > 0 else ""


class RemoteClient:
    """Thin JSON client with timeout, retries and exponential backoff."""

    def __init__(
        self,
        endpoint: str,
        token: str | None = None,
        timeout: float = 120.0,
        retries: int = 3,
        backoff: float = 0.5,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        self.endpoint = endpoint.rstrip("/")
        token = token if token is not None else os.environ.get(TOKEN_ENV)
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self.http = httpx.Client(timeout=timeout, headers=headers, transport=transport)
        self.retries = retries
        self.backoff = backoff
        self.sleep = sleep

    def _call(self, method: str, path: str, sample_id: str | None = None, payload=None) -> dict:
        url = self.endpoint + path
        last = None
        for attempt in range(self.retries + 1):
            if attempt:
                self.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.http.request(method, url, json=payload)
                if resp.status_code >= 500 or resp.status_code == 429:
                    last = f"HTTP {resp.status_code}"
                    continue
                if resp.status_code >= 400:
                    raise TransportError(f"{method} {path}: HTTP {resp.status_code}", sample_id, retriable=False)
                return resp.json()
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last = f"{type(exc).__name__}: {exc}"
            except ValueError as exc:
                raise TransportError(f"{method} {path}: bad JSON ({exc})", sample_id, retriable=False) from exc
        raise TransportError(f"{method} {path} failed after {self.retries + 1} attempts: {last}", sample_id)

    def health(self) -> bool:
        try:
            return self._call("GET", "/v1/health").get("status") == "ok"
        except TransportError:
            return False

    def summarize(self, req: SummarizeRequest) -> str:
        body = self._call(
            "POST", "/v1/summarize", req.id,
            {"id": req.id, "text": req.text, "max_output_tokens": req.max_output_tokens},
        )
        if body.get("id") != req.id or not isinstance(body.get("summary"), str):
            raise TransportError("malformed /v1/summarize response", req.id, retriable=False)
        return body["summary"]

    def embed(self, provider: str, tokens: list[str]) -> np.ndarray:
        body = self._call("POST", "/v1/embed", None, {"provider": provider, "tokens": tokens})
        vectors = np.asarray(body.get("vectors", []), dtype=float)
        if vectors.shape != (len(tokens), body.get("dimension")):
            raise TransportError(f"malformed /v1/embed response for provider {provider}", retriable=False)
        return vectors


class RemoteEmbeddingProvider(EmbeddingProvider):
    def __init__(self, client: RemoteClient, provider_id: str, dimension: int):
        self.client = client
        self.provider_id = provider_id
        self.dimension = dimension

    def embed(self, tokens):
        try:
            vectors = self.client.embed(self.provider_id, list(tokens))
        except TransportError as exc:
            raise ProviderError(str(exc)) from exc
        if vectors.shape[1:] != (self.dimension,) and len(tokens):
            raise ProviderError(f"{self.provider_id}: expected dimension {self.dimension}")
        return vectors.reshape(len(tokens), self.dimension)


@dataclass
class _Backend:
    kind: str
    params: dict
    client: RemoteClient | None = None


def _lead(text: str, k: int) -> str:
    return " ".join(s.text for s in segment_sentences(text)[:k])


@dataclass
class BackendRegistry:
    """Named backends. Frozen once a pipeline run starts."""

    backends: dict[str, _Backend] = field(default_factory=dict)
    frozen: bool = False

    def register(self, backend_id: str, kind: str, **params) -> None:
        if self.frozen:
            raise BackendConfigError("registry is frozen")
        if backend_id in self.backends:
            raise BackendConfigError(f"backend {backend_id!r} already registered")
        if kind not in KINDS:
            raise BackendConfigError(f"unknown backend kind {kind!r}")
        client = None
        if kind == "lead_k" and int(params.get("k", 0)) < 1:
            raise BackendConfigError("lead_k needs k >= 1")
        if kind == "remote":
            if "endpoint" not in params:
                raise BackendConfigError("remote backend needs an endpoint")
            client = params.pop("client", None) or RemoteClient(
                params["endpoint"], transport=params.pop("transport", None), sleep=params.pop("sleep", time.sleep)
            )
            if params.get("health_check", True) and not client.health():
                raise BackendConfigError(f"remote backend {backend_id!r} failed health check at {params['endpoint']}")
        self.backends[backend_id] = _Backend(kind, params, client)

    def __contains__(self, backend_id: str) -> bool:
        return backend_id in self.backends

    def kind(self, backend_id: str) -> str:
        return self._get(backend_id).kind

    def _get(self, backend_id: str) -> _Backend:
        try:
            return self.backends[backend_id]
        except KeyError:
            raise BackendConfigError(f"unknown backend {backend_id!r}") from None

    def summarize(self, req: SummarizeRequest) -> SummarizeResult:
        b = self._get(req.backend_id)
        t0 = time.perf_counter()
        if b.kind == "identity":
            out = req.text
        elif b.kind == "lead_k":
            out = _lead(req.text, int(b.params["k"]))
        elif b.kind == "extractive_passthrough":
            budget = b.params.get("budget", SelectionBudget())
            out = "\n".join(s.text for s in extract(req.text, budget))
        else:
            out = b.client.summarize(req)
        latency = int((time.perf_counter() - t0) * 1000)
        # a backend may carry its own, tighter output cap (e.g. 128 vs 512)
        cap = min(req.max_output_tokens, int(b.params.get("max_output_tokens", req.max_output_tokens)))
        return SummarizeResult(req.id, truncate_tokens(out, cap), latency, req.backend_id)


def default_registry(budget: SelectionBudget | None = None) -> BackendRegistry:
    """Registry preloaded with the offline stubs: identity, lead-2, lead-3, lexrank."""
    reg = BackendRegistry()
    reg.register("identity", "identity")
    reg.register("lead-2", "lead_k", k=2)
    reg.register("lead-3", "lead_k", k=3)
    reg.register("lexrank", "extractive_passthrough", budget=budget or SelectionBudget())
    return reg


def summarize(req: SummarizeRequest, registry: BackendRegistry | None = None) -> SummarizeResult:
    return (registry or default_registry()).summarize(req)


def register_backend(registry: BackendRegistry, backend_id: str, kind: str, **params) -> None:
    registry.register(backend_id, kind, **params)
