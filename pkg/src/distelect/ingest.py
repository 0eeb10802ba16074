"""Prompt construction, endpoint fetching, and token-to-share conversion.

The endpoint is any OpenAI-style chat-completions server that can return the
top-k logprobs for the first generated token. The first token position is the
object of interest: its probability mass over integer spellings *is* the
forecast distribution, regardless of which token was actually sampled.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import NamedTuple, Sequence

import httpx

from .errors import (
    AuthError,
    DistelectError,
    EmptyField,
    MalformedResponse,
    NetworkError,
    NoConformingTokens,
)
from .pairwise import StateRace
from .shares import MAX_SHARE, CellMeta, ShareDistribution, make_distribution

API_KEY_ENV = "DISTELECT_API_KEY"

SYSTEM_PROMPT = (
    "You are an impartial election prediction machine. "
    "Respond with a single integer token between 0 and 100 representing the vote share."
)
USER_TEMPLATE = (
    "{candidate} is running against {opponent}, what percentage of the vote "
    "will {candidate} win in the {year} presidential election in {state}?"
)

# A conforming token is a plain run of ASCII digits once whitespace is
# stripped; signs, separators, and non-ASCII digits all fail.
_CONFORMING = re.compile(r"^[0-9]+$")

_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class PromptPair:
    """A fully substituted system/user prompt pair."""

    system_text: str
    user_text: str


def build_prompt(candidate: str, opponent: str, year: int, state: str) -> PromptPair:
    """Fill the fixed prompt templates for one (candidate, opponent, year, state) cell."""
    for name, value in (("candidate", candidate), ("opponent", opponent), ("state", state)):
        if not value:
            raise EmptyField(f"{name} must be non-empty")
    if not isinstance(year, int) or not 1000 <= year <= 9999:
        raise ValueError(f"year must be a 4-digit integer, got {year!r}")
    user_text = USER_TEMPLATE.format(
        candidate=candidate, opponent=opponent, year=year, state=state
    )
    return PromptPair(system_text=SYSTEM_PROMPT, user_text=user_text)


def prompt_fingerprint(prompt: PromptPair) -> str:
    """Stable short hash of the exact prompt pair."""
    digest = hashlib.sha256()
    digest.update(prompt.system_text.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.user_text.encode("utf-8"))
    return digest.hexdigest()[:16]


@dataclass(frozen=True)
class EndpointConfig:
    """Connection settings for a logprob-capable chat-completions endpoint.

    ``max_retries`` is the total number of attempts (minimum one). The API
    key falls back to the ``DISTELECT_API_KEY`` environment variable.
    """

    base_url: str
    model: str
    top_k: int = 20
    temperature: float = 1.0
    timeout: float = 30.0
    max_retries: int = 3
    backoff_seconds: float = 0.5
    parallel: int = 4
    api_key: str | None = None

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ValueError("base_url must be non-empty")
        if not self.model:
            raise ValueError("model must be non-empty")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.backoff_seconds < 0:
            raise ValueError(f"backoff_seconds must be >= 0, got {self.backoff_seconds}")
        if self.parallel < 1:
            raise ValueError(f"parallel must be >= 1, got {self.parallel}")

    def resolve_api_key(self) -> str:
        key = self.api_key or os.environ.get(API_KEY_ENV, "")
        if not key:
            raise AuthError(f"no API key: set {API_KEY_ENV} or pass api_key explicitly")
        return key


@dataclass(frozen=True)
class RawTokenDistribution:
    """Top-k first-token alternatives as (token_text, probability) pairs.

    Probabilities may sum to less than one: anything outside the returned
    top-k is simply absent.
    """

    entries: tuple[tuple[str, float], ...]
    model: str
    retrieved_at: datetime

    def __post_init__(self) -> None:
        entries = tuple((str(token), float(prob)) for token, prob in self.entries)
        for token, prob in entries:
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"token {token!r} has probability {prob!r} outside [0, 1]")
        if math.fsum(prob for _, prob in entries) > 1.0 + 1e-6:
            raise ValueError("token probabilities sum to more than 1")
        object.__setattr__(self, "entries", entries)


def _parse_completion(payload: object, fallback_model: str) -> RawTokenDistribution:
    try:
        choice = payload["choices"][0]  # type: ignore[index]
        block = choice["logprobs"]["content"][0]
        top = block["top_logprobs"]
    except (KeyError, IndexError, TypeError):
        raise MalformedResponse(
            "response carries no top-logprob block for the first token"
        ) from None
    if not isinstance(top, list) or not top:
        raise MalformedResponse("top_logprobs is empty")
    entries: list[tuple[str, float]] = []
    for item in top:
        try:
            token = item["token"]
            logprob = float(item["logprob"])
        except (KeyError, TypeError, ValueError):
            raise MalformedResponse(f"unreadable top_logprobs entry: {item!r}") from None
        try:
            prob = math.exp(logprob)
        except OverflowError:
            raise MalformedResponse(f"logprob {logprob!r} overflows") from None
        entries.append((str(token), prob))
    model = payload.get("model") if isinstance(payload, dict) else None
    try:
        return RawTokenDistribution(
            entries=tuple(entries),
            model=model or fallback_model,
            retrieved_at=datetime.now(timezone.utc),
        )
    except ValueError as exc:
        raise MalformedResponse(str(exc)) from exc


def fetch_token_distribution(
    cfg: EndpointConfig, prompt: PromptPair, *, client: httpx.Client | None = None
) -> RawTokenDistribution:
    """One chat-completion call returning the top-k logprobs of the first token.

    Transport failures and retryable HTTP statuses (429, 5xx) are retried with
    exponential backoff up to the configured attempt budget; credential
    rejections and schema problems are raised immediately.
    """
    api_key = cfg.resolve_api_key()
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    body = {
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": prompt.system_text},
            {"role": "user", "content": prompt.user_text},
        ],
        "max_tokens": 1,
        "temperature": cfg.temperature,
        "logprobs": True,
        "top_logprobs": cfg.top_k,
    }
    headers = {"Authorization": f"Bearer {api_key}"}
    owns_client = client is None
    if owns_client:
        client = httpx.Client(timeout=cfg.timeout)
    assert client is not None
    attempts = max(1, cfg.max_retries)
    try:
        last_failure: str | None = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(cfg.backoff_seconds * 2 ** (attempt - 1))
            try:
                response = client.post(url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_failure = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"endpoint rejected credentials (HTTP {response.status_code})")
            if response.status_code in _RETRYABLE_STATUS:
                last_failure = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise MalformedResponse(
                    f"unexpected HTTP {response.status_code}: {response.text[:200]}"
                )
            try:
                payload = response.json()
            except ValueError:
                raise MalformedResponse("response body is not JSON") from None
            return _parse_completion(payload, cfg.model)
        raise NetworkError(f"request failed after {attempts} attempt(s): {last_failure}")
    finally:
        if owns_client:
            client.close()


def tokens_to_shares(raw: RawTokenDistribution, meta: CellMeta) -> ShareDistribution:
    """Collapse raw token probabilities onto integer shares.

    A token conforms when, after stripping surrounding whitespace, it is a
    plain run of decimal digits whose value is at most 100; any other spelling
    (signs, separators, words, non-ASCII digits) is nonconforming. Distinct
    spellings of the same integer merge. ``conforming_mass`` is the absolute
    probability the listed tokens put on conforming spellings, so top-k
    truncation shows up as missing conformance instead of being hidden by the
    final renormalization.
    """
    per_share: dict[int, list[float]] = {}
    for token, prob in raw.entries:
        text = token.strip()
        if not _CONFORMING.match(text):
            continue
        value = int(text)
        if value > MAX_SHARE:
            continue
        per_share.setdefault(value, []).append(prob)
    if not per_share:
        raise NoConformingTokens(
            f"none of {len(raw.entries)} tokens parsed as an integer share in 0..100"
        )
    # fsum per share, then across shares: exactly rounded sums make the
    # result independent of entry order
    merged = {share: math.fsum(values) for share, values in sorted(per_share.items())}
    conforming = math.fsum(merged.values())
    if conforming == 0.0:
        raise NoConformingTokens("every conforming token carries zero probability")
    # top-k sums may poke a hair above 1; the stored value is a fraction
    conforming = min(conforming, 1.0)
    return make_distribution(merged, conforming_mass=conforming, meta=meta)


class CellRequest(NamedTuple):
    """One directional distribution to fetch."""

    state: str
    candidate: str
    opponent: str
    year: int


def fetch_cell(
    cfg: EndpointConfig, request: CellRequest, *, client: httpx.Client | None = None
) -> ShareDistribution:
    """Fetch and convert a single (state, candidate-direction) cell."""
    prompt = build_prompt(request.candidate, request.opponent, request.year, request.state)
    meta = CellMeta(
        state=request.state,
        candidate=request.candidate,
        opponent=request.opponent,
        year=request.year,
        model=cfg.model,
        prompt_fingerprint=prompt_fingerprint(prompt),
    )
    raw = fetch_token_distribution(cfg, prompt, client=client)
    return tokens_to_shares(raw, meta)


def fetch_race(
    cfg: EndpointConfig,
    state: str,
    c1: str,
    c2: str,
    year: int,
    *,
    client: httpx.Client | None = None,
) -> StateRace:
    """Fetch both directional cells for one state as independent calls."""
    cells: list[ShareDistribution] = []
    for candidate, opponent in ((c1, c2), (c2, c1)):
        try:
            cells.append(fetch_cell(cfg, CellRequest(state, candidate, opponent, year), client=client))
        except DistelectError as exc:
            raise type(exc)(f"candidate {candidate!r} in {state!r}: {exc}") from exc
    return StateRace(cells[0], cells[1])


def fetch_many(
    cfg: EndpointConfig, requests: Sequence[CellRequest]
) -> tuple[list[ShareDistribution], list[tuple[CellRequest, Exception]]]:
    """Fetch cells with bounded parallelism over one shared connection pool.

    Returns successful cells in request order plus (request, error) pairs for
    the failures, also in request order.
    """
    results: list[ShareDistribution | None] = [None] * len(requests)
    errors: dict[int, Exception] = {}
    with httpx.Client(timeout=cfg.timeout) as client:
        with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
            futures = {
                pool.submit(fetch_cell, cfg, request, client=client): position
                for position, request in enumerate(requests)
            }
            for future in as_completed(futures):
                position = futures[future]
                try:
                    results[position] = future.result()
                except Exception as exc:  # collected, not raised: callers report per cell
                    errors[position] = exc
    cells = [cell for cell in results if cell is not None]
    failures = [(requests[position], errors[position]) for position in sorted(errors)]
    return cells, failures
