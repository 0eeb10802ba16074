import math
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distelect import (
    AuthError,
    EmptyField,
    EndpointConfig,
    MalformedResponse,
    NetworkError,
    NoConformingTokens,
    RawTokenDistribution,
    SYSTEM_PROMPT,
    build_prompt,
    fetch_cell,
    fetch_race,
    fetch_token_distribution,
    prompt_fingerprint,
    tokens_to_shares,
    win_probability,
)
from distelect.ingest import CellRequest
from support import meta

NOW = datetime(2025, 1, 1, tzinfo=timezone.utc)


def raw(entries, model="stub-model"):
    return RawTokenDistribution(entries=tuple(entries), model=model, retrieved_at=NOW)


def cfg(base_url, **kwargs):
    kwargs.setdefault("model", "stub-model")
    kwargs.setdefault("backoff_seconds", 0.0)
    return EndpointConfig(base_url=base_url, **kwargs)


class TestBuildPrompt:
    def test_exact_substitution(self):
        prompt = build_prompt("Kamala Harris", "Donald Trump", 2024, "Iowa")
        assert prompt.user_text == (
            "Kamala Harris is running against Donald Trump, what percentage of "
            "the vote will Kamala Harris win in the 2024 presidential election in Iowa?"
        )
        assert prompt.system_text == SYSTEM_PROMPT

    def test_substitution_complete(self):
        prompt = build_prompt("A", "B", 2020, "Ohio")
        assert "2020" in prompt.user_text and "Ohio" in prompt.user_text
        assert "{" not in prompt.user_text and "{" not in prompt.system_text

    def test_empty_field(self):
        with pytest.raises(EmptyField):
            build_prompt("", "B", 2024, "Iowa")
        with pytest.raises(EmptyField):
            build_prompt("A", "B", 2024, "")

    def test_bad_year(self):
        with pytest.raises(ValueError):
            build_prompt("A", "B", 24, "Iowa")

    def test_fingerprint_stable_and_sensitive(self):
        one = prompt_fingerprint(build_prompt("A", "B", 2024, "Iowa"))
        two = prompt_fingerprint(build_prompt("A", "B", 2024, "Iowa"))
        other = prompt_fingerprint(build_prompt("A", "B", 2024, "Ohio"))
        assert one == two
        assert one != other


class TestRawTokenDistribution:
    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            raw([("52", 1.2)])

    def test_rejects_oversum(self):
        with pytest.raises(ValueError):
            raw([("52", 0.7), ("53", 0.7)])


class TestTokensToShares:
    def test_mixed_conformance(self):
        d = tokens_to_shares(raw([("52", 0.7), ("53", 0.2), ("banana", 0.05)]), meta())
        conforming = math.fsum([0.7, 0.2])
        assert d.conforming_mass == conforming
        assert d.conforming_mass == pytest.approx(0.9, abs=1e-12)
        assert d.masses[52] == 0.7 / conforming
        assert d.masses[53] == 0.2 / conforming

    def test_whitespace_variants_merge(self):
        d = tokens_to_shares(raw([(" 47", 0.4), ("47", 0.4)]), meta())
        assert d.conforming_mass == 0.8
        assert d.masses == {47: 1.0}

    def test_no_conforming_tokens(self):
        with pytest.raises(NoConformingTokens):
            tokens_to_shares(raw([("x", 0.3), ("y", 0.1)]), meta())

    def test_zero_probability_conforming_only(self):
        with pytest.raises(NoConformingTokens):
            tokens_to_shares(raw([("52", 0.0)]), meta())

    def test_support_stays_in_range(self):
        d = tokens_to_shares(raw([("101", 0.5), ("100", 0.2), ("0", 0.2)]), meta())
        assert set(d.masses) == {0, 100}
        assert d.conforming_mass == pytest.approx(0.4, abs=1e-15)

    @settings(max_examples=150)
    @given(st.permutations(list(range(6))))
    def test_entry_order_irrelevant(self, order):
        entries = [("52", 0.25), (" 52", 0.125), ("053", 0.0625),
                   ("banana", 0.03125), ("53", 0.25), ("-4", 0.125)]
        base = tokens_to_shares(raw(entries), meta())
        shuffled = tokens_to_shares(raw([entries[i] for i in order]), meta())
        assert base.masses == shuffled.masses
        assert base.conforming_mass == shuffled.conforming_mass

    def test_dropping_conforming_entry_never_raises_mass(self):
        entries = [("52", 0.25), ("53", 0.25), ("54", 0.25)]
        full = tokens_to_shares(raw(entries), meta())
        for skip in range(len(entries)):
            reduced = tokens_to_shares(raw(entries[:skip] + entries[skip + 1:]), meta())
            assert reduced.conforming_mass <= full.conforming_mass

    @settings(max_examples=200)
    @given(st.lists(
        st.tuples(
            st.text(alphabet="0123456789 \tbanana+-._", min_size=0, max_size=6),
            st.floats(min_value=0.0, max_value=0.1, allow_nan=False),
        ),
        min_size=1, max_size=10,
    ))
    def test_support_never_escapes_range(self, entries):
        try:
            d = tokens_to_shares(raw(entries), meta())
        except NoConformingTokens:
            return
        assert all(0 <= share <= 100 for share in d.masses)
        assert 0.0 <= d.conforming_mass <= 1.0


class TestEndpointConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            cfg("http://x", top_k=0)
        with pytest.raises(ValueError):
            cfg("http://x", temperature=-0.5)
        with pytest.raises(ValueError):
            cfg("", model="m")

    def test_api_key_from_env(self, monkeypatch):
        monkeypatch.delenv("DISTELECT_API_KEY", raising=False)
        with pytest.raises(AuthError, match="DISTELECT_API_KEY"):
            cfg("http://x").resolve_api_key()
        monkeypatch.setenv("DISTELECT_API_KEY", "k")
        assert cfg("http://x").resolve_api_key() == "k"

    def test_explicit_key_wins(self, monkeypatch):
        monkeypatch.delenv("DISTELECT_API_KEY", raising=False)
        assert cfg("http://x", api_key="inline").resolve_api_key() == "inline"


class TestFetchTokenDistribution:
    def test_exp_of_log_round_trip(self, api_key, replay_server):
        server = replay_server({"default": [[" 52", 0.7], ["53", 0.2]]})
        prompt = build_prompt("A", "B", 2024, "Iowa")
        result = fetch_token_distribution(cfg(server.base_url), prompt)
        assert [token for token, _ in result.entries] == [" 52", "53"]
        probs = dict(result.entries)
        assert probs[" 52"] == pytest.approx(0.7, abs=1e-12)
        assert probs["53"] == pytest.approx(0.2, abs=1e-12)

    def test_malformed_response(self, api_key, replay_server):
        server = replay_server({"default": {"omit_logprobs": True}})
        with pytest.raises(MalformedResponse):
            fetch_token_distribution(cfg(server.base_url), build_prompt("A", "B", 2024, "Iowa"))

    def test_network_error_after_retries(self, api_key, replay_server):
        server = replay_server({"default": [["52", 1.0]]})
        server.stop()  # nothing is listening anymore
        config = cfg(server.base_url, max_retries=3)
        with pytest.raises(NetworkError, match="3 attempt"):
            fetch_token_distribution(config, build_prompt("A", "B", 2024, "Iowa"))

    def test_retryable_status_counts_attempts(self, api_key, replay_server):
        server = replay_server({"default": {"status": 503}})
        with pytest.raises(NetworkError, match="HTTP 503"):
            fetch_token_distribution(cfg(server.base_url, max_retries=2),
                                     build_prompt("A", "B", 2024, "Iowa"))
        assert server.request_count == 2

    def test_auth_error_not_retried(self, api_key, replay_server):
        server = replay_server({"default": {"status": 401}})
        with pytest.raises(AuthError):
            fetch_token_distribution(cfg(server.base_url, max_retries=5),
                                     build_prompt("A", "B", 2024, "Iowa"))
        # rejected upstream exactly once, no retries
        assert server.request_count == 1

    def test_bearer_token_sent(self, replay_server, monkeypatch):
        monkeypatch.delenv("DISTELECT_API_KEY", raising=False)
        server = replay_server({"default": [["52", 1.0]]}, require_auth=True)
        result = fetch_token_distribution(cfg(server.base_url, api_key="k"),
                                          build_prompt("A", "B", 2024, "Iowa"))
        assert result.entries[0][0] == "52"


class TestFetchRace:
    def fixtures(self):
        prompt_ab = build_prompt("A", "B", 2024, "Iowa").user_text
        prompt_ba = build_prompt("B", "A", 2024, "Iowa").user_text
        return {
            "by_user_text": {
                prompt_ab: [["60", 1.0]],
                prompt_ba: [["40", 1.0]],
            }
        }

    def test_metas_cross_reference(self, api_key, replay_server):
        server = replay_server(self.fixtures())
        race = fetch_race(cfg(server.base_url), "Iowa", "A", "B", 2024)
        assert race.c1.meta.candidate == "A" and race.c1.meta.opponent == "B"
        assert race.c2.meta.candidate == "B" and race.c2.meta.opponent == "A"
        assert race.c1.meta.model == "stub-model"

    def test_point_mass_composition(self, api_key, replay_server):
        server = replay_server(self.fixtures())
        race = fetch_race(cfg(server.base_url), "Iowa", "A", "B", 2024)
        assert win_probability(race).p_c1_wins == 1.0

    def test_failure_names_candidate(self, api_key, replay_server):
        fixtures = self.fixtures()
        fixtures["by_user_text"][build_prompt("B", "A", 2024, "Iowa").user_text] = \
            [["banana", 1.0]]
        server = replay_server(fixtures)
        with pytest.raises(NoConformingTokens, match="'B'"):
            fetch_race(cfg(server.base_url), "Iowa", "A", "B", 2024)


class TestFetchCell:
    def test_meta_carries_fingerprint(self, api_key, replay_server):
        server = replay_server({"default": [["52", 1.0]]})
        cell = fetch_cell(cfg(server.base_url), CellRequest("Iowa", "A", "B", 2024))
        expected = prompt_fingerprint(build_prompt("A", "B", 2024, "Iowa"))
        assert cell.meta.prompt_fingerprint == expected
        assert cell.masses == {52: 1.0}
        assert cell.conforming_mass == 1.0
