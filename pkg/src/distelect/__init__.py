"""Vote-share distributions from model token probabilities, state win
probabilities, and exact Electoral College outcome distributions."""

from .analysis import (
    DEFAULT_SWING_MARGIN,
    ErrorReport,
    GroundTruth,
    MatchupCell,
    MatchupGrid,
    SwingBiasReport,
    average_case_map,
    error_table,
    load_ground_truth,
    run_matchups,
    swing_bias_report,
)
from .college import (
    ELECTORAL_VOTES_2024,
    MAJORITY_THRESHOLD,
    ECDistribution,
    EVAllocation,
    brute_force_ec,
    default_allocation,
    ec_distribution,
    exact_tie_probability,
    expected_votes,
    load_allocation,
    win_chance,
)
from .errors import (
    AllTies,
    AuthError,
    DistelectError,
    EmptyDistribution,
    EmptyField,
    ExactMeanTie,
    MalformedResponse,
    MissingCell,
    NegativeMass,
    NetworkError,
    NoConformingTokens,
    OddTotal,
    ProbabilityOutOfRange,
    SchemaError,
    ShareOutOfRange,
    StateMismatch,
    ThresholdOutOfRange,
    TooManyStates,
)
from .ingest import (
    API_KEY_ENV,
    SYSTEM_PROMPT,
    USER_TEMPLATE,
    CellRequest,
    EndpointConfig,
    PromptPair,
    RawTokenDistribution,
    build_prompt,
    fetch_cell,
    fetch_many,
    fetch_race,
    fetch_token_distribution,
    prompt_fingerprint,
    tokens_to_shares,
)
from .pairwise import StateRace, WinProbabilities, tie_probability, win_probability
from .shares import (
    CellMeta,
    ShareDistribution,
    cdf_below,
    make_distribution,
    weighted_mean,
)
from .store import CellStore, load_cells, save_cells

__version__ = "0.1.0"

__all__ = [
    "API_KEY_ENV",
    "AllTies",
    "AuthError",
    "CellMeta",
    "CellRequest",
    "CellStore",
    "DEFAULT_SWING_MARGIN",
    "DistelectError",
    "ECDistribution",
    "ELECTORAL_VOTES_2024",
    "EVAllocation",
    "EmptyDistribution",
    "EmptyField",
    "EndpointConfig",
    "ErrorReport",
    "ExactMeanTie",
    "GroundTruth",
    "MAJORITY_THRESHOLD",
    "MalformedResponse",
    "MatchupCell",
    "MatchupGrid",
    "MissingCell",
    "NegativeMass",
    "NetworkError",
    "NoConformingTokens",
    "OddTotal",
    "ProbabilityOutOfRange",
    "PromptPair",
    "RawTokenDistribution",
    "SYSTEM_PROMPT",
    "SchemaError",
    "ShareDistribution",
    "ShareOutOfRange",
    "StateMismatch",
    "StateRace",
    "SwingBiasReport",
    "ThresholdOutOfRange",
    "TooManyStates",
    "USER_TEMPLATE",
    "WinProbabilities",
    "average_case_map",
    "brute_force_ec",
    "build_prompt",
    "cdf_below",
    "default_allocation",
    "ec_distribution",
    "error_table",
    "exact_tie_probability",
    "expected_votes",
    "fetch_cell",
    "fetch_many",
    "fetch_race",
    "fetch_token_distribution",
    "load_allocation",
    "load_cells",
    "load_ground_truth",
    "make_distribution",
    "prompt_fingerprint",
    "run_matchups",
    "save_cells",
    "swing_bias_report",
    "tie_probability",
    "tokens_to_shares",
    "weighted_mean",
    "win_chance",
    "win_probability",
]
