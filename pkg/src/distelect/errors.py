"""Exception types shared across the package."""


class DistelectError(Exception):
    """Base class for every domain error raised by this package."""


# -- share distributions ----------------------------------------------------

class EmptyDistribution(DistelectError):
    """No share carries positive probability."""


class ShareOutOfRange(DistelectError):
    """A share or threshold lies outside the integer range 0..100."""


class NegativeMass(DistelectError):
    """A probability value is negative."""


# -- pairwise wins -----------------------------------------------------------

class AllTies(DistelectError):
    """Every outcome pair ties, so tie-excluded win probabilities are undefined."""


# -- electoral college -------------------------------------------------------

class StateMismatch(DistelectError):
    """The win-probability map and the allocation cover different states."""


class ProbabilityOutOfRange(DistelectError):
    """A win probability lies outside [0, 1]."""


class TooManyStates(DistelectError):
    """Subset enumeration was asked for more states than the guard allows."""


class ThresholdOutOfRange(DistelectError):
    """An electoral-vote threshold lies outside 0..E+1."""


class OddTotal(DistelectError):
    """An exact electoral tie is impossible because the vote total is odd."""


# -- ingestion ---------------------------------------------------------------

class EmptyField(DistelectError):
    """A prompt field that must be non-empty is empty."""


class NetworkError(DistelectError):
    """Transport failure that persisted through every retry."""


class MalformedResponse(DistelectError):
    """The endpoint answered, but not with a usable logprob block."""


class AuthError(DistelectError):
    """Missing or rejected API credentials."""


class NoConformingTokens(DistelectError):
    """No returned token parsed as an integer share in 0..100."""


class SchemaError(DistelectError):
    """A file failed validation against its expected schema."""


# -- analysis ----------------------------------------------------------------

class MissingCell(DistelectError):
    """A required (state, candidate) distribution is absent."""


class ExactMeanTie(DistelectError):
    """Two candidates have exactly equal mean shares in at least one state."""
