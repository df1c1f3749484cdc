"""Exception taxonomy shared across the engine.

Everything raised on purpose derives from EngineError so callers (CLI,
server, lab scripts) can distinguish engine-detected failures from plain
bugs.
"""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    pass


class ConstantsError(EngineError):
    """No admissible strategy constants exist for the requested parameters."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class CountingViolation(EngineError):
    """A danger count exceeded its certified bound; carries the full state."""

    def __init__(self, message: str, state: dict[str, Any] | None = None):
        self.state = state or {}
        super().__init__(message)


class AvoidInfeasible(EngineError):
    """No placement avoids the required share of danger sets."""


class StrategyIllegalMove(EngineError):
    """A strategy proposed a move the rules reject."""

    def __init__(self, message: str, move: Any = None):
        self.move = move
        super().__init__(message)


class StrategyTimeout(EngineError):
    """A remote or scripted strategy failed to answer in time."""


class ScriptedExhausted(EngineError):
    """A scripted strategy ran out of prepared moves."""


class BranchSeparationError(EngineError):
    """A ball is too large for inverse branches to stay disjoint."""


class DepthCapExceeded(EngineError):
    """Preimage depth beyond what exact enumeration supports."""


class BlockClaimViolation(EngineError):
    """A certified block-level claim failed during play."""
