"""Run configuration for the slot-level simulator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError


class Scheme(str, Enum):
    """Reward design of the bandit access scheme."""

    LOCAL = "mtoa-l"    # each node rewarded for its own success only
    GLOBAL = "mtoa-g"   # every node rewarded for any network success

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown scheme {value!r}; expected 'mtoa-l' or 'mtoa-g'"
            ) from None


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one simulated replication.

    n: number of nodes (saturated queues, one shared collision channel).
    horizon: number of slots to run.
    scheme: reward design, see :class:`Scheme`.
    null_actions: number of "stay silent" arms next to the single transmit arm.
    learning_rate: step size of the action-value update, in (0, 1].
    reset_threshold: mtoa-l only; a chosen entry at or below this value is
        reset to zero right after its update.
    reset_window: mtoa-g only; number of consecutive slots an entry may stay
        positive before it is forced back to zero. ``None`` means unbounded.
    seed: root seed; node ``i`` draws from a substream derived from (seed, i).
    """

    n: int
    horizon: int
    scheme: Scheme
    null_actions: int
    learning_rate: float = 0.9
    reset_threshold: float | None = None
    reset_window: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.n < 1:
            raise ConfigurationError("n must be >= 1")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.null_actions < 1:
            raise ConfigurationError("null_actions must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ConfigurationError("learning_rate must lie in (0,1]")
        if self.scheme is Scheme.LOCAL:
            if self.reset_threshold is None:
                raise ConfigurationError("mtoa-l requires reset_threshold (q_th >= 0)")
            if self.reset_threshold < 0:
                raise ConfigurationError("reset_threshold must be >= 0")
            if self.reset_window is not None:
                raise ConfigurationError("reset_window applies to mtoa-g only")
        else:
            if self.reset_threshold is not None:
                raise ConfigurationError("reset_threshold applies to mtoa-l only")
            if self.reset_window is not None and self.reset_window < 1:
                raise ConfigurationError("reset_window must be >= 1 (or None for unbounded)")
