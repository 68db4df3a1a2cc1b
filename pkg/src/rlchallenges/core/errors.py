class RLChallengeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(RLChallengeError, ValueError):
    pass


class InvalidActionError(RLChallengeError, ValueError):
    pass


class ProtocolError(RLChallengeError, RuntimeError):
    """Environment used out of order (step before reset, step after episode end)."""


class UnsupportedError(RLChallengeError, TypeError):
    pass


class InvalidStateError(RLChallengeError, ValueError):
    pass


class ModelError(RLChallengeError, ValueError):
    pass


class ContractViolation(RLChallengeError, RuntimeError):
    """An algorithm's precondition on its environment did not hold."""


class ConfigError(RLChallengeError, ValueError):
    pass
