"""Exception types shared across the package."""


class StructuralError(ValueError):
    """A scenario, allocation, or configuration violates a structural contract.

    Structural problems (wrong link set, malformed decoding plan, unsupported
    protocol/baseline combination) are hard errors, unlike the advisory rule
    violations reported by ``scenarios.validate``.
    """


class ConfigError(StructuralError):
    """An experiment configuration file is invalid; message carries field/line info."""


class InfeasibleAllocation(Exception):
    """No point of the optimization grid satisfies the configured constraints.

    Raised by the optimizers when per-symbol rate floors cannot be met.  The
    Monte Carlo layer converts this into an outage trial rather than a failure.
    """
