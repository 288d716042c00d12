"""Exception hierarchy shared across the package."""


class ConfigurationError(ValueError):
    """Invalid or inconsistent configuration value."""


class EmptyLayoutError(ConfigurationError):
    """A placement was requested with zero nodes."""


class DegenerateChannelError(ValueError):
    """A beamformer needs a channel with nonzero norm but got a zero one."""


class ModelBuildError(ValueError):
    """Channels, association and bounds do not describe one instance."""


class ExperimentError(RuntimeError):
    """A Monte-Carlo run could not produce a usable dataset."""
