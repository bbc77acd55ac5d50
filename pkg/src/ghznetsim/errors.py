"""Exception types shared across the package."""


class GhzNetError(Exception):
    """Base class for package errors."""


class ValidationError(GhzNetError, ValueError):
    """Malformed input: topology documents, scenario files, bad parameters."""


class ProtocolLogicError(GhzNetError, RuntimeError):
    """A protocol tried an impossible state transition (routing bug).

    Raised e.g. when a path or tree is consumed while one of its links is
    not present. Trials must abort on this; it is never a normal outcome.
    """


class InfeasibleScenarioError(GhzNetError, RuntimeError):
    """The scenario cannot run at all (e.g. no valid centre node exists).

    Distinct from a trial timing out: an infeasible scenario produces no
    trials and is reported separately by the harness and CLI.
    """
