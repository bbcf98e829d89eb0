"""Exception hierarchy shared by every module.

Each exception carries the process exit code the CLI maps it to:
2 for configuration problems, 3 for domain errors (bounds, unknown names,
precondition violations), 4 for ambiguous or incomplete parses.
"""


class SimError(Exception):
    exit_code = 3


class ConfigError(SimError):
    exit_code = 2


class UnknownNeuron(SimError, KeyError):
    pass


class UnknownConcept(SimError, KeyError):
    pass


class NoFreeNeuron(SimError):
    pass


class RoleBusy(SimError):
    pass


class RoleUnbound(SimError):
    pass


class InvalidParams(SimError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("parameter inequalities violated: " + ", ".join(self.violations))


class AlreadyStarted(SimError):
    pass


class GoalOutOfRange(SimError, ValueError):
    pass


class UnknownLetter(SimError, KeyError):
    pass


class AtEnd(SimError):
    pass


class DuplicateSymbol(SimError, ValueError):
    pass


class NotFound(SimError, KeyError):
    pass


class DuplicateTemplate(SimError, ValueError):
    pass


class NoTemplate(SimError):
    pass


class NoCandidates(SimError):
    pass


class Ambiguous(SimError):
    exit_code = 4


class Incomplete(SimError):
    exit_code = 4
