"""Exception hierarchy shared by all hubopt subpackages."""


class HuboptError(Exception):
    pass


# dataset loading / resolution
class UnknownEntity(HuboptError):
    pass


class DuplicateParameter(HuboptError):
    pass


class MalformedSeries(HuboptError):
    pass


class Unresolved(HuboptError):
    pass


class UndeclaredLayer(HuboptError):
    pass


# compilation
class MissingCapacity(HuboptError):
    pass


class UnpinnedState(HuboptError):
    pass


class UnknownMember(HuboptError):
    pass


class CompileError(HuboptError):
    """Raised once per compile with every emitter error collected."""

    def __init__(self, errors: list[Exception]):
        self.errors = list(errors)
        lines = "\n".join(f"  {type(e).__name__}: {e}" for e in self.errors)
        super().__init__(f"{len(self.errors)} compile error(s):\n{lines}")


# solving / interchange
class NumericalBreakdown(HuboptError):
    pass


class IoFailure(HuboptError):
    pass


class UnknownVariable(HuboptError):
    pass


class MalformedLine(HuboptError):
    pass


class SubprocessFailure(HuboptError):
    pass


class AuditFailure(HuboptError):
    pass


class MissingSolutionValue(HuboptError):
    pass
