class VStabError(Exception):
    """Base class for all library errors."""


class GraphError(VStabError, ValueError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class CapExceeded(VStabError):
    """An exponential enumeration would exceed the configured size cap."""


class StructureError(VStabError, ValueError):
    """Input keys do not match the structure required by the graph."""


class InvalidStability(VStabError, ValueError):
    pass


class IntegrityError(VStabError, AssertionError):
    """An internal consistency check guaranteed by theory has failed."""


class ParseError(VStabError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
