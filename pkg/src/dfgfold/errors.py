"""Exception types shared across the toolkit.

Everything a user can trigger with bad input derives from ``DfgFoldError`` so
the CLI can map it to exit status 1.
"""


class DfgFoldError(Exception):
    """Base class for domain errors."""


class FileSyntaxError(DfgFoldError, SyntaxError):
    """Malformed line in a ``.dfg`` or folding-spec file."""

    def __init__(self, msg: str, lineno: int | None = None, line: str | None = None):
        SyntaxError.__init__(self, msg)
        self.msg = msg
        self.lineno = lineno
        self.text = line

    def __str__(self) -> str:
        if self.lineno is None:
            return self.msg
        return f"line {self.lineno}: {self.msg}"
