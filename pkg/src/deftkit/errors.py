class DeftError(Exception):
    """Base class for data errors (CLI exit code 1)."""


class ParseError(DeftError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SchemaError(DeftError):
    def __init__(self, tag, message=None):
        self.tag = tag
        super().__init__(message or f"unknown tag {tag!r}")


class LengthMismatchError(DeftError):
    pass


class ConfigError(Exception):
    """Invalid configuration (CLI exit code 2)."""
