"""Exception types shared across the toolkit."""


class InvalidArgumentError(ValueError):
    """An operation was called with arguments outside its contract."""


class ResourceLimitError(RuntimeError):
    """An enumeration or sweep would exceed a configured size limit."""

    def __init__(self, message, limit_name, limit_value):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit_value = limit_value


class GraphParseError(ValueError):
    """A graph or rate-vector file failed to parse."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
