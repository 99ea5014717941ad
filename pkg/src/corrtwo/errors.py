"""Exception hierarchy shared by all corrtwo modules."""


class CorrtwoError(Exception):
    """Base class for all errors raised by this package."""


class DataError(CorrtwoError):
    """Invalid input data: parse failures, axis violations, shape mismatches."""


class ParseError(DataError):
    """Malformed delimited text.  Carries the offending location.

    `row` and `column` are 1-based table coordinates when known;
    `byte_offset` is the offset of the offending line in the encoded input.
    """

    def __init__(self, message, row=None, column=None, byte_offset=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if byte_offset is not None:
            loc.append(f"byte offset {byte_offset}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column
        self.byte_offset = byte_offset


class NumericError(CorrtwoError):
    """Numeric failure: non-finite values, zero-variance scaling, memory limits."""
