"""Exception hierarchy shared by all sheetstruct modules."""


class SheetStructError(Exception):
    """Base class; `code` is the stable machine-readable identifier."""

    code = "SheetStructError"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json(self):
        out = {"code": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


class MalformedAddress(SheetStructError):
    code = "MalformedAddress"


class OutOfBounds(SheetStructError):
    code = "OutOfBounds"


class UnknownSheet(SheetStructError):
    code = "UnknownSheet"


class SchemaError(SheetStructError):
    code = "SchemaError"

    def __init__(self, message, pointer=""):
        super().__init__(message, pointer=pointer)
        self.pointer = pointer


class CsvSyntaxError(SheetStructError):
    code = "CsvSyntaxError"

    def __init__(self, message, line=None):
        super().__init__(message, line=line)
        self.line = line


class FormulaParseError(SheetStructError):
    code = "FormulaParseError"

    def __init__(self, message, position=None, expected=None):
        super().__init__(message, position=position, expected=expected)
        self.position = position
        self.expected = expected


class CrossSheetRef(SheetStructError):
    code = "CrossSheetRef"


class UnknownGroup(SheetStructError):
    code = "UnknownGroup"


class UnknownViolation(SheetStructError):
    code = "UnknownViolation"


class StaleCandidate(SheetStructError):
    code = "StaleCandidate"


class MissingInput(SheetStructError):
    code = "MissingInput"


class InvalidSplitPoint(SheetStructError):
    code = "InvalidSplitPoint"


class NoSpace(SheetStructError):
    code = "NoSpace"

    def __init__(self, message, overlap=None):
        super().__init__(message, overlap=overlap)
        self.overlap = overlap


class Overlap(SheetStructError):
    code = "Overlap"


class WouldEmptyGroup(SheetStructError):
    code = "WouldEmptyGroup"


class StalePlan(SheetStructError):
    code = "StalePlan"
