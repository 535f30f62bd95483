from enum import Enum

class PatternKind(Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"

    @property
    def is_infinite(self):
        return self in (PatternKind.S1, PatternKind.S2, PatternKind.S3)

    @property
    def has_left_block(self):
        return self in (PatternKind.S1, PatternKind.S3, PatternKind.S4, PatternKind.S6)

    @property
    def has_right_block(self):
        return self in (PatternKind.S2, PatternKind.S3, PatternKind.S5, PatternKind.S6)

    @property
    def left_is_infinite(self):
        return self in (PatternKind.S1, PatternKind.S3)

    @property
    def right_is_infinite(self):
        return self in (PatternKind.S2, PatternKind.S3)

class DensityKind(Enum):
    RATIONAL_AR = "rational_ar"
    INVERSE_POLY = "inverse_poly"
    TABULATED = "tabulated"

class ClassKind(Enum):
    D0_MINUS = "d0minus"
    DW = "dw"
    DVU = "dvu"

class Mechanism(Enum):
    """Which route produced a least-favourable result"""
    CLOSED_FORM = "closed_form"
    DEGENERATE = "degenerate"
    NEWTON = "newton"
    NUMERICAL = "numerical"

class Command(Enum):
    MINIMALITY = "minimality"
    INTERPOLATE = "interpolate"
    LEAST_FAVOURABLE = "least-favourable"
    VERIFY = "verify"
    SIMULATE = "simulate"

class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    BOTH = "both"

    @property
    def writes_json(self):
        return self != OutputFormat.CSV

    @property
    def writes_csv(self):
        return self != OutputFormat.JSON
