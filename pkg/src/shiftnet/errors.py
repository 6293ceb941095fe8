"""Exception taxonomy shared by all shiftnet modules."""


class ShiftnetError(Exception):
    """Base class for all errors raised by this package."""


# --- symbolic ---------------------------------------------------------------

class NoRuleError(ShiftnetError):
    """The dotted word in the domain of dependence has no rule entry.

    For machine-derived shifts this signals an undefined transition,
    i.e. rejection or a stuck configuration.
    """

    def __init__(self, key):
        self.key = key
        super().__init__(f"no rule for DoD content {key!r}")


class InvalidShiftError(ShiftnetError):
    """A rule would shift symbols of unknown identity across the dot."""


class MissingFillError(ShiftnetError):
    """A side of a dotted sequence was exhausted and has no fill symbol."""


# --- godel ------------------------------------------------------------------

class UnknownSymbolError(ShiftnetError):
    pass


class MalformedWordError(ShiftnetError):
    pass


class NonRepresentableError(ShiftnetError):
    """Value not expressible in the requested base within the digit budget."""


class DigitMismatchError(ShiftnetError):
    """A popped word disagrees with the leading digits of the code."""


# --- automata ---------------------------------------------------------------

class UndefinedTransitionError(ShiftnetError):
    pass


class EmptyInputError(ShiftnetError):
    pass


class Halted(ShiftnetError):
    """The machine reached a halting/accepting configuration.

    Raised by the step functions as a control signal; run loops catch it.
    """


class NondeterministicMachineError(ShiftnetError):
    pass


class LeftRecursiveGrammarError(ShiftnetError):
    pass


class AmbiguousGrammarError(ShiftnetError):
    pass


class MalformedConfigurationError(ShiftnetError):
    pass


# --- nda --------------------------------------------------------------------

class OverlappingPrefixesError(ShiftnetError):
    pass


class NoCellError(ShiftnetError):
    pass


class UndefinedBranchError(ShiftnetError):
    """The switching rule selected a cell with no branch (rejection)."""

    def __init__(self, cell, label=None):
        self.cell = cell
        self.label = label
        msg = f"undefined branch at cell {cell}"
        if label is not None:
            msg += f" (DoD content {label!r})"
        super().__init__(msg)


# --- rann -------------------------------------------------------------------

class OutOfRangeError(ShiftnetError):
    pass


class NoActiveBranchError(ShiftnetError):
    """The network state fell into a cell whose LTL slots are placeholders."""

    def __init__(self, cell, label=None, component=None):
        self.cell = cell
        self.label = label
        self.component = component
        where = f" in component {component!r}" if component else ""
        super().__init__(f"no active branch at cell {cell}{where}")


class MaxStepsExceededError(ShiftnetError):
    pass


# --- interactive ------------------------------------------------------------

class WriteConflictError(ShiftnetError):
    pass


class UngatedOverlapError(ShiftnetError):
    pass


# --- spec format / cli ------------------------------------------------------

class SpecParseError(ShiftnetError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpecSemanticError(ShiftnetError):
    pass
