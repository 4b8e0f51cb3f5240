"""Exception hierarchy; the CLI maps these onto exit codes."""


class DiagDiffError(Exception):
    """Base class for every error raised by the package."""


class RigError(DiagDiffError):
    """An operation the rig does not support."""


class RigMismatchError(RigError):
    """Operands live in different rigs."""


class ParameterIndexError(DiagDiffError, IndexError):
    """A parameter index is missing from θ or otherwise invalid."""


class TypeCheckError(DiagDiffError):
    """A diagram does not type-check, or two diagrams do not compose."""


class InterpretationError(DiagDiffError):
    """A box has no interpretation in the requested rig or mode."""


class MissingRuleError(DiagDiffError):
    """No gradient rule covers a box that appears in the diagram."""


class ShiftRuleError(DiagDiffError):
    """A parameter-shift rule whose shift does not match its eigenvalue."""


class ParseError(DiagDiffError):
    """Malformed JSON input."""


class ColourError(DiagDiffError):
    """An unregistered bubble colour, or a clash of colour names."""
