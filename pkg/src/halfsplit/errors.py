"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class HalfsplitError(Exception):
    exit_code = 5


class ParameterError(HalfsplitError, ValueError):
    """Invalid hyperparameter or configuration value."""

    exit_code = 2


class ParseError(HalfsplitError, ValueError):
    exit_code = 3


class InputError(HalfsplitError, ValueError):
    """Data is well-formed but unusable (empty, too few rows, ...)."""

    exit_code = 4


class DimensionError(InputError):
    pass


class DegenerateInputError(InputError):
    pass


class UndefinedMetricError(InputError):
    pass


class CoverageError(InputError):
    """A class required at a tree node has no rows in one of the node's views."""

    def __init__(self, class_id, which):
        self.class_id = class_id
        self.which = which
        super().__init__(f"class {class_id} has no rows in the {which} view")
