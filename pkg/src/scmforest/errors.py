"""Exception hierarchy; the CLI maps each family to an exit code."""


class ScmForestError(Exception):
    exit_code = 1


class DataError(ScmForestError, ValueError):
    """Malformed or unusable input data."""

    exit_code = 2


class ModelError(ScmForestError, ValueError):
    """Training failure, bad model file, or model/data mismatch."""

    exit_code = 3
