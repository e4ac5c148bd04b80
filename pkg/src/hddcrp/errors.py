"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input data (files, invariants, missing gold)."""


class UniverseMismatchError(ValueError):
    """Gold and predicted clusterings do not cover the same set of mentions."""
