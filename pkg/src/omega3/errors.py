"""Exception types shared across the engine."""


class Omega3Error(Exception):
    pass


class UsageError(Omega3Error, ValueError):
    """Bad arguments: out-of-range indices, mismatched contexts or dimensions."""


class PreconditionError(Omega3Error, ValueError):
    """An operation was called on inputs outside its documented domain."""


class ClosureError(Omega3Error, AssertionError):
    """A lattice that must be closed under the group action is not.

    This always signals an internal realization bug, never bad input.
    """
