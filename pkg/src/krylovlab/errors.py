"""Exception hierarchy shared by every module.

The CLI maps :class:`InvalidArgument` to exit code 2 and :class:`DomainError`
to exit code 3.
"""


class KrylovLabError(Exception):
    """Base class for all library errors."""


class InvalidArgument(KrylovLabError, ValueError):
    """Malformed input: wrong shapes, bad spin values, out-of-range parameters."""


class DomainError(KrylovLabError, ValueError):
    """Input outside the numeric domain of a formula (e.g. ``m >= 1`` for K(m))."""


class EmptyWindowError(InvalidArgument):
    """No eigenvalue falls inside a requested microcanonical window."""

    def __init__(self, center: float, half_width: float, nearest: float):
        self.center = center
        self.half_width = half_width
        self.nearest = nearest
        super().__init__(
            f"no eigenvalue in [{center - half_width:.6g}, {center + half_width:.6g}]; "
            f"nearest eigenvalue is {nearest:.12g}"
        )
