"""Exception hierarchy shared by all modules."""


class LoewnerError(Exception):
    """Base class for errors raised by :mod:`lpv_loewner`."""


class InvalidArgumentError(LoewnerError, ValueError):
    """An argument violates a documented precondition."""


class SingularMatrixError(LoewnerError, ArithmeticError):
    """A linear system is singular or numerically rank deficient."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class SingularResolventError(SingularMatrixError):
    """``s I - A_0`` is numerically singular at the frequency ``s``."""

    def __init__(self, s, rcond=None):
        super().__init__(f"resolvent singular at s={s!r} (rcond={rcond!r})", rcond)
        self.s = s


class SingularPencilError(SingularMatrixError):
    """A descriptor pencil (or the E-block of a reduced pencil) is singular."""

    def __init__(self, message, rcond=None, s=None):
        super().__init__(message, rcond)
        self.s = s


class DividedDifferenceError(LoewnerError, ZeroDivisionError):
    """A left and a right interpolation point coincide."""

    def __init__(self, left_index, right_index, value):
        super().__init__(
            f"left point {left_index} and right point {right_index} coincide "
            f"(both {value!r}); points must be disjoint"
        )
        self.left_index = left_index
        self.right_index = right_index


class IncompleteDataError(LoewnerError, KeyError):
    """Samples required for an assembly are missing.

    ``missing`` holds every absent ``(word, args)`` pair.
    """

    def __init__(self, missing):
        self.missing = list(missing)
        lines = [f"  word={list(w)} args={[_fmt(a) for a in args]}" for w, args in self.missing]
        super().__init__(f"{len(self.missing)} required sample(s) missing:\n" + "\n".join(lines))

    def __str__(self):
        return self.args[0]


class DivergenceError(LoewnerError, FloatingPointError):
    """The simulated state became non-finite."""

    def __init__(self, step):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


class UndefinedReferenceError(LoewnerError, ValueError):
    """A relative error was requested against an identically zero reference."""


def _fmt(z):
    z = complex(z)
    return f"{z.real:g}{z.imag:+g}j"
