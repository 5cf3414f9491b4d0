"""
Exception definitions.
"""


class CrvecError(Exception):
    """
    Base class for all exceptions raised by crvec.
    """
    pass


class DomainError(CrvecError, ValueError):
    """
    Exception raised when a function is evaluated outside of its domain.
    """
    pass


class UndecidableError(CrvecError):
    """
    Exception raised when the Ziv iteration reached its precision cap
    without deciding the rounding.

    @ivar f_id: id of the function that was evaluated
    @type f_id: L{str}
    @ivar x: input that could not be rounded
    @type x: L{crvec.fp.bits.Binary64} or L{crvec.fp.bits.Binary32}
    @ivar precision: last precision (in bits) that was tried
    @type precision: L{int}
    """
    def __init__(self, f_id, x, precision):
        """
        The default constructor.

        @param f_id: id of the function that was evaluated
        @type f_id: L{str}
        @param x: input that could not be rounded
        @type x: L{crvec.fp.bits.Binary64} or L{crvec.fp.bits.Binary32}
        @param precision: last precision (in bits) that was tried
        @type precision: L{int}
        """
        CrvecError.__init__(
            self,
            "{}({}) undecidable at {} bits".format(f_id, x.hex(), precision),
        )
        self.f_id = f_id
        self.x = x
        self.precision = precision


class BudgetError(CrvecError):
    """
    Exception raised when a fit or certification exceeds its error budget.

    @ivar name: name of the fitted or certified quantity
    @type name: L{str}
    @ivar achieved: the error bound that was achieved
    @type achieved: L{float}
    @ivar budget: the error budget
    @type budget: L{float}
    """
    def __init__(self, name, achieved, budget):
        """
        The default constructor.

        @param name: name of the fitted or certified quantity
        @type name: L{str}
        @param achieved: the error bound that was achieved
        @type achieved: L{float}
        @param budget: the error budget
        @type budget: L{float}
        """
        CrvecError.__init__(
            self,
            "{}: achieved error bound {} exceeds budget {}".format(
                name,
                float(achieved).hex(),
                float(budget).hex(),
            ),
        )
        self.name = name
        self.achieved = achieved
        self.budget = budget


class TableMismatchError(CrvecError):
    """
    Exception raised when the checked-in table artifact does not match
    the regenerated tables.

    @ivar differences: the first differing entries, as tuples of (key, expected, found)
    @type differences: L{list} of L{tuple} of (L{str}, L{str}, L{str})
    """
    def __init__(self, differences):
        """
        The default constructor.

        @param differences: the first differing entries, as tuples of (key, expected, found)
        @type differences: L{list} of L{tuple} of (L{str}, L{str}, L{str})
        """
        lines = ["{}: expected {}, found {}".format(*d) for d in differences]
        CrvecError.__init__(
            self,
            "Table artifact mismatch:\n    " + "\n    ".join(lines),
        )
        self.differences = differences


class CorpusParseError(CrvecError):
    """
    Exception raised when a line of a hard-case corpus could not be parsed.

    @ivar lineno: number of the line that failed to parse
    @type lineno: L{int}
    """
    def __init__(self, lineno, msg):
        """
        The default constructor.

        @param lineno: number of the line that failed to parse
        @type lineno: L{int}
        @param msg: description of the problem
        @type msg: L{str}
        """
        CrvecError.__init__(self, "line {}: {}".format(lineno, msg))
        self.lineno = lineno


class TimerResolutionError(CrvecError):
    """
    Exception raised when a benchmark measurement is too short for the timer.
    """
    pass


class MissingArtifactWarning(UserWarning):
    """
    Warning issued when the table artifact is missing and the tables are
    regenerated in memory, uncertified.
    """
    pass
