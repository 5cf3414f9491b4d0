"""
Console feedback for long running commands.

Messages go to stdout, progress bars and warnings to stderr, so that a
JSON report written to stdout ("--report -") stays parseable.
"""
import sys
import time
from contextlib import contextmanager

from .util import format_timedelta, format_number


class Progress(object):
    """
    Progress of one phase of a command, as handed out by
    L{BaseReporter.with_progress}.

    Two counters are kept: C{done} counts work towards C{total} (inputs,
    chunks, variants) and drives the eta; C{flagged} is a plain running
    total of something worth watching while the phase runs, such as
    mismatches or callouts.

    @ivar description: what is being done
    @type description: L{str}
    @ivar total: amount of work of the phase
    @type total: L{int}
    @ivar unit: unit of C{done}, shown as a rate
    @type unit: L{str} or L{None}
    @ivar flagged_unit: unit of C{flagged}
    @type flagged_unit: L{str} or L{None}
    """
    def __init__(self, description, total, unit=None, flagged_unit=None):
        assert isinstance(description, str)
        assert (unit is None) or isinstance(unit, str)
        assert (flagged_unit is None) or isinstance(flagged_unit, str)
        self.description = description
        self.total = total
        self.unit = unit
        self.flagged_unit = flagged_unit
        self.done = 0
        self.flagged = 0
        self.started = time.time()

    @property
    def elapsed(self):
        """Seconds since the phase started."""
        return time.time() - self.started

    @property
    def fraction(self):
        """Completed fraction of the phase, between 0 and 1."""
        if self.total <= 0:
            return 0.0
        return min(max(self.done / self.total, 0.0), 1.0)

    def eta(self):
        """
        Estimate the remaining seconds from the rate so far.

        @return: the estimate, L{None} before any work was done
        @rtype: L{float} or L{None}
        """
        if self.done == 0:
            return None
        return (self.total - self.done) * self.elapsed / self.done

    def advance(self, n, secondary=0):
        """
        Record finished work.

        @param n: amount of work finished
        @type n: L{int}
        @param secondary: amount to add to the flagged total
        @type secondary: L{int}
        """
        self.done += n
        self.flagged += secondary

    def close(self, failed):
        """
        End the phase.

        @param failed: whether the phase ended with an exception
        @type failed: L{bool}
        """
        pass


class ConsoleProgress(Progress):
    """
    A L{Progress} drawing a single status line on stderr.
    """

    WIDTH = 24
    REDRAW_INTERVAL = 0.25

    def __init__(self, *args, **kwargs):
        Progress.__init__(self, *args, **kwargs)
        self._drawn = 0.0
        self.draw()

    def advance(self, n, secondary=0):
        Progress.advance(self, n, secondary=secondary)
        if time.time() - self._drawn >= self.REDRAW_INTERVAL:
            self.draw()

    def _bar(self, fraction, failed=False):
        filled = int(fraction * self.WIDTH)
        head = ("#" * filled)
        rest = ("!" if failed else ".") * (self.WIDTH - filled)
        return "|" + head + rest + "|"

    def _details(self):
        parts = []
        if self.unit is not None:
            parts.append("{} {}/s".format(format_number(self.done / max(self.elapsed, 1e-9)), self.unit))
        if self.flagged_unit is not None:
            parts.append("{} {}".format(self.flagged, self.flagged_unit))
        return ("({})".format(", ".join(parts)) if parts else "")

    def _write(self, bar, clock, end):
        line = "{} {} {} {}".format(self.description, bar, clock, self._details()).rstrip()
        print("\33[2K" + line, end=end, file=sys.stderr, flush=True)

    def draw(self):
        """
        Redraw the status line.
        """
        self._drawn = time.time()
        eta = self.eta()
        clock = ("eta " + format_timedelta(eta) if eta is not None else "eta ?")
        self._write(self._bar(self.fraction), clock, "\r")

    def close(self, failed):
        fraction = (self.fraction if failed else 1.0)
        self._write(self._bar(fraction, failed=failed), format_timedelta(self.elapsed), "\n")


class BaseReporter(object):
    """
    Base class of the reporters. It prints nothing but warnings.

    @cvar progress_class: class of the progress objects handed out
    @type progress_class: subclass of L{Progress}
    """

    progress_class = Progress

    def msg(self, s, end="\n"):
        """
        Show an informational message.

        @param s: the message
        @type s: L{str}
        @param end: appended to the message
        @type end: L{str}
        """
        pass

    def warn(self, s):
        """
        Show a warning. Warnings are never suppressed.

        @param s: the warning
        @type s: L{str}
        """
        print("WARNING: {}".format(s), file=sys.stderr, flush=True)

    @contextmanager
    def with_progress(self, description, max, unit=None, secondary_unit=None):
        """
        Track the progress of a phase for the duration of a with-block.

        @param description: what is being done
        @type description: L{str}
        @param max: amount of work of the phase
        @type max: L{int}
        @param unit: unit of the work (e.g. "inputs")
        @type unit: L{str} or L{None}
        @param secondary_unit: unit of the flagged counter (e.g. "mismatches")
        @type secondary_unit: L{str} or L{None}
        @return: a context manager yielding a L{Progress}
        @rtype: contextmanager
        """
        progress = self.progress_class(description, max, unit=unit, flagged_unit=secondary_unit)
        try:
            yield progress
        except BaseException:
            progress.close(True)
            raise
        progress.close(False)


class VoidReporter(BaseReporter):
    """
    The reporter of quiet runs.
    """
    pass


class StdoutReporter(BaseReporter):
    """
    The reporter of verbose runs: messages on stdout, progress on stderr.
    """

    progress_class = ConsoleProgress

    def msg(self, s, end="\n"):
        print(s, end=end, flush=True)


def get_reporter(verbose):
    """
    Return the reporter matching the verbosity level.

    @param verbose: verbosity level (count of -v flags)
    @type verbose: L{int} or L{None}
    @return: the reporter to use
    @rtype: L{BaseReporter}
    """
    if verbose:
        return StdoutReporter()
    return VoidReporter()
