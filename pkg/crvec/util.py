"""
Helpers shared by the command line tools: formatting of counts and
durations, parsing of numeric arguments, chunking of input ranges and
configuration of worker processes.
"""
import os

try:
    import multiprocessing
except ImportError:
    multiprocessing = None

try:
    import psutil
except ImportError:
    psutil = None
try:
    import setproctitle
except ImportError:
    setproctitle = None


_SI_PREFIXES = ("", "K", "M", "G", "T", "P")


def format_timedelta(seconds):
    """
    Format a duration as "h:mm:ss", with hundredths below one minute.

    @param seconds: the duration
    @type seconds: L{int} or L{float}
    @return: the formatted duration
    @rtype: L{str}
    """
    if seconds < 60:
        return "{:.2f}s".format(seconds)
    minutes, secs = divmod(int(round(seconds)), 60)
    hours, minutes = divmod(minutes, 60)
    return "{}:{:02d}:{:02d}".format(hours, minutes, secs)


def format_number(n):
    """
    Format a count or rate with an SI prefix, e.g. 4294967296 -> "4.29G".

    Integers below 10000 are printed as they are.

    @param n: the number
    @type n: L{int} or L{float}
    @return: the formatted number
    @rtype: L{str}
    """
    if isinstance(n, int) and abs(n) < 10000:
        return str(n)
    value = float(n)
    for prefix in _SI_PREFIXES[:-1]:
        if abs(value) < 1000.0:
            return "{:.2f}{}".format(value, prefix)
        value /= 1000.0
    return "{:.2f}{}".format(value, _SI_PREFIXES[-1])


def resource_path(*names):
    """
    Return the path of a file shipped in the "resources" directory of crvec.

    @param names: path segments below the resources directory
    @type names: L{str}
    @return: the path
    @rtype: L{str}
    """
    return os.path.join(os.path.dirname(__file__), "resources", *names)


def chunked_range(start, stop, step, n):
    """
    Split range(start, stop, step) into consecutive sub-ranges of at most n elements.

    @param start: first value of the range
    @type start: L{int}
    @param stop: end of the range (exclusive)
    @type stop: L{int}
    @param step: stride of the range
    @type step: L{int}
    @param n: max number of elements per sub-range
    @type n: L{int}
    @return: a generator yielding L{range} objects
    @rtype: generator yielding L{range}
    """
    assert step >= 1 and n >= 1
    span = step * n
    for chunk_start in range(start, stop, span):
        yield range(chunk_start, min(chunk_start + span, stop), step)


def parse_interval(s, conv=float):
    """
    Parse an interval given as "lo:hi".

    @param s: string to parse
    @type s: L{str}
    @param conv: conversion applied to both bounds
    @type conv: callable
    @return: the tuple (lo, hi)
    @rtype: L{tuple}
    @raises ValueError: if the string is not a valid interval
    """
    # allow negative bounds ("-20:20"), split on the last colon
    if ":" not in s:
        raise ValueError("Interval '{}' is not of the form lo:hi".format(s))
    lo, hi = s.rsplit(":", 1)
    lo, hi = conv(lo), conv(hi)
    if not lo < hi:
        raise ValueError("Interval '{}' is empty".format(s))
    return (lo, hi)


def parse_int(s):
    """
    Parse an integer literal, accepting hex ("0x...") and powers ("2^20").

    @param s: string to parse
    @type s: L{str}
    @return: the integer
    @rtype: L{int}
    """
    s = s.strip()
    if "^" in s:
        base, exp = s.split("^", 1)
        return int(base, 0) ** int(exp, 0)
    return int(s, 0)


def worker_count(jobs):
    """
    Resolve a requested number of worker processes.

    @param jobs: requested workers, 0 for none, negative for one per core
    @type jobs: L{int}
    @return: the number of worker processes to start, 0 to work in this process
    @rtype: L{int}
    """
    if multiprocessing is None:
        return 0
    if jobs < 0:
        return multiprocessing.cpu_count()
    return jobs


def config_process(name, nice=0):
    """
    Name the current worker process and lower its priority.

    Both are skipped silently without the "integration" extra.

    @param name: process title
    @type name: L{str}
    @param nice: nice value to set, 0 to leave the priority alone
    @type nice: L{int}
    """
    if setproctitle is not None:
        setproctitle.setproctitle(name)
    if psutil is not None and nice != 0:
        p = psutil.Process()
        if psutil.LINUX:
            p.nice(nice)
        elif nice > 0:
            p.nice(psutil.BELOW_NORMAL_PRIORITY_CLASS)


def describe_host():
    """
    Return a short description of the host for benchmark reports.

    @return: a dict describing cpu count, frequency and memory (where known)
    @rtype: L{dict}
    """
    info = {"cores": os.cpu_count() or 1}
    if psutil is not None:
        freq = psutil.cpu_freq()
        if freq is not None:
            info["cpu_mhz"] = freq.max or freq.current
        info["memory"] = psutil.virtual_memory().total
    return info
