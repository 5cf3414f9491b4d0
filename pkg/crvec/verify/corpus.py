"""
Replay of hard-to-round case corpora.

A corpus file holds one record per line::

    # comment
    0x1.6a09e667f3bcdp-1
    0x1.0000000000001p+0,0x1.fffffffffffffp-53

The first field is the input, the optional second field the expected
correctly rounded result under round-to-nearest-even, both as C99
hex-float literals that have to be exactly representable. Lines that do
not parse are reported as diagnostics and skipped.

Corpora are opened through pyfilesystem2, so they may be plain files or
live inside any filesystem an URL can describe (e.g. a zip archive). A
directory is read as the concatenation of its "*.txt" files.
"""
import os
import time

import numpy as np
from fs import open_fs
from fs.walk import Walker

from ..exceptions import CorpusParseError
from ..fp.bits import BINARY32, BINARY64, Binary32, Binary64
from ..fp.rounding import RoundingMode, parse_hex_exact
from ..kernels import get_kernel, ORACLE_IDS
from ..oracle import ziv_correctly_round
from ..reporter import VoidReporter
from ..util import resource_path
from ..vlanes import LaneBatch, KIND_F32, KIND_F64
from .report import VerifyReport, Mismatch, MISMATCH_CORPUS, results_match


# ranges the co-resident lanes of a corpus input are drawn from
CO_RESIDENT_RANGES = {
    "exp2f": (-20.0, 20.0),
    "log2f": (0.125, 8.0),
    "exp2": (-20.0, 20.0),
    "log": (0.125, 8.0),
}


class HardCaseRecord(object):
    """
    A record of a hard-case corpus.

    @ivar function_id: the function the record belongs to
    @type function_id: L{str}
    @ivar input: the input
    @type input: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @ivar expected: the expected round-to-nearest result, if given
    @type expected: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64} or L{None}
    @ivar lineno: number of the line the record was read from
    @type lineno: L{int}
    """
    __slots__ = ("function_id", "input", "expected", "lineno")

    def __init__(self, function_id, input, expected=None, lineno=0):
        self.function_id = function_id
        self.input = input
        self.expected = expected
        self.lineno = lineno

    def __repr__(self):
        return "HardCaseRecord({}, {}, expected={}, line {})".format(
            self.function_id,
            self.input.hex(),
            (self.expected.hex() if self.expected is not None else None),
            self.lineno,
        )


def _value_type(f_id):
    return (Binary32 if f_id.endswith("f") else Binary64)


def parse_record(line, f_id, lineno):
    """
    Parse a single corpus line.

    @param line: the line
    @type line: L{str}
    @param f_id: the function of the corpus
    @type f_id: L{str}
    @param lineno: number of the line
    @type lineno: L{int}
    @return: the record, or None for blank and comment lines
    @rtype: L{HardCaseRecord} or L{None}
    @raises CorpusParseError: if the line is malformed
    """
    content = line.split("#", 1)[0].strip()
    if not content:
        return None
    fields = [f.strip() for f in content.split(",")]
    if len(fields) > 2 or not all(fields):
        raise CorpusParseError(lineno, "expected '<input>[,<expected>]', got '{}'".format(content))
    cls = _value_type(f_id)
    try:
        values = [cls(parse_hex_exact(f, cls.fmt)) for f in fields]
    except ValueError as e:
        raise CorpusParseError(lineno, str(e))
    return HardCaseRecord(f_id, values[0], (values[1] if len(values) > 1 else None), lineno)


def parse_corpus(lines, f_id):
    """
    Parse the lines of a corpus.

    @param lines: the lines
    @type lines: iterable of L{str}
    @param f_id: the function of the corpus
    @type f_id: L{str}
    @return: the tuple (records, diagnostics)
    @rtype: L{tuple} of (L{list} of L{HardCaseRecord}, L{list} of L{str})
    """
    records = []
    diagnostics = []
    for lineno, line in enumerate(lines, start=1):
        try:
            record = parse_record(line, f_id, lineno)
        except CorpusParseError as e:
            diagnostics.append(str(e))
            continue
        if record is not None:
            records.append(record)
    return records, diagnostics


def read_corpus(path, f_id, fs_url=None):
    """
    Read a corpus file or directory.

    @param path: path of the file or directory, inside the filesystem if fs_url is given
    @type path: L{str}
    @param f_id: the function of the corpus
    @type f_id: L{str}
    @param fs_url: pyfilesystem2 URL of the filesystem to read from
    @type fs_url: L{str} or L{None}
    @return: the tuple (records, diagnostics)
    @rtype: L{tuple} of (L{list} of L{HardCaseRecord}, L{list} of L{str})
    """
    if fs_url is None:
        path = os.path.abspath(path)
        if os.path.isdir(path):
            fs_url, path = path, "/"
        else:
            fs_url, path = os.path.dirname(path), os.path.basename(path)
    records = []
    diagnostics = []
    with open_fs(fs_url) as fs:
        if fs.isdir(path):
            walker = Walker(filter=["*.txt"])
            paths = sorted(walker.files(fs, path=path))
        else:
            paths = [path]
        for p in paths:
            with fs.open(p, mode="r", encoding="utf-8") as fin:
                file_records, file_diagnostics = parse_corpus(fin, f_id)
            records += file_records
            diagnostics += ["{}: {}".format(p, d) for d in file_diagnostics]
    return records, diagnostics


def default_corpus_path(f_id):
    """
    Return the path of the corpus shipped for a function.

    @param f_id: the function
    @type f_id: L{str}
    @return: the path
    @rtype: L{str}
    """
    return resource_path("corpus", "{}.txt".format(f_id))


def embed_lanes(values, width, f_id, seed):
    """
    Place every value in a batch of its own, at a random lane, with random
    co-resident lanes.

    @param values: the values
    @type values: L{list} of L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @param width: the batch width
    @type width: L{int}
    @param f_id: the function, selecting the range of the co-resident lanes
    @type f_id: L{str}
    @param seed: seed of the random lanes
    @type seed: L{int}
    @return: the tuple (batch, positions) with the lane index of every value
    @rtype: L{tuple} of (L{crvec.vlanes.batch.LaneBatch}, L{numpy.ndarray})
    """
    rng = np.random.default_rng(seed)
    lo, hi = CO_RESIDENT_RANGES[f_id]
    dtype = (np.float32 if f_id.endswith("f") else np.float64)
    kind = (KIND_F32 if f_id.endswith("f") else KIND_F64)
    n = len(values)
    filler = LaneBatch.from_floats(rng.uniform(lo, hi, size=n * width).astype(dtype), width, kind)
    data = filler.data.copy()
    positions = np.arange(n, dtype=np.int64) * width + rng.integers(0, width, size=n)
    data[positions] = [v.bits for v in values]
    return filler.like(data), positions


def corpus_check(path, f_id, modes, fs_url=None, width=8, seed=0, backend="vectorized", mismatch_cap=100, reporter=None):
    """
    Evaluate every record of a corpus through the full kernel and compare
    with the oracle.

    Kernel results that differ from the oracle are kernel mismatches.
    Expected outputs of the corpus that differ from the oracle are corpus
    disagreements, reported separately.

    @param path: path of the corpus file or directory
    @type path: L{str}
    @param f_id: the function
    @type f_id: L{str}
    @param modes: the rounding modes
    @type modes: iterable of L{crvec.fp.rounding.RoundingMode}
    @param fs_url: pyfilesystem2 URL of the filesystem holding the corpus
    @type fs_url: L{str} or L{None}
    @param width: batch width
    @type width: L{int}
    @param seed: seed of the co-resident lanes
    @type seed: L{int}
    @param backend: name of the lane backend
    @type backend: L{str}
    @param mismatch_cap: max number of stored mismatches
    @type mismatch_cap: L{int}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the report
    @rtype: L{crvec.verify.report.VerifyReport}
    """
    if reporter is None:
        reporter = VoidReporter()
    kernel, _ = get_kernel(f_id)
    oracle_id = ORACLE_IDS[f_id]
    fmt = (BINARY32 if f_id.endswith("f") else BINARY64)
    modes = sorted(set(RoundingMode(m) for m in modes))
    start_time = time.time()

    records, diagnostics = read_corpus(path, f_id, fs_url=fs_url)
    report = VerifyReport(
        f_id,
        modes,
        coverage={"kind": "corpus", "file": path, "records": len(records), "width": width, "seed": seed},
        mismatch_cap=mismatch_cap,
    )
    report.diagnostics += diagnostics
    for d in diagnostics:
        reporter.warn("Corpus line skipped: {}".format(d))
    if not records:
        report.wall_time = time.time() - start_time
        return report

    cls = _value_type(f_id)
    batch, positions = embed_lanes([r.input for r in records], width, f_id, seed)
    with reporter.with_progress("Replaying corpus", max=len(records) * len(modes), unit="records", secondary_unit="mismatches") as bar:
        for mode in modes:
            results = kernel(batch, mode, backend=backend).data[positions]
            for record, got_bits in zip(records, results.tolist()):
                oracle = ziv_correctly_round(oracle_id, record.input, target=fmt, mode=mode)
                report.add_precision(oracle.decided_at_precision)
                got = cls(got_bits)
                n_mismatches = 0
                if not results_match(got, oracle.rounded):
                    report.add_mismatch(Mismatch(record.input, mode, got, oracle.rounded))
                    n_mismatches = 1
                if mode == RoundingMode.NEAREST_EVEN and record.expected is not None:
                    if not results_match(record.expected, oracle.rounded):
                        report.add_mismatch(Mismatch(record.input, mode, record.expected, oracle.rounded, kind=MISMATCH_CORPUS))
                report.inputs_tested += 1
                bar.advance(1, secondary=n_mismatches)
    report.wall_time = time.time() - start_time
    return report
