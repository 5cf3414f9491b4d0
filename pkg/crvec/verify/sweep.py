"""
Exhaustive and stratified sweeps of the binary32 kernels against the oracle.

The inputs of a sweep are split into chunks of at most 2^chunk_bits
patterns. The chunking depends only on the sweep parameters, so reruns
test the same chunks. Chunks are independent: each is evaluated by a
worker, which compares the kernel with L{crvec.oracle.ziv_correctly_round}
lane by lane and returns a L{VerifyReport} for the chunk. The reports are
merged in chunk order.
"""
import os
import time

try:
    import multiprocessing
except ImportError:
    multiprocessing = None

import numpy as np

from ..fp.bits import BINARY32, Binary32
from ..fp.rounding import RoundingMode
from ..kernels import get_kernel, ORACLE_IDS
from ..oracle import ziv_correctly_round
from ..reporter import VoidReporter
from ..util import chunked_range, config_process, worker_count
from ..vlanes import LaneBatch, KIND_F32
from .report import VerifyReport, Mismatch, results_match


F32_FUNCTIONS = ("exp2f", "log2f")

DEFAULT_CHUNK_BITS = 20
DEFAULT_BOUNDARY_RADIUS = 256
DIRECTED_DEFAULT_STRIDE = 1 << 8
N_PATTERNS = 1 << 32

# exp2f results are binary32 powers of two exactly at integer inputs
EXP2F_EXPONENTS = range(-150, 129)
# log2f results +-2^j sit at inputs 2^(+-2^j); below 2^-30 these round to 1
LOG2F_EXPONENTS = range(-30, 8)


class SweepOptions(object):
    """
    Options for sweeps.

    @ivar jobs: number of worker processes, 0 to run in this process, <0 for one per core
    @type jobs: L{int}
    @ivar chunk_bits: chunks hold at most 2^chunk_bits patterns
    @type chunk_bits: L{int}
    @ivar log_directory: if not None, directory worker logs are written to
    @type log_directory: L{str} or L{None}
    @ivar mismatch_cap: max number of mismatches stored in the report
    @type mismatch_cap: L{int}
    @ivar backend: name of the lane backend the kernels run on
    @type backend: L{str}
    @ivar width: batch width the kernels run with
    @type width: L{int}
    """
    def __init__(self, jobs=0, chunk_bits=DEFAULT_CHUNK_BITS, log_directory=None, mismatch_cap=100, backend="vectorized", width=16):
        """
        The default constructor.

        @param jobs: number of worker processes, 0 to run in this process, <0 for one per core
        @type jobs: L{int}
        @param chunk_bits: chunks hold at most 2^chunk_bits patterns
        @type chunk_bits: L{int}
        @param log_directory: if not None, directory worker logs are written to
        @type log_directory: L{str} or L{None}
        @param mismatch_cap: max number of mismatches stored in the report
        @type mismatch_cap: L{int}
        @param backend: name of the lane backend the kernels run on
        @type backend: L{str}
        @param width: batch width the kernels run with
        @type width: L{int}
        """
        assert isinstance(jobs, int)
        assert isinstance(chunk_bits, int) and 4 <= chunk_bits <= 32
        assert isinstance(log_directory, str) or (log_directory is None)
        self.jobs = jobs
        self.chunk_bits = chunk_bits
        self.log_directory = log_directory
        self.mismatch_cap = mismatch_cap
        self.backend = backend
        self.width = width


class SweepChunk(object):
    """
    A chunk of a sweep.

    Strided chunks are described by a range, explicit chunks carry their
    patterns (boundary neighborhoods and random inputs).

    @ivar index: number of the chunk within the sweep
    @type index: L{int}
    @ivar f_id: the function to verify
    @type f_id: L{str}
    @ivar modes: the rounding modes to verify
    @type modes: L{list} of L{crvec.fp.rounding.RoundingMode}
    @ivar patterns: a range or an explicit array of binary32 patterns
    @type patterns: L{range} or L{numpy.ndarray}
    """
    def __init__(self, index, f_id, modes, patterns):
        self.index = index
        self.f_id = f_id
        self.modes = modes
        self.patterns = patterns

    @property
    def name(self):
        """A name describing this chunk."""
        if isinstance(self.patterns, range):
            return "{}[{:08x}:{:08x}:{}]".format(self.f_id, self.patterns.start, self.patterns.stop, self.patterns.step)
        return "{}[explicit #{}]".format(self.f_id, self.index)

    def __len__(self):
        return len(self.patterns)

    def pattern_array(self):
        """
        Return the patterns of this chunk.

        @return: the patterns
        @rtype: L{numpy.ndarray} of uint32
        """
        if isinstance(self.patterns, range):
            r = self.patterns
            return np.arange(r.start, r.stop, r.step, dtype=np.uint64).astype(np.uint32)
        return np.asarray(self.patterns, dtype=np.uint32)


class SweepWorker(object):
    """
    Evaluates sweep chunks.

    @ivar id: id of this worker
    @type id: L{int}
    @ivar options: the sweep options
    @type options: L{SweepOptions}
    """
    def __init__(self, id, options):
        """
        The default constructor.

        @param id: id of this worker
        @type id: L{int}
        @param options: the sweep options
        @type options: L{SweepOptions}
        """
        assert isinstance(id, int)
        assert isinstance(options, SweepOptions)
        self.id = id
        self.options = options
        self.setup_logging()
        self.log("Worker initialized.")

    def setup_logging(self):
        """
        Setup the logging system.
        """
        self._last_log_time = time.time()
        if self.options.log_directory is not None:
            fn = os.path.join(
                self.options.log_directory,
                "log_worker_{}.txt".format(self.id),
            )
            self._log_file = open(fn, mode="w", encoding="utf-8")
        else:
            self._log_file = None

    def log(self, msg):
        """
        Log a message.

        @param msg: message to log
        @type msg: L{str}
        """
        assert isinstance(msg, str)
        if self._log_file is not None:
            full_msg = "[{}][+{:8.3f}s] {}\n".format(
                time.ctime(),
                time.time() - self._last_log_time,
                msg,
            )
            self._log_file.write(full_msg)
            self._log_file.flush()
        self._last_log_time = time.time()

    def run_kernel(self, f_id, patterns, mode):
        """
        Evaluate a kernel on binary32 patterns.

        @param f_id: "exp2f" or "log2f"
        @type f_id: L{str}
        @param patterns: the input patterns
        @type patterns: L{numpy.ndarray} of uint32
        @param mode: the rounding mode
        @type mode: L{crvec.fp.rounding.RoundingMode}
        @return: the result patterns
        @rtype: L{numpy.ndarray} of uint32
        """
        kernel, _ = get_kernel(f_id)
        width = self.options.width
        n = len(patterns)
        padded = np.zeros(-(-n // width) * width, dtype=np.uint32)
        padded[:n] = patterns
        out = kernel(LaneBatch(padded, width, KIND_F32), mode, backend=self.options.backend)
        return out.data[:n]

    def process(self, chunk):
        """
        Verify a chunk.

        @param chunk: the chunk to verify
        @type chunk: L{SweepChunk}
        @return: the report of this chunk
        @rtype: L{crvec.verify.report.VerifyReport}
        """
        self.log("Processing chunk {} ({} inputs).".format(chunk.name, len(chunk)))
        report = VerifyReport(chunk.f_id, chunk.modes, mismatch_cap=self.options.mismatch_cap)
        oracle_id = ORACLE_IDS[chunk.f_id]
        patterns = chunk.pattern_array()
        for mode in chunk.modes:
            results = self.run_kernel(chunk.f_id, patterns, mode)
            for bits, got_bits in zip(patterns.tolist(), results.tolist()):
                x = Binary32(bits)
                expected = ziv_correctly_round(oracle_id, x, target=BINARY32, mode=mode).rounded
                got = Binary32(got_bits)
                if not results_match(got, expected):
                    self.log("Mismatch: {}({}) {} -> {}, expected {}".format(chunk.f_id, x.hex(), mode.short_name, got.hex(), expected.hex()))
                    report.add_mismatch(Mismatch(x, mode, got, expected))
            report.inputs_tested += len(patterns)
        self.log("Chunk {} done, {} mismatches.".format(chunk.name, report.mismatch_count))
        return report


_WORKER = None


def _init_worker(options):
    """
    Initializer of the worker processes.

    @param options: the sweep options
    @type options: L{SweepOptions}
    """
    global _WORKER
    identity = multiprocessing.current_process()._identity
    worker_id = (identity[0] if identity else 0)
    config_process(name="crvec-verify-worker-{}".format(worker_id), nice=10)
    _WORKER = SweepWorker(worker_id, options)


def _process_chunk(chunk):
    """
    Process a chunk in a worker process.

    @param chunk: the chunk
    @type chunk: L{SweepChunk}
    @return: the report of the chunk
    @rtype: L{crvec.verify.report.VerifyReport}
    """
    return _WORKER.process(chunk)


def value_range_to_patterns(lo, hi):
    """
    Return the binary32 pattern ranges holding all values in [lo, hi].

    @param lo: the lower bound (rounded inward to binary32)
    @type lo: L{float}
    @param hi: the upper bound (rounded inward to binary32)
    @type hi: L{float}
    @return: list of half-open (start, stop) pattern ranges
    @rtype: L{list} of L{tuple}
    """
    assert lo <= hi
    # compare as binary64, a python float operand would be cast to float32
    lo32 = np.float32(lo)
    if float(lo32) < lo:
        lo32 = np.nextafter(lo32, np.float32(np.inf))
    hi32 = np.float32(hi)
    if float(hi32) > hi:
        hi32 = np.nextafter(hi32, np.float32(-np.inf))
    lo_bits = int(lo32.view(np.uint32))
    hi_bits = int(hi32.view(np.uint32))
    ranges = []
    if lo32 < 0 or (lo32 == 0 and np.signbit(lo32)):
        # negative values: patterns grow with the magnitude
        neg_top = lo_bits
        neg_bottom = (hi_bits if hi32 < 0 or np.signbit(hi32) else 0x80000000)
        ranges.append((neg_bottom, neg_top + 1))
    if hi32 >= 0 and not np.signbit(hi32):
        pos_bottom = (lo_bits if lo32 >= 0 and not np.signbit(lo32) else 0)
        ranges.append((pos_bottom, hi_bits + 1))
    return sorted(ranges)


def boundary_centers(f_id):
    """
    Return the inputs nearest to those whose result is a power of two.

    @param f_id: "exp2f" or "log2f"
    @type f_id: L{str}
    @return: sorted unique binary32 patterns
    @rtype: L{numpy.ndarray} of uint32
    """
    if f_id == "exp2f":
        values = np.array(list(EXP2F_EXPONENTS), dtype=np.float64)
    else:
        magnitudes = np.ldexp(1.0, np.array(list(LOG2F_EXPONENTS)))
        values = np.concatenate([np.exp2(magnitudes), np.exp2(-magnitudes)])
        values = values[np.isfinite(values) & (values > 0)]
    with np.errstate(over="ignore", under="ignore"):
        centers = values.astype(np.float32)
    # underflowed log2f centers are dropped, exp2f keeps x = 0
    centers = centers[np.isfinite(centers) & ((centers != 0) | (values == 0))]
    return np.unique(centers.view(np.uint32))


def boundary_patterns(f_id, radius=DEFAULT_BOUNDARY_RADIUS):
    """
    Return the boundary neighborhoods of a function.

    @param f_id: "exp2f" or "log2f"
    @type f_id: L{str}
    @param radius: number of patterns on each side of every center
    @type radius: L{int}
    @return: sorted unique binary32 patterns
    @rtype: L{numpy.ndarray} of uint32
    """
    centers = boundary_centers(f_id).astype(np.int64)
    offsets = np.arange(-radius, radius + 1, dtype=np.int64)
    patterns = (centers[:, None] + offsets[None, :]).reshape(-1)
    # stay within the sign half of every center
    same_half = (patterns >> 31) == (np.repeat(centers, len(offsets)) >> 31)
    patterns = patterns[same_half & (patterns >= 0) & (patterns < N_PATTERNS)]
    return np.unique(patterns).astype(np.uint32)


def random_patterns(n, seed):
    """
    Return seeded random binary32 patterns.

    @param n: number of patterns
    @type n: L{int}
    @param seed: the seed
    @type seed: L{int}
    @return: the patterns
    @rtype: L{numpy.ndarray} of uint32
    """
    rng = np.random.default_rng(seed)
    return rng.integers(0, N_PATTERNS, size=n, dtype=np.uint64).astype(np.uint32)


def make_chunks(f_id, modes, stride=1, ranges=None, boundaries=False, radius=DEFAULT_BOUNDARY_RADIUS, extra_random=0, seed=0, chunk_bits=DEFAULT_CHUNK_BITS):
    """
    Split a sweep into chunks.

    @return: the chunks
    @rtype: L{list} of L{SweepChunk}
    """
    pattern_ranges = ([(0, N_PATTERNS)] if ranges is None else [pr for r in ranges for pr in value_range_to_patterns(*r)])
    chunk_size = 1 << chunk_bits
    chunks = []
    for start, stop in pattern_ranges:
        for r in chunked_range(start, stop, stride, chunk_size):
            chunks.append(SweepChunk(len(chunks), f_id, modes, r))
    explicit = []
    if boundaries:
        explicit.append(boundary_patterns(f_id, radius))
    if extra_random > 0:
        explicit.append(random_patterns(extra_random, seed))
    for patterns in explicit:
        for start in range(0, len(patterns), chunk_size):
            chunks.append(SweepChunk(len(chunks), f_id, modes, patterns[start:start + chunk_size]))
    return chunks


def exhaustive_f32(f_id, modes, stride=1, ranges=None, boundaries=False, radius=DEFAULT_BOUNDARY_RADIUS, extra_random=0, seed=0, options=None, reporter=None):
    """
    Verify a binary32 kernel against the oracle.

    @param f_id: "exp2f" or "log2f"
    @type f_id: L{str}
    @param modes: the rounding modes to verify
    @type modes: iterable of L{crvec.fp.rounding.RoundingMode}
    @param stride: distance between tested patterns
    @type stride: L{int}
    @param ranges: value ranges (lo, hi) to restrict the sweep to, None for all patterns
    @type ranges: L{list} of L{tuple} or L{None}
    @param boundaries: whether to add the boundary neighborhoods
    @type boundaries: L{bool}
    @param radius: radius of the boundary neighborhoods
    @type radius: L{int}
    @param extra_random: number of seeded random patterns to add
    @type extra_random: L{int}
    @param seed: seed of the random patterns
    @type seed: L{int}
    @param options: sweep options
    @type options: L{SweepOptions} or L{None}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the report
    @rtype: L{crvec.verify.report.VerifyReport}
    """
    assert f_id in F32_FUNCTIONS, "exhaustive sweeps cover {} only".format(", ".join(F32_FUNCTIONS))
    assert isinstance(stride, int) and stride >= 1
    if options is None:
        options = SweepOptions()
    if reporter is None:
        reporter = VoidReporter()
    modes = sorted(set(RoundingMode(m) for m in modes))
    start_time = time.time()

    chunks = make_chunks(
        f_id, modes, stride=stride, ranges=ranges, boundaries=boundaries, radius=radius,
        extra_random=extra_random, seed=seed, chunk_bits=options.chunk_bits,
    )
    coverage = {
        "kind": ("exhaustive" if stride == 1 and ranges is None else "stride"),
        "stride": stride,
        "ranges": ([[float(lo), float(hi)] for lo, hi in ranges] if ranges is not None else "all"),
        "boundary_radius": (radius if boundaries else 0),
        "random": extra_random,
        "seed": seed,
        "chunks": len(chunks),
    }
    report = VerifyReport(f_id, modes, coverage=coverage, mismatch_cap=options.mismatch_cap)

    jobs = worker_count(options.jobs)
    if jobs > 0:
        pool = multiprocessing.Pool(processes=jobs, initializer=_init_worker, initargs=(options, ))
        map_f = lambda f, l: pool.imap(f, l, chunksize=1)
    else:
        pool = None
        worker = SweepWorker(0, options)
        map_f = lambda f, l: map(worker.process, l)

    total = sum(len(c) for c in chunks) * len(modes)
    reporter.msg("Verifying {} in {} chunks ({} evaluations)...".format(f_id, len(chunks), total))
    try:
        with reporter.with_progress("Verifying {}".format(f_id), max=total, unit="inputs", secondary_unit="mismatches") as bar:
            for chunk_report in map_f(_process_chunk, chunks):
                report.merge(chunk_report)
                bar.advance(chunk_report.inputs_tested, secondary=chunk_report.mismatch_count)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    report.wall_time = time.time() - start_time
    return report
