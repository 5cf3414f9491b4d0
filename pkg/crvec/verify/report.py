"""
Verification reports.

A L{VerifyReport} is the result of a sweep, a corpus check or a
consistency check. Reports of independent chunks are combined with
L{VerifyReport.merge}. Stored mismatches are kept sorted by input, so
the merged report does not depend on the order chunks finish in.

JSON schema of L{VerifyReport.to_dict}::

    {
        "function": str,            # "exp2f", "log2f", "exp2" or "log"
        "modes": [str],             # short mode names, e.g. ["rne", "rz"]
        "inputs_tested": int,       # number of (input, mode) evaluations
        "mismatch_count": int,      # exact total of kernel mismatches
        "mismatch_cap": int,        # max number of stored mismatches
        "mismatches": [             # the first mismatches, sorted
            {
                "input": str,       # hex-float literal of the input
                "input_bits": str,  # bit pattern in hex, also "got_bits" and "expected_bits"
                "mode": str,
                "got": str,         # hex-float literal of the kernel result
                "expected": str,    # hex-float literal of the reference
                "distance": int or null,   # ulp distance, null if a NaN is involved
                "kind": str,        # "kernel" or "corpus"
            },
        ],
        "disagreement_count": int,  # corpus entries whose expected output differs from the oracle
        "coverage": {str: any},     # e.g. {"kind": "exhaustive", "stride": 1, "ranges": [...]}
        "diagnostics": [str],       # per-line parse problems, never fatal
        "precision_histogram": {str: int},   # oracle precision that decided, corpus checks only
        "wall_time": float,         # seconds, omitted with timing=False
    }
"""
import json

from ..fp.bits import BINARY32, INCOMPARABLE, Binary32, Binary64, ulp_distance
from ..fp.rounding import RoundingMode
from ..renderer import TextRenderer


MISMATCH_KERNEL = "kernel"
MISMATCH_CORPUS = "corpus"

DEFAULT_MISMATCH_CAP = 100


def results_match(got, expected):
    """
    Compare a kernel result with its reference.

    Both NaN counts as a match, otherwise the bit patterns have to be
    identical (so -0 and +0 differ).

    @param got: the kernel result
    @type got: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @param expected: the reference result
    @type expected: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @return: whether the results match
    @rtype: L{bool}
    """
    if got.is_nan() and expected.is_nan():
        return True
    return got.bits == expected.bits


class Mismatch(object):
    """
    A single disagreement between a result and its reference.

    @ivar input: the input
    @type input: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @ivar mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @ivar got: the result under test
    @type got: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @ivar expected: the reference result
    @type expected: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @ivar kind: L{MISMATCH_KERNEL} or L{MISMATCH_CORPUS}
    @type kind: L{str}
    """
    def __init__(self, input, mode, got, expected, kind=MISMATCH_KERNEL):
        assert kind in (MISMATCH_KERNEL, MISMATCH_CORPUS)
        self.input = input
        self.mode = mode
        self.got = got
        self.expected = expected
        self.kind = kind

    def __repr__(self):
        return "Mismatch({}, {}, got={}, expected={}, kind={})".format(
            self.input.hex(), self.mode.short_name, self.got.hex(), self.expected.hex(), self.kind,
        )

    @property
    def distance(self):
        """The ulp distance of the result to the reference, or L{None} if a NaN is involved."""
        return ulp_distance(self.got.bits, self.expected.bits, self.got.fmt)

    @property
    def sort_key(self):
        """Key ordering mismatches by input pattern, then mode."""
        return (self.input.bits, int(self.mode), self.kind)

    def to_dict(self):
        """
        Return a dict describing this mismatch.

        @return: a json-serializable dict
        @rtype: L{dict}
        """
        distance = self.distance
        return {
            "input": self.input.hex(),
            "input_bits": "{:x}".format(self.input.bits),
            "mode": self.mode.short_name,
            "got": self.got.hex(),
            "got_bits": "{:x}".format(self.got.bits),
            "expected": self.expected.hex(),
            "expected_bits": "{:x}".format(self.expected.bits),
            "distance": (None if distance is INCOMPARABLE else distance),
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, d, value_type):
        """
        Load a mismatch from a dict as produced by L{Mismatch.to_dict}.

        @param d: the dict to load
        @type d: L{dict}
        @param value_type: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
        @type value_type: L{type}
        @return: the mismatch
        @rtype: L{Mismatch}
        """
        return cls(
            input=value_type(int(d["input_bits"], 16)),
            mode=RoundingMode.from_name(d["mode"]),
            got=value_type(int(d["got_bits"], 16)),
            expected=value_type(int(d["expected_bits"], 16)),
            kind=d["kind"],
        )


class VerifyReport(object):
    """
    The result of a verification run.

    @ivar function_id: the function that was verified
    @type function_id: L{str}
    @ivar modes: the rounding modes that were verified
    @type modes: L{list} of L{crvec.fp.rounding.RoundingMode}
    @ivar inputs_tested: number of (input, mode) evaluations
    @type inputs_tested: L{int}
    @ivar mismatches: the first mismatches, sorted
    @type mismatches: L{list} of L{Mismatch}
    @ivar mismatch_count: exact number of kernel mismatches
    @type mismatch_count: L{int}
    @ivar disagreement_count: number of corpus entries disagreeing with the oracle
    @type disagreement_count: L{int}
    @ivar mismatch_cap: max number of stored mismatches
    @type mismatch_cap: L{int}
    @ivar coverage: description of what was tested
    @type coverage: L{dict}
    @ivar diagnostics: non-fatal problems (e.g. corpus lines that did not parse)
    @type diagnostics: L{list} of L{str}
    @ivar precision_histogram: number of inputs per oracle precision that decided them
    @type precision_histogram: L{dict}
    @ivar wall_time: seconds the run took
    @type wall_time: L{float}
    """
    def __init__(self, function_id, modes, coverage=None, mismatch_cap=DEFAULT_MISMATCH_CAP):
        """
        The default constructor.

        @param function_id: the function that was verified
        @type function_id: L{str}
        @param modes: the rounding modes that were verified
        @type modes: iterable of L{crvec.fp.rounding.RoundingMode}
        @param coverage: description of what was tested
        @type coverage: L{dict} or L{None}
        @param mismatch_cap: max number of stored mismatches
        @type mismatch_cap: L{int}
        """
        assert isinstance(function_id, str)
        assert mismatch_cap >= 0
        self.function_id = function_id
        self.modes = sorted(modes)
        self.inputs_tested = 0
        self.mismatches = []
        self.mismatch_count = 0
        self.disagreement_count = 0
        self.mismatch_cap = mismatch_cap
        self.coverage = (dict(coverage) if coverage is not None else {})
        self.diagnostics = []
        self.precision_histogram = {}
        self.wall_time = 0.0

    def __repr__(self):
        return "VerifyReport({}, tested={}, mismatches={})".format(
            self.function_id, self.inputs_tested, self.mismatch_count,
        )

    @property
    def passed(self):
        """Whether the run found neither kernel mismatches nor corpus disagreements."""
        return self.mismatch_count == 0 and self.disagreement_count == 0

    @property
    def value_type(self):
        """The value type of inputs and results of the verified function."""
        return (Binary32 if self.function_id.endswith("f") else Binary64)

    def add_mismatch(self, mismatch):
        """
        Record a mismatch, keeping at most L{mismatch_cap} of them.

        @param mismatch: the mismatch to add
        @type mismatch: L{Mismatch}
        """
        if mismatch.kind == MISMATCH_KERNEL:
            self.mismatch_count += 1
        else:
            self.disagreement_count += 1
        self.mismatches.append(mismatch)
        self.mismatches.sort(key=lambda m: m.sort_key)
        del self.mismatches[self.mismatch_cap:]

    def add_precision(self, precision):
        """
        Count an oracle decision at the given precision.

        @param precision: the precision, 0 for special and exact cases
        @type precision: L{int}
        """
        precision = int(precision)
        self.precision_histogram[precision] = self.precision_histogram.get(precision, 0) + 1

    def merge(self, other):
        """
        Add the results of another report for the same function.

        @param other: report to merge into this one
        @type other: L{VerifyReport}
        """
        assert other.function_id == self.function_id
        self.inputs_tested += other.inputs_tested
        self.mismatch_count += other.mismatch_count
        self.disagreement_count += other.disagreement_count
        self.mismatches = sorted(self.mismatches + other.mismatches, key=lambda m: m.sort_key)[:self.mismatch_cap]
        self.diagnostics += other.diagnostics
        for precision, n in other.precision_histogram.items():
            self.precision_histogram[precision] = self.precision_histogram.get(precision, 0) + n
        for mode in other.modes:
            if mode not in self.modes:
                self.modes = sorted(self.modes + [mode])

    def to_dict(self, timing=True):
        """
        Return a dict describing this report.

        @param timing: whether to include the wall time
        @type timing: L{bool}
        @return: a json-serializable dict
        @rtype: L{dict}
        """
        data = {
            "function": self.function_id,
            "modes": [m.short_name for m in self.modes],
            "inputs_tested": self.inputs_tested,
            "mismatch_count": self.mismatch_count,
            "mismatch_cap": self.mismatch_cap,
            "mismatches": [m.to_dict() for m in self.mismatches],
            "disagreement_count": self.disagreement_count,
            "coverage": self.coverage,
            "diagnostics": list(self.diagnostics),
            "precision_histogram": {str(k): v for k, v in sorted(self.precision_histogram.items())},
        }
        if timing:
            data["wall_time"] = self.wall_time
        return data

    @classmethod
    def from_dict(cls, d):
        """
        Load a report from a dict as produced by L{VerifyReport.to_dict}.

        @param d: the dict to load
        @type d: L{dict}
        @return: the report
        @rtype: L{VerifyReport}
        """
        report = cls(
            d["function"],
            [RoundingMode.from_name(m) for m in d["modes"]],
            coverage=d.get("coverage"),
            mismatch_cap=d["mismatch_cap"],
        )
        value_type = report.value_type
        report.inputs_tested = d["inputs_tested"]
        report.mismatch_count = d["mismatch_count"]
        report.disagreement_count = d.get("disagreement_count", 0)
        report.mismatches = [Mismatch.from_dict(md, value_type) for md in d["mismatches"]]
        report.diagnostics = list(d.get("diagnostics", []))
        report.precision_histogram = {int(k): v for k, v in d.get("precision_histogram", {}).items()}
        report.wall_time = d.get("wall_time", 0.0)
        return report

    def dumps(self, timing=True):
        """
        Serialize this report as JSON.

        @param timing: whether to include the wall time
        @type timing: L{bool}
        @return: the JSON document
        @rtype: L{str}
        """
        return json.dumps(self.to_dict(timing=timing), indent=2, sort_keys=True) + "\n"

    def write(self, path):
        """
        Write this report as JSON into a file.

        @param path: path to write to
        @type path: L{str}
        """
        with open(path, "w", encoding="utf-8") as fout:
            fout.write(self.dumps())

    def render(self):
        """
        Render this report as human readable text.

        @return: the text
        @rtype: L{str}
        """
        renderer = TextRenderer("crvec.verify")
        return renderer.render("verify.txt.jinja", report=self, is_f32=(self.value_type.fmt is BINARY32))
