"""
This subpackage contains the correctly rounded kernels: binary32 exp2 and
log2, binary64 exp2 and log, and the double-double helpers they use.
"""
from .f32 import cr_exp2f, cr_log2f, cr_exp2f_scalar, cr_log2f_scalar, cr_exp2f_array, cr_log2f_array
from .f32 import trace_exp2f, trace_log2f
from .f64 import cr_exp2, cr_log, cr_exp2_fast, cr_log_fast, cr_exp2_scalar, cr_log_scalar
from .f64 import cr_exp2_array, cr_log_array, round_test, callout, RoundTestOutcome


# maps the function names used on the command line to (kernel, input kind)
KERNELS = {
    "exp2f": (cr_exp2f, "f32"),
    "log2f": (cr_log2f, "f32"),
    "exp2": (cr_exp2, "f64"),
    "log": (cr_log, "f64"),
}

FAST_PATHS = {
    "exp2": cr_exp2_fast,
    "log": cr_log_fast,
}

# the oracle function ids of the kernels
ORACLE_IDS = {
    "exp2f": "exp2",
    "log2f": "log2",
    "exp2": "exp2",
    "log": "log",
}


def get_kernel(name):
    """
    Return a kernel by name.

    @param name: "exp2f", "log2f", "exp2" or "log"
    @type name: L{str}
    @return: the tuple (kernel, input kind)
    @rtype: L{tuple}
    @raises KeyError: for unknown names
    """
    if name not in KERNELS:
        raise KeyError("Unknown function '{}', choose one of {}".format(name, ", ".join(sorted(KERNELS))))
    return KERNELS[name]
