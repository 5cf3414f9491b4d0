"""
The table artifact: a text file with one record per line.

Format::

    # crvec tables sha256=<hex digest of all record lines>
    exp2f.T.0 3ff0000000000000
    exp2d.T1.8 3ff6a09e667f3bcd bc8bdd3413b26456
    ...

Each record is a key followed by one or two 64 bit patterns in hex
(hi and lo for double-double entries). Records appear in a fixed order.
"""
import hashlib
import os
import warnings
from functools import lru_cache

from ..exceptions import TableMismatchError, MissingArtifactWarning
from ..util import resource_path
from .tables import TableSet, GenerationOptions, gen_all_tables


HEADER_PREFIX = "# crvec tables sha256="
MAX_REPORTED_DIFFERENCES = 10


def default_artifact_path():
    """
    Return the path of the checked-in table artifact.

    @return: the path
    @rtype: L{str}
    """
    return resource_path("tables.txt")


def format_record(key, patterns):
    """
    Format one artifact record.

    @param key: the record key
    @type key: L{str}
    @param patterns: one or two 64 bit patterns
    @type patterns: L{tuple} of L{int}
    @return: the line (without linebreak)
    @rtype: L{str}
    """
    return " ".join([key] + ["{:016x}".format(p) for p in patterns])


def dumps_tables(tables):
    """
    Serialize tables into the artifact format.

    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet}
    @return: the artifact content
    @rtype: L{str}
    """
    lines = [format_record(key, patterns) for key, patterns in tables.records()]
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    return HEADER_PREFIX + digest + "\n" + body


def write_tables(tables, path):
    """
    Write tables into an artifact file.

    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet}
    @param path: path to write to
    @type path: L{str}
    """
    with open(path, "w", encoding="ascii", newline="\n") as fout:
        fout.write(dumps_tables(tables))


def parse_records(text, check_hash=True):
    """
    Parse the content of an artifact.

    @param text: the artifact content
    @type text: L{str}
    @param check_hash: whether to check the content hash of the header
    @type check_hash: L{bool}
    @return: the ordered list of (key, patterns)
    @rtype: L{list} of L{tuple}
    @raises ValueError: if the header is missing or the hash does not match
    """
    header, _, body = text.partition("\n")
    if not header.startswith(HEADER_PREFIX):
        raise ValueError("Table artifact has no header!")
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    if check_hash and header[len(HEADER_PREFIX):].strip() != digest:
        raise ValueError("Table artifact content does not match its hash!")
    records = []
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError("Malformed table record: '{}'".format(line))
        records.append((parts[0], tuple(int(p, 16) for p in parts[1:])))
    return records


def read_tables(path):
    """
    Load tables from an artifact file.

    @param path: path of the artifact
    @type path: L{str}
    @return: the tables
    @rtype: L{crvec.coeffgen.tables.TableSet}
    """
    with open(path, "r", encoding="ascii") as fin:
        records = parse_records(fin.read())
    return TableSet.from_records(dict(records))


def compare_records(expected, actual):
    """
    Compare two record lists.

    @param expected: the regenerated records
    @type expected: L{list} of L{tuple}
    @param actual: the records in the artifact
    @type actual: L{list} of L{tuple}
    @return: list of differences as (key, expected, found) with patterns in hex
    @rtype: L{list} of L{tuple}
    """
    def fmt(patterns):
        return (None if patterns is None else " ".join("{:016x}".format(p) for p in patterns))

    actual_map = dict(actual)
    expected_map = dict(expected)
    differences = []
    for key, patterns in expected:
        if actual_map.get(key) != patterns:
            differences.append((key, fmt(patterns), fmt(actual_map.get(key))))
    for key, patterns in actual:
        if key not in expected_map:
            differences.append((key, None, fmt(patterns)))
    return differences


def verify_tables(path=None, options=None, reporter=None, tables=None):
    """
    Regenerate all tables and compare them bit-exactly with an artifact.

    @param path: path of the artifact, defaults to the checked-in one
    @type path: L{str} or L{None}
    @param options: generation options
    @type options: L{crvec.coeffgen.tables.GenerationOptions} or L{None}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @param tables: already regenerated tables to compare instead of regenerating
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: True
    @rtype: L{bool}
    @raises TableMismatchError: listing the first differing entries
    """
    if path is None:
        path = default_artifact_path()
    if tables is None:
        tables = gen_all_tables(options=options, reporter=reporter)
    with open(path, "r", encoding="ascii") as fin:
        text = fin.read()
    try:
        actual = parse_records(text, check_hash=False)
    except ValueError as e:
        raise TableMismatchError([("<artifact>", None, str(e))])
    differences = compare_records(tables.records(), actual)
    if differences:
        raise TableMismatchError(differences[:MAX_REPORTED_DIFFERENCES])
    expected_text = dumps_tables(tables)
    if text.partition("\n")[0] != expected_text.partition("\n")[0]:
        raise TableMismatchError([("<header>", expected_text.partition("\n")[0], text.partition("\n")[0])])
    return True


LOAD_WARNING = (
    "Table artifact '{}' not found, generating uncertified tables in memory."
    " Run crvec/resources/make_tables.sh to create it."
)


def load_tables_from(path):
    """
    Read the tables from an artifact, or regenerate them if it is missing.

    A missing artifact issues a L{MissingArtifactWarning}: the tables are
    then generated in memory without certification, which gives the same
    values but takes minutes.

    @param path: path of the artifact
    @type path: L{str}
    @return: the tables
    @rtype: L{crvec.coeffgen.tables.TableSet}
    """
    if os.path.exists(path):
        return read_tables(path)
    warnings.warn(LOAD_WARNING.format(path), MissingArtifactWarning, stacklevel=2)
    return gen_all_tables(GenerationOptions(certify=False))


@lru_cache(maxsize=1)
def load_tables():
    """
    Return the tables used by the kernels, read once per process from the
    checked-in artifact.

    @return: the tables
    @rtype: L{crvec.coeffgen.tables.TableSet}
    """
    return load_tables_from(default_artifact_path())
