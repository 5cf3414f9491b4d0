"""
Generation and certification of the kernel tables.
"""
from .remez import fit_minimax, FitResult
from .tables import (
    GenerationOptions, TableSet, Exp2fTables, Log2fTables, Exp2dTables, LogdTable,
    gen_all_tables, table_sizes, BUDGETS,
)
from .artifact import load_tables, load_tables_from, read_tables, write_tables, verify_tables, default_artifact_path
