"""Structure-aware spreadsheet engine.

Parses formulas, infers formula groups and reference groups, checks and
repairs structural soundness after edits, and applies structure-level
refactorings. Exposed as a library, a CLI (`sheetstruct`) and an HTTP
session service.
"""

from .errors import SheetStructError
from .evaluator import evaluate, evaluate_delta
from .grid import CellAddress, CellRange, parse_a1
from .model import Workbook, import_csv, load_json, save_json
from .soundness import check, guided_repair, on_edit
from .structure import infer

__version__ = "0.1.0"

__all__ = [
    "CellAddress", "CellRange", "SheetStructError", "Workbook", "check",
    "evaluate", "evaluate_delta", "guided_repair", "import_csv", "infer",
    "load_json", "on_edit", "parse_a1", "save_json", "__version__",
]
