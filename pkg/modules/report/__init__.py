import csv
import io
import json
import logging
import sys

from modules.module import Module, InputError

CSV_COLUMNS = ["name", "side", "space", "n", "r", "value", "grid"]

"""
CSV and JSON emission for command output. Data goes to stdout or to a file;
logging stays on stderr so outputs remain byte-comparable.
"""
class Report(Module):
    def __init__(self):
        super().__init__("report")

    @staticmethod
    def format_float(value : float) -> str:
        return f"{value:.17g}"

    """
    Write bound reports as CSV rows or as a JSON list

    @param rows: Objects with to_row() and to_dict()
    @param out_path: Target file (default: stdout)
    @param fmt: csv or json
    """
    @staticmethod
    def write_rows(rows : list, out_path : str|None = None, fmt : str = "csv"):
        if fmt == "json":
            Report.write_json([row.to_dict() for row in rows], out_path)
            return

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.to_row())

        Report.write_text(buffer.getvalue(), out_path)

    @staticmethod
    def write_json(payload, out_path : str|None = None):
        Report.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", out_path)

    @staticmethod
    def write_text(text : str, out_path : str|None = None):
        logger = logging.getLogger(__name__)

        if out_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return

        try:
            with open(out_path, "w", newline="") as file:
                file.write(text)
        except OSError as e:
            raise InputError(f"Cannot write {out_path}: {e}")

        logger.info(f"Wrote {out_path}")

    def print_help(self):
        logger = logging.getLogger(__name__)
        logger.info("The report module has no commands; it writes CSV and JSON output for the other modules.")
