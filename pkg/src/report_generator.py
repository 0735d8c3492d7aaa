"""
Report Generator Module
Writes study rows as CSV and renders them as a console table
"""
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd
from rich.console import Console
from rich.table import Table

import sys
sys.path.append(str(Path(__file__).parent.parent))
from config import CSV_HEADER, OUTPUT_DIR

console = Console()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _short(value, fmt: str = ".3e") -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return format(value, fmt)


class ReportGenerator:
    """Generates CSV files and summary tables from study rows"""

    def __init__(self, output_dir: Optional[Path] = None):
        self.output_dir = Path(output_dir) if output_dir else OUTPUT_DIR

    def to_frame(self, rows: Sequence) -> pd.DataFrame:
        """Rows as text cells in round-trip precision, columns in CSV order"""
        records = [
            [
                _cell(row.h), _cell(row.delta), _cell(row.alpha), _cell(row.L),
                _cell(row.estimate), _cell(row.reference), _cell(row.bias),
                _cell(row.half_width), _cell(row.seconds),
            ]
            for row in rows
        ]
        return pd.DataFrame(records, columns=CSV_HEADER, dtype=str)

    def emit_csv(self, rows: Sequence, path: Optional[Path] = None, timings: bool = True) -> Path:
        """
        Write rows to a CSV file

        Args:
            rows: StudyRow list, written in the given order
            path: Output file; study.csv under the output directory when omitted
            timings: Write wall times; blank them for byte-stable output

        Returns:
            Path to the written file
        """
        output_path = Path(path) if path else self.output_dir / "study.csv"
        output_path.parent.mkdir(parents=True, exist_ok=True)

        frame = self.to_frame(rows)
        if not timings:
            frame["seconds"] = ""
        frame.to_csv(output_path, index=False, lineterminator="\n")

        console.print(f"[green]✅ CSV written: {output_path}[/green]")
        return output_path

    def render(self, rows: List, title: str, slope: Optional[float] = None) -> Table:
        """Print rows as a rich table, followed by the fitted order"""
        table = Table(title=title)
        for column in ("h", "Δ", "α", "L", "estimate", "bias", "± (c=2)", "seconds"):
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(
                _short(row.h, "g"), _short(row.delta, ".4g"), _short(row.alpha, ".3g"), str(row.L),
                _short(row.estimate, ".6f"), _short(row.bias), _short(row.half_width),
                _short(row.seconds, ".2f"),
            )
        console.print(table)
        if slope is not None:
            console.print(f"  📈 Fitted order of |bias| in h: [bold]{slope:.3f}[/bold]")
        return table

    def render_comparison(self, pairs: List[Tuple], title: str) -> Table:
        """Print one row per algorithm with wall time relative to the first"""
        table = Table(title=title)
        for column in ("algorithm", "h", "Δ", "estimate", "bias", "± (c=2)", "seconds", "time ratio"):
            table.add_column(column, justify="right")
        base = pairs[0][1].seconds if pairs else None
        for order, row in pairs:
            ratio = row.seconds / base if base else None
            table.add_row(
                order.label, _short(row.h, "g"), _short(row.delta, ".4g"), _short(row.estimate, ".6f"),
                _short(row.bias), _short(row.half_width), _short(row.seconds, ".2f"), _short(ratio, ".2f"),
            )
        console.print(table)
        return table
