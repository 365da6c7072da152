"""Aligned-column text renderings of the JSON reports."""
from typing import Mapping

from .models import ERROR_CATEGORIES

REPORT_FORMATS = ('json', 'text')
_SCORE_ROWS = ('entity', 'relation', 'span')


def report_text(data: Mapping) -> str:
    """One row per item kind from `EvalReportSerializer` data."""
    lines = [f"{'':<10} {'gold':>8} {'pred':>8} {'correct':>8} {'P':>8} {'R':>8} {'F1':>8}"]
    for name in _SCORE_ROWS:
        row = data[name]
        lines.append(
            f"{name:<10} {row['gold']:>8d} {row['predicted']:>8d} {row['correct']:>8d} "
            f"{row['precision']:>8.4f} {row['recall']:>8.4f} {row['f1']:>8.4f}"
        )
    return '\n'.join(lines)


def breakdown_text(data: Mapping) -> str:
    """One row per error category from `ErrorBreakdownSerializer` data, then the total."""
    lines = [f"{'category':<10} {'count':>8} {'fraction':>10}"]
    for name in ERROR_CATEGORIES:
        lines.append(f"{name:<10} {data['counts'][name]:>8d} {data['fractions'][name]:>10.4f}")
    lines.append(f"{'total':<10} {data['total']:>8d}")
    return '\n'.join(lines)
