"""
Plain-text reports for datasets, generated questions and classifiers.
"""

from typing import Optional, Sequence

import pandas as pd

from .schemas import (
    AnswerTypeCounts,
    DatasetStats,
    DistanceHistogram,
    EvaluationReport,
    ModelKind,
    QrpeTuple,
)


def _pct(part: int, total: int) -> float:
    return (part / total * 100) if total > 0 else 0.0


def top_premises(tuples: Sequence[QrpeTuple], limit: int = 10) -> pd.DataFrame:
    """Most frequent falsified premises with their tuple counts."""
    if not tuples:
        return pd.DataFrame(columns=["premise", "order", "tuples"])
    df = pd.DataFrame(
        {
            "premise": [t.premise.canonical() for t in tuples],
            "order": [int(t.premise.order) for t in tuples],
        }
    )
    grouped = df.groupby(["premise", "order"]).size().reset_index(name="tuples")
    grouped = grouped.sort_values(["tuples", "premise"], ascending=[False, True])
    return grouped.head(limit).reset_index(drop=True)


def format_dataset_report(
    stats: DatasetStats, tuples: Optional[Sequence[QrpeTuple]] = None
) -> str:
    lines = [
        "QRPE DATASET REPORT",
        "=" * 50,
        "",
        "Overall Statistics:",
        f"  Total tuples: {stats.total_tuples}",
        f"  Unique questions: {stats.unique_questions}",
        f"  Unique premises: {stats.unique_premises}",
        f"  First-order tuples: {stats.first_order} "
        f"({_pct(stats.first_order, stats.total_tuples):.1f}%)",
        f"  Second-order tuples: {stats.second_order} "
        f"({_pct(stats.second_order, stats.total_tuples):.1f}%)",
    ]
    if stats.train or stats.val:
        lines.append(f"  Train / val tuples: {stats.train} / {stats.val}")
    lines.append("")

    if tuples:
        table = top_premises(tuples)
        lines.extend(
            [
                "Most Falsified Premises:",
                "  ┌────────────────────────────────┬───────┬────────┐",
                "  │ Premise                        │ Order │ Tuples │",
                "  ├────────────────────────────────┼───────┼────────┤",
            ]
        )
        for row in table.itertuples(index=False):
            lines.append(f"  │ {row.premise[:30]:<30} │ {row.order:>5} │ {row.tuples:>6} │")
        lines.append("  └────────────────────────────────┴───────┴────────┘")

    return "\n".join(lines)


def format_answer_type_report(counts: AnswerTypeCounts, label: str = "Premise") -> str:
    """One-row answer-type table, the layout used to compare training sets."""
    return "\n".join(
        [
            "ANSWER TYPE DISTRIBUTION",
            "=" * 50,
            "",
            "  ┌────────────┬──────────┬──────────┬──────────┬──────────┬──────────┐",
            "  │ Set        │    Other │   Number │      Yes │       No │    Total │",
            "  ├────────────┼──────────┼──────────┼──────────┼──────────┼──────────┤",
            f"  │ {label[:10]:<10} │ {counts.other:>8} │ {counts.number:>8} │ "
            f"{counts.yes:>8} │ {counts.no:>8} │ {counts.total:>8} │",
            "  └────────────┴──────────┴──────────┴──────────┴──────────┴──────────┘",
        ]
    )


def _accuracy_cell(value: Optional[float]) -> str:
    return f"{value * 100:.2f}%" if value is not None else "-"


def format_evaluation_report(report: EvaluationReport, kind: ModelKind) -> str:
    return "\n".join(
        [
            f"EVALUATION REPORT ({kind.value})",
            "=" * 50,
            "",
            "  ┌──────────────┬──────────┬──────────┐",
            "  │ Subset       │ Examples │ Accuracy │",
            "  ├──────────────┼──────────┼──────────┤",
            f"  │ Overall      │ {report.count:>8} │ {_accuracy_cell(report.overall):>8} │",
            f"  │ First order  │ {report.first_order_count:>8} │ "
            f"{_accuracy_cell(report.first_order):>8} │",
            f"  │ Second order │ {report.second_order_count:>8} │ "
            f"{_accuracy_cell(report.second_order):>8} │",
            "  └──────────────┴──────────┴──────────┘",
        ]
    )


def format_distance_comparison(selected: DistanceHistogram, baseline: DistanceHistogram) -> str:
    """Mean pair distance of builder-selected negatives against random pairs."""
    ratio = baseline.mean / selected.mean if selected.mean > 0 else float("inf")
    lines = [
        "PAIR DISTANCE COMPARISON",
        "=" * 50,
        "",
        f"  Selected pairs: {selected.pair_count} (mean distance {selected.mean:.4f})",
        f"  Random pairs: {baseline.pair_count} (mean distance {baseline.mean:.4f})",
        f"  Random / selected: {ratio:.2f}x",
    ]
    missing = sorted(set(selected.missing) | set(baseline.missing))
    if missing:
        lines.append(f"  Images without features: {len(missing)}")
    return "\n".join(lines)
