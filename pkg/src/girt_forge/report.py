"""Evaluation report output: JSON, aligned text table, TSV, and figures."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .generate import VariantReport
from .pipeline import PipelineStats

METRIC_COLUMNS = ("rouge1", "rougeL", "bleu", "meteor")
METRIC_TITLES = ("ROUGE-1", "ROUGE-L", "BLEU", "METEOR")


def report_to_json(report: dict[str, VariantReport]) -> dict:
    return {
        variant: {
            "rouge1": r.rouge1,
            "rougeL": r.rougeL,
            "bleu": r.bleu,
            "meteor": r.meteor,
            "n": r.n,
            "failures": r.failures,
        }
        for variant, r in report.items()
    }


def format_report_table(report: dict[str, VariantReport]) -> str:
    headers = ["Variant", *METRIC_TITLES, "N", "Failures"]
    rows = [
        [
            variant,
            *(f"{getattr(r, col):.2f}" for col in METRIC_COLUMNS),
            str(r.n),
            str(r.failures),
        ]
        for variant, r in report.items()
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def fmt(row):
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0]
        return "  ".join([first, *rest])
    lines = [fmt(headers), "  ".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def format_report_tsv(report: dict[str, VariantReport]) -> str:
    lines = ["\t".join(["variant", *METRIC_COLUMNS, "n", "failures"])]
    for variant, r in report.items():
        lines.append(
            "\t".join(
                [
                    variant,
                    *(f"{getattr(r, col):.6f}" for col in METRIC_COLUMNS),
                    str(r.n),
                    str(r.failures),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_report_figure(report: dict[str, VariantReport], path) -> None:
    """Grouped bars: one cluster of four metric bars per variant."""
    variants = list(report)
    x = range(len(variants))
    width = 0.2
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for i, (col, title) in enumerate(zip(METRIC_COLUMNS, METRIC_TITLES)):
        values = [getattr(report[v], col) for v in variants]
        ax.bar([xi + (i - 1.5) * width for xi in x], values, width, label=title)
    ax.set_xticks(list(x))
    ax.set_xticklabels(variants, rotation=15, ha="right")
    ax.set_ylabel("Mean score (0-100)")
    ax.set_ylim(0, 105)
    ax.set_title("Generation quality by instruction variant")
    ax.legend(ncol=4, fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report_files(report: dict[str, VariantReport], out_dir) -> list[Path]:
    """Write report.json, report.tsv, and report.png into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    json_path.write_text(json.dumps(report_to_json(report), indent=2) + "\n", encoding="utf-8")
    tsv_path = out / "report.tsv"
    tsv_path.write_text(format_report_tsv(report), encoding="utf-8")
    png_path = out / "report.png"
    render_report_figure(report, png_path)
    return [json_path, tsv_path, png_path]


def render_stats_figure(stats: list[PipelineStats], path) -> None:
    """Record counts surviving each preprocessing stage."""
    stages = [s.stage for s in stats]
    outputs = [s.output_count for s in stats]
    dropped = [s.dropped for s in stats]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(stages, outputs, label="kept", color="#4878d0")
    ax.bar(stages, dropped, bottom=outputs, label="dropped", color="#d65f5f")
    ax.set_ylabel("Records")
    ax.set_title("Corpus survival by preprocessing stage")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
