"""Text, JSON and CSV renderings of score reports.

Text tables print scores as percentages with one decimal, like published
result tables; single-result summaries print [0, 1] values to three
decimals. JSON always carries raw [0, 1] floats with sorted keys.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping

from .consistency import ConsistencyMatrix
from .smatch import MatchResult
from .subscores import Aspect, BreakdownReport

FORMATS = ("text", "json", "csv")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _pct(x) -> str:
    return f"{100 * float(x):.1f}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = []
    for k, row in enumerate([header] + rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def render_score(result: MatchResult, fmt: str, metric: str = "smatch", **meta) -> str:
    if fmt == "json":
        return _json({"metric": metric, **result.as_dict(), **meta})
    if fmt == "csv":
        d = result.as_dict()
        keys = ["precision", "recall", "f1", "matched", "pred_triples", "gold_triples", "pairs"]
        return _csv([["metric"] + keys, [metric] + [d[k] for k in keys]])
    lines = [
        f"Metric     {metric}",
        f"Precision  {float(result.precision):.3f}",
        f"Recall     {float(result.recall):.3f}",
        f"F1         {float(result.f1):.3f}",
        f"Pairs      {result.pairs}",
    ]
    return "\n".join(lines) + "\n"


def render_breakdown(report: BreakdownReport, fmt: str, overall_key: str = "smatch") -> str:
    rows = report.rows()
    if fmt == "json":
        out = {key: _prf(res) for key, _, res in rows}
        if overall_key != "smatch":
            out["metric"] = overall_key
        return _json(out)
    if fmt == "csv":
        return _csv(
            [["metric", "precision", "recall", "f1"]]
            + [[key, float(r.precision), float(r.recall), float(r.f1)] for key, _, r in rows]
        )
    label = {"smatch": "SMATCH", "s2match": "S2MATCH"}.get(overall_key, overall_key)
    body = [
        [label if key == "smatch" else name, _pct(r.precision), _pct(r.recall), _pct(r.f1)]
        for key, name, r in rows
    ]
    return _table(["Metric", "P", "R", "F1"], body)


def _prf(result: MatchResult) -> dict:
    return {
        "precision": float(result.precision),
        "recall": float(result.recall),
        "f1": float(result.f1),
    }


def render_consistency(
    matrices: Mapping[Aspect | None, ConsistencyMatrix], fmt: str, metric: str = "smatch"
) -> str:
    """One row per metric/aspect, one column per unordered language pair."""
    first = next(iter(matrices.values()))
    pairs = first.pairs()
    names = [f"{x}-{y}" for x, y in pairs]

    def key(aspect):
        return metric if aspect is None else aspect.value

    def label(aspect):
        return metric.upper() if aspect is None else aspect.label

    if fmt == "json":
        return _json(
            {
                "languages": list(first.languages),
                "pairs": names,
                "rows": {
                    key(a): {n: _prf(m[p]) for n, p in zip(names, pairs)}
                    for a, m in matrices.items()
                },
            }
        )
    if fmt == "csv":
        rows = [["metric", "pair", "precision", "recall", "f1"]]
        for a, m in matrices.items():
            for n, p in zip(names, pairs):
                r = m[p]
                rows.append([key(a), n, float(r.precision), float(r.recall), float(r.f1)])
        return _csv(rows)
    body = [[label(a)] + [_pct(m[p].f1) for p in pairs] for a, m in matrices.items()]
    return _table(["Metric"] + names, body)


def render_values(values: Mapping[str, float], fmt: str, title: str = "") -> str:
    """Flat name -> value report (MT quality numbers)."""
    if fmt == "json":
        return _json(dict(values))
    if fmt == "csv":
        return _csv([list(values), list(values.values())])
    width = max(len(k) for k in values)
    head = f"{title}\n" if title else ""
    return head + "".join(f"{k.ljust(width)}  {v:.3f}\n" for k, v in values.items())
