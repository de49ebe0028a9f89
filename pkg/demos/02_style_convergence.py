"""
Style convergence between two groups, with a difference-in-differences check
============================================================================

Two disciplines write in different styles until an event month, after
which one of them starts drifting toward the other (think: part of the
community adopting the same writing assistant). The monthly cosine
similarity between the groups' centroid term vectors picks the drift up,
and a difference-in-differences against a non-drifting control pair says
how much of the rise is the event rather than noise.
"""
from pathlib import Path

import numpy as np

from revstyle import Article, did_statistic, pairwise_series
from revstyle.charts import render_line_chart

from _synth import styled_text

rng = np.random.default_rng(42)
MONTHS = [f"2022-{m:02d}" for m in range(1, 13)]
EVENT = "2022-07"


def cohort(field: str, month: str, mix: float, tag: str) -> list[Article]:
    """25 articles; each is style 1 with probability `mix`, else style 0."""
    return [
        Article(
            id=f"{tag}-{field}-{month}-{j}",
            text=styled_text(rng, 1 if rng.random() < mix else 0),
            field=field,
            updated=f"{month}-15",
            revision_label=0,
        )
        for j in range(25)
    ]


# Treated pair: CS is always style 1; Maths starts at style 0 and mixes
# halfway toward style 1 after the event.
treated_corpus = []
for month in MONTHS:
    treated_corpus += cohort("CS", month, 1.0, "t")
    treated_corpus += cohort("Maths", month, 0.5 if month >= EVENT else 0.0, "t")

# Control pair: same construction, but Maths never moves.
control_corpus = []
for month in MONTHS:
    control_corpus += cohort("CS", month, 1.0, "c")
    control_corpus += cohort("Maths", month, 0.0, "c")

treated = pairwise_series(treated_corpus, group_a="field=CS", group_b="field=Maths",
                          label_a="cs", label_b="maths")
control = pairwise_series(control_corpus, group_a="field=CS", group_b="field=Maths",
                          label_a="cs", label_b="maths")

print("month      treated  control")
for month, t_val, c_val in zip(treated.months, treated.values, control.values):
    marker = "  <- event" if month == EVENT else ""
    print(f"{month}  {t_val:7.4f}  {c_val:7.4f}{marker}")

result = did_statistic(
    list(zip(treated.months, treated.values)),
    list(zip(control.months, control.values)),
    event_month=EVENT,
    n_boot=2000,
    seed=0,
)
print()
print(f"difference-in-differences: {result.estimate:+.4f} "
      f"(95% CI [{result.ci_low:+.4f}, {result.ci_high:+.4f}], "
      f"{result.n_pre} pre / {result.n_post} post months)")

# A line chart of both series, with the event month marked.
out_dir = Path(__file__).resolve().parent / "out"
out_dir.mkdir(exist_ok=True)
svg = render_line_chart(
    {
        "treated pair": list(zip(treated.months, treated.values)),
        "control pair": list(zip(control.months, control.values)),
    },
    title="Centroid similarity by month",
    y_label="cosine similarity",
    event_month=EVENT,
)
(out_dir / "convergence.svg").write_text(svg, encoding="utf-8")
print(f"chart written to {out_dir / 'convergence.svg'}")
