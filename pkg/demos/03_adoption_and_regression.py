"""
Adoption series and regression tables
=====================================

Two ways of asking "who picked the tool up, and what did it change":

1. A baseline-adjusted monthly adoption series — the share of articles
   flagged as revised, minus each group's own pre-event mean, so groups
   with different starting levels land on a common zero line.
2. Regression tables. A multinomial logit relates the chosen revision
   style to author covariates; an OLS with article fixed effects
   measures what each revision style does to a writing metric within
   the same paper.
"""
import numpy as np

from revstyle import (
    Article,
    AuthorProfile,
    adoption_series,
    assemble_design,
    coefficient_table,
    fit_multinomial_logit,
    fit_ols_fe,
)

from _synth import styled_text

rng = np.random.default_rng(7)

# --- 1. adoption by subgroup --------------------------------------------------

# Nonnative-author articles adopt at 30% after the event, native ones at
# 15%; both sit at a 10% baseline before it.
MONTHS = [f"2022-{m:02d}" for m in range(3, 13)]
EVENT = "2022-09"

articles = []
for month in MONTHS:
    for j in range(150):
        nonnative = j % 2 == 1
        rate = (0.30 if nonnative else 0.15) if month >= EVENT else 0.10
        country = "CN" if nonnative else "US"
        articles.append(
            Article(
                id=f"a-{month}-{j}",
                text="Placeholder text.",
                field="CS",
                updated=f"{month}-10",
                revision_label=0,
                adopter_flag=bool(rng.random() < rate),
                authors=[AuthorProfile(name=f"Author {j}", country=country)],
            )
        )

series = adoption_series(
    articles,
    group_filters={"native": "nativeness=native", "nonnative": "nativeness=nonnative"},
    event_month=EVENT,
)
print("adjusted adoption (percentage points over own baseline)")
print("month      native  nonnative")
for i, month in enumerate(series["native"].months):
    native = series["native"].adjusted[i]
    nonnat = series["nonnative"].adjusted[i]
    marker = "  <- event" if month == EVENT else ""
    print(f"{month}  {native:+7.2f}  {nonnat:+9.2f}{marker}")

# --- 2. who adopts which style: multinomial logit ------------------------------

# One label per article, 0 = untouched. Nonnative authors are more
# likely to use the tool at all, and seniority shifts the style choice.
logit_articles = []
for j in range(3000):
    nonnative = j % 2 == 1
    senior = j % 3 == 0
    p_use = 0.55 if nonnative else 0.30
    if rng.random() < p_use:
        label = int(rng.integers(1, 7))
    else:
        label = 0
    logit_articles.append(
        Article(
            id=f"l-{j}",
            text="Placeholder text.",
            field="CS",
            updated="2023-01-10",
            revision_label=label,
            authors=[AuthorProfile(
                name=f"Author {j}",
                country="CN" if nonnative else "US",
                gender="female" if j % 5 < 2 else "male",
                papers_before_2021=30 if senior else 2,
                first_paper_year=2005 if senior else 2019,
            )],
        )
    )

design = fit = None
design = assemble_design(logit_articles, "revision_label",
                         ["const", "Female", "NonNative", "PaperSeniority"])
fit = fit_multinomial_logit(design)
table = coefficient_table(
    {f"Version {cls}": res for cls, res in sorted(fit.per_class().items())}, layout="logit"
)
print()
print("style choice vs author covariates (baseline: label 0)")
print(table.to_text())

# --- 3. what revision does to a metric: article fixed effects -------------------

# A panel of papers, each with its original and six rewrites. Version k
# drops roughly 4*k words, so the Version dummies recover -4k against
# the within-paper mean once article effects are absorbed.
panel = []
for paper in range(80):
    base = styled_text(rng, 0, n_tokens=60 + int(rng.integers(20)))
    for version in range(7):
        words = base.split()
        keep = len(words) - 4 * version
        panel.append(
            Article(
                id=f"p{paper:03d}-v{version}",
                text=" ".join(words[:keep]) + ".",
                field="CS",
                updated=f"2021-{7 + paper % 3:02d}-10",
                revision_label=version,
                paper_id=f"p{paper:03d}",
            )
        )

ols_design = assemble_design(panel, "rule1a", [f"Version{k}" for k in range(1, 7)])
ols_fit = fit_ols_fe(ols_design, fe=("article",), vce="HC1")
print("word count vs revision version, within papers")
print(coefficient_table({"rule1a": ols_fit}, layout="article_fe").to_text())
