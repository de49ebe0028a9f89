"""End-to-end acceptance checks for the toolkit.

One test per criterion, in a fixed order. Each prints a single
`[acceptance N] PASS/FAIL` line straight to the terminal (bypassing
capture) and then asserts, so the verdict survives both quiet and
verbose pytest runs. Estimators are checked against independent
reference implementations kept inside this file.
"""
from __future__ import annotations

import re
import time
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from revstyle.cli import main
from revstyle.corpus import save_corpus
from revstyle.detector import (
    EvalReport,
    adoption_series,
    crossval_train,
    evaluate,
    metrics_from_counts,
    temporal_split,
)
from revstyle.econometrics import (
    DesignMatrix,
    fit_multinomial_logit,
    fit_ols_fe,
    mnl_gradient,
    mnl_loglikelihood,
    predict_class_probs,
)
from revstyle.rules import measure_corpus
from revstyle.similarity import did_statistic, cosine, group_centroid, vectorize

from synthgen import adoption_corpus, two_style_corpus


def announce(capsys, n: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'} — {detail}")


# --- 1: rule metrics on the bundled revision example ------------------------------


def test_acceptance_1_rule_counts(capsys, fixture_corpus, lexicons):
    t0 = time.perf_counter()
    rows = measure_corpus(fixture_corpus, lexicons)
    elapsed = time.perf_counter() - t0

    by_label = {a.revision_label: vec for a, (_, vec) in zip(
        sorted(fixture_corpus, key=lambda a: a.id), rows)}
    expected = {0: 194, 1: 173, 2: 172, 3: 163, 4: 162, 5: 172}
    problems = []
    for label, want in expected.items():
        got = by_label[label].rule1a
        if abs(got - want) > 2:
            problems.append(f"label {label}: rule1a {got} not within 2 of {want}")
    if elapsed >= 1.0:
        problems.append(f"took {elapsed:.3f}s (budget 1s)")

    counts = ", ".join(str(int(by_label[k].rule1a)) for k in sorted(expected))
    announce(capsys, 1, not problems,
             f"word counts [{counts}] vs pinned targets, {elapsed * 1000:.0f}ms")
    assert not problems, "; ".join(problems)


# --- 2: estimators vs independent oracles -----------------------------------------


def _dummy_ols(y, X, codes, vce="HC1"):
    """Reference route: explicit group dummies instead of the within transform."""
    D = np.eye(codes.max() + 1)[codes]
    Xl = np.column_stack([X, D])
    beta = np.linalg.lstsq(Xl, y, rcond=None)[0]
    resid = y - Xl @ beta
    XtXi = np.linalg.inv(Xl.T @ Xl)
    meat = (Xl * (resid**2)[:, None]).T @ Xl
    cov = XtXi @ meat @ XtXi * (len(y) / (len(y) - Xl.shape[1]))
    return beta[: X.shape[1]], np.sqrt(np.diag(cov))[: X.shape[1]]


def test_acceptance_2_estimator_oracles(capsys):
    t0 = time.perf_counter()
    problems = []

    worst_coef = worst_se = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n_groups = int(rng.integers(3, 7))
        n_per = int(rng.integers(3, 8))
        n = n_groups * n_per
        assert n <= 50
        codes = np.repeat(np.arange(n_groups), n_per)
        X = rng.normal(size=(n, 2))
        y = X @ np.array([1.0, -2.0]) + rng.normal(size=n_groups)[codes] + rng.normal(size=n)
        design = DesignMatrix(
            y=y, X=X, names=("x1", "x2"), groups={"article": tuple(f"g{c}" for c in codes)}
        )
        fit = fit_ols_fe(design, fe=("article",), vce="HC1")
        ref_beta, ref_se = _dummy_ols(y, X, codes)
        got_beta = np.array([fit.coefficients[n_] for n_ in ("x1", "x2")])
        got_se = np.array([fit.robust_se[n_] for n_ in ("x1", "x2")])
        worst_coef = max(worst_coef, float(np.abs(got_beta - ref_beta).max()))
        worst_se = max(worst_se, float(np.abs(got_se - ref_se).max()))
    if worst_coef > 1e-8:
        problems.append(f"within vs dummy OLS coefficients differ by {worst_coef:.2e}")
    if worst_se > 1e-8:
        problems.append(f"within vs dummy OLS robust SEs differ by {worst_se:.2e}")

    rng = np.random.default_rng(12345)
    n, k1, p = 60, 2, 3
    X = np.column_stack([np.ones(n), rng.normal(size=(n, p - 1))])
    y = rng.integers(0, k1 + 1, size=n)
    h = 1e-5
    worst_rel = 0.0
    for _ in range(20):
        theta = rng.normal(size=k1 * p) * 0.5
        grad = mnl_gradient(X, y, theta)
        fd = np.empty_like(grad)
        for j in range(len(theta)):
            step = np.zeros_like(theta)
            step[j] = h
            fd[j] = (
                mnl_loglikelihood(X, y, theta + step) - mnl_loglikelihood(X, y, theta - step)
            ) / (2 * h)
        rel = float(np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1.0))
        worst_rel = max(worst_rel, rel)
    if worst_rel > 1e-6:
        problems.append(f"analytic vs central-difference gradient rel err {worst_rel:.2e}")

    elapsed = time.perf_counter() - t0
    if elapsed >= 30.0:
        problems.append(f"took {elapsed:.1f}s (budget 30s)")
    announce(capsys, 2, not problems,
             f"100 panels: max coef diff {worst_coef:.1e}, max SE diff {worst_se:.1e}; "
             f"20 gradient points: max rel err {worst_rel:.1e}; {elapsed:.1f}s")
    assert not problems, "; ".join(problems)


# --- 3: large-sample logit behaviour ------------------------------------------------


def test_acceptance_3_logit_recovery(capsys):
    t0 = time.perf_counter()
    problems = []

    rng = np.random.default_rng(7)
    n = 20_000
    true = np.array([[0.4, -0.8, 0.6]])
    X = np.column_stack([np.ones(n), rng.normal(size=(n, 2))])
    eta = np.column_stack([np.zeros(n), X @ true[0]])
    prob = np.exp(eta - eta.max(axis=1, keepdims=True))
    prob /= prob.sum(axis=1, keepdims=True)
    y = (prob.cumsum(axis=1) < rng.random(n)[:, None]).sum(axis=1)

    design = DesignMatrix(y=y, X=X, names=("const", "x1", "x2"), groups={})
    fit = fit_multinomial_logit(design)
    recovery = float(np.abs(fit.coef - true).max())
    if not fit.converged:
        problems.append("logit did not converge")
    if recovery > 0.05:
        problems.append(f"coefficient recovery off by {recovery:.4f} (tolerance 0.05)")

    base = DesignMatrix(y=y, X=np.ones((n, 1)), names=("const",), groups={})
    probs = predict_class_probs(fit_multinomial_logit(base), {})
    freqs = np.bincount(y, minlength=2) / n
    prob_err = float(np.abs(probs - freqs).max())
    if prob_err > 1e-6:
        problems.append(f"intercept-only probabilities off by {prob_err:.2e}")

    elapsed = time.perf_counter() - t0
    if elapsed >= 60.0:
        problems.append(f"took {elapsed:.1f}s (budget 60s)")
    announce(capsys, 3, not problems,
             f"n=20000 recovery err {recovery:.4f}, intercept-only err {prob_err:.1e}; {elapsed:.1f}s")
    assert not problems, "; ".join(problems)


# --- 4 & 7 share one trained detector ----------------------------------------------


@pytest.fixture(scope="module")
def protocol_run(lexicons):
    rng = np.random.default_rng(0)
    corpus = two_style_corpus(rng, 2100, ("2021-07", "2021-08", "2021-09")) + two_style_corpus(
        rng, 400, ("2021-10", "2021-11"), prefix="hold"
    )
    train, test = temporal_split(corpus)
    t0 = time.perf_counter()
    detector = crossval_train(
        train, scope_prompt=1, k=5, dim_grid=(2**14,), l2_grid=(1.0,), lexicons=lexicons, seed=0
    )
    report = evaluate(detector, test)
    elapsed = time.perf_counter() - t0
    return SimpleNamespace(
        detector=detector, report=report, elapsed=elapsed, n_train=len(train), n_test=len(test)
    )


def test_acceptance_4_detector_protocol(capsys, protocol_run):
    report = protocol_run.report
    problems = []
    if report.accuracy <= 0.95:
        problems.append(f"test accuracy {report.accuracy:.4f} not > 0.95")
    p, r = report.precision, report.recall
    if p + r > 0 and abs(report.f1 - 2 * p * r / (p + r)) > 1e-9:
        problems.append("F1 is not the harmonic mean of precision and recall")
    for i, row in enumerate(report.confusion):
        if abs(float(np.sum(row)) - 100.0) > 0.01:
            problems.append(f"confusion row {i} sums to {float(np.sum(row)):.4f}")
    rendered = report.format_confusion()
    if not re.search(r"\d+\.\d{2}%", rendered):
        problems.append("confusion cells are not rendered as two-decimal percentages")
    sample = EvalReport(
        precision=1.0, recall=1.0, accuracy=1.0, f1=1.0, classes=[0, 1],
        confusion=np.array([[92.25, 7.75], [0.0, 100.0]]), records=[],
        scope_field="all", scope_prompt=1, threshold=0.5, n_test=400,
    )
    if "92.25%" not in sample.format_confusion():
        problems.append("369/400 row does not render as '92.25%'")
    if protocol_run.elapsed >= 120.0:
        problems.append(f"train+eval took {protocol_run.elapsed:.1f}s (budget 120s)")

    announce(capsys, 4, not problems,
             f"{protocol_run.n_train} train / {protocol_run.n_test} test, "
             f"accuracy {report.accuracy:.4f}, {protocol_run.elapsed:.1f}s")
    assert not problems, "; ".join(problems)


# --- 5: metric arithmetic ------------------------------------------------------------


def test_acceptance_5_metric_arithmetic(capsys):
    m = metrics_from_counts(tp=9, fp=1, fn=3, tn=7)
    expected = {"precision": 0.9, "recall": 0.75, "accuracy": 0.8, "f1": 0.8182}
    problems = [
        f"{name}: got {m[name]:.6f}, want {want}"
        for name, want in expected.items()
        if abs(m[name] - want) > 1e-4
    ]
    announce(capsys, 5, not problems,
             "counts (9,1,3,7) -> " + ", ".join(f"{k} {m[k]:.4f}" for k in expected))
    assert not problems, "; ".join(problems)


# --- 6: similarity identities and DiD recovery ---------------------------------------


def test_acceptance_6_similarity_and_did(capsys):
    t0 = time.perf_counter()
    problems = []

    rng = np.random.default_rng(6)
    texts = [" ".join(f"w{rng.integers(40)}" for _ in range(30)) for _ in range(6)]
    vecs = [vectorize(t) for t in texts]
    if max(abs(cosine(v, v) - 1.0) for v in vecs) > 1e-12:
        problems.append("self-similarity deviates from 1")
    if abs(cosine(vectorize("alpha beta"), vectorize("gamma delta"))) > 1e-12:
        problems.append("disjoint vectors are not orthogonal")
    if max(abs(cosine(a, b) - cosine(b, a)) for a in vecs for b in vecs) > 1e-12:
        problems.append("cosine is not symmetric")
    pair = cosine(vectorize("alpha beta"), vectorize("alpha"))
    if abs(pair - 0.7071) > 1e-4:
        problems.append(f"unit-pair similarity {pair:.6f} not 0.7071")
    v = vecs[0]
    c = group_centroid([v, v, v])
    if abs(cosine(c, v) - 1.0) > 1e-12 or set(c.entries) != set(v.entries):
        problems.append("centroid of copies is not the vector itself")

    months = [f"2022-{m:02d}" for m in range(5, 13)] + ["2023-01", "2023-02"]
    treated = [(m, 0.5 + (0.1 if m >= "2022-11" else 0.0)) for m in months]
    control = [(m, 0.4) for m in months]
    res = did_statistic(treated, control, event_month="2022-11", n_boot=500, seed=0)
    if abs(res.estimate - 0.1) > 1e-9:
        problems.append(f"step DiD estimate {res.estimate:.12f} not 0.1")
    if not (res.ci_low - 1e-12 <= 0.1 <= res.ci_high + 1e-12):
        problems.append(f"95% CI [{res.ci_low:.6f}, {res.ci_high:.6f}] misses 0.1")

    elapsed = time.perf_counter() - t0
    if elapsed >= 10.0:
        problems.append(f"took {elapsed:.1f}s (budget 10s)")
    announce(capsys, 6, not problems,
             f"identities to 1e-12, DiD {res.estimate:.6f} in "
             f"[{res.ci_low:.4f}, {res.ci_high:.4f}]; {elapsed:.1f}s")
    assert not problems, "; ".join(problems)


# --- 7: adoption recovery -------------------------------------------------------------


def test_acceptance_7_adoption_recovery(capsys, protocol_run):
    problems = []
    months = tuple(
        f"{y}-{m:02d}" for y, lo, hi in ((2021, 11, 13), (2022, 1, 13), (2023, 1, 11))
        for m in range(lo, hi)
    )
    assert len(months) == 24 and months.index("2022-11") == 12
    rates = {m: (0.10 if m < "2022-11" else 0.25) for m in months}

    series = adoption_series(adoption_corpus(np.random.default_rng(20), months, rates,
                                             n_per_month=200))["all"]
    pre = [v for m, v in zip(series.months, series.adjusted) if m < "2022-11"]
    post = [v for m, v in zip(series.months, series.adjusted) if m >= "2022-11"]
    label_pre, label_post = abs(float(np.mean(pre))), float(np.mean(post))
    if label_pre > 1e-9:
        problems.append(f"label route: pre-event adjusted mean {label_pre:.2e}")
    if abs(label_post - 15.0) > 1.0:
        problems.append(f"label route: post-event mean {label_post:.3f} not within 1 of 15")

    corpus = adoption_corpus(np.random.default_rng(21), months, rates, n_per_month=800)
    detected = adoption_series(corpus, detector=protocol_run.detector)["all"]
    pre = [v for m, v in zip(detected.months, detected.adjusted) if m < "2022-11"]
    post = [v for m, v in zip(detected.months, detected.adjusted) if m >= "2022-11"]
    det_pre, det_post = abs(float(np.mean(pre))), float(np.mean(post))
    if det_pre > 1e-9:
        problems.append(f"detector route: pre-event adjusted mean {det_pre:.2e}")
    if abs(det_post - 15.0) > 1.0:
        problems.append(f"detector route: post-event mean {det_post:.3f} not within 1 of 15")

    announce(capsys, 7, not problems,
             f"15-point jump recovered: labels {label_post:.2f}, detector {det_post:.2f} "
             f"(pre-event means {label_pre:.1e} / {det_pre:.1e})")
    assert not problems, "; ".join(problems)


# --- 8: rerun determinism ---------------------------------------------------------------


def _snapshot(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.is_file()}


def _strip_timestamps(data: bytes) -> bytes:
    return b"\n".join(
        ln for ln in data.split(b"\n")
        if not ln.startswith(b"# timestamp=") and not ln.startswith(b"<!-- timestamp=")
    )


def test_acceptance_8_rerun_determinism(capsys, tmp_path, fixture_path):
    rng = np.random.default_rng(8)
    corpus = tmp_path / "corpus.jsonl"
    save_corpus(
        two_style_corpus(rng, 30, ("2021-07", "2021-08", "2021-09"))
        + two_style_corpus(rng, 15, ("2021-10", "2021-11"), prefix="hold"),
        corpus,
    )
    out = tmp_path / "out"
    commands = [
        ["rules", "--corpus", str(fixture_path), "--out", str(out)],
        ["similarity", "--corpus", str(corpus), "--group-a", "label=0",
         "--group-b", "label=1", "--out", str(out)],
        ["train", "--corpus", str(corpus), "--prompt", "1", "--dim-grid", "1024",
         "--l2-grid", "1.0", "--seed", "5", "--out", str(out)],
        ["eval", "--corpus", str(corpus), "--model", str(out / "detector.rsd"),
         "--out", str(out)],
        ["report", "--input", str(out / "similarity.csv"), "--kind", "similarity",
         "--out", str(out)],
    ]

    for argv in commands:
        assert main(argv) == 0, argv
    first = _snapshot(out)
    time.sleep(0.02)  # let wall-clock timestamps move so the header means something
    for argv in commands:
        assert main(argv) == 0, argv
    second = _snapshot(out)

    problems = []
    if first.keys() != second.keys():
        problems.append(f"artifact sets differ: {sorted(first)} vs {sorted(second)}")
    for name in sorted(first.keys() & second.keys()):
        if name == "detector.rsd":
            if first[name] != second[name]:
                problems.append("detector.rsd is not byte-identical")
        elif _strip_timestamps(first[name]) != _strip_timestamps(second[name]):
            problems.append(f"{name} differs beyond its timestamp header")

    announce(capsys, 8, not problems,
             f"{len(first)} artifacts identical across reruns modulo timestamp headers")
    assert not problems, "; ".join(problems)
