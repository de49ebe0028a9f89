from __future__ import annotations

import numpy as np
import pytest

from revstyle.corpus import Article, AuthorProfile
from revstyle.econometrics import (
    DesignMatrix,
    EconometricsError,
    IdentificationError,
    RankDeficiencyError,
    SeparationError,
    assemble_design,
    coefficient_table,
    fit_multinomial_logit,
    fit_ols_fe,
    mnl_gradient,
    mnl_loglikelihood,
    parse_model_spec,
    predict_class_probs,
    significance_stars,
)

from scipy.stats import norm

Z90, Z95, Z99 = norm.isf(0.05), norm.isf(0.025), norm.isf(0.005)


def lsdv(y, X, dummy_blocks):
    """Reference estimator: plain OLS with explicit group dummies."""
    parts = [X]
    for i, codes in enumerate(dummy_blocks):
        D = np.eye(codes.max() + 1)[codes]
        parts.append(D if i == 0 else D[:, 1:])  # drop one level after the first block
    Xl = np.column_stack(parts)
    beta = np.linalg.lstsq(Xl, y, rcond=None)[0]
    resid = y - Xl @ beta
    XtXi = np.linalg.inv(Xl.T @ Xl)
    hc1 = XtXi @ (Xl * (resid**2)[:, None]).T @ Xl @ XtXi * (len(y) / (len(y) - Xl.shape[1]))
    return beta[: X.shape[1]], np.sqrt(np.diag(hc1))[: X.shape[1]]


def random_panel(rng, n_groups=8, n_per=5, two_way=False):
    n = n_groups * n_per
    codes = np.repeat(np.arange(n_groups), n_per)
    X = rng.normal(size=(n, 2))
    y = X @ np.array([1.0, -2.0]) + rng.normal(size=n_groups)[codes] + rng.normal(size=n)
    groups = {"article": tuple(f"g{c}" for c in codes)}
    blocks = [codes]
    if two_way:
        months = rng.integers(0, 4, size=n)
        y = y + rng.normal(size=4)[months]
        groups["date"] = tuple(f"m{m}" for m in months)
        blocks.append(months)
    design = DesignMatrix(y=y, X=X, names=("x1", "x2"), groups=groups)
    return design, y, X, blocks


# --- stars -------------------------------------------------------------------


def test_star_thresholds():
    assert significance_stars(1.0, 1.0) == ""
    assert significance_stars(1.7, 1.0) == "*"
    assert significance_stars(2.0, 1.0) == "**"
    assert significance_stars(3.0, 1.0) == "***"
    assert significance_stars(-3.0, 1.0) == "***"


def test_star_boundaries_inclusive():
    assert significance_stars(Z90, 1.0) == "*"
    assert significance_stars(Z95, 1.0) == "**"
    assert significance_stars(Z99, 1.0) == "***"


def test_stars_degenerate_se():
    assert significance_stars(0.0, 0.0) == ""
    assert significance_stars(1.0, 0.0) == "***"


# --- multinomial logit ---------------------------------------------------------


def simulate_mnl(rng, n, true):
    p_dim = true.shape[1]
    X = np.column_stack([np.ones(n), rng.normal(size=(n, p_dim - 1))])
    eta = np.column_stack([np.zeros(n)] + [X @ b for b in true])
    p = np.exp(eta - eta.max(axis=1, keepdims=True))
    p /= p.sum(axis=1, keepdims=True)
    u = rng.random(n)
    y = (p.cumsum(axis=1) < u[:, None]).sum(axis=1)
    names = tuple(["const"] + [f"x{i}" for i in range(1, p_dim)])
    return DesignMatrix(y=y, X=X, names=names, groups={})


def test_logit_recovers_coefficients():
    rng = np.random.default_rng(1)
    true = np.array([[0.3, -0.5, 0.8], [-0.4, 0.9, -0.2]])
    fit = fit_multinomial_logit(simulate_mnl(rng, 8000, true))
    assert fit.converged and not fit.used_ridge
    assert np.abs(fit.coef - true).max() < 0.12


def test_intercept_only_matches_frequencies():
    rng = np.random.default_rng(2)
    y = rng.integers(0, 4, size=3000)
    design = DesignMatrix(y=y, X=np.ones((3000, 1)), names=("const",), groups={})
    probs = predict_class_probs(fit_multinomial_logit(design), {})
    freqs = np.bincount(y, minlength=4) / 3000
    assert np.abs(probs - freqs).max() < 1e-9


def test_loglik_path_is_nondecreasing():
    rng = np.random.default_rng(3)
    true = np.array([[0.2, 0.5], [-0.3, -0.7]])
    fit = fit_multinomial_logit(simulate_mnl(rng, 1000, true))
    path = np.array(fit.ll_path)
    assert np.all(np.diff(path) >= -1e-9)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    design = simulate_mnl(rng, 500, np.array([[0.2, 0.5], [-0.3, -0.7]]))
    X, y = design.X, design.y
    h = 1e-5
    for _ in range(5):
        theta = rng.normal(scale=0.5, size=(2, 2))
        grad = mnl_gradient(X, y, theta)
        flat = theta.ravel()
        fd = np.empty(flat.size)
        for k in range(flat.size):
            up, dn = flat.copy(), flat.copy()
            up[k] += h
            dn[k] -= h
            fd[k] = (mnl_loglikelihood(X, y, up) - mnl_loglikelihood(X, y, dn)) / (2 * h)
        rel = np.abs(grad.ravel() - fd) / (1.0 + np.abs(fd))
        assert rel.max() < 1e-6


def test_perfect_separation_detected():
    x = np.concatenate([np.full(50, -1.0), np.full(50, 1.0)])
    y = (x > 0).astype(int)
    design = DesignMatrix(y=y, X=np.column_stack([np.ones(100), x]),
                          names=("const", "x"), groups={})
    with pytest.raises(SeparationError, match="class 1"):
        fit_multinomial_logit(design)


def test_rank_deficiency_names_columns():
    rng = np.random.default_rng(5)
    x = rng.normal(size=100)
    X = np.column_stack([np.ones(100), x, 2 * x])
    design = DesignMatrix(y=rng.integers(0, 2, 100), X=X,
                          names=("const", "x", "x_copy"), groups={})
    with pytest.raises(RankDeficiencyError) as err:
        fit_multinomial_logit(design)
    assert "x_copy" in str(err.value) or "x" in str(err.value)


def test_pseudo_r2_zero_for_intercept_only():
    rng = np.random.default_rng(6)
    y = rng.integers(0, 3, size=500)
    design = DesignMatrix(y=y, X=np.ones((500, 1)), names=("const",), groups={})
    fit = fit_multinomial_logit(design)
    assert fit.pseudo_r_squared() == pytest.approx(0.0, abs=1e-9)


def test_per_class_results():
    rng = np.random.default_rng(7)
    fit = fit_multinomial_logit(simulate_mnl(rng, 1000, np.array([[0.2, 0.5], [-0.3, -0.7]])))
    per = fit.per_class()
    assert list(per) == [1, 2]
    for res in per.values():
        assert set(res.coefficients) == {"const", "x1"}
        assert res.n_obs == 1000


def test_robust_and_classical_vce_both_work():
    rng = np.random.default_rng(8)
    design = simulate_mnl(rng, 2000, np.array([[0.2, 0.5], [-0.3, -0.7]]))
    robust = fit_multinomial_logit(design, vce="robust")
    classical = fit_multinomial_logit(design, vce="classical")
    assert np.abs(robust.coef - classical.coef).max() < 1e-10
    assert not np.allclose(robust.se, classical.se)  # different estimators
    assert np.abs(robust.se / classical.se - 1).max() < 0.25  # but same scale


# --- fixed-effects OLS ---------------------------------------------------------


def test_within_matches_lsdv_one_way():
    rng = np.random.default_rng(10)
    design, y, X, blocks = random_panel(rng)
    fit = fit_ols_fe(design, fe=("article",))
    beta, se = lsdv(y, X, blocks)
    ours = np.array([fit.coefficients["x1"], fit.coefficients["x2"]])
    ours_se = np.array([fit.robust_se["x1"], fit.robust_se["x2"]])
    np.testing.assert_allclose(ours, beta, atol=1e-10)
    np.testing.assert_allclose(ours_se, se, atol=1e-10)


def test_within_matches_lsdv_two_way():
    rng = np.random.default_rng(11)
    design, y, X, blocks = random_panel(rng, n_groups=12, n_per=6, two_way=True)
    fit = fit_ols_fe(design, fe=("article", "date"))
    beta, se = lsdv(y, X, blocks)
    ours = np.array([fit.coefficients["x1"], fit.coefficients["x2"]])
    ours_se = np.array([fit.robust_se["x1"], fit.robust_se["x2"]])
    np.testing.assert_allclose(ours, beta, atol=1e-9)
    np.testing.assert_allclose(ours_se, se, atol=1e-9)


def test_no_fe_matches_plain_ols():
    rng = np.random.default_rng(12)
    X = np.column_stack([np.ones(200), rng.normal(size=200)])
    y = X @ np.array([0.5, 2.0]) + rng.normal(size=200)
    design = DesignMatrix(y=y, X=X, names=("const", "x"), groups={})
    fit = fit_ols_fe(design)
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    assert fit.coefficients["x"] == pytest.approx(beta[1], abs=1e-12)
    assert fit.converged


def test_dead_column_raises_identification_error():
    # a column constant within every group dies under the within transform
    rng = np.random.default_rng(13)
    codes = np.repeat(np.arange(10), 4)
    X = np.column_stack([rng.normal(size=40), codes.astype(float)])
    y = rng.normal(size=40)
    design = DesignMatrix(y=y, X=X, names=("x1", "group_level"),
                          groups={"article": tuple(f"g{c}" for c in codes)})
    with pytest.raises(IdentificationError, match="group_level"):
        fit_ols_fe(design, fe=("article",))


def test_zero_dof_raises():
    rng = np.random.default_rng(14)
    codes = np.arange(6)  # singleton groups absorb everything
    design = DesignMatrix(
        y=rng.normal(size=6), X=rng.normal(size=(6, 2)), names=("x1", "x2"),
        groups={"article": tuple(f"g{c}" for c in codes)},
    )
    with pytest.raises(EconometricsError):
        fit_ols_fe(design, fe=("article",))


def test_r_squared_uses_untransformed_y():
    rng = np.random.default_rng(15)
    design, y, X, blocks = random_panel(rng)
    fit = fit_ols_fe(design, fe=("article",))
    codes = blocks[0]
    D = np.eye(codes.max() + 1)[codes]
    Xl = np.column_stack([X, D])
    beta = np.linalg.lstsq(Xl, y, rcond=None)[0]
    resid = y - Xl @ beta
    r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
    assert fit.r_squared == pytest.approx(r2, abs=1e-10)


def test_vce_options():
    rng = np.random.default_rng(16)
    design, y, X, blocks = random_panel(rng)
    hc1 = fit_ols_fe(design, fe=("article",), vce="HC1")
    hc0 = fit_ols_fe(design, fe=("article",), vce="HC0")
    n, p, g = len(y), 2, 8
    factor = np.sqrt(n / (n - p - g))
    assert hc1.robust_se["x1"] == pytest.approx(hc0.robust_se["x1"] * factor, rel=1e-12)
    classical = fit_ols_fe(design, fe=("article",), vce="classical")
    assert classical.vce == "classical"
    with pytest.raises(EconometricsError):
        fit_ols_fe(design, vce="HC9")


def test_more_than_two_fe_dimensions_rejected():
    design = DesignMatrix(
        y=np.zeros(4), X=np.ones((4, 1)), names=("x",),
        groups={"a": ("1", "1", "2", "2"), "b": ("1", "2", "1", "2"), "c": ("1", "1", "1", "2")},
    )
    with pytest.raises(EconometricsError):
        fit_ols_fe(design, fe=("a", "b", "c"))


# --- tables ---------------------------------------------------------------------


def two_fits():
    rng = np.random.default_rng(20)
    design, *_ = random_panel(rng)
    fit = fit_ols_fe(design, fe=("article",))
    return {"rule1a": fit, "rule4": fit}


def test_table_text_layout():
    text = coefficient_table(two_fits(), "article_fe").to_text()
    lines = text.splitlines()
    assert "rule1a" in lines[0] and "rule4" in lines[0]
    assert any(line.strip().startswith("x1") for line in lines)
    assert any("(" in line and ")" in line for line in lines)  # se row
    assert any("Article FE" in line and "Yes" in line for line in lines)
    assert any("Observations" in line for line in lines)
    assert any("R-squared" in line for line in lines)
    assert text.rstrip().endswith("* p<0.1, ** p<0.05, *** p<0.01.")


def test_table_time_layout_mentions_controls():
    text = coefficient_table(two_fits(), "time_fe").to_text()
    assert "Month FE" in text and "Controls" in text


def test_table_csv_shape():
    csv_text = coefficient_table(two_fits(), "article_fe").to_csv()
    header = csv_text.splitlines()[0].split(",")
    assert header == ["regressor", "rule1a", "rule1a_se", "rule4", "rule4_se"]


def test_table_unknown_layout():
    with pytest.raises(EconometricsError):
        coefficient_table(two_fits(), "fancy")


# --- model specs and design assembly ---------------------------------------------


def test_parse_model_spec(tmp_path):
    path = tmp_path / "m.cfg"
    path.write_text(
        "model = ols\nresponse = rule1a, rule4\nregressors = Version1,Version2\n"
        "fe = article\nvce = HC1\n",
        encoding="utf-8",
    )
    spec = parse_model_spec(path)
    assert spec.model == "ols"
    assert spec.responses == ("rule1a", "rule4")
    assert spec.fe == ("article",)


def test_parse_model_spec_rejects_unknown_keys(tmp_path):
    path = tmp_path / "m.cfg"
    path.write_text("model = ols\nresponse = rule1a\nregressors = const\nbananas = 3\n")
    with pytest.raises(EconometricsError, match="bananas"):
        parse_model_spec(path)


def test_parse_model_spec_logit_single_response(tmp_path):
    path = tmp_path / "m.cfg"
    path.write_text("model = logit\nresponse = rule1a, rule4\nregressors = const\n")
    with pytest.raises(EconometricsError):
        parse_model_spec(path)


def panel_articles():
    arts = []
    for p in range(3):
        authors = (AuthorProfile(name=f"au{p}", country="US" if p else "CN",
                                 gender="female" if p == 0 else "male",
                                 papers_before_2021=5 * p),)
        for label in range(3):
            arts.append(Article(
                id=f"p{p}-r{label}", text="Word " * (10 + label) + ".",
                field="CS" if p < 2 else "Maths",
                updated=f"2021-0{p + 1}-10", revision_label=label,
                authors=authors, paper_id=f"p{p}",
            ))
    return arts


def test_assemble_design_rule_response(lexicons):
    design = assemble_design(panel_articles(), "rule1a", ("const", "Version1", "Version2"),
                             lexicons=lexicons)
    assert design.names == ("const", "Version1", "Version2")
    assert design.X[:, 0].tolist() == [1.0] * 9
    # labels cycle 0,1,2 per paper
    assert design.X[1, 1] == 1.0 and design.X[2, 2] == 1.0
    assert design.y.tolist() == [10.0, 11.0, 12.0] * 3
    assert design.groups["article"] == tuple(f"p{p}" for p in range(3) for _ in range(3))
    assert design.groups["date"][0] == "2021-01"


def test_assemble_design_label_response_and_covariates(lexicons):
    design = assemble_design(panel_articles(), "revision_label",
                             ("const", "Female", "NonNative", "CS"), lexicons=lexicons,
                             normalize=False)
    female = design.X[:, design.names.index("Female")]
    assert female[:3].tolist() == [1.0, 1.0, 1.0] and female[3:].sum() == 0
    nonnative = design.X[:, design.names.index("NonNative")]
    assert nonnative[:3].tolist() == [1.0, 1.0, 1.0]


def test_assemble_design_unknown_regressor(lexicons):
    with pytest.raises(EconometricsError, match="Bananas"):
        assemble_design(panel_articles(), "rule1a", ("const", "Bananas"), lexicons=lexicons)
