"""Self-contained estimation: multinomial logit and fixed-effects OLS.

Two estimators cover the package's regression needs. A damped-Newton
multinomial logistic regression (baseline class fixed at zero, log-sum-exp
stabilized, sandwich standard errors) models which revision style an
abstract follows. A within-transformation OLS with one- or two-way fixed
effects and HC1 robust errors measures rule-metric differences across
revision versions. Both are written against numpy/scipy linear algebra
only; no statistical modeling package is used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.stats import norm

from .corpus import COVARIATE_COLUMNS, build_covariates, covariate_value
from .rules import RULE_NAMES, measure_corpus
from .textproc import LexiconSet, load_lexicons

VERSION_COLUMNS = tuple(f"Version{k}" for k in range(1, 7))
TABLE_LAYOUTS = ("logit", "article_fe", "time_fe")

# Two-sided normal critical values for the 1% / 5% / 10% star levels.
_STAR_LEVELS = (
    (norm.isf(0.01 / 2), "***"),
    (norm.isf(0.05 / 2), "**"),
    (norm.isf(0.10 / 2), "*"),
)


class EconometricsError(ValueError):
    """Estimation errors: bad designs, failed identification, and the like."""


class RankDeficiencyError(EconometricsError):
    def __init__(self, columns: list[str]):
        self.columns = columns
        super().__init__(f"design matrix is rank deficient; offending columns: {', '.join(columns)}")


class SeparationError(EconometricsError):
    def __init__(self, class_id: int):
        self.class_id = class_id
        super().__init__(
            f"perfect separation detected for class {class_id}: "
            "coefficients diverge and the likelihood is unbounded"
        )


class IdentificationError(EconometricsError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"regressor {column!r} is constant within all fixed-effect groups")


@dataclass
class DesignMatrix:
    """Named regressors, response, and fixed-effect group keys per row."""

    y: np.ndarray
    X: np.ndarray
    names: tuple[str, ...]
    groups: dict[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.X = np.asarray(self.X, dtype=float)
        self.names = tuple(self.names)
        self.groups = {label: tuple(keys) for label, keys in self.groups.items()}
        if self.X.ndim != 2 or self.y.ndim != 1 or self.y.shape[0] != self.X.shape[0]:
            raise EconometricsError("design shapes do not line up")
        if len(self.names) != self.X.shape[1]:
            raise EconometricsError("one name per regressor column required")
        if len(set(self.names)) != len(self.names):
            raise EconometricsError("regressor names must be unique")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise EconometricsError("design contains missing or non-finite cells")
        for label, keys in self.groups.items():
            if len(keys) != self.X.shape[0]:
                raise EconometricsError(f"group keys for {label!r} do not match row count")

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass
class FitResult:
    coefficients: dict[str, float]
    robust_se: dict[str, float]
    stars: dict[str, str]
    n_obs: int
    r_squared: float | None
    log_likelihood: float | None
    converged: bool
    vce: str


def significance_stars(coef: float, se: float) -> str:
    """Stars at 10/5/1% two-sided normal levels; ties at a cutoff round up."""
    if not np.isfinite(coef) or not np.isfinite(se) or se < 0:
        return ""
    if se == 0:
        return "***" if coef != 0 else ""
    t = abs(coef / se)
    for cutoff, marker in _STAR_LEVELS:
        if t >= cutoff:
            return marker
    return ""


def _check_rank(X: np.ndarray, names: list[str]) -> None:
    _, r_diag, pivots = scipy.linalg.qr(X, mode="economic", pivoting=True)[0:3]
    diag = np.abs(np.diag(r_diag))
    if diag.size == 0:
        return
    tol = diag[0] * max(X.shape) * np.finfo(float).eps
    bad = [names[pivots[j]] for j in range(len(diag)) if diag[j] <= tol]
    if bad:
        raise RankDeficiencyError(sorted(bad))


# ---------------------------------------------------------------------------
# Multinomial logit
# ---------------------------------------------------------------------------


class _MNLProblem:
    """Log-likelihood, gradient, and Hessian for the baseline-zero logit."""

    def __init__(self, X: np.ndarray, y: np.ndarray, classes: list[int], baseline: int):
        self.X = X
        self.classes = classes
        self.nonbase = [c for c in classes if c != baseline]
        self.Y = np.column_stack([(y == c).astype(float) for c in self.nonbase])
        self.n, self.p = X.shape
        self.k1 = len(self.nonbase)

    def value(self, theta: np.ndarray):
        B = theta.reshape(self.k1, self.p)
        eta = self.X @ B.T
        m = np.maximum(eta.max(axis=1), 0.0)
        ez = np.exp(eta - m[:, None])
        denom = np.exp(-m) + ez.sum(axis=1)
        ll = float((eta * self.Y).sum() - (m + np.log(denom)).sum())
        probs = ez / denom[:, None]  # non-baseline class probabilities
        grad = ((self.Y - probs).T @ self.X).ravel()
        return ll, grad, probs

    def hessian(self, probs: np.ndarray) -> np.ndarray:
        k1, p = self.k1, self.p
        H = np.empty((k1 * p, k1 * p))
        for a in range(k1):
            for b in range(a, k1):
                w = probs[:, a] * ((1.0 if a == b else 0.0) - probs[:, b])
                block = -((self.X * w[:, None]).T @ self.X)
                H[a * p : (a + 1) * p, b * p : (b + 1) * p] = block
                if a != b:
                    H[b * p : (b + 1) * p, a * p : (a + 1) * p] = block
        return H


def mnl_loglikelihood(X, y, theta, baseline_class: int = 0) -> float:
    """Log-likelihood at explicit coefficients; the finite-difference
    gradient of this function is the test oracle for the fitted gradient."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = sorted(set(int(v) for v in y) | {baseline_class})
    problem = _MNLProblem(X, y, classes, baseline_class)
    ll, _, _ = problem.value(np.asarray(theta, dtype=float).ravel())
    return ll


def mnl_gradient(X, y, theta, baseline_class: int = 0) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = sorted(set(int(v) for v in y) | {baseline_class})
    problem = _MNLProblem(X, y, classes, baseline_class)
    _, grad, _ = problem.value(np.asarray(theta, dtype=float).ravel())
    return grad


@dataclass
class MultinomialLogitFit:
    classes: list[int]
    baseline: int
    names: list[str]
    coef: np.ndarray  # (K-1, p), rows follow non-baseline class order
    se: np.ndarray
    cov: np.ndarray
    log_likelihood: float
    null_log_likelihood: float
    ll_path: list[float]
    n_obs: int
    n_iter: int
    converged: bool
    used_ridge: bool
    vce: str

    @property
    def nonbaseline_classes(self) -> list[int]:
        return [c for c in self.classes if c != self.baseline]

    def pseudo_r_squared(self) -> float:
        if self.null_log_likelihood == 0.0:
            return 0.0
        return 1.0 - self.log_likelihood / self.null_log_likelihood

    def per_class(self) -> dict[int, FitResult]:
        out = {}
        for row, cls in enumerate(self.nonbaseline_classes):
            coefs = {name: float(self.coef[row, j]) for j, name in enumerate(self.names)}
            ses = {name: float(self.se[row, j]) for j, name in enumerate(self.names)}
            out[cls] = FitResult(
                coefficients=coefs,
                robust_se=ses,
                stars={name: significance_stars(coefs[name], ses[name]) for name in self.names},
                n_obs=self.n_obs,
                r_squared=self.pseudo_r_squared(),
                log_likelihood=self.log_likelihood,
                converged=self.converged,
                vce=self.vce,
            )
        return out


def fit_multinomial_logit(
    design: DesignMatrix,
    baseline_class: int = 0,
    max_iter: int = 500,
    grad_tol: float = 1e-8,
    ridge_fallback: float = 1e-8,
    separation_threshold: float = 50.0,
    vce: str = "robust",
) -> MultinomialLogitFit:
    """Maximum-likelihood multinomial logit with the baseline class pinned
    at zero coefficients.

    Damped Newton ascent with halving line search; converges when the
    gradient max-norm drops below grad_tol. A ridge of ridge_fallback is
    added only if the Hessian solve fails (never on the healthy path).
    Separation is flagged two ways: coefficient magnitudes beyond
    separation_threshold mid-iteration (assumes roughly unit-scale
    regressors), or an effectively unbounded likelihood at convergence
    (every observation fit with probability ~1).
    """
    y = design.y.astype(int)
    if not np.array_equal(y, design.y):
        raise EconometricsError("logit response must be integer class ids")
    classes = sorted(set(int(v) for v in y))
    if baseline_class not in classes:
        raise EconometricsError(f"baseline class {baseline_class} absent from response")
    if len(classes) < 2:
        raise EconometricsError("need at least 2 classes to fit a logit")

    if "const" in design.names:
        X, names = design.X, list(design.names)
    else:
        X = np.column_stack([np.ones(design.n), design.X])
        names = ["const"] + list(design.names)
    _check_rank(X, names)

    problem = _MNLProblem(X, y, classes, baseline_class)
    theta = np.zeros(problem.k1 * problem.p)
    ll, grad, probs = problem.value(theta)
    ll_path = [ll]
    converged = False
    used_ridge = False
    n_iter = 0

    for n_iter in range(1, max_iter + 1):
        if np.abs(grad).max() < grad_tol:
            converged = True
            n_iter -= 1
            break
        H = problem.hessian(probs)
        try:
            step = np.linalg.solve(H, grad)
            if not np.isfinite(step).all():
                raise np.linalg.LinAlgError("non-finite Newton step")
        except np.linalg.LinAlgError:
            if ridge_fallback <= 0:
                raise EconometricsError("singular Hessian and ridge fallback disabled") from None
            used_ridge = True
            step = np.linalg.solve(H - ridge_fallback * np.eye(H.shape[0]), grad)
        t = 1.0
        improved = False
        while t >= 1e-10:
            cand = theta - t * step
            ll_new, grad_new, probs_new = problem.value(cand)
            if np.isfinite(ll_new) and ll_new >= ll - 1e-12:
                theta, ll, grad, probs = cand, ll_new, grad_new, probs_new
                ll_path.append(ll)
                improved = True
                break
            t /= 2.0
        if not improved:
            break
        if np.abs(theta).max() > separation_threshold:
            B = theta.reshape(problem.k1, problem.p)
            row = int(np.abs(B).max(axis=1).argmax())
            raise SeparationError(problem.nonbase[row])
    else:
        n_iter = max_iter
    if not converged and np.abs(grad).max() < grad_tol:
        converged = True

    # Perfect separation leaves the likelihood unbounded: the optimizer stalls
    # at a flat gradient with every observation fit almost exactly.
    own_prob = np.where(
        problem.Y.any(axis=1), (problem.Y * probs).sum(axis=1), 1.0 - probs.sum(axis=1)
    )
    if own_prob.min() > 1.0 - 1e-6:
        B = theta.reshape(problem.k1, problem.p)
        row = int(np.abs(B).max(axis=1).argmax())
        raise SeparationError(problem.nonbase[row])

    B = theta.reshape(problem.k1, problem.p)
    info = -problem.hessian(probs)
    bread = np.linalg.inv(info)
    if vce == "robust":
        scores = ((problem.Y - probs)[:, :, None] * X[:, None, :]).reshape(problem.n, -1)
        meat = scores.T @ scores
        cov = bread @ meat @ bread
    elif vce == "classical":
        cov = bread
    else:
        raise EconometricsError(f"unknown vce {vce!r} for logit (robust or classical)")
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None)).reshape(problem.k1, problem.p)

    counts = np.array([(y == c).sum() for c in classes], dtype=float)
    null_ll = float((counts * np.log(counts / len(y))).sum())

    return MultinomialLogitFit(
        classes=classes,
        baseline=baseline_class,
        names=names,
        coef=B,
        se=se,
        cov=cov,
        log_likelihood=ll,
        null_log_likelihood=null_ll,
        ll_path=ll_path,
        n_obs=problem.n,
        n_iter=n_iter,
        converged=converged,
        used_ridge=used_ridge,
        vce=vce,
    )


def predict_class_probs(fit: MultinomialLogitFit, covariates) -> np.ndarray:
    """Class probabilities (aligned with fit.classes) for one observation or
    a sequence of observations given as name->value mappings."""
    single = isinstance(covariates, dict)
    rows = [covariates] if single else list(covariates)
    wanted = [n for n in fit.names if n != "const"]
    X = np.empty((len(rows), len(fit.names)))
    for i, row in enumerate(rows):
        extra = set(row) - set(wanted)
        missing = set(wanted) - set(row)
        if extra or missing:
            raise EconometricsError(
                f"covariate names do not match fit: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        X[i] = [1.0 if n == "const" else float(row[n]) for n in fit.names]
    eta_nonbase = X @ fit.coef.T
    eta = np.zeros((len(rows), len(fit.classes)))
    nonbase = fit.nonbaseline_classes
    for j, cls in enumerate(fit.classes):
        if cls != fit.baseline:
            eta[:, j] = eta_nonbase[:, nonbase.index(cls)]
    m = eta.max(axis=1, keepdims=True)
    ez = np.exp(eta - m)
    probs = ez / ez.sum(axis=1, keepdims=True)
    return probs[0] if single else probs


# ---------------------------------------------------------------------------
# OLS with fixed effects
# ---------------------------------------------------------------------------


def _group_demean(M: np.ndarray, codes: np.ndarray, n_groups: int) -> np.ndarray:
    counts = np.bincount(codes, minlength=n_groups).astype(float)
    means = np.empty((n_groups, M.shape[1]))
    for j in range(M.shape[1]):
        means[:, j] = np.bincount(codes, weights=M[:, j], minlength=n_groups) / counts
    return M - means[codes]


def fit_ols_fe(design: DesignMatrix, fe=(), vce: str = "HC1") -> FitResult:
    """OLS via the within transformation with up to two fixed-effect
    dimensions and heteroskedasticity-robust standard errors.

    Two-way effects use alternating demeaning iterated until the largest
    cell change is below 1e-10. HC1 applies a degrees-of-freedom correction
    counting the absorbed effects; vce accepts HC1, HC0, or classical.
    R-squared is reported for the untransformed model (fitted values
    include the absorbed effects).
    """
    fe = tuple(fe)
    if len(fe) > 2:
        raise EconometricsError("at most two fixed-effect dimensions are supported")
    for label in fe:
        if label not in design.groups:
            raise EconometricsError(f"fixed effect {label!r} has no group keys in the design")

    y, X = design.y, design.X
    n, p = X.shape
    codes_sizes = []
    for label in fe:
        _, codes = np.unique(np.asarray(design.groups[label], dtype=object), return_inverse=True)
        codes_sizes.append((codes, int(codes.max()) + 1))

    M = np.column_stack([y, X])
    if codes_sizes:
        for _ in range(10000):
            before = M.copy()
            for codes, n_groups in codes_sizes:
                M = _group_demean(M, codes, n_groups)
            if np.abs(M - before).max() < 1e-10:
                break
        else:
            raise EconometricsError("two-way demeaning did not converge")
    yd, Xd = M[:, 0], M[:, 1:]

    if codes_sizes:
        scale = np.maximum(1.0, np.abs(X).max(axis=0))
        dead = [design.names[j] for j in range(p) if np.abs(Xd[:, j]).max() <= 1e-8 * scale[j]]
        if dead:
            raise IdentificationError(dead[0])
    _check_rank(Xd, design.names)

    XtX = Xd.T @ Xd
    beta = np.linalg.solve(XtX, Xd.T @ yd)
    resid = yd - Xd @ beta

    if len(fe) == 0:
        df_absorbed = 0
    elif len(fe) == 1:
        df_absorbed = codes_sizes[0][1]
    else:
        df_absorbed = codes_sizes[0][1] + codes_sizes[1][1] - 1
    dof = n - p - df_absorbed
    if dof <= 0:
        raise EconometricsError(f"no residual degrees of freedom (n={n}, p={p}, absorbed={df_absorbed})")

    XtX_inv = np.linalg.inv(XtX)
    if vce in ("HC1", "HC0"):
        meat = Xd.T @ (Xd * (resid ** 2)[:, None])
        cov = XtX_inv @ meat @ XtX_inv
        if vce == "HC1":
            cov = cov * (n / dof)
    elif vce == "classical":
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * XtX_inv
    else:
        raise EconometricsError(f"unknown vce {vce!r} (HC1, HC0, or classical)")
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    tss = float(((y - y.mean()) ** 2).sum())
    rss = float(resid @ resid)
    r_squared = 1.0 - rss / tss if tss > 0 else 0.0

    coefs = {name: float(beta[j]) for j, name in enumerate(design.names)}
    ses = {name: float(se[j]) for j, name in enumerate(design.names)}
    return FitResult(
        coefficients=coefs,
        robust_se=ses,
        stars={name: significance_stars(coefs[name], ses[name]) for name in design.names},
        n_obs=n,
        r_squared=r_squared,
        log_likelihood=None,
        converged=True,
        vce=vce,
    )


# ---------------------------------------------------------------------------
# Table rendering and model specification files
# ---------------------------------------------------------------------------


@dataclass
class CoefficientTable:
    layout: str
    labels: list[str]
    regressors: list[str]
    cells: dict  # (regressor, label) -> (estimate_text, se_text)
    footer: list  # (row label, per-column values)

    NOTE = "Robust standard errors in parentheses. * p<0.1, ** p<0.05, *** p<0.01."

    def to_csv(self) -> str:
        lines = ["regressor," + ",".join(f"{lab},{lab}_se" for lab in self.labels)]
        for reg in self.regressors:
            parts = [reg]
            for lab in self.labels:
                est, se = self.cells.get((reg, lab), ("", ""))
                parts.extend([est, se.strip("()")])
            lines.append(",".join(parts))
        for label, values in self.footer:
            lines.append(",".join([label] + [f"{v}," for v in values]).rstrip(","))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = [""] + self.labels
        body: list[list[str]] = []
        for reg in self.regressors:
            est_row = [reg]
            se_row = [""]
            for lab in self.labels:
                est, se = self.cells.get((reg, lab), ("", ""))
                est_row.append(est)
                se_row.append(se)
            body.append(est_row)
            body.append(se_row)
        body.append(["-"] * (len(self.labels) + 1))
        for label, values in self.footer:
            body.append([label] + [str(v) for v in values])
        widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
        rendered = []
        for row in [header] + body:
            if row[0] == "-" and all(c == "-" for c in row):
                rendered.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
                continue
            rendered.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        rendered.append(self.NOTE)
        return "\n".join(rendered) + "\n"


def _fmt(value: float | None, digits: int = 3) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def coefficient_table(fits: dict[str, FitResult], layout: str) -> CoefficientTable:
    """Render fit columns side by side.

    Layouts differ only in the footer: 'logit' reports observations and
    pseudo R-squared; 'article_fe' adds an article fixed-effect note;
    'time_fe' adds month fixed-effect and controls notes.
    """
    if layout not in TABLE_LAYOUTS:
        raise EconometricsError(f"unknown table layout {layout!r} (expected one of {TABLE_LAYOUTS})")
    if not fits:
        raise EconometricsError("no fits to tabulate")
    labels = list(fits)
    regressors: list[str] = []
    for fit in fits.values():
        for name in fit.coefficients:
            if name not in regressors:
                regressors.append(name)
    cells = {}
    for lab, fit in fits.items():
        for name, est in fit.coefficients.items():
            se = fit.robust_se[name]
            cells[(name, lab)] = (f"{_fmt(est)}{fit.stars[name]}", f"({_fmt(se)})")

    footer = [("Observations", [str(fit.n_obs) for fit in fits.values()])]
    if layout == "logit":
        footer.append(("Pseudo R-squared", [_fmt(fit.r_squared) for fit in fits.values()]))
        footer.append(("Log-likelihood", [_fmt(fit.log_likelihood, 1) for fit in fits.values()]))
    else:
        footer.append(("R-squared", [_fmt(fit.r_squared) for fit in fits.values()]))
        if layout == "article_fe":
            footer.append(("Article FE", ["Yes"] * len(labels)))
        else:
            footer.append(("Month FE", ["Yes"] * len(labels)))
            footer.append(("Controls", ["Yes"] * len(labels)))
    return CoefficientTable(layout=layout, labels=labels, regressors=regressors, cells=cells, footer=footer)


@dataclass(frozen=True)
class ModelSpec:
    model: str  # 'ols' or 'logit'
    responses: tuple[str, ...]
    regressors: tuple[str, ...]
    fe: tuple[str, ...] = ()
    vce: str = "HC1"
    baseline_class: int = 0
    normalize: bool = True


def parse_model_spec(path: str | Path) -> ModelSpec:
    """Read a key=value model specification file.

    Keys: model, response (comma list for side-by-side OLS columns),
    regressors (comma list), fe (comma list), vce, baseline_class,
    normalize. Lines may carry '#' comments.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise EconometricsError(f"cannot read model spec {path}: {exc}") from exc
    raw: dict[str, str] = {}
    for line_no, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise EconometricsError(f"{path} line {line_no}: expected key=value, got {line!r}")
        key, value = body.split("=", 1)
        raw[key.strip()] = value.strip()

    known = {"model", "response", "regressors", "fe", "vce", "baseline_class", "normalize"}
    unknown = set(raw) - known
    if unknown:
        raise EconometricsError(f"{path}: unknown model spec keys: {sorted(unknown)}")
    model = raw.get("model", "ols")
    if model not in ("ols", "logit"):
        raise EconometricsError(f"{path}: model must be ols or logit, got {model!r}")
    responses = tuple(s.strip() for s in raw.get("response", "").split(",") if s.strip())
    if not responses:
        raise EconometricsError(f"{path}: response is required")
    if model == "logit" and len(responses) != 1:
        raise EconometricsError(f"{path}: a logit takes exactly one response")
    regressors = tuple(s.strip() for s in raw.get("regressors", "").split(",") if s.strip())
    if not regressors:
        raise EconometricsError(f"{path}: at least one regressor is required")
    fe = tuple(s.strip() for s in raw.get("fe", "").split(",") if s.strip())
    for label in fe:
        if label not in ("article", "date"):
            raise EconometricsError(f"{path}: fe must be drawn from article, date; got {label!r}")
    vce = raw.get("vce", "HC1" if model == "ols" else "robust")
    try:
        baseline = int(raw.get("baseline_class", "0"))
    except ValueError:
        raise EconometricsError(f"{path}: baseline_class must be an integer") from None
    normalize = raw.get("normalize", "true").lower()
    if normalize not in ("true", "false"):
        raise EconometricsError(f"{path}: normalize must be true or false")
    return ModelSpec(
        model=model,
        responses=responses,
        regressors=regressors,
        fe=fe,
        vce=vce,
        baseline_class=baseline,
        normalize=normalize == "true",
    )


def assemble_design(
    articles,
    response: str,
    regressors,
    lexicons: LexiconSet | None = None,
    normalize: bool = True,
    hedge_as_count: bool = False,
) -> DesignMatrix:
    """Build a DesignMatrix from a corpus.

    response is either 'revision_label' (for the logit) or a rule name.
    Regressors may draw on covariate columns, Version1..Version6 dummies,
    and 'const'. Group keys for 'article' (paper_id) and 'date' (month)
    fixed effects are always attached.
    """
    articles = list(articles)
    if not articles:
        raise EconometricsError("cannot assemble a design from an empty corpus")
    regressors = list(regressors)
    covariate_names = [r for r in regressors if r in COVARIATE_COLUMNS]
    covs = build_covariates(articles, normalize=normalize) if covariate_names else None

    if response == "revision_label":
        y = np.array([a.revision_label for a in articles], dtype=float)
    elif response in RULE_NAMES:
        if lexicons is None:
            lexicons = load_lexicons()
        vectors = dict(measure_corpus(articles, lexicons, hedge_as_count=hedge_as_count))
        y = np.array([getattr(vectors[a.id], response) for a in articles], dtype=float)
    else:
        raise EconometricsError(f"unknown response {response!r} (revision_label or a rule name)")

    X = np.empty((len(articles), len(regressors)))
    for j, name in enumerate(regressors):
        if name == "const":
            X[:, j] = 1.0
        elif name in VERSION_COLUMNS:
            version = int(name[len("Version") :])
            X[:, j] = [1.0 if a.revision_label == version else 0.0 for a in articles]
        elif name in COVARIATE_COLUMNS:
            X[:, j] = [covariate_value(c, name) for c in covs]
        else:
            raise EconometricsError(f"unknown regressor {name!r}")

    groups = {
        "article": tuple(a.paper_id or a.id for a in articles),
        "date": tuple(a.month for a in articles),
    }
    return DesignMatrix(y=y, X=X, names=regressors, groups=groups)
