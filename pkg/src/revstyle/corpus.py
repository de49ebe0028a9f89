"""Corpus schema, loading/validation, author enrichment, and covariates.

An article is one abstract version: a text, a discipline, a posting date,
a revision label (0 = original, 1..6 = revision prompt variants), and its
author list. Author attributes (gender, ethnicity-of-name, country,
publication history) drive the group classifications and the regression
covariates. Records that fail validation are reported with line numbers,
never silently dropped.
"""
from __future__ import annotations

import csv
import hashlib
import json
import warnings
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

import numpy as np

FIELDS = ("Maths", "Phys", "CS", "EE&SS", "Stats", "Bio", "Econ", "Fin")
GENDERS = ("male", "female", "unknown")
ETHNICITIES = (
    "Africans",
    "British",
    "EastAsian",
    "EastEuropean",
    "Indian",
    "Jewish",
    "Muslim",
    "WestEuropean",
    "Other",
)
NATIVENESS = ("native", "nonnative", "partial")

# Countries counted as natively English-speaking for author classification.
NATIVE_COUNTRIES = frozenset({"US", "AU", "GB", "CA", "ZA", "NZ"})

REVISION_LABELS = (0, 1, 2, 3, 4, 5, 6)

# Column order used when covariates are laid out as a named design matrix.
COVARIATE_COLUMNS = (
    "Female",
    "Male",
    "UnknownGender",
    "NonNative",
    "Africans",
    "British",
    "EastAsian",
    "EastEuropean",
    "Indian",
    "Jewish",
    "Muslim",
    "WestEuropean",
    "PaperSeniority",
    "YearSeniority",
) + FIELDS


class CorpusError(ValueError):
    """Invalid corpus records, lookup tables, or filter specifications."""


@dataclass(frozen=True)
class AuthorProfile:
    name: str
    country: str = "unknown"  # ISO-3166 alpha-2 or "unknown"
    gender: str = "unknown"
    ethnicity: str = "Other"
    papers_before_2021: int | None = None
    first_paper_year: int | None = None


@dataclass(frozen=True)
class Article:
    id: str
    text: str
    field: str
    updated: str  # ISO-8601 date (or datetime); month key is updated[:7]
    revision_label: int
    authors: tuple[AuthorProfile, ...] = ()
    paper_id: str = ""  # groups versions of the same underlying article; defaults to id
    adopter_flag: bool | None = None
    revision_text: str | None = None

    def __post_init__(self):
        if not self.paper_id:
            object.__setattr__(self, "paper_id", self.id)

    @property
    def month(self) -> str:
        return self.updated[:7]


@dataclass(frozen=True)
class EnrichmentReport:
    n_authors: int
    gender_matched: int | None = None
    ethnicity_matched: int | None = None

    def match_rates(self) -> dict[str, float]:
        rates = {}
        for label, matched in (("gender", self.gender_matched), ("ethnicity", self.ethnicity_matched)):
            if matched is not None:
                rates[label] = matched / self.n_authors if self.n_authors else 0.0
        return rates


@dataclass
class ArticleCovariates:
    article_id: str
    month: str
    field: str
    revision_label: int
    pct_female: float
    pct_male: float
    pct_unknown_gender: float
    pct_nonnative: float
    ethnicity_shares: dict[str, float]
    paper_seniority: float
    year_seniority: float


def _parse_author(raw: object, where: str, errors: list[str]) -> AuthorProfile | None:
    if not isinstance(raw, dict):
        errors.append(f"{where}: author entries must be objects, got {type(raw).__name__}")
        return None
    name = raw.get("name")
    if not isinstance(name, str) or not name.strip():
        errors.append(f"{where}: author name must be a non-empty string")
        return None
    country = raw.get("country", "unknown")
    if not isinstance(country, str) or not country:
        errors.append(f"{where}: author country must be a string")
        return None
    gender = raw.get("gender", "unknown")
    if gender not in GENDERS:
        errors.append(f"{where}: author gender must be one of {GENDERS}, got {gender!r}")
        return None
    ethnicity = raw.get("ethnicity", "Other")
    if ethnicity not in ETHNICITIES:
        errors.append(f"{where}: author ethnicity must be one of {ETHNICITIES}, got {ethnicity!r}")
        return None
    papers = raw.get("papers_before_2021")
    if papers is not None and (not isinstance(papers, int) or isinstance(papers, bool) or papers < 0):
        errors.append(f"{where}: papers_before_2021 must be a non-negative integer or null")
        return None
    first_year = raw.get("first_paper_year")
    if first_year is not None and (not isinstance(first_year, int) or isinstance(first_year, bool)):
        errors.append(f"{where}: first_paper_year must be an integer or null")
        return None
    return AuthorProfile(
        name=name.strip(),
        country=country,
        gender=gender,
        ethnicity=ethnicity,
        papers_before_2021=papers,
        first_paper_year=first_year,
    )


def _validate_record(rec: dict, where: str, errors: list[str]) -> Article | None:
    pre = len(errors)
    art_id = rec.get("id")
    if not isinstance(art_id, str) or not art_id:
        errors.append(f"{where}: id must be a non-empty string")
        art_id = ""
    text = rec.get("text")
    if not isinstance(text, str):
        errors.append(f"{where}: text must be a string (id={art_id!r})")
        text = ""
    fld = rec.get("field")
    if fld not in FIELDS:
        errors.append(f"{where}: field must be one of {FIELDS}, got {fld!r} (id={art_id!r})")
        fld = FIELDS[0]
    updated = rec.get("updated")
    if not isinstance(updated, str) or len(updated) < 10:
        errors.append(f"{where}: updated must be an ISO-8601 date string (id={art_id!r})")
        updated = "1970-01-01"
    else:
        try:
            date.fromisoformat(updated[:10])
        except ValueError:
            errors.append(f"{where}: updated is not a valid ISO-8601 date: {updated!r} (id={art_id!r})")
            updated = "1970-01-01"
    label = rec.get("revision_label")
    if not isinstance(label, int) or isinstance(label, bool) or label not in REVISION_LABELS:
        errors.append(f"{where}: revision_label must be an integer in 0..6, got {label!r} (id={art_id!r})")
        label = 0
    raw_authors = rec.get("authors", [])
    if not isinstance(raw_authors, list):
        errors.append(f"{where}: authors must be a list (id={art_id!r})")
        raw_authors = []
    authors = []
    for raw in raw_authors:
        author = _parse_author(raw, where, errors)
        if author is not None:
            authors.append(author)
    adopter = rec.get("adopter_flag")
    if adopter is not None and not isinstance(adopter, bool):
        errors.append(f"{where}: adopter_flag must be a boolean or null (id={art_id!r})")
        adopter = None
    revision_text = rec.get("revision_text")
    if revision_text is not None and not isinstance(revision_text, str):
        errors.append(f"{where}: revision_text must be a string or null (id={art_id!r})")
        revision_text = None
    paper_id = rec.get("paper_id", art_id)
    if not isinstance(paper_id, str) or not paper_id:
        errors.append(f"{where}: paper_id must be a non-empty string (id={art_id!r})")
        paper_id = art_id
    if len(errors) > pre:
        return None
    return Article(
        id=art_id,
        text=text,
        field=fld,
        updated=updated,
        revision_label=label,
        authors=tuple(authors),
        paper_id=paper_id,
        adopter_flag=adopter,
        revision_text=revision_text,
    )


def _check_duplicates(seen: dict[str, int], art_id: str, line_no: int, errors: list[str]) -> None:
    if art_id in seen:
        errors.append(f"duplicate id {art_id!r} on lines {seen[art_id]} and {line_no}")
    else:
        seen[art_id] = line_no


def load_corpus(path: str | Path, fmt: str = "jsonl") -> list[Article]:
    """Load and validate a corpus file; raises CorpusError listing every problem."""
    path = Path(path)
    if fmt not in ("jsonl", "csv"):
        raise CorpusError(f"unsupported corpus format {fmt!r} (expected jsonl or csv)")
    try:
        raw_text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc

    articles: list[Article] = []
    errors: list[str] = []
    seen: dict[str, int] = {}

    if fmt == "jsonl":
        for line_no, line in enumerate(raw_text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):  # '#' lines are metadata comments
                continue
            where = f"line {line_no}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(f"{where}: invalid JSON: {exc.msg}")
                continue
            if not isinstance(rec, dict):
                errors.append(f"{where}: record must be a JSON object")
                continue
            article = _validate_record(rec, where, errors)
            if article is not None:
                _check_duplicates(seen, article.id, line_no, errors)
                articles.append(article)
    else:
        reader = csv.DictReader(ln for ln in raw_text.splitlines() if not ln.startswith("#"))
        for row_no, row in enumerate(reader, start=2):  # header is line 1
            where = f"line {row_no}"
            rec: dict[str, object] = {k: v for k, v in row.items() if v not in (None, "")}
            if "revision_label" in rec:
                try:
                    rec["revision_label"] = int(str(rec["revision_label"]))
                except ValueError:
                    pass  # left as string; validation reports it
            if str(rec.get("adopter_flag", "")).lower() in ("true", "false"):
                rec["adopter_flag"] = str(rec["adopter_flag"]).lower() == "true"
            if "authors" in rec:
                # CSV carries flat fields only: authors as ';'-joined names.
                rec["authors"] = [{"name": n.strip()} for n in str(rec["authors"]).split(";") if n.strip()]
            article = _validate_record(rec, where, errors)
            if article is not None:
                _check_duplicates(seen, article.id, row_no, errors)
                articles.append(article)

    if errors:
        raise CorpusError(f"{len(errors)} invalid record(s) in {path}:\n" + "\n".join(errors))
    return articles


def _article_to_dict(article: Article) -> dict:
    rec: dict[str, object] = {
        "id": article.id,
        "text": article.text,
        "field": article.field,
        "updated": article.updated,
        "revision_label": article.revision_label,
        "authors": [
            {
                k: v
                for k, v in (
                    ("name", a.name),
                    ("country", a.country),
                    ("gender", a.gender),
                    ("ethnicity", a.ethnicity),
                    ("papers_before_2021", a.papers_before_2021),
                    ("first_paper_year", a.first_paper_year),
                )
                if v is not None
            }
            for a in article.authors
        ],
    }
    if article.paper_id and article.paper_id != article.id:
        rec["paper_id"] = article.paper_id
    if article.adopter_flag is not None:
        rec["adopter_flag"] = article.adopter_flag
    if article.revision_text is not None:
        rec["revision_text"] = article.revision_text
    return rec


def dump_corpus(articles: list[Article]) -> str:
    """Serialize articles as JSONL; load_corpus inverts this exactly."""
    return "".join(json.dumps(_article_to_dict(a), ensure_ascii=False) + "\n" for a in articles)


_CSV_COLUMNS = ("id", "text", "field", "updated", "revision_label",
                "authors", "paper_id", "adopter_flag", "revision_text")


def save_corpus(articles: list[Article], path: str | Path, fmt: str | None = None) -> None:
    """Write jsonl (default) or csv; fmt inferred from a .csv extension.

    The CSV form is flat: authors become ';'-joined names, so profile
    attributes beyond the name do not survive a CSV round trip."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if fmt == "jsonl":
        path.write_text(dump_corpus(articles), encoding="utf-8")
        return
    if fmt != "csv":
        raise CorpusError(f"unsupported corpus format {fmt!r} (expected jsonl or csv)")
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_CSV_COLUMNS)
        writer.writeheader()
        for a in articles:
            writer.writerow({
                "id": a.id,
                "text": a.text,
                "field": a.field,
                "updated": a.updated,
                "revision_label": a.revision_label,
                "authors": ";".join(p.name for p in a.authors),
                "paper_id": a.paper_id if a.paper_id != a.id else "",
                "adopter_flag": "" if a.adopter_flag is None else str(a.adopter_flag).lower(),
                "revision_text": a.revision_text or "",
            })


def corpus_sha256(articles: list[Article]) -> str:
    return hashlib.sha256(dump_corpus(articles).encode("utf-8")).hexdigest()


def read_lookup_table(path: str | Path, valid_values: tuple[str, ...] | None = None) -> dict[str, str]:
    """Read a two-column tab-separated name->class table (case-insensitive keys)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read lookup table {path}: {exc}") from exc
    table: dict[str, str] = {}
    for line_no, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise CorpusError(f"{path} line {line_no}: expected 'name<TAB>class', got {line!r}")
        key, value = parts[0].strip().lower(), parts[1].strip()
        if valid_values is not None and value not in valid_values:
            raise CorpusError(f"{path} line {line_no}: class {value!r} not in {valid_values}")
        table[key] = value
    return table


def _lookup_name(table: dict[str, str], name: str) -> str | None:
    key = name.strip().lower()
    if key in table:
        return table[key]
    parts = key.split()
    if not parts:
        return None
    hit = table.get(parts[0])
    if hit is None and len(parts) > 1:
        hit = table.get(parts[-1])
    return hit


def enrich_authors(
    articles: list[Article],
    gender_table: dict[str, str] | None = None,
    ethnicity_table: dict[str, str] | None = None,
) -> tuple[list[Article], EnrichmentReport]:
    """Fill author gender/ethnicity from lookup tables; returns new articles.

    Matching is case-insensitive on the full name, falling back to the first
    then the last name token (so tables may be keyed by given name or by
    surname). Unmatched authors keep 'unknown' gender / 'Other' ethnicity.
    """
    n_authors = 0
    gender_matched = 0 if gender_table is not None else None
    ethnicity_matched = 0 if ethnicity_table is not None else None
    out = []
    for article in articles:
        new_authors = []
        for author in article.authors:
            n_authors += 1
            updates: dict[str, str] = {}
            if gender_table is not None:
                hit = _lookup_name(gender_table, author.name)
                if hit is not None:
                    updates["gender"] = hit
                    gender_matched += 1  # type: ignore[operator]
            if ethnicity_table is not None:
                hit = _lookup_name(ethnicity_table, author.name)
                if hit is not None:
                    updates["ethnicity"] = hit
                    ethnicity_matched += 1  # type: ignore[operator]
            new_authors.append(replace(author, **updates) if updates else author)
        out.append(replace(article, authors=tuple(new_authors)))
    report = EnrichmentReport(
        n_authors=n_authors, gender_matched=gender_matched, ethnicity_matched=ethnicity_matched
    )
    return out, report


def classify_nativeness(article: Article) -> str:
    """native / nonnative / partial from author countries (order-invariant).

    Authors with unknown countries are ignored unless every country is
    unknown, in which case the article is 'partial'.
    """
    known = [a.country for a in article.authors if a.country not in ("", "unknown")]
    if not known:
        return "partial"
    native = sum(1 for c in known if c in NATIVE_COUNTRIES)
    if native == len(known):
        return "native"
    if native == 0:
        return "nonnative"
    return "partial"


def _author_tenure(author: AuthorProfile, reference_year: int) -> float:
    if author.first_paper_year is None:
        return 0.0
    return max(0.0, float(reference_year - author.first_paper_year))


def _author_is_senior(author: AuthorProfile, measure: str, threshold: float, reference_year: int) -> bool:
    if measure == "papers":
        return author.papers_before_2021 is not None and author.papers_before_2021 >= threshold
    if measure == "years":
        return author.first_paper_year is not None and _author_tenure(author, reference_year) >= threshold
    raise CorpusError(f"unknown seniority measure {measure!r} (expected 'papers' or 'years')")


def classify_seniority(
    article: Article,
    measure: str = "papers",
    threshold: float = 10,
    mode: str = "any",
    reference_year: int = 2021,
) -> bool:
    """True if the article counts as senior-authored.

    measure='papers' uses papers_before_2021, measure='years' uses tenure
    relative to reference_year. mode='any' requires one qualifying author,
    mode='all' requires every author to qualify. Authors with unknown
    history never qualify.
    """
    if mode not in ("any", "all"):
        raise CorpusError(f"unknown seniority mode {mode!r} (expected 'any' or 'all')")
    if not article.authors:
        return False
    flags = [_author_is_senior(a, measure, threshold, reference_year) for a in article.authors]
    return any(flags) if mode == "any" else all(flags)


def classify_gender(article: Article) -> str:
    """male / female / mixed / unknown from the known-gender authors."""
    known = [a.gender for a in article.authors if a.gender != "unknown"]
    if not known:
        return "unknown"
    if all(g == "male" for g in known):
        return "male"
    if all(g == "female" for g in known):
        return "female"
    return "mixed"


def build_covariates(
    articles: list[Article],
    normalize: bool = False,
    reference_year: int = 2021,
) -> list[ArticleCovariates]:
    """Per-article author-composition covariates.

    Gender shares are over all authors (unknown gender is its own share and
    the three sum to 1). pct_nonnative counts unknown-country authors as
    non-native so every article gets a value. Seniority covariates average
    over authors with unknown history contributing zero. normalize=True
    z-scores the two seniority columns with the population SD; a degenerate
    (constant) column is left unscaled with a warning.
    """
    rows = []
    for article in articles:
        n = len(article.authors)
        if n == 0:
            genders = {"male": 0.0, "female": 0.0, "unknown": 1.0}
            nonnative = 1.0
            shares = {e: 0.0 for e in ETHNICITIES}
            shares["Other"] = 1.0
            papers = 0.0
            years = 0.0
        else:
            genders = {g: sum(1 for a in article.authors if a.gender == g) / n for g in GENDERS}
            nonnative = sum(1 for a in article.authors if a.country not in NATIVE_COUNTRIES) / n
            shares = {e: sum(1 for a in article.authors if a.ethnicity == e) / n for e in ETHNICITIES}
            papers = sum(a.papers_before_2021 or 0 for a in article.authors) / n
            years = sum(_author_tenure(a, reference_year) for a in article.authors) / n
        rows.append(
            ArticleCovariates(
                article_id=article.id,
                month=article.month,
                field=article.field,
                revision_label=article.revision_label,
                pct_female=genders["female"],
                pct_male=genders["male"],
                pct_unknown_gender=genders["unknown"],
                pct_nonnative=nonnative,
                ethnicity_shares=shares,
                paper_seniority=papers,
                year_seniority=years,
            )
        )
    if normalize and rows:
        for attr in ("paper_seniority", "year_seniority"):
            values = np.array([getattr(r, attr) for r in rows], dtype=float)
            sd = float(values.std())
            if sd == 0.0:
                warnings.warn(f"covariate {attr} is constant; left unscaled", stacklevel=2)
                continue
            scaled = (values - values.mean()) / sd
            for row, v in zip(rows, scaled):
                setattr(row, attr, float(v))
    return rows


def covariate_value(cov: ArticleCovariates, column: str) -> float:
    if column == "Female":
        return cov.pct_female
    if column == "Male":
        return cov.pct_male
    if column == "UnknownGender":
        return cov.pct_unknown_gender
    if column == "NonNative":
        return cov.pct_nonnative
    if column in ETHNICITIES:
        return cov.ethnicity_shares[column]
    if column == "PaperSeniority":
        return cov.paper_seniority
    if column == "YearSeniority":
        return cov.year_seniority
    if column in FIELDS:
        return 1.0 if cov.field == column else 0.0
    raise CorpusError(f"unknown covariate column {column!r}")


def design_columns(
    covariates: list[ArticleCovariates], include: tuple[str, ...] | None = None
) -> tuple[list[str], np.ndarray]:
    """Lay covariates out as a named matrix; include selects/orders columns."""
    names = list(include) if include is not None else list(COVARIATE_COLUMNS)
    matrix = np.array([[covariate_value(c, name) for name in names] for c in covariates], dtype=float)
    return names, matrix


def make_filter(spec: str | dict[str, str] | None):
    """Build an article predicate from 'key=value,key=value' filters.

    Keys: field, label, adopter, nativeness, gender, seniority. Values are
    ANDed. adopter=true requires adopter_flag True; adopter=false matches
    False or unset. seniority accepts senior/junior with default settings.
    """
    if spec is None or spec == "" or spec == "all":
        return lambda article: True
    if isinstance(spec, str):
        pairs = {}
        for part in spec.split(","):
            if "=" not in part:
                raise CorpusError(f"filter term {part!r} is not key=value")
            key, value = part.split("=", 1)
            pairs[key.strip()] = value.strip()
    else:
        pairs = dict(spec)

    checks = []
    for key, value in pairs.items():
        if key == "field":
            if value not in FIELDS:
                raise CorpusError(f"filter field={value!r} not in {FIELDS}")
            checks.append(lambda a, v=value: a.field == v)
        elif key == "label":
            try:
                label = int(value)
            except ValueError:
                raise CorpusError(f"filter label={value!r} is not an integer") from None
            checks.append(lambda a, v=label: a.revision_label == v)
        elif key == "adopter":
            if value not in ("true", "false"):
                raise CorpusError(f"filter adopter={value!r} must be true or false")
            if value == "true":
                checks.append(lambda a: a.adopter_flag is True)
            else:
                checks.append(lambda a: a.adopter_flag is not True)
        elif key == "nativeness":
            if value not in NATIVENESS:
                raise CorpusError(f"filter nativeness={value!r} not in {NATIVENESS}")
            checks.append(lambda a, v=value: classify_nativeness(a) == v)
        elif key == "gender":
            if value not in ("male", "female", "mixed", "unknown"):
                raise CorpusError(f"filter gender={value!r} not recognized")
            checks.append(lambda a, v=value: classify_gender(a) == v)
        elif key == "seniority":
            if value not in ("senior", "junior"):
                raise CorpusError(f"filter seniority={value!r} must be senior or junior")
            want = value == "senior"
            checks.append(lambda a, v=want: classify_seniority(a) == v)
        else:
            raise CorpusError(f"unknown filter key {key!r}")
    return lambda article: all(check(article) for check in checks)


def next_month(month: str) -> str:
    year, mon = int(month[:4]), int(month[5:7])
    if mon == 12:
        return f"{year + 1:04d}-01"
    return f"{year:04d}-{mon + 1:02d}"


def month_range(first: str, last: str) -> list[str]:
    """Inclusive list of YYYY-MM keys from first to last."""
    if first > last:
        raise CorpusError(f"month range start {first!r} after end {last!r}")
    months = [first]
    while months[-1] < last:
        months.append(next_month(months[-1]))
    return months
