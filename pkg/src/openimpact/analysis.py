"""Country-table analytics: openness index, correlation/regression tables,
and scatter data.

The openness index is the first principal component of four indicators,
in this fixed order: international collaboration percent, mobile share,
new inflow share, returnee share. Reports carry a 9-variable pairwise
correlation matrix, the component summary, an OLS of impact on openness
with funding and size controls, and per-country scatter points.
"""

import enum
from dataclasses import dataclass
from typing import Optional

from . import stats
from .corpus import CountryIndicatorRow

# fixed presentation order of the correlation matrix
VARIABLE_FIELDS = ("frac_fwci", "gbard", "frac_pubs", "int_pct",
                   "new_inflows", "returnees", "mobile", "outflows")
VARIABLE_LABELS = ("FracFWCI", "GBARD", "FracPubs", "Int.Perc.",
                   "NewInflows", "Returnees", "Mobile", "Outflows",
                   "Openness")

# inputs of the openness component, in presentation order
OPENNESS_FIELDS = ("int_pct", "mobile", "new_inflows", "returnees")
OPENNESS_LABELS = ("Int.Perc.", "Mobile", "NewInflows", "Returnees")

OLS_REGRESSORS = ("Openness", "GBARD", "FracPubs")


class Quadrant(enum.Enum):
    TOP_RIGHT = "top-right"
    TOP_LEFT = "top-left"
    BOTTOM_LEFT = "bottom-left"
    BOTTOM_RIGHT = "bottom-right"


@dataclass
class OpennessScore:
    country_code: str
    score: Optional[float]
    included: bool


@dataclass
class ScatterPoint:
    country_code: str
    x: float            # openness score
    y: float            # frac_fwci
    size: float         # frac_pubs
    quadrant: Quadrant


@dataclass
class AnalysisReport:
    variables: tuple
    matrix: list                    # 9x9 cells from stats.correlation_matrix
    pca: Optional[stats.PcaResult]
    pca_countries: list             # exact row set behind the openness scores
    ols: Optional[stats.OlsResult]
    scatter: list
    errors: list
    provenance: dict


def build_openness(table):
    """Openness scores for rows listwise-complete on the four indicators.

    Returns (scores, PcaResult) where scores has one entry per input row
    in input order; incomplete rows carry included=False and no score.
    Requires at least 5 complete rows.
    """
    complete = []
    for row in table:
        values = [getattr(row, f) for f in OPENNESS_FIELDS]
        if all(v is not None for v in values):
            complete.append((row.country_code, values))
    if len(complete) < 5:
        raise ValueError("fewer than 5 rows complete on %s"
                         % ", ".join(OPENNESS_FIELDS))
    pca = stats.pca_first([values for _, values in complete])
    by_code = {code: pca.scores[i] for i, (code, _) in enumerate(complete)}
    scores = []
    for row in table:
        code = row.country_code
        if code in by_code:
            scores.append(OpennessScore(code, by_code[code], True))
        else:
            scores.append(OpennessScore(code, None, False))
    return scores, pca


def scatter_points(table, scores):
    """Bubble data for rows with an openness score, impact, and size.

    Quadrant boundaries sit at x=0 (openness mean) and y=1.0 (world
    average impact); ties go to the right and upper side.
    """
    score_by_code = {s.country_code: s.score for s in scores if s.included}
    points = []
    for row in table:
        x = score_by_code.get(row.country_code)
        if x is None or row.frac_fwci is None:
            continue
        if row.frac_pubs is None or row.frac_pubs <= 0.0:
            continue
        y = row.frac_fwci
        if x >= 0.0:
            quadrant = Quadrant.TOP_RIGHT if y >= 1.0 else Quadrant.BOTTOM_RIGHT
        else:
            quadrant = Quadrant.TOP_LEFT if y >= 1.0 else Quadrant.BOTTOM_LEFT
        points.append(ScatterPoint(country_code=row.country_code, x=x, y=y,
                                   size=row.frac_pubs, quadrant=quadrant))
    return points


def run_analysis(table, openness, provenance=None):
    """Assemble the full report from a country table and built openness.

    `openness` is the (scores, PcaResult) pair from build_openness, or
    None when it could not be built; in that case the correlation matrix
    still covers whatever columns have data and the regression is skipped
    with an error note instead of raising.
    """
    errors = []
    if openness is None:
        scores, pca = [], None
        errors.append("openness index unavailable")
    else:
        scores, pca = openness
    score_by_code = {s.country_code: s.score for s in scores if s.included}

    rows = []
    for row in table:
        rows.append([getattr(row, f) for f in VARIABLE_FIELDS]
                    + [score_by_code.get(row.country_code)])
    matrix = stats.correlation_matrix(rows)

    ols_result = None
    if openness is None:
        errors.append("regression skipped: openness index unavailable")
    else:
        y, x_open, x_gbard, x_pubs = [], [], [], []
        for row in table:
            score = score_by_code.get(row.country_code)
            cells = (row.frac_fwci, score, row.gbard, row.frac_pubs)
            if any(v is None for v in cells):
                continue
            y.append(row.frac_fwci)
            x_open.append(score)
            x_gbard.append(row.gbard)
            x_pubs.append(row.frac_pubs)
        ols_result = stats.ols(y, [x_open, x_gbard, x_pubs],
                               names=list(OLS_REGRESSORS))

    return AnalysisReport(
        variables=VARIABLE_LABELS,
        matrix=matrix,
        pca=pca,
        pca_countries=[s.country_code for s in scores if s.included],
        ols=ols_result,
        scatter=scatter_points(table, scores),
        errors=errors,
        provenance=dict(provenance or {}),
    )


# ---------------------------------------------------------------------------
# serialization

def report_to_json(report: AnalysisReport) -> dict:
    """Machine form of the report; p-values at full precision."""
    cells = []
    k = len(report.variables)
    for i in range(1, k):
        for j in range(i):
            cell = report.matrix[i][j]
            cells.append({
                "var_row": report.variables[i],
                "var_col": report.variables[j],
                "r": None if cell is None else cell.r,
                "p": None if cell is None else cell.p,
                "n": None if cell is None else cell.n,
            })
    out = {
        "provenance": report.provenance,
        "variables": list(report.variables),
        "correlations": cells,
        "component": None,
        "regression": None,
        "scatter": [{"country_code": p.country_code, "x": p.x, "y": p.y,
                     "size": p.size, "quadrant": p.quadrant.value}
                    for p in report.scatter],
        "errors": list(report.errors),
    }
    if report.pca is not None:
        out["component"] = {
            "loadings": {OPENNESS_LABELS[i]: report.pca.loadings[i]
                         for i in range(len(OPENNESS_LABELS))},
            "eigenvalue": report.pca.eigenvalue,
            "variance_share": report.pca.variance_share,
            "rows_used": report.pca.rows_used,
            "countries": report.pca_countries,
        }
    if report.ols is not None:
        def term_dict(t):
            return {"name": t.name, "estimate": t.estimate, "se": t.se,
                    "t": t.t, "p": t.p, "std_estimate": t.std_estimate,
                    "vif": t.vif}
        out["regression"] = {
            "intercept": term_dict(report.ols.intercept),
            "terms": [term_dict(t) for t in report.ols.terms],
            "r2": report.ols.r2,
            "adj_r2": report.ols.adj_r2,
            "n": report.ols.n,
        }
    return out


def _fmt_cell(cell):
    if cell is None:
        return ("", "", "")
    return ("%.5f" % cell.r, stats.format_p(cell.p), "%d" % cell.n)


def correlation_table_text(report: AnalysisReport) -> str:
    """Aligned correlation table, one stacked r / p / n block per cell."""
    k = len(report.variables)
    label_w = max(len("%d. %s" % (i + 1, v))
                  for i, v in enumerate(report.variables)) + 2
    col_w = 10
    header = " " * label_w + "".join(str(j + 1).rjust(col_w)
                                     for j in range(k - 1))
    lines = ["Bivariate correlations (r / p / n)", header]
    for i in range(k):
        cells = [_fmt_cell(report.matrix[i][j]) for j in range(i)]
        label = "%d. %s" % (i + 1, report.variables[i])
        for part in range(3):
            prefix = label if part == 0 else ""
            row = prefix.ljust(label_w) + "".join(
                c[part].rjust(col_w) for c in cells)
            lines.append(row.rstrip())
    return "\n".join(lines)


def component_table_text(report: AnalysisReport) -> str:
    if report.pca is None:
        return "Openness component: unavailable"
    lines = ["Openness component loadings",
             "%-12s %10s" % ("Variable", "Loading")]
    for label, loading in zip(OPENNESS_LABELS, report.pca.loadings):
        lines.append("%-12s %10.6f" % (label, loading))
    lines.append("%-12s %10.4f" % ("Eigenvalue", report.pca.eigenvalue))
    lines.append("%-12s %10.4f" % ("Var. share", report.pca.variance_share))
    lines.append("%-12s %10d" % ("Countries", report.pca.rows_used))
    return "\n".join(lines)


def regression_table_text(report: AnalysisReport) -> str:
    if report.ols is None:
        return "Regression: unavailable"
    r = report.ols
    lines = ["OLS, dependent variable FracFWCI",
             "%-10s %10s %12s %12s %8s %8s %8s"
             % ("Term", "StdEst", "Estimate", "SE", "t", "p", "VIF")]

    def line(term):
        vif_s = "" if term.vif is None else "%.2f" % term.vif
        return "%-10s %10.5f %12.5g %12.5g %8.2f %8s %8s" % (
            term.name, term.std_estimate, term.estimate, term.se,
            term.t, stats.format_p(term.p), vif_s)

    lines.append(line(report.ols.intercept))
    for term in r.terms:
        lines.append(line(term))
    lines.append("%-10s %10.4f" % ("Adj R-sq", r.adj_r2))
    lines.append("%-10s %10d" % ("N", r.n))
    return "\n".join(lines)


def report_to_text(report: AnalysisReport) -> str:
    parts = [correlation_table_text(report), component_table_text(report),
             regression_table_text(report)]
    if report.errors:
        parts.append("Notes:\n" + "\n".join("  " + e for e in report.errors))
    return "\n\n".join(parts) + "\n"
