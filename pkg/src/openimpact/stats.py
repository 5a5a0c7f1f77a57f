"""Self-contained statistical kernel.

Pearson correlation with two-sided p-values, pairwise-deletion correlation
matrices, z-scoring, first-principal-component PCA via Jacobi rotations,
and OLS with standardized coefficients, adjusted R-squared and VIF.

Everything here is pure Python on plain sequences. The matrices involved
are tiny (tens of rows, at most ten variables), so the implementation
favors transparency over vectorization and runs single-threaded.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

_TINY = 1e-300          # floor for the Lentz continued fraction
_BETA_TOL = 1e-12
_BETA_MAX_ITER = 300
_JACOBI_TOL = 1e-12     # off-diagonal Frobenius norm threshold
_JACOBI_MAX_SWEEPS = 100
_PIVOT_RTOL = 1e-10     # relative pivot floor for the linear solver


@dataclass
class CorrelationCell:
    """One entry of a pairwise correlation matrix."""
    r: float
    p: float
    n: int


@dataclass
class PcaResult:
    eigenvalue: float
    variance_share: float
    loadings: list
    scores: list
    rows_used: int


@dataclass
class OlsTerm:
    """One regressor (or the intercept) of a fitted OLS model."""
    name: str
    estimate: float
    se: float
    t: float
    p: float
    std_estimate: float
    vif: Optional[float] = None


@dataclass
class OlsResult:
    intercept: OlsTerm
    terms: list
    r2: float
    adj_r2: float
    n: int


# ---------------------------------------------------------------------------
# basic moments

def _mean(x):
    return sum(x) / len(x)


def _sample_sd(x):
    # divisor n-1 throughout the module
    m = _mean(x)
    return math.sqrt(sum((v - m) ** 2 for v in x) / (len(x) - 1))


def zscore(x: Sequence[float]) -> list:
    """Standardize with sample sd (divisor n-1)."""
    if len(x) < 2:
        raise ValueError("insufficient data")
    m = _mean(x)
    sd = _sample_sd(x)
    if sd == 0.0:
        raise ValueError("zero variance")
    return [(v - m) / sd for v in x]


# ---------------------------------------------------------------------------
# Pearson correlation

def _pairwise_complete(x, y):
    if len(x) != len(y):
        raise ValueError("length mismatch")
    pairs = [(a, b) for a, b in zip(x, y) if a is not None and b is not None]
    return [a for a, _ in pairs], [b for _, b in pairs]


def pearson(x: Sequence, y: Sequence) -> float:
    """Sample Pearson correlation; None entries are deleted pairwise."""
    xs, ys = _pairwise_complete(x, y)
    n = len(xs)
    if n < 3:
        raise ValueError("insufficient data")
    mx, my = _mean(xs), _mean(ys)
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = sum((a - mx) ** 2 for a in xs)
    syy = sum((b - my) ** 2 for b in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("zero variance")
    r = sxy / math.sqrt(sxx * syy)
    # guard against rounding just past the closed interval
    return max(-1.0, min(1.0, r))


def _beta_cont_frac(a, b, x):
    """Continued fraction for the regularized incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ArithmeticError("incomplete beta did not converge in %d iterations"
                          % _BETA_MAX_ITER)


def _betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # use the symmetry transform on the side where the fraction converges fast
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_two_sided(t: float, df: float) -> float:
    """P(|T| > t) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    tt = t * t
    if tt == 0.0:
        return 1.0
    x = df / (df + tt)
    if x <= 0.5:
        return _betainc(0.5 * df, 0.5, x)
    # near p=1 the ratio above rounds to 1 and the tail is lost; form the
    # complementary ratio directly and use I_x(a,b) = 1 - I_{1-x}(b,a)
    return 1.0 - _betainc(0.5, 0.5 * df, tt / (df + tt))


def pearson_p(r: float, n: int) -> float:
    """Two-sided p-value for a sample correlation r at sample size n."""
    if abs(r) > 1.0:
        raise ValueError("correlation out of range")
    if n < 3:
        raise ValueError("insufficient data")
    if abs(r) == 1.0:
        return 0.0
    if r == 0.0:
        return 1.0
    df = n - 2
    t = abs(r) * math.sqrt(df / (1.0 - r * r))
    return student_t_two_sided(t, df)


def format_p(p: float) -> str:
    """Display convention: four decimals, values below 1e-4 as '<.0001'."""
    if p < 0.0001:
        return "<.0001"
    return "%.4f" % p


def correlation_matrix(rows: Sequence[Sequence]) -> list:
    """Pairwise-deletion correlation matrix over the columns of `rows`.

    Returns a k x k list of lists. Off-diagonal entries are CorrelationCell
    (shared between the symmetric positions) or None when fewer than 3
    complete pairs exist or the pairwise subset is constant. Diagonal cells
    carry r=1, p=0 and the per-column presence count.
    """
    if not rows:
        raise ValueError("insufficient data")
    k = len(rows[0])
    if k < 2:
        raise ValueError("need at least 2 variables")
    cols = [[row[j] for row in rows] for j in range(k)]
    out = [[None] * k for _ in range(k)]
    for j in range(k):
        n_present = sum(1 for v in cols[j] if v is not None)
        out[j][j] = CorrelationCell(r=1.0, p=0.0, n=n_present)
    for i in range(1, k):
        for j in range(i):
            xs, ys = _pairwise_complete(cols[i], cols[j])
            try:
                r = pearson(xs, ys)
            except ValueError:
                continue    # unavailable cell stays None
            cell = CorrelationCell(r=r, p=pearson_p(r, len(xs)), n=len(xs))
            out[i][j] = cell
            out[j][i] = cell
    return out


# ---------------------------------------------------------------------------
# eigen decomposition (cyclic Jacobi) and PCA

def _off_diagonal_norm(a):
    k = len(a)
    return math.sqrt(sum(a[i][j] ** 2
                         for i in range(k) for j in range(k) if i != j))


def _jacobi_eigh(a):
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors[i] the vector
    belonging to eigenvalues[i], unordered.
    """
    k = len(a)
    a = [row[:] for row in a]
    v = [[1.0 if i == j else 0.0 for j in range(k)] for i in range(k)]
    for sweep in range(1, _JACOBI_MAX_SWEEPS + 1):
        if _off_diagonal_norm(a) < _JACOBI_TOL:
            eigvals = [a[i][i] for i in range(k)]
            eigvecs = [[v[i][j] for i in range(k)] for j in range(k)]
            return eigvals, eigvecs
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                tau = (a[q][q] - a[p][p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for i in range(k):
                    aip, aiq = a[i][p], a[i][q]
                    a[i][p] = c * aip - s * aiq
                    a[i][q] = s * aip + c * aiq
                for i in range(k):
                    api, aqi = a[p][i], a[q][i]
                    a[p][i] = c * api - s * aqi
                    a[q][i] = s * api + c * aqi
                for i in range(k):
                    vip, viq = v[i][p], v[i][q]
                    v[i][p] = c * vip - s * viq
                    v[i][q] = s * vip + c * viq
    raise ArithmeticError("Jacobi rotation did not converge in %d sweeps"
                          % _JACOBI_MAX_SWEEPS)


def pca_first(rows: Sequence[Sequence[float]]) -> PcaResult:
    """First principal component of the column correlation matrix.

    Rows must be complete (listwise deletion is the caller's job) and
    there must be at least as many rows as variables. The loading sign is
    fixed so that the component sum is positive; scores are the z-scored
    rows projected on the loadings.
    """
    n = len(rows)
    if n == 0:
        raise ValueError("insufficient data")
    k = len(rows[0])
    if n < k:
        raise ValueError("insufficient data")
    cols = [[row[j] for row in rows] for j in range(k)]
    z = [zscore(col) for col in cols]   # raises "zero variance" on constants
    corr = [[sum(z[i][t] * z[j][t] for t in range(n)) / (n - 1)
             for j in range(k)] for i in range(k)]
    eigvals, eigvecs = _jacobi_eigh(corr)
    best = max(range(k), key=lambda i: eigvals[i])
    lam = eigvals[best]
    vec = list(eigvecs[best])
    if sum(vec) < 0.0:
        vec = [-c for c in vec]
    scores = [sum(z[j][t] * vec[j] for j in range(k)) for t in range(n)]
    return PcaResult(eigenvalue=lam, variance_share=lam / k,
                     loadings=vec, scores=scores, rows_used=n)


# ---------------------------------------------------------------------------
# linear algebra for OLS

def _cholesky_solve(a, bs):
    """Solve a @ x = b for each b in bs with a symmetric positive definite.

    Returns None when the matrix is not positive definite (caller falls
    back to pivoted elimination).
    """
    k = len(a)
    low = [[0.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1):
            s = a[i][j] - sum(low[i][t] * low[j][t] for t in range(j))
            if i == j:
                if s <= 0.0:
                    return None
                low[i][j] = math.sqrt(s)
            else:
                low[i][j] = s / low[j][j]
    sols = []
    for b in bs:
        y = [0.0] * k
        for i in range(k):
            y[i] = (b[i] - sum(low[i][t] * y[t] for t in range(i))) / low[i][i]
        x = [0.0] * k
        for i in reversed(range(k)):
            x[i] = (y[i] - sum(low[t][i] * x[t]
                               for t in range(i + 1, k))) / low[i][i]
        sols.append(x)
    return sols


def _pivot_solve(a, bs):
    """Gaussian elimination with partial pivoting; raises on rank deficiency."""
    k = len(a)
    m = [row[:] + [b[i] for b in bs] for i, row in enumerate(a)]
    scale = max(abs(m[i][j]) for i in range(k) for j in range(k)) or 1.0
    ncols = k + len(bs)
    for col in range(k):
        piv = max(range(col, k), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) < _PIVOT_RTOL * scale:
            raise ValueError("collinear design")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        inv = 1.0 / m[col][col]
        for r in range(col + 1, k):
            f = m[r][col] * inv
            if f == 0.0:
                continue
            for c in range(col, ncols):
                m[r][c] -= f * m[col][c]
    sols = []
    for b_idx in range(len(bs)):
        x = [0.0] * k
        for i in reversed(range(k)):
            s = m[i][k + b_idx] - sum(m[i][j] * x[j] for j in range(i + 1, k))
            x[i] = s / m[i][i]
        sols.append(x)
    return sols


def _solve_normal_equations(a, bs):
    sols = _cholesky_solve(a, bs)
    if sols is None:
        sols = _pivot_solve(a, bs)
    return sols


def _lstsq_r2(y, x_cols):
    """R-squared of y on the given columns plus an intercept.

    Returns None when the auxiliary design is singular, which callers
    treat as perfect collinearity.
    """
    n = len(y)
    design = [[1.0] + [col[t] for col in x_cols] for t in range(n)]
    k = len(design[0])
    a = [[sum(design[t][i] * design[t][j] for t in range(n))
          for j in range(k)] for i in range(k)]
    b = [sum(design[t][i] * y[t] for t in range(n)) for i in range(k)]
    try:
        beta = _solve_normal_equations(a, [b])[0]
    except ValueError:
        return None
    my = _mean(y)
    tss = sum((v - my) ** 2 for v in y)
    if tss == 0.0:
        return None
    rss = sum((y[t] - sum(design[t][i] * beta[i] for i in range(k))) ** 2
              for t in range(n))
    return 1.0 - rss / tss


def vif(x_cols: Sequence[Sequence[float]]) -> list:
    """Variance inflation factors; perfect collinearity reports +inf."""
    p = len(x_cols)
    out = []
    for j in range(p):
        others = [x_cols[i] for i in range(p) if i != j]
        if not others:
            out.append(1.0)
            continue
        r2 = _lstsq_r2(list(x_cols[j]), others)
        if r2 is None or r2 >= 1.0 - 1e-12:
            out.append(math.inf)
        else:
            out.append(1.0 / (1.0 - r2))
    return out


def ols(y: Sequence[float], x_cols: Sequence[Sequence[float]],
        names: Optional[Sequence[str]] = None) -> OlsResult:
    """OLS of y on the given regressor columns with an intercept.

    Rows must be complete. Solves the normal equations (positive definite
    path with a pivoted fallback), then derives standard errors from the
    unbiased residual variance, two-sided t-based p-values, adjusted
    R-squared, standardized estimates b*sd(x)/sd(y), and per-regressor VIF.
    """
    n = len(y)
    p = len(x_cols)
    if any(len(col) != n for col in x_cols):
        raise ValueError("length mismatch")
    if n <= p + 1:
        raise ValueError("insufficient data")
    if names is None:
        names = ["x%d" % (j + 1) for j in range(p)]

    design = [[1.0] + [x_cols[j][t] for j in range(p)] for t in range(n)]
    k = p + 1
    a = [[sum(design[t][i] * design[t][j] for t in range(n))
          for j in range(k)] for i in range(k)]
    b = [sum(design[t][i] * y[t] for t in range(n)) for i in range(k)]

    # coefficients and (X'X)^-1 in one solve against the identity
    identity = [[1.0 if i == j else 0.0 for i in range(k)] for j in range(k)]
    sols = _solve_normal_equations(a, [b] + identity)
    beta = sols[0]
    xtx_inv = [[sols[1 + j][i] for j in range(k)] for i in range(k)]

    fitted = [sum(design[t][i] * beta[i] for i in range(k)) for t in range(n)]
    rss = sum((y[t] - fitted[t]) ** 2 for t in range(n))
    my = _mean(y)
    tss = sum((v - my) ** 2 for v in y)
    if tss == 0.0:
        raise ValueError("zero variance")
    df = n - p - 1
    sigma2 = rss / df
    r2 = 1.0 - rss / tss
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df

    sd_y = _sample_sd(y)
    vifs = vif(x_cols)

    def term(idx, name, std_est, v):
        est = beta[idx]
        se = math.sqrt(sigma2 * xtx_inv[idx][idx])
        t = est / se if se > 0.0 else math.inf
        return OlsTerm(name=name, estimate=est, se=se, t=t,
                       p=student_t_two_sided(t, df), std_estimate=std_est,
                       vif=v)

    intercept = term(0, "intercept", 0.0, None)
    terms = []
    for j in range(p):
        sd_x = _sample_sd(x_cols[j])
        terms.append(term(1 + j, names[j], beta[1 + j] * sd_x / sd_y, vifs[j]))
    return OlsResult(intercept=intercept, terms=terms,
                     r2=r2, adj_r2=adj_r2, n=n)
