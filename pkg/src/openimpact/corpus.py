"""Domain model, input parsing, and a seeded synthetic corpus generator.

Two input formats are understood: a JSONL stream of publication records
and a CSV table of per-country indicators. Parsing is total: malformed
input never aborts the run, it produces per-line diagnostics instead.
"""

import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

DEFAULT_WINDOW = (1996, 2013)

COUNTRY_RE = re.compile(r"^[A-Z]{2}$")

COUNTRY_TABLE_COLUMNS = (
    "country_code", "country_name", "frac_fwci", "gbard", "frac_pubs",
    "int_pct", "new_inflows", "returnees", "mobile", "outflows",
)

# columns that may be declared in percent by a "# units: percent" comment
_SHARE_COLUMNS = ("new_inflows", "returnees", "mobile", "outflows")


@dataclass(frozen=True)
class AuthorEntry:
    author_id: str
    countries: tuple = ()   # deduplicated uppercase alpha-2 codes


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    year: int
    pub_type: str
    field_codes: tuple
    authors: tuple
    citations_5y: int


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str


@dataclass(frozen=True)
class Corpus:
    """Validated records keyed by pub_id. Treat as immutable once built."""
    records: dict
    observation_window: tuple = DEFAULT_WINDOW

    def __iter__(self):
        return iter(self.records.values())

    def __len__(self):
        return len(self.records)


@dataclass
class CountryIndicatorRow:
    """One country's indicator vector; every field individually optional."""
    country_code: str
    country_name: Optional[str] = None
    frac_fwci: Optional[float] = None
    gbard: Optional[float] = None
    frac_pubs: Optional[float] = None
    int_pct: Optional[float] = None
    new_inflows: Optional[float] = None
    returnees: Optional[float] = None
    mobile: Optional[float] = None
    outflows: Optional[float] = None


@dataclass(frozen=True)
class SynthParams:
    """Knobs of the synthetic corpus generator; the seed fixes everything."""
    seed: int
    countries: tuple            # (code, n_authors, latent_openness in [0,1])
    years: tuple = (2009, 2013)
    papers_per_author_year: float = 1.2
    mobility_prob: float = 0.1
    n_fields: int = 4
    citation_means: tuple = (2.0, 5.0, 9.0, 14.0)


@dataclass
class GroundTruth:
    """Exact bookkeeping recorded while generating a synthetic corpus.

    Kept independent of the analysis modules so it can serve as an oracle:
    the fractional weights and mobility flags here are recomputed inline
    from the generated histories, not by calling the code under test.
    """
    frac_counts: dict           # country -> fractional publication count
    int_counts: dict            # country -> fractional count, international pubs
    international_share: dict   # country -> percent of count international
    n_resolvable_pubs: int      # publications with >= 1 resolvable country
    author_mobile: dict         # author_id -> bool
    author_events: dict         # author_id -> [(year, pub_id, frozenset codes)]


# ---------------------------------------------------------------------------
# publication JSONL parsing

def _validate_publication(obj, window):
    """Turn one decoded JSON value into a PublicationRecord or raise ValueError."""
    if not isinstance(obj, dict):
        raise ValueError("not a JSON object")
    pub_id = obj.get("pub_id")
    if not isinstance(pub_id, str) or not pub_id:
        raise ValueError("missing or empty pub_id")
    year = obj.get("year")
    if not isinstance(year, int) or isinstance(year, bool):
        raise ValueError("invalid year")
    if not (window[0] <= year <= window[1]):
        raise ValueError("year %d outside observation window %d-%d"
                         % (year, window[0], window[1]))
    pub_type = obj.get("pub_type")
    if not isinstance(pub_type, str) or not pub_type:
        raise ValueError("missing or empty pub_type")
    raw_fields = obj.get("field_codes")
    if not isinstance(raw_fields, list) or not raw_fields:
        raise ValueError("field_codes must be a non-empty list")
    field_codes = []
    for fc in raw_fields:
        if not isinstance(fc, str) or not fc:
            raise ValueError("invalid field code")
        if fc not in field_codes:
            field_codes.append(fc)
    raw_authors = obj.get("authors")
    if not isinstance(raw_authors, list) or not raw_authors:
        raise ValueError("authors must be a non-empty list")
    authors = []
    for a in raw_authors:
        if not isinstance(a, dict):
            raise ValueError("author entry is not an object")
        author_id = a.get("author_id")
        if not isinstance(author_id, str) or not author_id:
            raise ValueError("missing or empty author_id")
        raw_countries = a.get("countries", [])
        if not isinstance(raw_countries, list):
            raise ValueError("countries must be a list")
        countries = []
        for c in raw_countries:
            if not isinstance(c, str) or not COUNTRY_RE.match(c):
                raise ValueError("invalid country code %r" % (c,))
            if c not in countries:
                countries.append(c)
        authors.append(AuthorEntry(author_id=author_id,
                                   countries=tuple(countries)))
    citations = obj.get("citations_5y")
    if not isinstance(citations, int) or isinstance(citations, bool):
        raise ValueError("invalid citation count")
    if citations < 0:
        raise ValueError("negative citation count")
    return PublicationRecord(pub_id=pub_id, year=year, pub_type=pub_type,
                             field_codes=tuple(field_codes),
                             authors=tuple(authors), citations_5y=citations)


def _parse_line(lineno, line, window):
    """Pure per-line step; returns (lineno, record or None, message or None)."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return lineno, None, "invalid JSON: %s" % exc.msg
    try:
        return lineno, _validate_publication(obj, window), None
    except ValueError as exc:
        return lineno, None, str(exc)


def parse_publications(stream, window=DEFAULT_WINDOW, workers: int = 1):
    """Parse a JSONL stream of publications into (Corpus, diagnostics).

    Never aborts on bad input: each rejected line yields one Diagnostic
    carrying its 1-based line number. Blank lines and '#' comment lines
    (provenance headers written by the CLI) are skipped silently.
    Duplicate pub_ids keep the first occurrence. With workers > 1 the
    per-line step runs on a thread pool; the merge is sequential in line
    order, so the result is identical to a single-threaded parse.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in stream]
    tasks = [(i + 1, ln) for i, ln in enumerate(lines)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(
                lambda t: _parse_line(t[0], t[1], window), tasks))
    else:
        outcomes = [_parse_line(no, ln, window) for no, ln in tasks]

    records = {}
    diagnostics = []
    for lineno, record, message in outcomes:
        if record is None:
            diagnostics.append(Diagnostic(lineno, message))
        elif record.pub_id in records:
            diagnostics.append(Diagnostic(
                lineno, "duplicate pub_id %r, first occurrence kept"
                % record.pub_id))
        else:
            records[record.pub_id] = record
    diagnostics.sort(key=lambda d: d.line)
    return Corpus(records=records, observation_window=window), diagnostics


def serialize_publications(corpus: Corpus) -> str:
    """Render a corpus back to JSONL, one record per line, sorted by pub_id."""
    lines = []
    for pub_id in sorted(corpus.records):
        rec = corpus.records[pub_id]
        obj = {
            "pub_id": rec.pub_id,
            "year": rec.year,
            "pub_type": rec.pub_type,
            "field_codes": list(rec.field_codes),
            "authors": [{"author_id": a.author_id,
                         "countries": list(a.countries)} for a in rec.authors],
            "citations_5y": rec.citations_5y,
        }
        lines.append(json.dumps(obj, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# country indicator CSV parsing

def _split_csv_row(line):
    # RFC 4180 quoting without pulling csv.reader into the line-number logic
    out, cur, in_quotes, i = [], [], False, 0
    while i < len(line):
        ch = line[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < len(line) and line[i + 1] == '"':
                    cur.append('"')
                    i += 1
                else:
                    in_quotes = False
            else:
                cur.append(ch)
        elif ch == '"':
            in_quotes = True
        elif ch == ",":
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
        i += 1
    out.append("".join(cur))
    return out


def parse_country_table(stream):
    """Parse the country indicator CSV into (rows, diagnostics).

    The exact header line is required and its absence is fatal. Leading
    comment lines starting with '#' are skipped; a comment of the form
    '# units: percent' declares that the four mobility columns are stored
    as percentages and rescales them to shares on load. Empty cells become
    None; non-numeric or out-of-bounds cells become None plus a Diagnostic.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in stream]

    share_scale = 1.0
    header_idx = None
    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = re.match(r"#\s*units\s*:\s*(percent|shares)\s*$", stripped)
            if m and m.group(1) == "percent":
                share_scale = 0.01
            continue
        header_idx = i
        break
    if header_idx is None or _split_csv_row(lines[header_idx].strip()) != \
            list(COUNTRY_TABLE_COLUMNS):
        raise ValueError("missing required header: expected %s"
                         % ",".join(COUNTRY_TABLE_COLUMNS))

    rows = []
    diagnostics = []

    def numeric(cell, column, lineno, lower=None, upper=None, scale=1.0):
        cell = cell.strip()
        if cell == "":
            return None
        try:
            value = float(cell) * scale
        except ValueError:
            diagnostics.append(Diagnostic(
                lineno, "non-numeric %s %r treated as missing" % (column, cell)))
            return None
        if not math.isfinite(value):
            diagnostics.append(Diagnostic(
                lineno, "non-finite %s treated as missing" % column))
            return None
        if (lower is not None and value < lower) or \
                (upper is not None and value > upper):
            diagnostics.append(Diagnostic(
                lineno, "%s %s out of bounds, treated as missing"
                % (column, cell)))
            return None
        return value

    for offset in range(header_idx + 1, len(lines)):
        lineno = offset + 1
        raw = lines[offset]
        if not raw.strip() or raw.strip().startswith("#"):
            continue
        cells = _split_csv_row(raw)
        if len(cells) != len(COUNTRY_TABLE_COLUMNS):
            diagnostics.append(Diagnostic(
                lineno, "expected %d cells, got %d, row skipped"
                % (len(COUNTRY_TABLE_COLUMNS), len(cells))))
            continue
        code = cells[0].strip()
        if not code:
            diagnostics.append(Diagnostic(lineno, "empty country_code, row skipped"))
            continue
        row = CountryIndicatorRow(
            country_code=code,
            country_name=cells[1].strip() or None,
            frac_fwci=numeric(cells[2], "frac_fwci", lineno),
            gbard=numeric(cells[3], "gbard", lineno),
            frac_pubs=numeric(cells[4], "frac_pubs", lineno),
            int_pct=numeric(cells[5], "int_pct", lineno, 0.0, 100.0),
            new_inflows=numeric(cells[6], "new_inflows", lineno, 0.0, 1.0,
                                share_scale),
            returnees=numeric(cells[7], "returnees", lineno, 0.0, 1.0,
                              share_scale),
            mobile=numeric(cells[8], "mobile", lineno, 0.0, 1.0, share_scale),
            outflows=numeric(cells[9], "outflows", lineno, 0.0, 1.0,
                             share_scale),
        )
        if row.frac_fwci is not None and row.frac_fwci <= 0.0:
            diagnostics.append(Diagnostic(
                lineno, "frac_fwci must be positive, treated as missing"))
            row.frac_fwci = None
        rows.append(row)
    return rows, diagnostics


def bundled_country_table():
    """Parse the reference country table shipped inside the package."""
    from importlib.resources import files
    text = files("openimpact").joinpath("data/countries_2013.csv") \
        .read_text("utf-8")
    return parse_country_table(text)


# ---------------------------------------------------------------------------
# synthetic corpus generator

def _inline_country_weights(authors):
    """Fractional per-country weights recomputed here for oracle independence."""
    resolvable = [a for a in authors if a.countries]
    if not resolvable:
        return {}
    weights = {}
    per_author = 1.0 / len(resolvable)
    for a in resolvable:
        share = per_author / len(a.countries)
        for c in a.countries:
            weights[c] = weights.get(c, 0.0) + share
    total = sum(weights.values())
    return {c: w / total for c, w in weights.items()}


def _poisson(rng, lam):
    # Knuth's product method; fine for the small means used here
    limit = math.exp(-lam)
    k, prod = 0, rng.random()
    while prod > limit:
        k += 1
        prod *= rng.random()
    return k


def generate_synthetic_corpus(params: SynthParams):
    """Simulate author careers and publications; returns (Corpus, GroundTruth).

    Careers start in the home country and switch with a per-year probability
    scaled by the home country's latent openness; secondary affiliations are
    only ever drawn from countries already visited, so mobility_prob = 0
    forces every author to stay single-country and immobile.
    """
    import random

    if not params.countries:
        raise ValueError("countries must be non-empty")
    for code, n_authors, latent in params.countries:
        if not COUNTRY_RE.match(code):
            raise ValueError("invalid country code %r" % code)
        if n_authors < 1:
            raise ValueError("n_authors must be >= 1")
        if not 0.0 <= latent <= 1.0:
            raise ValueError("latent_openness must be in [0,1]")
    if not 0.0 <= params.mobility_prob <= 1.0:
        raise ValueError("mobility_prob must be in [0,1]")
    if params.papers_per_author_year <= 0.0:
        raise ValueError("papers_per_author_year must be positive")
    if params.n_fields < 1 or len(params.citation_means) < params.n_fields:
        raise ValueError("need a citation mean per field")
    y0, y1 = params.years
    if y0 > y1:
        raise ValueError("empty year range")

    rng = random.Random(params.seed)
    codes = [c for c, _, _ in params.countries]
    latent_by_code = {c: l for c, _, l in params.countries}

    # author state: current country and visited set
    authors = []
    for code, n_authors, latent in params.countries:
        for i in range(n_authors):
            authors.append({"id": "%s-a%03d" % (code, i + 1),
                            "home": code, "current": code,
                            "visited": [code]})

    records = {}
    author_events = {a["id"]: [] for a in authors}
    frac_counts = {}
    int_counts = {}
    n_resolvable = 0
    counter = 0

    for year in range(y0, y1 + 1):
        if year > y0 and len(codes) > 1:
            for a in authors:
                p_switch = params.mobility_prob * \
                    (0.25 + 0.75 * latent_by_code[a["home"]])
                if rng.random() < p_switch:
                    a["current"] = rng.choice(
                        [c for c in codes if c != a["current"]])
                    if a["current"] not in a["visited"]:
                        a["visited"].append(a["current"])
        for a in authors:
            rate = params.papers_per_author_year
            n_papers = int(rate) + (1 if rng.random() < rate - int(rate) else 0)
            for _ in range(n_papers):
                latent = latent_by_code[a["home"]]
                team = [a]
                if rng.random() < 0.2 + 0.6 * latent:
                    n_extra = 1 + (1 if rng.random() < 0.3 else 0)
                    pool = [b for b in authors if b is not a]
                    for _ in range(min(n_extra, len(pool))):
                        pick = rng.choice(pool)
                        if pick not in team:
                            team.append(pick)
                entries = []
                for member in team:
                    countries = [member["current"]]
                    extra_pool = [c for c in member["visited"]
                                  if c != member["current"]]
                    if extra_pool and rng.random() < 0.05 + \
                            0.1 * latent_by_code[member["home"]]:
                        countries.append(rng.choice(extra_pool))
                    if rng.random() < 0.02:
                        countries = []      # unresolvable affiliation
                    entries.append(AuthorEntry(
                        author_id=member["id"],
                        countries=tuple(sorted(countries))))
                field_ids = [rng.randrange(params.n_fields)]
                if params.n_fields > 1 and rng.random() < 0.2:
                    second = rng.randrange(params.n_fields)
                    if second not in field_ids:
                        field_ids.append(second)
                mean_cites = sum(params.citation_means[f]
                                 for f in field_ids) / len(field_ids)
                counter += 1
                rec = PublicationRecord(
                    pub_id="S%06d" % counter,
                    year=year,
                    pub_type="review" if rng.random() < 0.15 else "article",
                    field_codes=tuple("F%d" % (f + 1) for f in field_ids),
                    authors=tuple(entries),
                    citations_5y=_poisson(rng, mean_cites),
                )
                records[rec.pub_id] = rec

                weights = _inline_country_weights(rec.authors)
                if weights:
                    n_resolvable += 1
                    international = len(weights) >= 2
                    for c, w in weights.items():
                        frac_counts[c] = frac_counts.get(c, 0.0) + w
                        if international:
                            int_counts[c] = int_counts.get(c, 0.0) + w
                for entry in rec.authors:
                    if entry.countries:
                        author_events[entry.author_id].append(
                            (rec.year, rec.pub_id, frozenset(entry.countries)))

    author_mobile = {}
    for author_id, events in author_events.items():
        events.sort(key=lambda e: (e[0], e[1]))
        if len(events) < 2:
            author_mobile[author_id] = False
        else:
            first = events[0][2]
            author_mobile[author_id] = any(e[2] != first for e in events[1:])

    international_share = {
        c: 100.0 * int_counts.get(c, 0.0) / frac_counts[c]
        for c in frac_counts
    }
    truth = GroundTruth(frac_counts=frac_counts, int_counts=int_counts,
                        international_share=international_share,
                        n_resolvable_pubs=n_resolvable,
                        author_mobile=author_mobile,
                        author_events=dict(author_events))
    corpus = Corpus(records=records, observation_window=(y0, y1))
    return corpus, truth
