"""Command line front end.

Subcommands wire the library into reproducible batch runs: `indicators`
and `mobility` reduce a publication stream to country tables, `openness`,
`analyze` and `scatter` consume an assembled country table, and `synth`
emits a seeded synthetic corpus. Machine outputs start with a provenance
header (version, input digest, mode flags; never a timestamp), so reruns
with identical inputs are byte-identical. Diagnostics go to stderr.

Exit codes: 0 success, 1 input error, 2 usage error.
"""

import argparse
import hashlib
import json
import os
import sys

from . import __version__, analysis
from .corpus import (DEFAULT_WINDOW, SynthParams, generate_synthetic_corpus,
                     parse_country_table, parse_publications,
                     serialize_publications)
from .fractional import (fractional_pub_counts, international_share,
                         weights_by_pub)
from .impact import FwciMode, build_baselines, frac_fwci
from .mobility import mobility_shares

_MODES = {"field": FwciMode.FIELD_LEVEL, "all-subjects": FwciMode.ALL_SUBJECTS}

_DEFAULT_SYNTH = {
    "countries": [["CH", 6, 0.9], ["NL", 6, 0.7], ["US", 8, 0.4],
                  ["JP", 6, 0.2], ["CN", 8, 0.3]],
    "years": [2009, 2013],
    "papers_per_author_year": 1.2,
    "mobility_prob": 0.12,
    "n_fields": 4,
    "citation_means": [2.0, 5.0, 9.0, 14.0],
}


class InputError(Exception):
    """Problem with run inputs; reported on stderr, exit code 1."""


def _read_input(path):
    """Read a file (or stdin for '-'); returns (text, sha256 hex digest)."""
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise InputError("cannot read %s: %s" % (path, exc))
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _report_diagnostics(diagnostics):
    for d in diagnostics:
        print("line %d: %s" % (d.line, d.message), file=sys.stderr)


def _num(value):
    return "%.12g" % value


def _provenance_comments(digest=None, mode=None, extra=()):
    lines = ["# openimpact %s" % __version__]
    if digest is not None:
        lines.append("# input sha256: %s" % digest)
    if mode is not None:
        lines.append("# mode: %s" % mode)
    lines.extend(extra)
    return lines


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _window(arg):
    try:
        start, end = arg.split(":")
        start, end = int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(
            "window must look like 1996:2013") from None
    if start > end:
        raise argparse.ArgumentTypeError("window start after end")
    return start, end


def _csv(comments, header, rows):
    lines = list(comments) + [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands

def _cmd_indicators(args):
    text, digest = _read_input(args.pubs)
    corpus, diagnostics = parse_publications(text, window=args.window,
                                             workers=args.workers)
    _report_diagnostics(diagnostics)
    mode = _MODES[args.mode]
    counts = fractional_pub_counts(corpus, workers=args.workers)
    shares = international_share(counts)
    frac_rows = [(code, _num(counts.counts[code]), _num(shares[code]))
                 for code in sorted(counts.counts)]
    if corpus.records:
        weights = weights_by_pub(corpus, workers=args.workers)
        result = frac_fwci(corpus, build_baselines(corpus, mode), weights)
        impact_rows = [(code, args.mode, _num(result.values[code]),
                        _num(result.weight_mass[code]),
                        "%d" % result.n_pubs[code])
                       for code in sorted(result.values)]
    else:
        impact_rows = []

    comments = _provenance_comments(digest, args.mode)
    if args.format == "json":
        payload = {
            "provenance": {"tool": "openimpact", "version": __version__,
                           "input_sha256": digest, "mode": args.mode},
            "fractional": [{"country_code": c, "frac_pubs": float(f),
                            "int_pct": float(s)} for c, f, s in frac_rows],
            "impact": [{"country_code": c, "mode": m, "frac_fwci": float(v),
                        "weight_mass": float(w), "n_pubs": int(n)}
                       for c, m, v, w, n in impact_rows],
        }
        _emit(_json_text(payload), args.out)
        return 0
    frac_csv = _csv(comments, ("country_code", "frac_pubs", "int_pct"),
                    frac_rows)
    impact_csv = _csv(comments,
                      ("country_code", "mode", "frac_fwci", "weight_mass",
                       "n_pubs"), impact_rows)
    if args.out:
        _emit(frac_csv, args.out + ".fractional.csv")
        _emit(impact_csv, args.out + ".impact.csv")
    else:
        sys.stdout.write(frac_csv + "\n" + impact_csv)
    return 0


def _cmd_mobility(args):
    text, digest = _read_input(args.pubs)
    corpus, diagnostics = parse_publications(text, window=args.window,
                                             workers=args.workers)
    _report_diagnostics(diagnostics)
    result = mobility_shares(corpus)
    rows = [(code,
             _num(result.shares[code]["new_inflows"]),
             _num(result.shares[code]["returnees"]),
             _num(result.shares[code]["mobile"]),
             _num(result.shares[code]["outflows"]),
             "%d" % result.denominators[code])
            for code in sorted(result.shares)]
    if args.format == "json":
        payload = {
            "provenance": {"tool": "openimpact", "version": __version__,
                           "input_sha256": digest},
            "shares": [{"country_code": c, "new_inflows": float(a),
                        "returnees": float(b), "mobile": float(m),
                        "outflows": float(o), "denominator": int(n)}
                       for c, a, b, m, o, n in rows],
        }
        _emit(_json_text(payload), args.out)
        return 0
    _emit(_csv(_provenance_comments(digest),
               ("country_code", "new_inflows", "returnees", "mobile",
                "outflows", "denominator"), rows), args.out)
    return 0


def _load_country_table(path):
    text, digest = _read_input(path)
    try:
        table, diagnostics = parse_country_table(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _report_diagnostics(diagnostics)
    return table, digest


def _cmd_openness(args):
    table, digest = _load_country_table(args.countries)
    try:
        scores, pca = analysis.build_openness(table)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.format == "text":
        report = analysis.AnalysisReport(
            variables=analysis.VARIABLE_LABELS, matrix=[], pca=pca,
            pca_countries=[s.country_code for s in scores if s.included],
            ols=None, scatter=[], errors=[], provenance={})
        body = analysis.component_table_text(report) + "\n\nScores\n"
        body += "\n".join("%-4s %12s" % (s.country_code,
                                         "%.6f" % s.score if s.included else "")
                          for s in scores) + "\n"
        _emit(body, args.out)
        return 0
    if args.format == "json":
        payload = {
            "provenance": {"tool": "openimpact", "version": __version__,
                           "input_sha256": digest},
            "component": {
                "loadings": {analysis.OPENNESS_LABELS[i]: pca.loadings[i]
                             for i in range(4)},
                "eigenvalue": pca.eigenvalue,
                "variance_share": pca.variance_share,
                "rows_used": pca.rows_used,
            },
            "scores": [{"country_code": s.country_code, "openness": s.score,
                        "included": s.included} for s in scores],
        }
        _emit(_json_text(payload), args.out)
        return 0
    rows = [(s.country_code,
             _num(s.score) if s.included else "",
             "true" if s.included else "false") for s in scores]
    _emit(_csv(_provenance_comments(digest),
               ("country_code", "openness", "included"), rows), args.out)
    return 0


def _figure_path(args):
    if args.fig:
        return args.fig
    if args.out:
        return os.path.splitext(args.out)[0] + ".png"
    return None


def _render_figure(points, path):
    # imported lazily so data-only runs never touch matplotlib
    from .figures import scatter_figure
    scatter_figure(points, path)


def _cmd_analyze(args):
    table, digest = _load_country_table(args.countries)
    try:
        openness = analysis.build_openness(table)
    except ValueError as exc:
        print("openness unavailable: %s" % exc, file=sys.stderr)
        openness = None
    provenance = {"tool": "openimpact", "version": __version__,
                  "input_sha256": digest}
    report = analysis.run_analysis(table, openness, provenance=provenance)
    if args.format == "text":
        _emit(analysis.report_to_text(report), args.out)
    else:
        _emit(_json_text(analysis.report_to_json(report)), args.out)
    fig_path = _figure_path(args)
    if fig_path:
        _render_figure(report.scatter, fig_path)
    return 0


def _cmd_scatter(args):
    table, digest = _load_country_table(args.countries)
    try:
        scores, _ = analysis.build_openness(table)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    points = analysis.scatter_points(table, scores)
    if args.format == "json":
        payload = {
            "provenance": {"tool": "openimpact", "version": __version__,
                           "input_sha256": digest},
            "points": [{"country_code": p.country_code, "x": p.x, "y": p.y,
                        "size": p.size, "quadrant": p.quadrant.value}
                       for p in points],
        }
        _emit(_json_text(payload), args.out)
    else:
        rows = [(p.country_code, _num(p.x), _num(p.y), _num(p.size),
                 p.quadrant.value) for p in points]
        _emit(_csv(_provenance_comments(digest),
                   ("country_code", "x", "y", "size", "quadrant"), rows),
              args.out)
    fig_path = _figure_path(args)
    if fig_path:
        _render_figure(points, fig_path)
    return 0


def _cmd_synth(args):
    spec = dict(_DEFAULT_SYNTH)
    params_digest = None
    if args.params:
        text, params_digest = _read_input(args.params)
        try:
            overrides = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("bad params file: %s" % exc.msg) from None
        if not isinstance(overrides, dict):
            raise InputError("params file must hold a JSON object")
        spec.update(overrides)
    try:
        params = SynthParams(
            seed=args.seed,
            countries=tuple((c, int(n), float(l))
                            for c, n, l in spec["countries"]),
            years=tuple(spec["years"]),
            papers_per_author_year=float(spec["papers_per_author_year"]),
            mobility_prob=float(spec["mobility_prob"]),
            n_fields=int(spec["n_fields"]),
            citation_means=tuple(float(m) for m in spec["citation_means"]),
        )
        corpus, truth = generate_synthetic_corpus(params)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError("bad synthesis parameters: %s" % exc) from None
    extra = ["# seed: %d" % args.seed]
    if params_digest:
        extra.append("# params sha256: %s" % params_digest)
    header = "\n".join(_provenance_comments(extra=extra)) + "\n"
    _emit(header + serialize_publications(corpus), args.out)
    if args.truth:
        payload = {
            "seed": args.seed,
            "frac_counts": truth.frac_counts,
            "int_counts": truth.int_counts,
            "international_share": truth.international_share,
            "n_resolvable_pubs": truth.n_resolvable_pubs,
            "author_mobile": truth.author_mobile,
        }
        with open(args.truth, "w", encoding="utf-8") as fh:
            fh.write(_json_text(payload))
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="openimpact",
        description="Country-level publication analytics: fractional "
                    "counting, citation impact, mobility, openness.")
    parser.add_argument("--version", action="version",
                        version="openimpact %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pubs_flags(p):
        p.add_argument("--pubs", default="-",
                       help="publications JSONL path, '-' for stdin")
        p.add_argument("--window", type=_window, default=DEFAULT_WINDOW,
                       help="observation window, e.g. 1996:2013")
        p.add_argument("--workers", type=int, default=1,
                       help="thread count for parsing and weighting")

    p = sub.add_parser("indicators",
                       help="fractional counts and fracFWCI per country")
    add_pubs_flags(p)
    p.add_argument("--mode", choices=sorted(_MODES), default="all-subjects")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (csv: used as prefix)")
    p.set_defaults(func=_cmd_indicators)

    p = sub.add_parser("mobility", help="mobility shares per country")
    add_pubs_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_mobility)

    p = sub.add_parser("openness", help="openness component and scores")
    p.add_argument("--countries", required=True, help="country table CSV")
    p.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_openness)

    p = sub.add_parser("analyze",
                       help="correlations, component, regression, scatter")
    p.add_argument("--countries", required=True, help="country table CSV")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.add_argument("--fig", help="write the bubble chart to this path")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("scatter", help="openness/impact scatter data")
    p.add_argument("--countries", required=True, help="country table CSV")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.add_argument("--fig", help="write the bubble chart to this path")
    p.set_defaults(func=_cmd_scatter)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--params", help="JSON file overriding generator defaults")
    p.add_argument("--out", help="JSONL output path, default stdout")
    p.add_argument("--truth", help="also write generator ground truth JSON")
    p.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
