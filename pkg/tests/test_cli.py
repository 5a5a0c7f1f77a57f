"""End-to-end runs of the command line entry point, in process."""

import hashlib
import json
from importlib.resources import files

import pytest

from helpers import corpus_of, make_pub
from openimpact import __version__, cli
from openimpact.corpus import serialize_publications

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def read_csv(text):
    """Split CSV text into (comment lines, header tuple, row tuples)."""
    comments, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = tuple(line.split(","))
        else:
            rows.append(tuple(line.split(",")))
    return comments, header, rows


@pytest.fixture
def pubs_file(tmp_path):
    corpus = corpus_of(
        make_pub("P1", [["AA"], ["BB"]], citations=4,
                 author_ids=["X", "Y"]),
        make_pub("P2", [["AA"]], citations=2, author_ids=["X"]),
    )
    path = tmp_path / "pubs.jsonl"
    path.write_text(serialize_publications(corpus), encoding="utf-8")
    return path


@pytest.fixture
def countries_file(tmp_path):
    text = files("openimpact").joinpath("data/countries_2013.csv") \
        .read_text("utf-8")
    path = tmp_path / "countries.csv"
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# exit codes and diagnostics

def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == "openimpact %s" % __version__


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_bad_window_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["indicators", "--pubs", "x", "--window", "2013"])
    assert exc.value.code == 2
    assert "window must look like 1996:2013" in capsys.readouterr().err


def test_unreadable_input_exits_one(tmp_path, capsys):
    rc = cli.main(["indicators", "--pubs", str(tmp_path / "absent.jsonl")])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error: cannot read")


def test_bad_country_header_exits_one(tmp_path, capsys):
    path = tmp_path / "broken.csv"
    path.write_text("code,name\nAA,Alpha\n", encoding="utf-8")
    rc = cli.main(["openness", "--countries", str(path)])
    assert rc == 1
    assert "error: missing required header" in capsys.readouterr().err


def test_parse_diagnostics_go_to_stderr(tmp_path, capsys):
    path = tmp_path / "pubs.jsonl"
    good = make_pub("P1", [["AA"], ["BB"]], citations=1)
    path.write_text(serialize_publications(corpus_of(good)) + "{oops\n",
                    encoding="utf-8")
    rc = cli.main(["indicators", "--pubs", str(path)])
    out, err = capsys.readouterr()
    assert rc == 0
    assert "line 2: invalid JSON" in err
    assert "AA" in out


# ---------------------------------------------------------------------------
# indicators

def test_indicators_stdout_layout(pubs_file, capsys):
    assert cli.main(["indicators", "--pubs", str(pubs_file)]) == 0
    out = capsys.readouterr().out
    frac_text, impact_text = out.split("\n\n")
    digest = hashlib.sha256(pubs_file.read_bytes()).hexdigest()

    comments, header, rows = read_csv(frac_text)
    assert comments == ["# openimpact %s" % __version__,
                        "# input sha256: %s" % digest,
                        "# mode: all-subjects"]
    assert header == ("country_code", "frac_pubs", "int_pct")
    table = {r[0]: (float(r[1]), float(r[2])) for r in rows}
    assert table["AA"] == (pytest.approx(1.5), pytest.approx(100 / 3))
    assert table["BB"] == (pytest.approx(0.5), pytest.approx(100.0))

    _, header, rows = read_csv(impact_text)
    assert header == ("country_code", "mode", "frac_fwci", "weight_mass",
                      "n_pubs")
    impact = {r[0]: r[1:] for r in rows}
    assert impact["AA"][0] == "all-subjects"
    # columns round-trip through %.12g, so 12 significant digits survive
    assert float(impact["AA"][1]) == pytest.approx(8 / 9, abs=1e-9)
    assert float(impact["BB"][1]) == pytest.approx(4 / 3, abs=1e-9)
    assert (float(impact["AA"][2]), impact["AA"][3]) == \
        (pytest.approx(1.5), "2")


def test_indicators_out_prefix_writes_two_files(pubs_file, tmp_path, capsys):
    prefix = tmp_path / "run1"
    assert cli.main(["indicators", "--pubs", str(pubs_file),
                     "--out", str(prefix)]) == 0
    assert capsys.readouterr().out == ""
    frac = (tmp_path / "run1.fractional.csv").read_text(encoding="utf-8")
    impact = (tmp_path / "run1.impact.csv").read_text(encoding="utf-8")
    assert read_csv(frac)[1] == ("country_code", "frac_pubs", "int_pct")
    assert read_csv(impact)[1][:2] == ("country_code", "mode")


def test_indicators_json(pubs_file, capsys):
    assert cli.main(["indicators", "--pubs", str(pubs_file),
                     "--format", "json", "--mode", "field"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["provenance"]["tool"] == "openimpact"
    assert payload["provenance"]["mode"] == "field"
    assert payload["provenance"]["input_sha256"] == \
        hashlib.sha256(pubs_file.read_bytes()).hexdigest()
    frac = {r["country_code"]: r for r in payload["fractional"]}
    assert frac["BB"]["int_pct"] == pytest.approx(100.0)
    assert all(r["mode"] == "field" for r in payload["impact"])


def test_indicators_window_filter(pubs_file, capsys):
    assert cli.main(["indicators", "--pubs", str(pubs_file),
                     "--window", "2011:2012"]) == 0
    out, err = capsys.readouterr()
    assert "outside observation window 2011-2012" in err
    frac_text, _ = out.split("\n\n")
    assert read_csv(frac_text)[2] == []


# ---------------------------------------------------------------------------
# mobility

def test_mobility_csv(tmp_path, capsys):
    corpus = corpus_of(
        make_pub("P1", [["AA"]], year=2009, author_ids=["X"]),
        make_pub("P2", [["BB"]], year=2010, author_ids=["X"]),
    )
    path = tmp_path / "pubs.jsonl"
    path.write_text(serialize_publications(corpus), encoding="utf-8")
    assert cli.main(["mobility", "--pubs", str(path)]) == 0
    _, header, rows = read_csv(capsys.readouterr().out)
    assert header == ("country_code", "new_inflows", "returnees", "mobile",
                      "outflows", "denominator")
    table = {r[0]: r[1:] for r in rows}
    assert table["AA"] == ("0", "0", "1", "1", "1")
    assert table["BB"] == ("1", "0", "1", "0", "1")


def test_mobility_json_round_trip(tmp_path, capsys):
    corpus = corpus_of(
        make_pub("P1", [["AA"]], year=2009, author_ids=["X"]),
        make_pub("P2", [["AA"]], year=2010, author_ids=["X"]),
    )
    path = tmp_path / "pubs.jsonl"
    path.write_text(serialize_publications(corpus), encoding="utf-8")
    assert cli.main(["mobility", "--pubs", str(path),
                     "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["shares"] == [{"country_code": "AA", "new_inflows": 0.0,
                                  "returnees": 0.0, "mobile": 0.0,
                                  "outflows": 0.0, "denominator": 1}]


# ---------------------------------------------------------------------------
# country-table commands

def test_openness_csv(countries_file, capsys):
    assert cli.main(["openness", "--countries", str(countries_file)]) == 0
    comments, header, rows = read_csv(capsys.readouterr().out)
    assert comments[0] == "# openimpact %s" % __version__
    assert header == ("country_code", "openness", "included")
    assert len(rows) == 36
    excluded = [r for r in rows if r[2] == "false"]
    assert [(r[0], r[1]) for r in excluded] == [("LU", "")]
    included = [float(r[1]) for r in rows if r[2] == "true"]
    assert sum(included) == pytest.approx(0.0, abs=1e-9)


def test_openness_json(countries_file, capsys):
    assert cli.main(["openness", "--countries", str(countries_file),
                     "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    component = payload["component"]
    assert set(component["loadings"]) == \
        {"Int.Perc.", "Mobile", "NewInflows", "Returnees"}
    assert component["rows_used"] == 35
    assert 0.75 < component["variance_share"] < 0.9
    assert len(payload["scores"]) == 36


def test_openness_text(countries_file, capsys):
    assert cli.main(["openness", "--countries", str(countries_file),
                     "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "Openness component loadings" in out
    assert "Scores" in out
    assert "\nLU  " in out


def test_openness_too_few_rows_exits_one(tmp_path, capsys):
    header = ("country_code,country_name,frac_fwci,gbard,frac_pubs,"
              "int_pct,new_inflows,returnees,mobile,outflows\n")
    body = "".join("C%d,Name,1.0,1.0,1.0,,0.1,0.1,0.1,0.1\n" % i
                   for i in range(6))
    path = tmp_path / "sparse.csv"
    path.write_text(header + body, encoding="utf-8")
    rc = cli.main(["openness", "--countries", str(path)])
    assert rc == 1
    assert "fewer than 5 rows complete" in capsys.readouterr().err


def test_analyze_json_stdout(countries_file, capsys):
    assert cli.main(["analyze", "--countries", str(countries_file)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["provenance"]["input_sha256"] == \
        hashlib.sha256(countries_file.read_bytes()).hexdigest()
    assert len(payload["correlations"]) == 36
    assert payload["regression"]["n"] == 35
    assert payload["errors"] == []


def test_analyze_out_writes_report_and_figure(countries_file, tmp_path,
                                              capsys):
    out = tmp_path / "report.json"
    assert cli.main(["analyze", "--countries", str(countries_file),
                     "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    json.loads(out.read_text(encoding="utf-8"))
    fig = tmp_path / "report.png"
    assert fig.read_bytes()[:8] == PNG_MAGIC


def test_analyze_text_format(countries_file, tmp_path):
    out = tmp_path / "report.txt"
    assert cli.main(["analyze", "--countries", str(countries_file),
                     "--format", "text", "--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert "Bivariate correlations" in text
    assert "OLS, dependent variable FracFWCI" in text


def test_analyze_explicit_fig_path(countries_file, tmp_path, capsys):
    fig = tmp_path / "bubbles.png"
    assert cli.main(["analyze", "--countries", str(countries_file),
                     "--fig", str(fig)]) == 0
    json.loads(capsys.readouterr().out)
    assert fig.read_bytes()[:8] == PNG_MAGIC


def test_analyze_degraded_table_still_reports(tmp_path, capsys):
    header = ("country_code,country_name,frac_fwci,gbard,frac_pubs,"
              "int_pct,new_inflows,returnees,mobile,outflows\n")
    body = "".join("C%d,Name,%g,%g,%g,,0.1,0.1,0.1,0.1\n"
                   % (i, 1 + 0.1 * i, 10.0 + i, 100.0 + 7 * i)
                   for i in range(6))
    path = tmp_path / "sparse.csv"
    path.write_text(header + body, encoding="utf-8")
    assert cli.main(["analyze", "--countries", str(path)]) == 0
    out, err = capsys.readouterr()
    assert "openness unavailable" in err
    payload = json.loads(out)
    assert payload["component"] is None
    assert "openness index unavailable" in payload["errors"]


def test_scatter_csv_and_figure(countries_file, tmp_path, capsys):
    fig = tmp_path / "scatter.png"
    assert cli.main(["scatter", "--countries", str(countries_file),
                     "--fig", str(fig)]) == 0
    _, header, rows = read_csv(capsys.readouterr().out)
    assert header == ("country_code", "x", "y", "size", "quadrant")
    quadrants = {r[0]: r[4] for r in rows}
    assert quadrants["CH"] == "top-right"
    assert quadrants["JP"] == "bottom-left"
    assert "LU" not in quadrants
    assert fig.read_bytes()[:8] == PNG_MAGIC


def test_scatter_auto_figure_next_to_out(countries_file, tmp_path):
    out = tmp_path / "points.csv"
    assert cli.main(["scatter", "--countries", str(countries_file),
                     "--out", str(out)]) == 0
    assert out.exists()
    assert (tmp_path / "points.png").read_bytes()[:8] == PNG_MAGIC


# ---------------------------------------------------------------------------
# synth

def test_synth_deterministic_output(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli.main(["synth", "--seed", "42", "--out", str(a)]) == 0
    assert cli.main(["synth", "--seed", "42", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.jsonl"
    assert cli.main(["synth", "--seed", "43", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()
    head = a.read_text(encoding="utf-8").splitlines()[:2]
    assert head[0] == "# openimpact %s" % __version__
    assert head[1] == "# seed: 42"


def test_synth_truth_sidecar(tmp_path):
    out, truth = tmp_path / "pubs.jsonl", tmp_path / "truth.json"
    assert cli.main(["synth", "--seed", "9", "--out", str(out),
                     "--truth", str(truth)]) == 0
    payload = json.loads(truth.read_text(encoding="utf-8"))
    assert payload["seed"] == 9
    assert set(payload) == {"seed", "frac_counts", "int_counts",
                            "international_share", "n_resolvable_pubs",
                            "author_mobile"}
    assert sum(payload["frac_counts"].values()) == \
        pytest.approx(payload["n_resolvable_pubs"])


def test_synth_params_override_and_errors(tmp_path, capsys):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"countries": [["QQ", 3, 0.5]],
                                  "years": [2010, 2011],
                                  "mobility_prob": 0.0}),
                      encoding="utf-8")
    out = tmp_path / "pubs.jsonl"
    assert cli.main(["synth", "--seed", "5", "--params", str(params),
                     "--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert "# params sha256:" in text
    assert '"QQ"' in text and '"CH"' not in text

    params.write_text("{oops", encoding="utf-8")
    assert cli.main(["synth", "--seed", "5", "--params", str(params)]) == 1
    assert "error: bad params file" in capsys.readouterr().err

    params.write_text('{"years": [2013, 2009]}', encoding="utf-8")
    assert cli.main(["synth", "--seed", "5", "--params", str(params)]) == 1
    assert "error: bad synthesis parameters" in capsys.readouterr().err


def test_synth_feeds_downstream_commands(tmp_path, capsys):
    pubs = tmp_path / "pubs.jsonl"
    assert cli.main(["synth", "--seed", "7", "--out", str(pubs)]) == 0
    capsys.readouterr()

    assert cli.main(["indicators", "--pubs", str(pubs),
                     "--window", "2009:2013"]) == 0
    out, err = capsys.readouterr()
    assert err == ""
    frac_text, _ = out.split("\n\n")
    codes = {r[0] for r in read_csv(frac_text)[2]}
    assert codes == {"CH", "NL", "US", "JP", "CN"}

    assert cli.main(["mobility", "--pubs", str(pubs),
                     "--window", "2009:2013"]) == 0
    out, err = capsys.readouterr()
    assert err == ""
    rows = read_csv(out)[2]
    assert {r[0] for r in rows} == {"CH", "NL", "US", "JP", "CN"}
    for row in rows:
        assert 0.0 <= float(row[3]) <= 1.0
