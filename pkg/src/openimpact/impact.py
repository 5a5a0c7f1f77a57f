"""Citation baselines and field-weighted citation impact.

A publication's impact is its citation count divided by the expected
count of its baseline group. Groups are keyed by (field, year, type)
in FieldLevel mode, where a paper with m fields joins m groups, or by
(full sorted field set, year, type) in AllSubjects mode, where every
paper is counted exactly once. Country aggregation weights each paper
by the country's fractional share f_i:

    fracFWCI = sum(c_i / e_i * f_i) / sum(f_i)
"""

import enum
from dataclasses import dataclass

from .corpus import Corpus, PublicationRecord
from .fractional import weights_by_pub


class FwciMode(enum.Enum):
    FIELD_LEVEL = "field"
    ALL_SUBJECTS = "all-subjects"


@dataclass
class BaselineTable:
    mode: FwciMode
    groups: dict    # key -> (mean citations, group size); mean 0 = degenerate

    def mean_of(self, key):
        return self.groups[key][0]

    def is_degenerate(self, key):
        return self.groups[key][0] == 0.0


@dataclass
class FracFwciResult:
    mode: FwciMode
    values: dict        # country -> fracFWCI
    weight_mass: dict   # country -> sum of contributing f_i
    n_pubs: dict        # country -> distinct contributing publications


@dataclass
class ModeComparison:
    fwci_field: object          # float or None when every paper excluded
    fwci_all: object
    count_field: float          # fractional pub count, field-level (m-fold)
    count_all: float


def _group_keys(pub: PublicationRecord, mode: FwciMode):
    if mode is FwciMode.FIELD_LEVEL:
        return [(code, pub.year, pub.pub_type) for code in pub.field_codes]
    return [(tuple(sorted(pub.field_codes)), pub.year, pub.pub_type)]


def build_baselines(corpus: Corpus, mode: FwciMode) -> BaselineTable:
    """Group means of citations_5y under the mode's grouping rule."""
    if not corpus.records:
        raise ValueError("empty corpus")
    sums = {}
    sizes = {}
    for pub_id in sorted(corpus.records):
        pub = corpus.records[pub_id]
        for key in _group_keys(pub, mode):
            sums[key] = sums.get(key, 0) + pub.citations_5y
            sizes[key] = sizes.get(key, 0) + 1
    groups = {key: (sums[key] / sizes[key], sizes[key]) for key in sums}
    return BaselineTable(mode=mode, groups=groups)


def fwci_of(pub: PublicationRecord, baselines: BaselineTable):
    """Impact ratio(s) of one publication against its baseline group(s).

    AllSubjects returns a single float, FieldLevel a dict keyed by field
    code. Degenerate groups (zero mean) yield None, the excluded marker.
    """
    if baselines.mode is FwciMode.ALL_SUBJECTS:
        key = _group_keys(pub, baselines.mode)[0]
        if baselines.is_degenerate(key):
            return None
        return pub.citations_5y / baselines.mean_of(key)
    out = {}
    for code in pub.field_codes:
        key = (code, pub.year, pub.pub_type)
        if baselines.is_degenerate(key):
            out[code] = None
        else:
            out[code] = pub.citations_5y / baselines.mean_of(key)
    return out


def frac_fwci(corpus: Corpus, baselines: BaselineTable,
              weights: dict) -> FracFwciResult:
    """Fractional field-weighted impact per country.

    `weights` maps pub_id to a CountryWeightVector from the same corpus.
    Publications in degenerate groups leave both the numerator and the
    denominator. In FieldLevel mode each (paper, field) pair contributes
    separately, which equals combining per-field values by their weight
    mass. Accumulation runs in pub_id-sorted order for bit-stable sums.
    """
    num = {}
    den = {}
    pubs = {}
    for pub_id in sorted(weights):
        vec = weights[pub_id]
        if not vec.weights:
            continue
        pub = corpus.records[pub_id]
        ratios = fwci_of(pub, baselines)
        if baselines.mode is FwciMode.ALL_SUBJECTS:
            contributions = [] if ratios is None else [ratios]
        else:
            contributions = [r for r in (ratios[c] for c in pub.field_codes)
                             if r is not None]
        if not contributions:
            continue
        for code in sorted(vec.weights):
            f = vec.weights[code]
            for ratio in contributions:
                num[code] = num.get(code, 0.0) + ratio * f
                den[code] = den.get(code, 0.0) + f
            pubs.setdefault(code, set()).add(pub_id)
    values = {code: num[code] / den[code]
              for code in sorted(den) if den[code] > 0.0}
    return FracFwciResult(
        mode=baselines.mode,
        values=values,
        weight_mass={code: den[code] for code in sorted(den) if den[code] > 0.0},
        n_pubs={code: len(pubs[code]) for code in sorted(pubs)},
    )


def _fractional_counts_by_mode(corpus: Corpus, weights: dict, mode: FwciMode):
    # counting is independent of citation baselines: FieldLevel counts a
    # paper once per field, AllSubjects once in total
    counts = {}
    for pub_id in sorted(weights):
        vec = weights[pub_id]
        if not vec.weights:
            continue
        multiplicity = (len(corpus.records[pub_id].field_codes)
                        if mode is FwciMode.FIELD_LEVEL else 1)
        for code in sorted(vec.weights):
            counts[code] = counts.get(code, 0.0) + vec.weights[code] * multiplicity
    return counts


def compare_modes(corpus: Corpus, workers: int = 1) -> dict:
    """Run the full impact pipeline under both modes; keyed by country."""
    weights = weights_by_pub(corpus, workers=workers)
    out = {}
    results = {}
    countcols = {}
    for mode in (FwciMode.FIELD_LEVEL, FwciMode.ALL_SUBJECTS):
        baselines = build_baselines(corpus, mode)
        results[mode] = frac_fwci(corpus, baselines, weights)
        countcols[mode] = _fractional_counts_by_mode(corpus, weights, mode)
    codes = sorted(set(countcols[FwciMode.FIELD_LEVEL])
                   | set(countcols[FwciMode.ALL_SUBJECTS]))
    for code in codes:
        out[code] = ModeComparison(
            fwci_field=results[FwciMode.FIELD_LEVEL].values.get(code),
            fwci_all=results[FwciMode.ALL_SUBJECTS].values.get(code),
            count_field=countcols[FwciMode.FIELD_LEVEL].get(code, 0.0),
            count_all=countcols[FwciMode.ALL_SUBJECTS].get(code, 0.0),
        )
    return out
