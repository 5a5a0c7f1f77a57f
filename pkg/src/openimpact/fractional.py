"""Fractional country weighting and the indicators built from it.

A publication is split across countries by author share: each author holds
1/(n authors) of the paper and splits it equally over their affiliations.
Authors without a resolvable country drop out and the remaining mass is
renormalized, so every attributable paper always sums to weight 1.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .corpus import Corpus, PublicationRecord


@dataclass(frozen=True)
class CountryWeightVector:
    pub_id: str
    weights: dict   # country_code -> weight in (0, 1]

    @property
    def international(self):
        return len(self.weights) >= 2


@dataclass
class FractionalCounts:
    counts: dict            # country -> fractional publication count
    international: dict     # country -> fractional count over international pubs
    n_attributed: int       # publications with >= 1 resolvable country


def country_weights(pub: PublicationRecord) -> CountryWeightVector:
    """Fractional per-country weights of one publication.

    Empty vector iff no author has a resolvable country.
    """
    resolvable = [a for a in pub.authors if a.countries]
    if not resolvable:
        return CountryWeightVector(pub_id=pub.pub_id, weights={})
    per_author = 1.0 / len(resolvable)
    raw = {}
    for author in resolvable:
        share = per_author / len(author.countries)
        for code in author.countries:
            raw[code] = raw.get(code, 0.0) + share
    total = sum(raw.values())
    # renormalize the mass dropped with unresolvable authors
    weights = {code: raw[code] / total for code in sorted(raw)}
    return CountryWeightVector(pub_id=pub.pub_id, weights=weights)


def weights_by_pub(corpus: Corpus, workers: int = 1) -> dict:
    """country_weights for every record, keyed by pub_id.

    The map step may run on a thread pool; results are keyed, so the
    outcome is identical for any worker count.
    """
    records = [corpus.records[pid] for pid in sorted(corpus.records)]
    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(country_weights, records))
    else:
        vectors = [country_weights(rec) for rec in records]
    return {vec.pub_id: vec for vec in vectors}


def fractional_pub_counts(corpus: Corpus, workers: int = 1) -> FractionalCounts:
    """Per-country fractional counts, accumulated in pub_id-sorted order.

    A publication is international iff its weight vector names at least
    two countries.
    """
    vectors = weights_by_pub(corpus, workers=workers)
    counts = {}
    international = {}
    n_attributed = 0
    for pub_id in sorted(vectors):
        vec = vectors[pub_id]
        if not vec.weights:
            continue
        n_attributed += 1
        for code in sorted(vec.weights):
            w = vec.weights[code]
            counts[code] = counts.get(code, 0.0) + w
            if vec.international:
                international[code] = international.get(code, 0.0) + w
    return FractionalCounts(counts=counts, international=international,
                            n_attributed=n_attributed)


def international_share(counts: FractionalCounts) -> dict:
    """Percent of each country's fractional count that is international.

    Countries with zero fractional count are omitted.
    """
    return {
        code: 100.0 * counts.international.get(code, 0.0) / counts.counts[code]
        for code in sorted(counts.counts)
        if counts.counts[code] > 0.0
    }
