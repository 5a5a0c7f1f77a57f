"""Author career timelines and mobility classification.

Every publication with a resolvable country set is one career event for
each of its authors. Authors with at least two events are classified per
associated country: new inflow (started elsewhere, arrived later),
outflow (started here, published elsewhere later), returnee (left and
came back), and the author-level mobile flag (any event set differing
from the first). Country shares all use one denominator: authors with
two or more events and at least one event naming the country.
"""

from dataclasses import dataclass

from .corpus import Corpus


@dataclass(frozen=True)
class CareerTimeline:
    author_id: str
    events: tuple   # ((year, pub_id, frozenset of codes), ...) sorted


@dataclass(frozen=True)
class MobilityFlags:
    author_id: str
    country_code: str
    is_inflow: bool
    is_outflow: bool
    is_returnee: bool
    is_mobile: bool     # author-level


@dataclass
class MobilityShares:
    shares: dict        # country -> dict with the four share keys
    denominators: dict  # country -> qualifying author count


def build_timelines(corpus: Corpus) -> dict:
    """One CareerTimeline per author with >= 1 resolvable-country event."""
    events_by_author = {}
    for pub_id in sorted(corpus.records):
        pub = corpus.records[pub_id]
        for entry in pub.authors:
            if not entry.countries:
                continue
            events_by_author.setdefault(entry.author_id, []).append(
                (pub.year, pub.pub_id, frozenset(entry.countries)))
    timelines = {}
    for author_id in sorted(events_by_author):
        events = sorted(events_by_author[author_id], key=lambda e: (e[0], e[1]))
        timelines[author_id] = CareerTimeline(author_id=author_id,
                                              events=tuple(events))
    return timelines


def classify(timeline: CareerTimeline, country: str) -> MobilityFlags:
    """Mobility flags of one author with respect to one country.

    Requires >= 2 events and the country appearing in at least one of
    them. Containment is per-event set membership; "mobile" compares
    whole sets against the first event's set.
    """
    sets = [e[2] for e in timeline.events]
    if len(sets) < 2:
        raise ValueError("insufficient events")
    if not any(country in s for s in sets):
        raise ValueError("not associated with %s" % country)
    first = sets[0]
    starts_there = country in first
    inflow = (not starts_there) and any(country in s for s in sets[1:])
    outflow = starts_there and any(country not in s for s in sets[1:])
    returnee = False
    if starts_there:
        for j in range(1, len(sets)):
            if country not in sets[j]:
                if any(country in sets[k] for k in range(j + 1, len(sets))):
                    returnee = True
                break
    mobile = any(s != first for s in sets[1:])
    return MobilityFlags(author_id=timeline.author_id, country_code=country,
                         is_inflow=inflow, is_outflow=outflow,
                         is_returnee=returnee, is_mobile=mobile)


def mobility_shares(corpus: Corpus) -> MobilityShares:
    """Country-level shares of the four mobility patterns.

    Countries without qualifying authors are omitted.
    """
    timelines = build_timelines(corpus)
    tallies = {}
    for author_id in sorted(timelines):
        timeline = timelines[author_id]
        if len(timeline.events) < 2:
            continue
        associated = sorted(set().union(*(e[2] for e in timeline.events)))
        for country in associated:
            flags = classify(timeline, country)
            t = tallies.setdefault(country, {"n": 0, "new_inflows": 0,
                                             "returnees": 0, "mobile": 0,
                                             "outflows": 0})
            t["n"] += 1
            t["new_inflows"] += flags.is_inflow
            t["outflows"] += flags.is_outflow
            t["returnees"] += flags.is_returnee
            t["mobile"] += flags.is_mobile
    shares = {}
    denominators = {}
    for country in sorted(tallies):
        t = tallies[country]
        denominators[country] = t["n"]
        shares[country] = {
            "new_inflows": t["new_inflows"] / t["n"],
            "returnees": t["returnees"] / t["n"],
            "mobile": t["mobile"] / t["n"],
            "outflows": t["outflows"] / t["n"],
        }
    return MobilityShares(shares=shares, denominators=denominators)
