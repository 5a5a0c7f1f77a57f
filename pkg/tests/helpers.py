"""Shared builders and strategies for the test suite."""

from hypothesis import strategies as st

from openimpact.corpus import AuthorEntry, Corpus, PublicationRecord

COUNTRY_POOL = ("AA", "BB", "CC", "DD")
FIELD_POOL = ("F1", "F2", "F3")


def make_pub(pub_id, author_countries, year=2010, pub_type="article",
             fields=("F1",), citations=0, author_ids=None):
    """Build a record from a list of per-author country lists."""
    if author_ids is None:
        author_ids = ["%s-a%d" % (pub_id, i + 1)
                      for i in range(len(author_countries))]
    authors = tuple(
        AuthorEntry(author_id=aid, countries=tuple(countries))
        for aid, countries in zip(author_ids, author_countries))
    return PublicationRecord(pub_id=pub_id, year=year, pub_type=pub_type,
                             field_codes=tuple(fields), authors=authors,
                             citations_5y=citations)


def corpus_of(*pubs, window=(1996, 2013)):
    return Corpus(records={p.pub_id: p for p in pubs},
                  observation_window=window)


@st.composite
def author_countries(draw):
    return draw(st.lists(st.sampled_from(COUNTRY_POOL),
                         min_size=0, max_size=3, unique=True))


@st.composite
def publications(draw, pub_id):
    n_authors = draw(st.integers(min_value=1, max_value=5))
    countries = [draw(author_countries()) for _ in range(n_authors)]
    return make_pub(
        pub_id,
        countries,
        year=draw(st.integers(min_value=2009, max_value=2012)),
        pub_type=draw(st.sampled_from(("article", "review"))),
        fields=tuple(draw(st.lists(st.sampled_from(FIELD_POOL),
                                   min_size=1, max_size=2, unique=True))),
        citations=draw(st.integers(min_value=0, max_value=20)),
    )


@st.composite
def small_corpora(draw, min_pubs=1, max_pubs=12):
    n = draw(st.integers(min_value=min_pubs, max_value=max_pubs))
    pubs = [draw(publications("P%03d" % i)) for i in range(n)]
    return corpus_of(*pubs, window=(2009, 2012))
