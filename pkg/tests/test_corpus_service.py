"""
Tests for the corpus and self-test services.
"""

import pytest
from pydantic import ValidationError

from catlift.errors import CatliftError, SizeLimitExceeded
from catlift.models import SizeGuard
from catlift.models.documents import CorpusMode, CorpusSpec
from catlift.models.settings import REPO_ROOT
from catlift.services.awfs_service import AwfsService
from catlift.services.category_service import CategoryService
from catlift.services.corpus_service import CATALOG, CorpusService, grid, interleave
from catlift.services.search_service import SearchService
from catlift.services.selftest_service import SUITES, SelftestService


@pytest.fixture(scope="module")
def default_corpus():
    """Corpus service built from the default settings, guard included."""
    return CorpusService(data_dir=REPO_ROOT / "data")


class TestCorpusService:
    """Test cases for CorpusService."""

    def test_catalog_order(self, corpus, categories):
        """The catalog comes back in its fixed order and every entry is a category."""
        cats = corpus.catalog()

        assert [c.name for c in cats] == list(CATALOG)
        assert all(categories.validate_category(c).ok for c in cats)

    def test_catalog_category_unknown(self, corpus):
        with pytest.raises(CatliftError):
            corpus.catalog_category("Four")

    @pytest.mark.parametrize(
        "bounds,expected",
        [((1, 1), 3), ((2, 1), 7), ((1, 3), 45), ((2, 2), 30), ((2, 3), 142), ((3, 3), 277)],
    )
    def test_exhaustive_counts(self, corpus, categories, bounds, expected):
        """Categories up to isomorphism within the object and morphism bounds."""
        found = corpus.exhaustive(*bounds)

        assert len(found) == expected
        assert all(categories.validate_category(c).ok for c in found)
        assert len({c.name for c in found}) == len(found)

    @pytest.mark.parametrize("bounds", [(2, 1), (2, 2)])
    def test_exhaustive_has_no_isomorphic_pair(self, corpus, categories, bounds):
        found = corpus.exhaustive(*bounds)
        for i, a in enumerate(found):
            for b in found[i + 1:]:
                if len(a.objects) == len(b.objects) and len(a.morphisms) == len(b.morphisms):
                    assert categories.find_isomorphism(a, b) is None

    def test_exhaustive_acceptance_bounds(self, default_corpus):
        """Three objects and five non-identity morphisms stay within the default guard."""
        found = default_corpus.exhaustive(3, 5)
        small = [c for c in found if len(c.non_identities) <= 3]

        assert len(small) == 277
        assert len(found) > 277
        assert all(len(c.objects) <= 3 and len(c.non_identities) <= 5 for c in found)

    def test_exhaustive_is_cached(self, corpus):
        first = corpus.exhaustive(2, 2)

        assert [c.name for c in corpus.exhaustive(2, 2)] == [c.name for c in first]
        assert corpus.exhaustive(2, 2) is not first

    def test_exhaustive_bounds(self, corpus):
        with pytest.raises(CatliftError):
            corpus.exhaustive(0, 2)

    def test_tight_guard_stops_table_search(self):
        """The composition table search counts the nodes it visits."""
        tight = CategoryService(SearchService(SizeGuard(max_search=3)))
        with pytest.raises(SizeLimitExceeded) as excinfo:
            CorpusService(tight, data_dir=REPO_ROOT / "data").exhaustive(1, 2)
        assert "visited nodes" in str(excinfo.value)

    def test_random_posets_reproducible(self, corpus, categories):
        """The same seed gives the same posets; names record seed and index."""
        first = corpus.random_posets(3, 3, seed=11, count=5)
        second = corpus.random_posets(3, 3, seed=11, count=5)

        assert [c.name for c in first] == [f"R11.{k}" for k in range(5)]
        assert [c.morphisms for c in first] == [c.morphisms for c in second]
        for c in first:
            assert categories.validate_category(c).ok
            assert len(c.objects) <= 3
            assert len(c.non_identities) <= 3

    def test_generate_corpus_modes(self, corpus):
        assert [c.name for c in corpus.generate_corpus()] == list(CATALOG)
        assert len(corpus.generate_corpus(CorpusSpec(mode=CorpusMode.EXHAUSTIVE, max_objects=1, max_nonidentity_morphisms=1))) == 3
        assert len(corpus.generate_corpus(CorpusSpec(mode=CorpusMode.RANDOM, seed=3, count=4))) == 4

    def test_corpus_spec_needs_a_morphism(self):
        with pytest.raises(ValidationError):
            CorpusSpec(mode=CorpusMode.EXHAUSTIVE, max_nonidentity_morphisms=0)

    def test_acceptance_categories(self, corpus):
        cats = corpus.acceptance_categories(1, 1)

        assert [c.name for c in cats[: len(CATALOG)]] == list(CATALOG)
        assert len(cats) == len(CATALOG) + 3

    def test_functor_layer(self, corpus, one, two):
        """One->One, One->Two (2), Two->One, Two->Two (3)."""
        assert len(corpus.functors([one, two])) == 7

    def test_functor_layer_limit(self, corpus, one, two):
        assert len(corpus.functors([one, two], limit=4)) == 4

    def test_functor_layer_spreads_over_pairs(self, corpus, one, two, three):
        """A small limit still reaches every pair of the first categories."""
        found = corpus.functors([one, two, three], limit=4)
        pairs = {(f.dom.name, f.cod.name) for f in found}

        assert pairs == {("One", "One"), ("One", "Two"), ("Two", "One"), ("Two", "Two")}

    def test_squares_for(self, corpus, delta1_coref, twolifts_lens):
        """A bottom functor Two -> Two and a top object over its image of 0."""
        squares = corpus.squares_for(delta1_coref, twolifts_lens)

        assert len(squares) == 4
        for sq in squares:
            assert twolifts_lens.functor.ob(sq.top.ob("*")) == sq.bottom.ob("0")

    def test_squares_spread_over_pairs(self, corpus, lenses, delta1_coref, delta2_coref, twolifts_lens, two):
        """The square layer draws from several (coreflection, lens) pairs before filling up on one."""
        squares = corpus.squares([delta1_coref, delta2_coref], [twolifts_lens, lenses.identity_lens(two)], limit=4)
        pairs = {(sq.coreflection.key, sq.lens.key) for sq in squares}

        assert len(squares) == 4
        assert len(pairs) == 4

    def test_lens_cells_commute(self, corpus, lenses, twolifts_lens, two):
        cells = list(corpus.lens_cells(twolifts_lens, lenses.identity_lens(two)))

        assert cells
        for top, bottom in cells:
            assert lenses.is_lens_cell(top, bottom, twolifts_lens, lenses.identity_lens(two)).holds

    def test_derive(self, corpus, one, two, three):
        """Every derived layer is populated and its squares start at twisted coreflections."""
        derived = corpus.derive([one, two, three], limit=30)

        assert derived.functors
        assert derived.coreflections
        assert derived.lenses
        assert derived.squares
        assert len(derived.squares) <= 30


class TestRoundRobin:
    """Index grids and interleaving of item sources."""

    def test_grid_order(self):
        assert list(grid(2, 3)) == [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2)]

    def test_grid_covers_every_pair(self):
        assert sorted(grid(3, 2)) == [(i, j) for i in range(3) for j in range(2)]

    def test_interleave(self):
        assert list(interleave([iter([1, 2, 3]), iter([]), iter([4])])) == [1, 4, 2, 3]

    def test_interleave_drops_guarded_source(self):
        def guarded():
            yield 5
            raise SizeLimitExceeded("too big")

        assert list(interleave([guarded(), iter([6, 7])])) == [5, 6, 7]


class TestSelftestService:
    """Test cases for SelftestService."""

    @pytest.fixture(scope="class")
    def selftest(self, corpus, awfs):
        return SelftestService(corpus, awfs, limit=20, bounds=(1, 1))

    def test_suite_names(self, selftest):
        assert tuple(selftest.suites) == SUITES

    def test_corpus_adds_exhaustive_categories(self, selftest):
        names = [c.name for c in selftest.corpus.categories]

        assert names[: len(CATALOG)] == list(CATALOG)
        assert names[len(CATALOG):] == [c.name for c in selftest.corpus_service.exhaustive(1, 1)]

    def test_default_corpus_reaches_three_objects(self, default_corpus):
        """The default bounds put every category with up to three objects and five morphisms after the catalog."""
        selftest = SelftestService(default_corpus, limit=20)
        names = [c.name for c in selftest.corpus.categories]

        assert selftest.bounds == (3, 5)
        assert names[: len(CATALOG)] == list(CATALOG)
        assert any(name.startswith("E3.") for name in names)

    def test_fixtures_suite(self, selftest):
        [report] = selftest.run(["fixtures"])

        assert report.name == "fixtures"
        assert report.ok
        assert report.checked == 5

    def test_twistedness_suite(self, selftest):
        [report] = selftest.run(["twistedness"])

        assert report.ok
        assert report.checked > 0

    def test_lifting_axioms_suite(self, selftest):
        """All four laws are checked within the limit."""
        [report] = selftest.run(["lifting-axioms"])

        assert report.ok, report.failures
        assert 0 < report.checked <= 20

    def test_suites_clear_caches(self, corpus, categories, lenses, coreflections):
        awfs = AwfsService(categories, lenses, coreflections, cache_size=8)
        selftest = SelftestService(corpus, awfs, limit=5, bounds=(1, 1))
        selftest.run(["factorisation"])

        assert len(awfs._factorizations) == 0

    def test_unknown_suite(self, selftest):
        with pytest.raises(CatliftError) as excinfo:
            selftest.run(["nope"])
        assert "unknown suite nope" in str(excinfo.value)
