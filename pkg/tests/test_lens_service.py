"""
Tests for the lens service.
"""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from catlift.errors import PreconditionError
from catlift.models import DeltaLens, FinCategory
from catlift.services.lens_service import GeneratedVariant

PROPERTY_SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@pytest.fixture(scope="module")
def u1_lens(twolifts_lens):
    """The other lens structure on the TwoLifts functor, choosing u1."""
    return DeltaLens(functor=twolifts_lens.functor, lifts={**twolifts_lens.lifts, ("a", "01"): "u1"})


@pytest.fixture(scope="module")
def over_three(make_functor, three):
    """x -> y -> z with a second arrow h2: x -> z beside the composite h1, sent onto Three."""
    dom = FinCategory.from_table(
        ["x", "y", "z"],
        {"f1": ("x", "y"), "g": ("y", "z"), "h1": ("x", "z"), "h2": ("x", "z")},
        {("g", "f1"): "h1"},
        name="TwoOverComposite",
    )
    return make_functor(dom, three, {"x": "0", "y": "1", "z": "2"}, {"f1": "01", "g": "12", "h1": "02", "h2": "02"})


class TestLensService:
    """Test cases for LensService."""

    def test_identity_lens(self, lenses, twolifts):
        """The identity lens chooses every morphism as its own lift."""
        lens = lenses.identity_lens(twolifts)

        assert lenses.check_delta_lens(lens).ok
        assert lens.lift("a", "u2") == "u2"

    def test_example_lens_is_valid(self, lenses, twolifts_lens, u1_lens):
        assert lenses.check_delta_lens(twolifts_lens).ok
        assert lenses.check_delta_lens(u1_lens).ok
        assert twolifts_lens.lift("a", "01") == "u2"

    def test_identity_lift_violation(self, lenses, bang):
        """Lifting the identity at 0 to 01 breaks only the identity axiom."""
        lens = DeltaLens(functor=bang, lifts={("0", "1_*"): "01", ("1", "1_*"): "1_1"})
        report = lenses.check_delta_lens(lens)

        assert [v.law for v in report.violations] == ["DL2"]
        assert report.violations[0].witness == ("0", "1_*")

    def test_missing_lift(self, lenses, twolifts_lens):
        """A lift table with a hole fails totality."""
        lifts = dict(twolifts_lens.lifts)
        del lifts[("a", "01")]
        report = lenses.check_delta_lens(DeltaLens(functor=twolifts_lens.functor, lifts=lifts))

        assert report.violations[0].law == "totality"
        assert report.violations[0].witness == ("a", "01")

    def test_lift_over_wrong_morphism(self, lenses, twolifts_lens):
        """Choosing v as the lift of 01 at a fails typing."""
        lifts = {**twolifts_lens.lifts, ("a", "01"): "v"}
        report = lenses.check_delta_lens(DeltaLens(functor=twolifts_lens.functor, lifts=lifts))

        assert report.violations[0].law == "typing"

    def test_compose_with_identity(self, lenses, categories, twolifts_lens, two):
        """Composing with the identity lens leaves the lifts unchanged."""
        composite = lenses.compose_lenses(twolifts_lens, lenses.identity_lens(two))

        assert composite.lifts == twolifts_lens.lifts
        assert categories.functors_equal(composite.functor, twolifts_lens.functor)

    def test_compose_not_composable(self, lenses, twolifts_lens, three):
        with pytest.raises(PreconditionError):
            lenses.compose_lenses(twolifts_lens, lenses.identity_lens(three))

    def test_lens_from_dopf(self, lenses, elements_dopf):
        """A discrete opfibration has exactly one lens structure, its unique lifts."""
        lens = lenses.lens_from_dopf(elements_dopf)

        assert lens.lift("q", "01") == "m2"
        assert lens.lift("p", "01") == "m1"
        assert lenses.check_delta_lens(lens).ok
        assert lenses.is_split_opfibration(lens).holds

    def test_lens_from_non_dopf(self, lenses, bang):
        with pytest.raises(PreconditionError) as excinfo:
            lenses.lens_from_dopf(bang)
        assert excinfo.value.witness == ("0", "1_*")

    def test_split_opfibration(self, lenses, twolifts_lens, u1_lens):
        """Choosing u2 is not opcartesian: nothing over 1_1 goes from c back to b."""
        result = lenses.is_split_opfibration(twolifts_lens)

        assert not result.holds
        assert result.witness == ("a", "01", "u1")
        assert lenses.is_split_opfibration(u1_lens).holds

    def test_lens_cells(self, lenses, categories, twolifts_lens, u1_lens, two):
        """The identity square is a cell between a lens and itself but not between different lenses."""
        top = categories.identity_functor(twolifts_lens.functor.dom)
        bottom = categories.identity_functor(two)

        assert lenses.is_lens_cell(top, bottom, twolifts_lens, twolifts_lens).holds
        result = lenses.is_lens_cell(top, bottom, u1_lens, twolifts_lens)
        assert not result.holds
        assert result.witness == ("a", "01")

    def test_paste_cells(self, lenses, categories, twolifts_lens, two, one, bang):
        """Cells into identity lenses paste horizontally along composite functors."""
        f = twolifts_lens.functor
        id_two, id_one = lenses.identity_lens(two), lenses.identity_lens(one)

        assert lenses.is_lens_cell(f, categories.identity_functor(two), twolifts_lens, id_two).holds
        assert lenses.is_lens_cell(bang, bang, id_two, id_one).holds
        assert lenses.is_lens_cell(categories.compose_functors(bang, f), bang, twolifts_lens, id_one).holds

    def test_tabulator(self, lenses, categories, twolifts_lens):
        """The tabulator keeps the identities and the chosen u2."""
        tab = lenses.tabulator(twolifts_lens)

        assert set(tab.category.morphisms) == {"1_a", "1_b", "1_c", "u2"}
        assert categories.validate_category(tab.category).ok
        assert categories.dopf_defect(tab.right) is None

    def test_induce_into_tabulator(self, lenses, categories, make_functor, two, twolifts_lens):
        """A cell out of an identity lens factors through the tabulator."""
        h = make_functor(two, twolifts_lens.functor.dom, {"0": "a", "1": "c"}, {"01": "u2"})
        j = lenses.induce_into_tabulator(twolifts_lens, h, categories.identity_functor(two))

        assert j.mor("01") == "u2"
        assert categories.validate_functor(j).ok

    def test_induce_needs_a_cell(self, lenses, categories, make_functor, two, twolifts_lens):
        h = make_functor(two, twolifts_lens.functor.dom, {"0": "a", "1": "b"}, {"01": "u1"})
        with pytest.raises(PreconditionError):
            lenses.induce_into_tabulator(twolifts_lens, h, categories.identity_functor(two))

    def test_lens_from_diagram(self, lenses, twolifts_lens):
        """The tabulator inclusion recovers the lens it came from."""
        tab = lenses.tabulator(twolifts_lens)
        lens = lenses.lens_from_diagram(tab.left, twolifts_lens.functor)

        assert lens.lifts == twolifts_lens.lifts


class TestLensEnumeration:
    """Enumeration of lens structures and generated structures."""

    def test_twolifts_structures(self, lenses, twolifts_lens):
        """Two lens structures on the TwoLifts functor, one per arrow over 01."""
        found = lenses.enumerate_lens_structures(twolifts_lens.functor)

        assert found.count == 2
        assert sorted(s.lift("a", "01") for s in found.structures) == ["u1", "u2"]

    def test_bang_structures(self, lenses, bang):
        found = lenses.enumerate_lens_structures(bang)

        assert found.count == 1
        assert found.structures[0].lift("0", "1_*") == "1_0"

    def test_count_only(self, lenses, twolifts_lens):
        found = lenses.enumerate_lens_structures(twolifts_lens.functor, materialize=False)

        assert found.count == 2
        assert found.structures is None

    def test_generated_variants(self, lenses, twolifts_lens, elements_dopf):
        """Only u1 is opcartesian; no table on TwoLifts is a discrete opfibration."""
        f = twolifts_lens.functor
        sopf = lenses.enumerate_generated_structures(f, GeneratedVariant.SOPF)

        assert sopf.count == 1
        assert sopf.structures[0].lift("a", "01") == "u1"
        assert lenses.enumerate_generated_structures(f, GeneratedVariant.DOPF).count == 0
        assert lenses.enumerate_generated_structures(f, GeneratedVariant.LENS).count == 2
        assert lenses.enumerate_generated_structures(elements_dopf, GeneratedVariant.DOPF).count == 1

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_generated_lenses_are_lenses(self, lenses, corpus_functors, data):
        """Compatibility with the generating cells picks out exactly the lens axioms."""
        f = data.draw(st.sampled_from(corpus_functors))
        found = lenses.enumerate_lens_structures(f)
        generated = lenses.enumerate_generated_structures(f, GeneratedVariant.LENS)

        assert {s.signature for s in found.structures} == {s.signature for s in generated.structures}
        assert all(lenses.check_delta_lens(s).ok for s in found.structures)

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_dopf_generated(self, lenses, categories, corpus_functors, data):
        """The dopf-generated tables exist, uniquely, exactly on discrete opfibrations."""
        f = data.draw(st.sampled_from(corpus_functors))
        count = lenses.enumerate_generated_structures(f, GeneratedVariant.DOPF).count

        assert count == (1 if categories.dopf_defect(f) is None else 0)

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_sopf_generated(self, lenses, corpus_functors, data):
        """sopf-generated tables are split opfibrations."""
        f = data.draw(st.sampled_from(corpus_functors))
        for lens in lenses.enumerate_generated_structures(f, GeneratedVariant.SOPF).structures:
            assert lenses.check_delta_lens(lens).ok
            assert lenses.is_split_opfibration(lens).holds

    def test_generated_index_puts_steps_after_their_lift(self, lenses, twolifts_lens):
        """Every step follows the lift at the target of its first morphism, over the same arrow."""
        index = lenses.generated_index(twolifts_lens.functor)
        a_cat = twolifts_lens.functor.dom

        for position, (kind, w, v) in enumerate(index):
            if kind == "step":
                assert ("lift", a_cat.tgt(w), v) in index[:position]
        assert ("step", "1_a", "01") in index
        assert ("step", "u1", "1_1") in index

    def test_independent_step_rejected(self, lenses, twolifts_lens):
        """A second step through u1 where the lift chose u2 breaks the step cell."""
        f = twolifts_lens.functor
        result = lenses.check_generated_cells(f, twolifts_lens.lifts, {("1_a", "01"): "u1"})

        assert not result.holds
        assert result.witness == ("1_a", "01", "u1")
        assert result.message.startswith("step cell")
        assert lenses.check_generated_cells(f, twolifts_lens.lifts, {("1_a", "01"): "u2"}).holds

    def test_composite_cell_rejected(self, lenses, over_three):
        """Lifting 02 to h2 while the steps compose to h1 breaks the composite cell only."""
        lifts = {
            ("x", "1_0"): "1_x",
            ("x", "01"): "f1",
            ("x", "02"): "h2",
            ("y", "1_1"): "1_y",
            ("y", "12"): "g",
            ("z", "1_2"): "1_z",
        }
        steps = {("f1", "12"): "g"}
        result = lenses.check_generated_cells(over_three, lifts, steps)

        assert not result.holds
        assert result.witness == ("x", "01", "12")
        assert result.message.startswith("composite cell")
        assert lenses.check_generated_cells(over_three, {**lifts, ("x", "02"): "h1"}, steps).holds

    def test_generated_structures_pick_the_composite(self, lenses, over_three):
        found = lenses.enumerate_generated_structures(over_three, GeneratedVariant.LENS)

        assert found.count == 1
        assert found.structures[0].lift("x", "02") == "h1"

    def test_identity_cell_rejected(self, lenses, bang):
        result = lenses.check_generated_cells(bang, {("0", "1_*"): "01"}, {})

        assert not result.holds
        assert result.witness == ("0", "1_*", "01")
        assert result.message.startswith("identity cell")

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_generated_cells_hold_on_lenses(self, lenses, corpus_functors, data):
        """Every lens with steps read off its own lifts passes the cells; changing one step fails them."""
        f = data.draw(st.sampled_from(corpus_functors))
        a_cat = f.dom
        for lens in lenses.enumerate_lens_structures(f).structures:
            steps = {
                (w, v): lens.lift(a_cat.tgt(w), v)
                for _, w, v in (var for var in lenses.generated_index(f) if var[0] == "step")
            }
            assert lenses.check_generated_cells(f, lens.lifts, steps).holds

            for (w, v), chosen in steps.items():
                others = [m for m in a_cat.out_of(a_cat.tgt(w)) if f.mor(m) == v and m != chosen]
                if others:
                    moved = {**steps, (w, v): others[0]}
                    assert not lenses.check_generated_cells(f, lens.lifts, moved).holds


class TestLensComposition:
    """Lens composition over the corpus."""

    @pytest.fixture(scope="class")
    def composable_triples(self, corpus_lenses):
        return [
            (first, second, third)
            for first in corpus_lenses
            for second in corpus_lenses
            if first.functor.cod.key == second.functor.dom.key
            for third in corpus_lenses
            if second.functor.cod.key == third.functor.dom.key
        ]

    def test_triples_include_the_twolifts_lens(self, composable_triples, twolifts_lens):
        assert any(first.signature == twolifts_lens.signature for first, _, _ in composable_triples)

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_composition_is_associative(self, lenses, categories, composable_triples, data):
        """Both bracketings give the same lift table over the same functor."""
        first, second, third = data.draw(st.sampled_from(composable_triples))
        left = lenses.compose_lenses(lenses.compose_lenses(first, second), third)
        right = lenses.compose_lenses(first, lenses.compose_lenses(second, third))

        assert categories.functors_equal(left.functor, right.functor)
        assert left.signature == right.signature
        assert lenses.check_delta_lens(left).ok
