"""
Tests for the category service.
"""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from catlift.errors import LiftError, PreconditionError, SizeLimitExceeded
from catlift.models import FinCategory, FinFunctor, SizeGuard
from catlift.services.category_service import CategoryService
from catlift.services.search_service import SearchService

PROPERTY_SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@pytest.fixture(scope="module")
def parallel():
    """x -> y with two parallel arrows, both followed by h: y -> z."""
    return FinCategory.from_table(
        ["x", "y", "z"],
        {"f": ("x", "y"), "g": ("x", "y"), "h": ("y", "z"), "hf": ("x", "z"), "hg": ("x", "z")},
        {("h", "f"): "hf", ("h", "g"): "hg"},
        name="Parallel",
    )


@pytest.fixture(scope="module")
def bex_pushout(categories, split_idempotent_initial, iota_two):
    """Pushout of the split idempotent beside a point along the inclusion of DiscTwo into Two."""
    return categories.pushout_along_discrete(split_idempotent_initial, iota_two)


@pytest.fixture(scope="module")
def bex_cocones(categories, bex_pushout, catalog):
    """Every pair of functors into Bex agreeing on DiscTwo."""
    square, bex = bex_pushout, catalog["Bex"]
    rights = list(categories.enumerate_functors(square.initial.cod, bex))
    return [
        (left, right)
        for left in categories.enumerate_functors(square.iota.cod, bex)
        for right in rights
        if all(right.ob(square.initial.ob(o)) == left.ob(square.iota.ob(o)) for o in square.initial.dom.objects)
    ]


@pytest.fixture(scope="module")
def boo_dopf_pairs(categories, awfs, corpus_functors, bang, delta1):
    """(bijective-on-objects, discrete opfibration) pairs with a common domain."""
    pairs = [
        (f, g)
        for f in corpus_functors
        if categories.is_bijective_on_objects(f)
        for g in corpus_functors
        if g.dom.key == f.dom.key and categories.dopf_defect(g) is None
    ]
    for functor in (bang, delta1):
        ff = awfs.factorize(functor)
        pairs.append((ff.phi, categories.compose_functors(ff.right, ff.phi)))
    return pairs


class TestCategoryLaws:
    """Law checks for categories, functors and transformations."""

    def test_catalog_is_valid(self, categories, catalog):
        """Every catalog category passes every law."""
        for name, c in catalog.items():
            report = categories.validate_category(c)
            assert report.ok, f"{name}: {report.violations}"

    def test_missing_composite(self, categories):
        """A loop without its square in the table violates totality."""
        c = FinCategory.from_table(["x"], {"e": ("x", "x")}, {})
        report = categories.validate_category(c)

        assert not report.ok
        assert report.violations[0].law == "totality"
        assert report.violations[0].witness == ("e", "e")

    def test_non_composable_entry(self, categories):
        """A composite defined on a non-composable pair is reported."""
        c = FinCategory.from_table(["0", "1"], {"f": ("0", "1")}, {("f", "f"): "f"})
        report = categories.validate_category(c)

        assert any(v.law == "composability" for v in report.violations)

    def test_functor_valid(self, categories, delta1, delta2, bang, iota_two):
        """The standard functors are functors."""
        for functor in (delta1, delta2, bang, iota_two):
            assert categories.validate_functor(functor).ok

    def test_functor_wrong_endpoints(self, categories, make_functor, three, two):
        """A morphism sent to an arrow with the wrong ends is a typing violation."""
        functor = make_functor(three, two, {"0": "0", "1": "0", "2": "1"}, {"01": "1_0", "12": "01", "02": "1_0"})
        report = categories.validate_functor(functor)

        assert [v.law for v in report.violations] == ["typing"]
        assert report.violations[0].witness == ("02",)

    def test_functor_breaks_composition(self, categories, make_functor, parallel):
        """Swapping parallel arrows without their composites breaks composition."""
        swap = make_functor(
            parallel,
            parallel,
            {"x": "x", "y": "y", "z": "z"},
            {"f": "g", "g": "f", "h": "h", "hf": "hf", "hg": "hg"},
        )
        report = categories.validate_functor(swap)

        assert not report.ok
        assert {v.law for v in report.violations} == {"composition"}

    def test_nat_trans(self, categories, delta1_coref):
        """The counit of a coreflection is natural; breaking a component is caught."""
        counit = delta1_coref.counit
        assert categories.validate_nat_trans(counit).ok

        broken = counit.model_copy(update={"components": {"0": "1_0", "1": "1_1"}})
        report = categories.validate_nat_trans(broken)
        assert report.violations[0].law == "typing"
        assert report.violations[0].witness == ("1",)

    def test_identity_and_composition(self, categories, delta1, bang, one):
        """bang after delta1 is the identity of One."""
        composite = categories.compose_functors(bang, delta1)
        assert categories.functors_equal(composite, categories.identity_functor(one))

    def test_compose_not_composable(self, categories, delta1, delta2):
        """Functors whose middle categories differ do not compose."""
        with pytest.raises(PreconditionError):
            categories.compose_functors(delta1, delta2)


class TestClassification:
    """Classification flags and comma categories."""

    def test_coproduct(self, categories, two, one):
        """Summands keep their arrows under tagged names and stay disconnected."""
        total, injections = categories.coproduct([("x", two), ("y", one)])

        assert total.objects == ("(x|0)", "(x|1)", "(y|*)")
        assert list(total.non_identities) == ["(x|01)"]
        assert categories.validate_category(total).ok
        assert len(categories.connected_components(total)) == 2
        assert all(categories.validate_functor(i).ok for i in injections)

    def test_discrete_functor(self, categories, delta2):
        f0 = categories.discrete_functor(delta2)

        assert f0.dom.is_discrete and f0.cod.is_discrete
        assert f0.obj_map == {"0": "0", "1": "1"}
        assert categories.validate_functor(f0).ok

    def test_inverse_functor(self, categories, two, delta1):
        """The inverse of a relabelling undoes it."""
        _, iso = categories.relabel(two, {"0": "a", "1": "b"}, {"01": "ab"})
        inverse = categories.inverse_functor(iso)

        assert categories.functors_equal(categories.compose_functors(inverse, iso), categories.identity_functor(iso.dom))
        with pytest.raises(PreconditionError):
            categories.inverse_functor(delta1)

    def test_classify_delta1(self, categories, delta1):
        """delta1 is fully faithful and initial but no discrete opfibration."""
        flags = categories.classify_functor(delta1)

        assert flags.fully_faithful
        assert not flags.bijective_on_objects
        assert flags.initial
        assert not flags.discrete_opfibration
        assert not flags.isomorphism

    def test_classify_inclusion(self, categories, iota_two):
        """The inclusion of the objects of Two is identity on objects only."""
        flags = categories.classify_functor(iota_two)

        assert flags.bijective_on_objects
        assert flags.identity_on_objects
        assert not flags.fully_faithful
        assert not flags.initial

    def test_classify_bang(self, categories, bang):
        """Two -> One is initial but neither fully faithful nor a discrete opfibration."""
        flags = categories.classify_functor(bang)

        assert not flags.fully_faithful
        assert not flags.discrete_opfibration
        assert flags.initial

    def test_classify_identity(self, categories, twolifts):
        """The identity is an isomorphism and a discrete opfibration."""
        flags = categories.classify_functor(categories.identity_functor(twolifts))

        assert flags.isomorphism
        assert flags.identity_on_objects
        assert flags.discrete_opfibration

    def test_dopf_defect_reports_count(self, categories, bang):
        """bang has two lifts of the identity at 0."""
        assert categories.dopf_defect(bang) == ("0", "1_*", 2)

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_boo_and_dopf_jointly_monic(self, categories, boo_dopf_pairs, one, two, data):
        """Functors into the common domain are told apart by one of the two legs."""
        f, g = data.draw(st.sampled_from(boo_dopf_pairs))
        for y in (one, two):
            found = list(categories.enumerate_functors(y, f.dom))
            images = {
                (categories.compose_functors(f, p).signature, categories.compose_functors(g, p).signature)
                for p in found
            }
            assert len(images) == len(found)

    def test_comma_of_delta1(self, categories, delta1):
        c = categories.comma_category(delta1, "1")

        assert c.objects == ("(*|01)",)
        assert len(c.morphisms) == 1
        assert categories.validate_category(c).ok

    def test_comma_of_identity(self, categories, two):
        """id/1 has the two objects over 1 and the arrow between them."""
        c = categories.comma_category(categories.identity_functor(two), "1")

        assert len(c.objects) == 2
        assert len(c.morphisms) == 3
        assert categories.is_connected(c)

    def test_comma_of_bang(self, categories, bang):
        c = categories.comma_category(bang, "*")

        assert len(c.objects) == 2
        assert len(c.morphisms) == 3

    def test_comma_unknown_object(self, categories, delta1):
        """Asking for a comma over a missing object is a precondition error."""
        with pytest.raises(PreconditionError):
            categories.comma_category(delta1, "7")

    def test_connected_components(self, categories, disc_two, two):
        assert categories.connected_components(disc_two) == [["0"], ["1"]]
        assert categories.connected_components(two) == [["0", "1"]]


class TestPullbacksAndPushouts:
    """Pullbacks, the special pushout and its mediator."""

    def test_pullback_of_identities(self, categories, two):
        """The pullback of two identities is isomorphic to their domain."""
        identity = categories.identity_functor(two)
        pb = categories.pullback(identity, identity)

        assert categories.validate_category(pb.category).ok
        assert categories.find_isomorphism(pb.category, two) is not None
        assert categories.is_pullback_square(pb.left, pb.right, identity, identity).holds

    def test_pullback_empty(self, categories, delta1, delta0):
        """Picking different objects gives an empty pullback."""
        pb = categories.pullback(delta1, delta0)
        assert pb.category.objects == ()

    def test_pullback_of_inclusion(self, categories, iota_two, two):
        pb = categories.pullback(iota_two, categories.identity_functor(two))

        assert len(pb.category.objects) == 2
        assert len(categories.connected_components(pb.category)) == 2

    def test_not_a_pullback(self, categories, delta1, two):
        """One is not the pullback of the identity of Two against itself."""
        identity = categories.identity_functor(two)
        result = categories.is_pullback_square(delta1, delta1, identity, identity)

        assert not result.holds

    def test_special_pushout(self, categories, disc_two, iota_two, two):
        """Pushing DiscTwo out along its inclusion into Two recovers Two."""
        square = categories.pushout_along_discrete(categories.identity_functor(disc_two), iota_two)

        assert categories.validate_category(square.category).ok
        assert square.formal == {"[1_0;01;1_1]": ("1_0", "01", "1_1")}
        assert categories.find_isomorphism(square.category, two) is not None
        assert categories.is_pullback_square(square.iota, square.initial, square.left, square.right).holds

    def test_split_idempotent_pushout_is_pullback(self, categories, bex_pushout):
        """The top leg is bijective on objects, so the pushout square is also a pullback."""
        square = bex_pushout

        assert len(square.category.morphisms) == 8
        assert categories.is_pullback_square(square.iota, square.initial, square.left, square.right).holds

    def test_pushout_universal_property(self, categories, bex_pushout, bex_cocones, catalog):
        """Restriction along the two legs is a bijection from functors out of the pushout onto cocones."""
        square = bex_pushout
        restrictions = [
            (
                categories.compose_functors(m, square.left).signature,
                categories.compose_functors(m, square.right).signature,
            )
            for m in categories.enumerate_functors(square.category, catalog["Bex"])
        ]

        assert bex_cocones
        assert len(set(restrictions)) == len(restrictions)
        assert set(restrictions) == {(left.signature, right.signature) for left, right in bex_cocones}

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_mediator_of_each_cocone(self, categories, bex_pushout, bex_cocones, data):
        """The mediator of a cocone is a functor restricting to both of its legs."""
        left, right = data.draw(st.sampled_from(bex_cocones))
        mediator = categories.pushout_mediator(bex_pushout, left, right)

        assert categories.validate_functor(mediator).ok
        assert categories.functors_equal(categories.compose_functors(mediator, bex_pushout.left), left)
        assert categories.functors_equal(categories.compose_functors(mediator, bex_pushout.right), right)

    def test_pushout_needs_discrete_domain(self, categories, two):
        identity = categories.identity_functor(two)
        with pytest.raises(PreconditionError):
            categories.pushout_along_discrete(identity, identity)

    def test_pushout_mediator(self, categories, disc_two, iota_two, two):
        """The mediator of the identity cocone is an isomorphism onto Two."""
        square = categories.pushout_along_discrete(categories.identity_functor(disc_two), iota_two)
        mediator = categories.pushout_mediator(square, categories.identity_functor(two), iota_two)

        assert mediator.mor("[1_0;01;1_1]") == "01"
        assert categories.validate_functor(mediator).ok
        assert categories.classify_functor(mediator).isomorphism


class TestLifting:
    """Orthogonal lifts, the comprehensive factorisation and brute-force oracles."""

    def test_orthogonal_lift(self, categories, delta1, elements_dopf, make_functor, one, elements, two):
        """The filler follows the unique lift of 01 out of q."""
        top = make_functor(one, elements, {"*": "q"})
        ell = categories.orthogonal_lift(delta1, elements_dopf, top, categories.identity_functor(two), verify=True)

        assert ell.obj_map == {"0": "q", "1": "r"}
        assert ell.mor("01") == "m2"

    def test_orthogonal_lift_needs_dopf(self, categories, delta1, make_functor, one, twolifts, two):
        """Two arrows over 01 out of a: the right leg is no discrete opfibration."""
        g = make_functor(twolifts, two, {"a": "0", "b": "1", "c": "1"}, {"u1": "01", "u2": "01", "v": "1_1"})
        top = make_functor(one, twolifts, {"*": "a"})

        with pytest.raises(PreconditionError) as excinfo:
            categories.orthogonal_lift(delta1, g, top, categories.identity_functor(two))
        assert excinfo.value.witness == ("a", "01")

    def test_orthogonal_lift_needs_initial(self, categories, iota_two, elements_dopf, make_functor, disc_two, elements, two):
        """The inclusion of DiscTwo is not initial, even though the square commutes."""
        top = make_functor(disc_two, elements, {"0": "p", "1": "r"})

        with pytest.raises(PreconditionError) as excinfo:
            categories.orthogonal_lift(iota_two, elements_dopf, top, categories.identity_functor(two))
        assert "initial" in str(excinfo.value)

    def test_orthogonal_lift_square_must_commute(self, categories, delta1, elements_dopf, make_functor, one, elements, two):
        top = make_functor(one, elements, {"*": "r"})
        with pytest.raises(PreconditionError):
            categories.orthogonal_lift(delta1, elements_dopf, top, categories.identity_functor(two))

    def test_unique_lift(self, categories, elements_dopf, bang):
        assert categories.unique_lift(elements_dopf, "q", "01") == "m2"

        with pytest.raises(LiftError) as excinfo:
            categories.unique_lift(elements_dopf, "r", "01")
        assert excinfo.value.kind == LiftError.NOT_FOUND

        with pytest.raises(LiftError) as excinfo:
            categories.unique_lift(bang, "0", "1_*")
        assert excinfo.value.kind == LiftError.NON_UNIQUE

    def test_boo_lift(self, categories, delta1, iota_two, two):
        """A functor out of a discrete category lifts through a bijective-on-objects one."""
        lifted = categories.boo_lift(delta1, iota_two)

        assert lifted.obj_map == {"*": "0"}
        assert categories.functors_equal(categories.compose_functors(iota_two, lifted), delta1)

        with pytest.raises(PreconditionError):
            categories.boo_lift(categories.identity_functor(two), iota_two)

    def test_discrete_of(self, categories, two, disc_two):
        a0, iota = categories.discrete_of(two)

        assert a0.is_discrete
        assert a0.objects == two.objects
        assert categories.validate_functor(iota).ok
        assert categories.discrete_of(disc_two)[0] is disc_two

    def test_comprehensive_of_bang(self, categories, bang):
        factorization = categories.comprehensive_factorize(bang)
        assert len(factorization.middle.objects) == 1

    def test_comprehensive_of_delta0(self, categories, delta0):
        factorization = categories.comprehensive_factorize(delta0)
        assert len(factorization.middle.objects) == 1

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_comprehensive_factorization_laws(self, categories, corpus_functors, data):
        """Every functor splits as an initial functor followed by a discrete opfibration."""
        f = data.draw(st.sampled_from(corpus_functors))
        factorization = categories.comprehensive_factorize(f)

        assert categories.validate_category(factorization.middle).ok
        assert categories.is_initial(factorization.initial)
        assert categories.dopf_defect(factorization.dopf) is None
        assert categories.functors_equal(
            categories.compose_functors(factorization.dopf, factorization.initial), f
        )

    @PROPERTY_SETTINGS
    @given(data=st.data())
    def test_comprehensive_lift_of_own_square(self, categories, corpus_functors, data):
        """Lifting the initial part against the opfibration part gives the identity."""
        f = data.draw(st.sampled_from(corpus_functors))
        factorization = categories.comprehensive_factorize(f)
        ell = categories.orthogonal_lift(
            factorization.initial,
            factorization.dopf,
            factorization.initial,
            factorization.dopf,
            verify=True,
        )
        assert categories.functors_equal(ell, categories.identity_functor(factorization.middle))

    def test_enumerate_functor_counts(self, categories, one, two, disc_two):
        assert len(list(categories.enumerate_functors(one, two))) == 2
        assert len(list(categories.enumerate_functors(two, two))) == 3
        assert len(list(categories.enumerate_functors(disc_two, two))) == 4

    def test_enumerate_functors_are_valid(self, categories, three):
        """Each enumerated functor is a functor, and none repeats."""
        found = list(categories.enumerate_functors(three, three))

        assert all(categories.validate_functor(f).ok for f in found)
        assert len({f.signature for f in found}) == len(found)

    def test_size_guard(self, two):
        """A tiny guard refuses the search before it starts."""
        tight = CategoryService(SearchService(SizeGuard(max_search=1)))
        with pytest.raises(SizeLimitExceeded):
            list(tight.enumerate_functors(two, two))

    def test_find_isomorphism(self, categories, catalog):
        """Renamed and relabelled copies are found isomorphic, different shapes are not."""
        three = catalog["Three"]
        copy, _ = categories.relabel(three, {"0": "a", "1": "b", "2": "c"}, {"01": "ab", "12": "bc", "02": "ac"})
        iso = categories.find_isomorphism(three, copy)

        assert isinstance(iso, FinFunctor)
        assert iso.obj_map == {"0": "a", "1": "b", "2": "c"}
        assert categories.find_isomorphism(catalog["Three"], catalog["TwoLifts"]) is not None

        fork = FinCategory.from_table(["x", "y", "z"], {"f": ("x", "y"), "g": ("x", "y"), "h": ("z", "y")}, {})
        assert categories.find_isomorphism(three, fork) is None
