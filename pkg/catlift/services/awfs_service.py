"""
AWFS service: the Ef factorisation, lifts of twisted coreflections against
delta lenses, the (co)monad structure maps and the (co)algebra correspondences.
"""

import logging
from collections import OrderedDict
from typing import Any, Dict, Hashable, List, Optional, Tuple

from catlift.errors import DiagramError, PreconditionError, StrategyMismatch
from catlift.models import (
    Algebra,
    CheckResult,
    Coalgebra,
    CosliceSum,
    DeltaLens,
    EfFactorization,
    FinCategory,
    FinFunctor,
    LiftResult,
    LiftStrategy,
    SplitCoreflection,
    SplitToTwisted,
    Tabulator,
    TwistedCoreflection,
    TwistedWitness,
    UniversalArrow,
)
from catlift.models.naming import identity_name, pair_name, triple_name
from catlift.models.settings import get_settings
from catlift.services.category_service import CategoryService
from catlift.services.coreflection_service import CoreflectionService
from catlift.services.lens_service import LensService

logger = logging.getLogger(__name__)


class _Memo:
    """Content-keyed memo table, oldest entry evicted first once full."""

    def __init__(self, size: Optional[int] = None):
        self._size = size
        self._entries: "OrderedDict[Hashable, Any]" = OrderedDict()

    @property
    def size(self) -> int:
        return self._size or get_settings().cache_size

    def get(self, key: Hashable) -> Any:
        return self._entries.get(key)

    def put(self, key: Hashable, value: Any) -> None:
        self._entries[key] = value
        while len(self._entries) > self.size:
            self._entries.popitem(last=False)

    def clear(self) -> None:
        self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)


class AwfsService:
    """Service for the (twisted coreflection, delta lens) factorisation system."""

    def __init__(
        self,
        categories: Optional[CategoryService] = None,
        lenses: Optional[LensService] = None,
        coreflections: Optional[CoreflectionService] = None,
        cache_size: Optional[int] = None,
    ):
        """
        Initialize the AWFS service with its collaborators.

        Args:
            cache_size: Entries kept per memo table; the configured cache size when None
        """
        self.categories = categories or CategoryService()
        self.lenses = lenses or LensService(self.categories)
        self.coreflections = coreflections or CoreflectionService(self.categories)
        self._factorizations = _Memo(cache_size)
        self._splits = _Memo(cache_size)
        self._tabulators = _Memo(cache_size)
        self._comultiplications = _Memo(cache_size)
        self._multiplications = _Memo(cache_size)

    def clear_caches(self) -> None:
        """Forget every memoized factorisation, tabulator and structure map."""
        for memo in (
            self._factorizations,
            self._splits,
            self._tabulators,
            self._comultiplications,
            self._multiplications,
        ):
            memo.clear()

    # ------------------------------------------------------------------
    # The factorisation
    # ------------------------------------------------------------------

    def coslice_sum(self, fp: FinFunctor) -> CosliceSum:
        """
        Sum of the coslices ``fp a / B`` for a functor out of a discrete category.

        Args:
            fp: Functor ``A0 -> B`` with ``A0`` discrete

        Returns:
            The sum with ``If``, ``Sf0``, ``Tf0`` and the coreflection ``If ⊣ Sf0``
        """
        a0, b = fp.dom, fp.cod
        if not a0.is_discrete:
            raise PreconditionError("coslice sum needs a discrete domain", witness=a0.non_identities[:1])

        objects_info: Dict[str, Tuple[str, str]] = {}
        for a in a0.objects:
            for u in b.out_of(fp.ob(a)):
                objects_info[pair_name(a, u)] = (a, u)

        arrows: Dict[str, Tuple[str, str, str]] = {}
        by_arrow: Dict[Tuple[str, str, str], str] = {}
        morphisms: Dict[str, Tuple[str, str]] = {}
        identity: Dict[str, str] = {}
        for name, (a, u1) in objects_info.items():
            for v in b.out_of(b.tgt(u1)):
                arrow = identity_name(name) if b.is_identity(v) else triple_name(a, u1, v)
                arrows[arrow] = (a, u1, v)
                by_arrow[(a, u1, v)] = arrow
                morphisms[arrow] = (name, pair_name(a, b.compose(v, u1)))
                if b.is_identity(v):
                    identity[name] = arrow

        comp: Dict[Tuple[str, str], str] = {}
        for first, (a, u1, v1) in arrows.items():
            middle = b.compose(v1, u1)
            for v2 in b.out_of(b.tgt(v1)):
                comp[(by_arrow[(a, middle, v2)], first)] = by_arrow[(a, u1, b.compose(v2, v1))]

        sigma = FinCategory(
            name=f"coslices({b.name})" if b.name else "",
            objects=tuple(objects_info),
            morphisms=morphisms,
            identity=identity,
            comp=comp,
        )
        inclusion = FinFunctor(
            dom=a0,
            cod=sigma,
            obj_map={a: pair_name(a, b.id_of(fp.ob(a))) for a in a0.objects},
            mor_map={a0.id_of(a): identity_name(pair_name(a, b.id_of(fp.ob(a)))) for a in a0.objects},
        )
        source = FinFunctor(
            dom=sigma,
            cod=a0,
            obj_map={name: a for name, (a, _) in objects_info.items()},
            mor_map={arrow: a0.id_of(a) for arrow, (a, _, _) in arrows.items()},
        )
        target = FinFunctor(
            dom=sigma,
            cod=b,
            obj_map={name: b.tgt(u) for name, (_, u) in objects_info.items()},
            mor_map={arrow: v for arrow, (_, _, v) in arrows.items()},
        )
        counit = {name: by_arrow[(a, b.id_of(fp.ob(a)), u)] for name, (a, u) in objects_info.items()}
        coreflection = self.coreflections.make_coreflection(inclusion, source, counit)
        return CosliceSum(
            category=sigma,
            inclusion=inclusion,
            source=source,
            target=target,
            coreflection=coreflection,
            objects_info=objects_info,
            arrows=arrows,
        )

    def factorize(self, f: FinFunctor) -> EfFactorization:
        """
        Factor ``f`` as the cofree twisted coreflection ``Lf`` followed by the
        free delta lens ``Rf``.

        Args:
            f: Any functor ``A -> B``

        Returns:
            The factorization through ``Ef`` with all of its structure
        """
        cached = self._factorizations.get(f.key)
        if cached is not None:
            return cached

        a, b = f.dom, f.cod
        _, iota = self.categories.discrete_of(a)
        sums = self.coslice_sum(self.categories.compose_functors(f, iota))
        twisted, square = self.coreflections.twisted_from_pushout(sums.inclusion, a)
        right = self.categories.pushout_mediator(square, f, sums.target)
        lens = self.lenses.lens_from_diagram(square.right, right)

        e1 = {arrow: (x, u1, b.compose(v, u1), v) for arrow, (x, u1, v) in sums.arrows.items()}
        e2 = {}
        for name, (u, w, v) in square.formal.items():
            a1, u1, back = sums.arrows[u]
            a2, _, u2 = sums.arrows[v]
            e2[name] = (a1, u1, a2, u2, back, w)

        factorization = EfFactorization(
            functor=f,
            category=square.category,
            left=square.left,
            right=right,
            source=twisted.right,
            phi=square.right,
            twisted=twisted,
            lens=lens,
            coslices=sums,
            square=square,
            objects_info=sums.objects_info,
            e1=e1,
            e2=e2,
        )
        logger.debug(
            f"Ef has {len(square.category.objects)} objects, {len(e1)} E1 and {len(e2)} E2 morphisms"
        )
        self._factorizations.put(f.key, factorization)
        return factorization

    # ------------------------------------------------------------------
    # Lifting
    # ------------------------------------------------------------------

    def _split(self, s: SplitCoreflection) -> SplitToTwisted:
        cached = self._splits.get(s.key)
        if cached is not None:
            return cached
        split = self.coreflections.split_to_twisted(s)
        self._splits.put(s.key, split)
        return split

    def _tabulator(self, lens: DeltaLens) -> Tabulator:
        cached = self._tabulators.get(lens.key)
        if cached is not None:
            return cached
        tab = self.lenses.tabulator(lens)
        self._tabulators.put(lens.key, tab)
        return tab

    def _check_square(self, f: FinFunctor, g: FinFunctor, h: FinFunctor, k: FinFunctor) -> None:
        for x in f.dom.objects:
            if k.ob(f.ob(x)) != g.ob(h.ob(x)):
                raise PreconditionError("square does not commute (k∘f ≠ g∘h)", witness=(x,))
        for m in f.dom.morphisms:
            if k.mor(f.mor(m)) != g.mor(h.mor(m)):
                raise PreconditionError("square does not commute (k∘f ≠ g∘h)", witness=(m,))

    def _lift_formula(self, t: TwistedCoreflection, lens: DeltaLens, h: FinFunctor, k: FinFunctor) -> FinFunctor:
        a, b = t.left.dom, t.left.cod
        c = lens.functor.dom
        q = t.right
        obj_map = {x: c.tgt(lens.lift(h.ob(q.ob(x)), k.mor(t.eps(x)))) for x in b.objects}
        mor_map = {}
        for u, (x, y) in b.morphisms.items():
            qu = q.mor(u)
            if a.is_identity(qu):
                mor_map[u] = lens.lift(obj_map[x], k.mor(u))
            else:
                first = lens.lift(obj_map[x], k.mor(t.qbar(u)))
                last = lens.lift(h.ob(q.ob(y)), k.mor(t.eps(y)))
                mor_map[u] = c.compose(last, h.mor(qu), first)
        return FinFunctor(dom=b, cod=c, obj_map=obj_map, mor_map=mor_map)

    def _lift_universal(
        self, t: TwistedCoreflection, lens: DeltaLens, h: FinFunctor, k: FinFunctor
    ) -> Tuple[FinFunctor, FinFunctor, FinFunctor]:
        split = self._split(t.coreflection)
        if not split.is_iso:
            raise PreconditionError("coreflection is not twisted: its cofree comparison is not invertible")
        tab = self._tabulator(lens)
        square = split.square
        h_hat = self.categories.boo_lift(self.categories.compose_functors(h, square.iota), tab.left)
        ell = self.categories.orthogonal_lift(
            square.initial,
            tab.right,
            h_hat,
            self.categories.compose_functors(k, split.fibre_inclusion),
        )
        mediated = self.categories.pushout_mediator(square, h, self.categories.compose_functors(tab.left, ell))
        j = self.categories.compose_functors(mediated, self.categories.inverse_functor(split.comparison))
        return j, h_hat, ell

    def lift(
        self,
        t: TwistedCoreflection,
        lens: DeltaLens,
        h: FinFunctor,
        k: FinFunctor,
        strategy: LiftStrategy = LiftStrategy.FORMULA,
    ) -> LiftResult:
        """
        Diagonal filler of a square from a twisted coreflection to a delta lens.

        Args:
            t: Twisted coreflection ``(f ⊣ q, ε)`` with its witness table
            lens: Delta lens ``(g, ψ)``
            h: Top functor ``A -> C``
            k: Bottom functor ``B -> D``
            strategy: Closed formula, universal property pipeline, or both

        Returns:
            The filler ``j`` with ``j∘f = h`` and ``g∘j = k``
        """
        strategy = LiftStrategy(strategy)
        self._check_square(t.left, lens.functor, h, k)
        if strategy is LiftStrategy.FORMULA:
            return LiftResult(j=self._lift_formula(t, lens, h, k), strategy=strategy)

        j, h_hat, ell = self._lift_universal(t, lens, h, k)
        if strategy is LiftStrategy.BOTH:
            formula = self._lift_formula(t, lens, h, k)
            if not self.categories.functors_equal(formula, j):
                differing = [m for m in formula.mor_map if formula.mor(m) != j.mor(m)]
                logger.error(f"Lift strategies disagree on {differing[:3]}")
                raise StrategyMismatch("formula and universal lifts disagree", witness=differing[:1])
        return LiftResult(j=j, strategy=strategy, intermediates=(h_hat, ell))

    # ------------------------------------------------------------------
    # Functoriality of E and the structure maps
    # ------------------------------------------------------------------

    def E_of_square(
        self, h: FinFunctor, k: FinFunctor, ff: EfFactorization, fg: EfFactorization
    ) -> FinFunctor:
        """``E(h, k): Ef -> Eg`` for a commuting square ``k∘f = g∘h``."""
        self._check_square(ff.functor, fg.functor, h, k)
        return self.lift(
            ff.twisted,
            fg.lens,
            self.categories.compose_functors(fg.left, h),
            self.categories.compose_functors(k, ff.right),
        ).j

    def comultiplication(self, ff: EfFactorization) -> FinFunctor:
        """``Δ_f: Ef -> E(Lf)``."""
        cached = self._comultiplications.get(ff.functor.key)
        if cached is not None:
            return cached
        outer = self.factorize(ff.left)
        delta = self.lift(
            ff.twisted,
            outer.lens,
            outer.left,
            self.categories.identity_functor(ff.category),
        ).j
        self._comultiplications.put(ff.functor.key, delta)
        return delta

    def multiplication(self, ff: EfFactorization) -> FinFunctor:
        """``μ_f: E(Rf) -> Ef``."""
        cached = self._multiplications.get(ff.functor.key)
        if cached is not None:
            return cached
        outer = self.factorize(ff.right)
        mu = self.lift(
            outer.twisted,
            ff.lens,
            self.categories.identity_functor(ff.category),
            outer.right,
        ).j
        self._multiplications.put(ff.functor.key, mu)
        return mu

    # ------------------------------------------------------------------
    # Universal arrows
    # ------------------------------------------------------------------

    def free_lens_universal(
        self,
        ff: EfFactorization,
        lens: DeltaLens,
        h: FinFunctor,
        k: FinFunctor,
        verify: bool = False,
    ) -> UniversalArrow:
        """
        The unique lens cell ``(j, k)`` from the free lens on ``f`` to ``lens``
        with ``j∘Lf = h``.
        """
        g = lens.functor
        self._check_square(ff.functor, g, h, k)
        tab = self._tabulator(lens)
        h_hat = self.categories.boo_lift(self.categories.compose_functors(h, ff.square.iota), tab.left)
        ell = self.categories.orthogonal_lift(
            ff.coslices.inclusion,
            tab.right,
            h_hat,
            self.categories.compose_functors(k, ff.coslices.target),
        )
        j = self.categories.pushout_mediator(ff.square, h, self.categories.compose_functors(tab.left, ell))

        if verify:
            k_rf = self.categories.compose_functors(k, ff.right)

            def allowed(kind, name, image):
                if kind == "o":
                    return g.ob(image) == k_rf.ob(name)
                return g.mor(image) == k_rf.mor(name)

            solutions = [
                candidate
                for candidate in self.categories.enumerate_functors(ff.category, g.dom, allowed)
                if self.categories.functors_equal(self.categories.compose_functors(candidate, ff.left), h)
                and self.lenses.is_lens_cell(candidate, k, ff.lens, lens).holds
            ]
            if len(solutions) != 1 or not self.categories.functors_equal(solutions[0], j):
                raise DiagramError(f"free lens arrow is not the unique solution ({len(solutions)} found)")
        return UniversalArrow(ell=ell, j=j)

    def cofree_coref_universal(
        self,
        t: TwistedCoreflection,
        fg: EfFactorization,
        h: FinFunctor,
        k: FinFunctor,
        verify: bool = False,
    ) -> UniversalArrow:
        """
        The unique coreflection cell ``(h, j)`` from ``t`` to the cofree twisted
        coreflection on ``g`` with ``Rg∘j = k``.
        """
        f = t.left
        self._check_square(f, fg.functor, h, k)
        split = self._split(t.coreflection)
        if not split.is_iso:
            raise PreconditionError("coreflection is not twisted")
        top = self.categories.compose_functors(fg.coslices.inclusion, self.categories.discrete_functor(h))
        ell = self.categories.orthogonal_lift(
            split.square.initial,
            fg.coslices.target,
            top,
            self.categories.compose_functors(k, split.fibre_inclusion),
        )
        mediated = self.categories.pushout_mediator(
            split.square,
            self.categories.compose_functors(fg.left, h),
            self.categories.compose_functors(fg.phi, ell),
        )
        j = self.categories.compose_functors(mediated, self.categories.inverse_functor(split.comparison))

        if verify:
            lg_h = self.categories.compose_functors(fg.left, h)

            def allowed(kind, name, image):
                if kind == "o":
                    return fg.right.ob(image) == k.ob(name)
                return fg.right.mor(image) == k.mor(name)

            solutions = [
                candidate
                for candidate in self.categories.enumerate_functors(f.cod, fg.category, allowed)
                if self.categories.functors_equal(self.categories.compose_functors(candidate, f), lg_h)
                and self.coreflections.is_coref_cell(h, candidate, t.coreflection, fg.twisted.coreflection).holds
            ]
            if len(solutions) != 1 or not self.categories.functors_equal(solutions[0], j):
                raise DiagramError(f"cofree coreflection arrow is not the unique solution ({len(solutions)} found)")
        return UniversalArrow(ell=ell, j=j)

    # ------------------------------------------------------------------
    # Coalgebras
    # ------------------------------------------------------------------

    def coalgebra_defects(self, ff: EfFactorization, beta: FinFunctor) -> Optional[CheckResult]:
        """First failing coalgebra law for ``beta: B -> Ef``, or None."""
        f = ff.functor
        for x in f.cod.objects:
            if ff.right.ob(beta.ob(x)) != x:
                return CheckResult(holds=False, witness=(x,), message="Rf∘beta ≠ 1")
        for m in f.cod.morphisms:
            if ff.right.mor(beta.mor(m)) != m:
                return CheckResult(holds=False, witness=(m,), message="Rf∘beta ≠ 1")
        for x in f.dom.objects:
            if beta.ob(f.ob(x)) != ff.left.ob(x):
                return CheckResult(holds=False, witness=(x,), message="beta∘f ≠ Lf")
        for m in f.dom.morphisms:
            if beta.mor(f.mor(m)) != ff.left.mor(m):
                return CheckResult(holds=False, witness=(m,), message="beta∘f ≠ Lf")
        outer = self.factorize(ff.left)
        lhs = self.categories.compose_functors(
            self.E_of_square(self.categories.identity_functor(f.dom), beta, ff, outer), beta
        )
        rhs = self.categories.compose_functors(self.comultiplication(ff), beta)
        if not self.categories.functors_equal(lhs, rhs):
            differing = [m for m in lhs.mor_map if lhs.mor(m) != rhs.mor(m)]
            return CheckResult(holds=False, witness=tuple(differing[:1]), message="E(1,beta)∘beta ≠ Δ∘beta")
        return None

    def twisted_to_coalgebra(self, t: TwistedCoreflection, check: bool = True) -> Coalgebra:
        """
        The coalgebra ``beta: B -> Ef`` of a twisted coreflection.

        Objects go to ``(q x, ε_x)``; a morphism with identity ``q``-image goes
        to its sort-E1 copy and any other to the sort-E2 pair ``(q̄u, qu)``.
        """
        f, q = t.left, t.right
        a, b = f.dom, f.cod
        ff = self.factorize(f)
        obj_map = {x: ff.object_named(q.ob(x), t.eps(x)) for x in b.objects}
        mor_map = {}
        for u, (x, y) in b.morphisms.items():
            qu = q.mor(u)
            if a.is_identity(qu):
                mor_map[u] = ff.e1_named(q.ob(x), t.eps(x), u)
            else:
                mor_map[u] = ff.e2_named(q.ob(x), t.eps(x), t.qbar(u), qu, t.eps(y))
        beta = FinFunctor(dom=b, cod=ff.category, obj_map=obj_map, mor_map=mor_map)
        if check:
            defect = self.coalgebra_defects(ff, beta)
            if defect is not None:
                raise DiagramError(defect.message, witness=defect.witness)
        return Coalgebra(functor=f, beta=beta)

    def coalgebra_to_twisted(self, f: FinFunctor, beta: FinFunctor) -> TwistedCoreflection:
        """Read ``q``, ``ε`` and ``q̄`` back off a coalgebra ``beta``."""
        ff = self.factorize(f)
        defect = self.coalgebra_defects(ff, beta)
        if defect is not None:
            raise DiagramError(f"not a coalgebra: {defect.message}", witness=defect.witness)
        a, b = f.dom, f.cod
        obj_map, counit = {}, {}
        for x in b.objects:
            obj_map[x], counit[x] = ff.objects_info[beta.ob(x)]
        mor_map, qbar = {}, {}
        for u in b.morphisms:
            image = beta.mor(u)
            if image in ff.e2:
                _, _, _, _, back, w = ff.e2[image]
                mor_map[u] = w
                qbar[u] = back
            else:
                mor_map[u] = a.id_of(obj_map[b.src(u)])
        q = FinFunctor(dom=b, cod=a, obj_map=obj_map, mor_map=mor_map)
        s = self.coreflections.make_coreflection(f, q, counit)
        report = self.coreflections.check_split_coreflection(s)
        if not report.ok:
            first = report.violations[0]
            raise DiagramError(f"coalgebra does not give a split coreflection: {first.message}", witness=first.witness)
        searched = self.coreflections.is_twisted(s)
        if not searched.holds or searched.witness.qbar != qbar:
            raise DiagramError("coalgebra witness disagrees with the hom-set search")
        return TwistedCoreflection(coreflection=s, witness=TwistedWitness(qbar=qbar))

    def enumerate_coalgebras(self, f: FinFunctor) -> List[Coalgebra]:
        """Every ``beta: B -> Ef`` satisfying the coalgebra laws, found by search."""
        ff = self.factorize(f)

        def allowed(kind, name, image):
            if kind == "o":
                return ff.right.ob(image) == name
            return ff.right.mor(image) == name

        found = [
            Coalgebra(functor=f, beta=beta)
            for beta in self.categories.enumerate_functors(f.cod, ff.category, allowed)
            if self.coalgebra_defects(ff, beta) is None
        ]
        logger.debug(f"Found {len(found)} coalgebras")
        return found

    # ------------------------------------------------------------------
    # Algebras
    # ------------------------------------------------------------------

    def algebra_defects(self, ff: EfFactorization, alpha: FinFunctor) -> Optional[CheckResult]:
        """First failing algebra law for ``alpha: Ef -> A``, or None."""
        f = ff.functor
        for x in f.dom.objects:
            if alpha.ob(ff.left.ob(x)) != x:
                return CheckResult(holds=False, witness=(x,), message="alpha∘Lf ≠ 1")
        for m in f.dom.morphisms:
            if alpha.mor(ff.left.mor(m)) != m:
                return CheckResult(holds=False, witness=(m,), message="alpha∘Lf ≠ 1")
        for e in ff.category.objects:
            if f.ob(alpha.ob(e)) != ff.right.ob(e):
                return CheckResult(holds=False, witness=(e,), message="f∘alpha ≠ Rf")
        for m in ff.category.morphisms:
            if f.mor(alpha.mor(m)) != ff.right.mor(m):
                return CheckResult(holds=False, witness=(m,), message="f∘alpha ≠ Rf")
        outer = self.factorize(ff.right)
        lhs = self.categories.compose_functors(alpha, self.multiplication(ff))
        rhs = self.categories.compose_functors(
            alpha,
            self.E_of_square(alpha, self.categories.identity_functor(f.cod), outer, ff),
        )
        if not self.categories.functors_equal(lhs, rhs):
            differing = [m for m in lhs.mor_map if lhs.mor(m) != rhs.mor(m)]
            return CheckResult(holds=False, witness=tuple(differing[:1]), message="alpha∘μ ≠ alpha∘E(alpha,1)")
        return None

    def lens_to_algebra(self, lens: DeltaLens, check: bool = True) -> Algebra:
        """
        The algebra ``alpha: Ef -> A`` of a delta lens.

        ``alpha(a, u) = tgt φ(a, u)``; sort-E1 morphisms act through ``φ`` and a
        sort-E2 morphism ``(v, w)`` goes to ``φ(a2, u2) ∘ w ∘ φ(a1', v)``.
        """
        f = lens.functor
        a = f.dom
        ff = self.factorize(f)
        obj_map = {name: a.tgt(lens.lift(x, u)) for name, (x, u) in ff.objects_info.items()}
        mor_map = {}
        for name, (x, u1, _, v) in ff.e1.items():
            mor_map[name] = lens.lift(a.tgt(lens.lift(x, u1)), v)
        for name, (a1, u1, a2, u2, back, w) in ff.e2.items():
            start = a.tgt(lens.lift(a1, u1))
            mor_map[name] = a.compose(lens.lift(a2, u2), w, lens.lift(start, back))
        alpha = FinFunctor(dom=ff.category, cod=a, obj_map=obj_map, mor_map=mor_map)
        if check:
            defect = self.algebra_defects(ff, alpha)
            if defect is not None:
                raise DiagramError(defect.message, witness=defect.witness)
        return Algebra(functor=f, alpha=alpha)

    def algebra_to_lens(self, f: FinFunctor, alpha: FinFunctor) -> DeltaLens:
        """Lens with ``φ(a, u) = alpha`` of the sort-E1 morphism ``u: (a, 1) -> (a, u)``."""
        ff = self.factorize(f)
        defect = self.algebra_defects(ff, alpha)
        if defect is not None:
            raise DiagramError(f"not an algebra: {defect.message}", witness=defect.witness)
        b = f.cod
        lifts = {
            (x, u): alpha.mor(ff.e1_named(x, b.id_of(f.ob(x)), u))
            for x, u in self.lenses.lift_index(f)
        }
        lens = DeltaLens(functor=f, lifts=lifts)
        report = self.lenses.check_delta_lens(lens)
        if not report.ok:
            first = report.violations[0]
            raise DiagramError(f"algebra does not give a delta lens: {first.message}", witness=first.witness)
        return lens

    def enumerate_algebras(self, f: FinFunctor) -> List[Algebra]:
        """Every ``alpha: Ef -> A`` satisfying the algebra laws, found by search."""
        ff = self.factorize(f)

        def allowed(kind, name, image):
            if kind == "o":
                return f.ob(image) == ff.right.ob(name)
            return f.mor(image) == ff.right.mor(name)

        found = [
            Algebra(functor=f, alpha=alpha)
            for alpha in self.categories.enumerate_functors(ff.category, f.dom, allowed)
            if self.algebra_defects(ff, alpha) is None
        ]
        logger.debug(f"Found {len(found)} algebras")
        return found

    # ------------------------------------------------------------------
    # Lifting-operation axioms
    # ------------------------------------------------------------------

    def _agree(self, left: FinFunctor, right: FinFunctor, message: str) -> CheckResult:
        if self.categories.functors_equal(left, right):
            return CheckResult(holds=True)
        differing = [m for m in left.mor_map if left.mor(m) != right.mor_map.get(m)]
        return CheckResult(holds=False, witness=tuple(differing[:1]), message=message)

    def check_vertical_lens(
        self, t: TwistedCoreflection, first: DeltaLens, second: DeltaLens, h: FinFunctor, k: FinFunctor
    ) -> CheckResult:
        """Lifting against a composite lens equals the two-step lift."""
        composite = self.lenses.compose_lenses(first, second)
        whole = self.lift(t, composite, h, k).j
        outer = self.lift(t, second, self.categories.compose_functors(first.functor, h), k).j
        inner = self.lift(t, first, h, outer).j
        return self._agree(whole, inner, "lift against the composite lens differs from the two-step lift")

    def check_vertical_coref(
        self, first: TwistedCoreflection, second: TwistedCoreflection, lens: DeltaLens, h: FinFunctor, k: FinFunctor
    ) -> CheckResult:
        """Lifting a composite twisted coreflection equals the two-step lift."""
        composite = self.coreflections.compose_twisted(first, second)
        whole = self.lift(composite, lens, h, k).j
        inner = self.lift(first, lens, h, self.categories.compose_functors(k, second.left)).j
        outer = self.lift(second, lens, inner, k).j
        return self._agree(whole, outer, "lift of the composite coreflection differs from the two-step lift")

    def check_horizontal_lens(
        self,
        t: TwistedCoreflection,
        lens: DeltaLens,
        other: DeltaLens,
        h: FinFunctor,
        k: FinFunctor,
        cell_top: FinFunctor,
        cell_bottom: FinFunctor,
    ) -> CheckResult:
        """Post-composing a lift with a lens cell gives the lift of the pasted square."""
        if not self.lenses.is_lens_cell(cell_top, cell_bottom, lens, other).holds:
            raise PreconditionError("horizontal check needs a lens cell")
        pasted = self.lift(
            t,
            other,
            self.categories.compose_functors(cell_top, h),
            self.categories.compose_functors(cell_bottom, k),
        ).j
        moved = self.categories.compose_functors(cell_top, self.lift(t, lens, h, k).j)
        return self._agree(pasted, moved, "lift is not natural in lens cells")

    def check_horizontal_coref(
        self,
        source: TwistedCoreflection,
        t: TwistedCoreflection,
        lens: DeltaLens,
        cell_top: FinFunctor,
        cell_bottom: FinFunctor,
        h: FinFunctor,
        k: FinFunctor,
    ) -> CheckResult:
        """Pre-composing a lift with a coreflection cell gives the lift of the pasted square."""
        if not self.coreflections.is_coref_cell(cell_top, cell_bottom, source.coreflection, t.coreflection).holds:
            raise PreconditionError("horizontal check needs a coreflection cell")
        pasted = self.lift(
            source,
            lens,
            self.categories.compose_functors(h, cell_top),
            self.categories.compose_functors(k, cell_bottom),
        ).j
        moved = self.categories.compose_functors(self.lift(t, lens, h, k).j, cell_bottom)
        return self._agree(pasted, moved, "lift is not natural in coreflection cells")

    def is_awfs_coherent(self, t: TwistedCoreflection, lens: DeltaLens, h: FinFunctor, k: FinFunctor) -> CheckResult:
        """For a lens induced by a discrete opfibration the lift is the orthogonal one."""
        defect = self.categories.dopf_defect(lens.functor)
        if defect is not None:
            a, u, count = defect
            raise PreconditionError(
                f"coherence needs a lens induced by a discrete opfibration; {count} lifts of {u} at {a}", witness=(a, u)
            )
        if not self.categories.is_initial(t.left):
            raise PreconditionError("coherence needs an initial left adjoint")
        ours = self.lift(t, lens, h, k).j
        orthogonal = self.categories.orthogonal_lift(t.left, lens.functor, h, k)
        return self._agree(ours, orthogonal, "lift differs from the orthogonal lift")
