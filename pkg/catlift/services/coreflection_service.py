"""
Coreflection service: split and twisted coreflections, the initial-functor
correspondence, pullback stability and the cofree twisted coreflection.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from catlift.errors import DiagramError, PreconditionError
from catlift.models import (
    CheckResult,
    FinCategory,
    FinFunctor,
    NatTrans,
    PushoutSquare,
    SplitCoreflection,
    SplitToTwisted,
    TwistedCoreflection,
    TwistedWitness,
    TwistednessResult,
    ValidationReport,
)
from catlift.models.naming import pair_name
from catlift.services.category_service import CategoryService

logger = logging.getLogger(__name__)


class CoreflectionService:
    """Service for split and twisted coreflections."""

    def __init__(self, categories: Optional[CategoryService] = None):
        """Initialize the coreflection service."""
        self.categories = categories or CategoryService()

    def make_coreflection(self, left: FinFunctor, right: FinFunctor, counit: Dict[str, str]) -> SplitCoreflection:
        """Bundle adjoints and counit components; no laws are checked here."""
        b = left.cod
        return SplitCoreflection(
            left=left,
            right=right,
            counit=NatTrans(
                dom=self.categories.compose_functors(left, right),
                cod=self.categories.identity_functor(b),
                components=dict(counit),
            ),
        )

    def identity_coreflection(self, c: FinCategory) -> SplitCoreflection:
        identity = self.categories.identity_functor(c)
        return self.make_coreflection(identity, identity, dict(c.identity))

    def check_split_coreflection(self, s: SplitCoreflection) -> ValidationReport:
        """
        Check ``qf = 1``, ``q·ε = 1``, ``ε·f = 1`` and naturality of ``ε``.

        Args:
            s: Coreflection to check

        Returns:
            Report with one entry per failed law
        """
        f, q = s.left, s.right
        a, b = f.dom, f.cod
        report = ValidationReport()
        for functor in (f, q):
            for violation in self.categories.validate_functor(functor).violations:
                report.violations.append(violation)
        if not report.ok:
            return report

        for x in a.objects:
            if q.ob(f.ob(x)) != x:
                report.add("qf", f"q f {x} ≠ {x}", x)
        for m in a.morphisms:
            if q.mor(f.mor(m)) != m:
                report.add("qf", f"q f {m} ≠ {m}", m)

        for x in b.objects:
            component = s.counit.components.get(x)
            if component is None:
                report.add("counit", f"missing counit component at {x}", x)
            elif b.morphisms.get(component) != (f.ob(q.ob(x)), x):
                report.add("counit", f"counit component {component} at {x} has the wrong endpoints", x)
        if not report.ok:
            return report

        for x in b.objects:
            if q.mor(s.eps(x)) != a.id_of(q.ob(x)):
                report.add("q·ε", f"q sends the counit at {x} to a non-identity", x)
        for x in a.objects:
            if s.eps(f.ob(x)) != b.id_of(f.ob(x)):
                report.add("ε·f", f"counit at f {x} is not an identity", f.ob(x))
        for m, (x, y) in b.morphisms.items():
            if b.compose(s.eps(y), f.mor(q.mor(m))) != b.compose(m, s.eps(x)):
                report.add("naturality", f"counit is not natural at {m}", m)
        return report

    def compose_coreflections(self, first: SplitCoreflection, second: SplitCoreflection) -> SplitCoreflection:
        """Composite ``(g f ⊣ q p)`` with counit ``ζ_x ∘ g(ε_{p x})``."""
        f, q = first.left, first.right
        g, p = second.left, second.right
        if f.cod.objects != g.dom.objects:
            raise PreconditionError("coreflections are not composable")
        c = g.cod
        counit = {x: c.compose(second.eps(x), g.mor(first.eps(p.ob(x)))) for x in c.objects}
        return self.make_coreflection(
            self.categories.compose_functors(g, f),
            self.categories.compose_functors(q, p),
            counit,
        )

    def is_coref_cell(
        self,
        h: FinFunctor,
        k: FinFunctor,
        first: SplitCoreflection,
        second: SplitCoreflection,
    ) -> CheckResult:
        """Check ``kf = gh``, ``hq = pk`` and ``k·ε = ζ·k`` pointwise."""
        f, q = first.left, first.right
        g, p = second.left, second.right
        for x in f.dom.objects:
            if k.ob(f.ob(x)) != g.ob(h.ob(x)):
                return CheckResult(holds=False, witness=(x,), message="kf ≠ gh")
        for m in f.dom.morphisms:
            if k.mor(f.mor(m)) != g.mor(h.mor(m)):
                return CheckResult(holds=False, witness=(m,), message="kf ≠ gh")
        for y in q.dom.objects:
            if h.ob(q.ob(y)) != p.ob(k.ob(y)):
                return CheckResult(holds=False, witness=(y,), message="hq ≠ pk")
        for m in q.dom.morphisms:
            if h.mor(q.mor(m)) != p.mor(k.mor(m)):
                return CheckResult(holds=False, witness=(m,), message="hq ≠ pk")
        for y in q.dom.objects:
            if k.mor(first.eps(y)) != second.eps(k.ob(y)):
                return CheckResult(holds=False, witness=(y,), message="k·ε ≠ ζ·k")
        return CheckResult(holds=True)

    # ------------------------------------------------------------------
    # Twistedness
    # ------------------------------------------------------------------

    def is_twisted(self, s: SplitCoreflection) -> TwistednessResult:
        """
        Search ``hom(x, fqx)`` for the unique ``q̄u`` of every ``u`` with ``q u ≠ 1``.

        Args:
            s: A valid split coreflection

        Returns:
            The full witness table, or the first morphism without a unique witness
        """
        f, q = s.left, s.right
        a, b = f.dom, f.cod
        qbar: Dict[str, str] = {}
        for u, (x, y) in b.morphisms.items():
            qu = q.mor(u)
            if a.is_identity(qu):
                continue
            fqx = f.ob(q.ob(x))
            through = b.compose(s.eps(y), f.mor(qu))
            found = [
                t
                for t in b.hom(x, fqx)
                if b.compose(t, s.eps(x)) == b.id_of(fqx) and b.compose(through, t) == u
            ]
            if len(found) != 1:
                logger.debug(f"Morphism {u} has {len(found)} candidate twisting witnesses")
                return TwistednessResult(
                    holds=False,
                    counterexample=u,
                    message=f"{u} has {len(found)} candidates in hom({x}, {fqx})",
                )
            qbar[u] = found[0]
        return TwistednessResult(holds=True, witness=TwistedWitness(qbar=qbar))

    def as_twisted(self, s: SplitCoreflection) -> TwistedCoreflection:
        result = self.is_twisted(s)
        if not result.holds:
            raise PreconditionError(f"coreflection is not twisted: {result.message}", witness=(result.counterexample,))
        return TwistedCoreflection(coreflection=s, witness=result.witness)

    def compose_twisted(self, first: TwistedCoreflection, second: TwistedCoreflection) -> TwistedCoreflection:
        """Composite twisted coreflection with witness ``g(q̄(p u)) ∘ p̄(u)``."""
        s = self.compose_coreflections(first.coreflection, second.coreflection)
        g, p = second.left, second.right
        a, c = first.left.dom, g.cod
        qbar: Dict[str, str] = {}
        for u in c.morphisms:
            if a.is_identity(s.right.mor(u)):
                continue
            qbar[u] = c.compose(g.mor(first.qbar(p.mor(u))), second.qbar(u))
        searched = self.is_twisted(s)
        if not searched.holds or searched.witness.qbar != qbar:
            raise DiagramError("composite witness disagrees with the hom-set search", witness=(searched.counterexample or "",))
        return TwistedCoreflection(coreflection=s, witness=TwistedWitness(qbar=qbar))

    # ------------------------------------------------------------------
    # Initial functors and pullbacks
    # ------------------------------------------------------------------

    def coreflection_from_initial(self, f: FinFunctor) -> SplitCoreflection:
        """
        The split coreflection on an initial functor out of a discrete category.

        Args:
            f: Initial functor ``A0 -> X`` with ``A0`` discrete

        Returns:
            ``(f ⊣ q, ε)`` with ``q x`` and ``ε_x`` read off the unique object of ``f/x``
        """
        a0, x_cat = f.dom, f.cod
        if not a0.is_discrete:
            raise PreconditionError("domain is not discrete", witness=a0.non_identities[:1])
        right_obj: Dict[str, str] = {}
        counit: Dict[str, str] = {}
        for x in x_cat.objects:
            pairs = self.categories.comma_objects(f, x)
            if len(pairs) != 1:
                raise PreconditionError(
                    f"comma category over {x} has {len(pairs)} objects, so it is not connected",
                    witness=(x,),
                )
            right_obj[x], counit[x] = pairs[0]
        right = FinFunctor(
            dom=x_cat,
            cod=a0,
            obj_map=right_obj,
            mor_map={m: a0.id_of(right_obj[x_cat.src(m)]) for m in x_cat.morphisms},
        )
        return self.make_coreflection(f, right, counit)

    def _pull_back(self, s: SplitCoreflection, k: FinFunctor) -> Tuple[SplitCoreflection, FinFunctor]:
        f, q = s.left, s.right
        pb = self.categories.pullback(k, q)
        p = pb.category
        obj_of = {(pb.left.ob(o), pb.right.ob(o)): o for o in p.objects}
        mor_of = {(pb.left.mor(n), pb.right.mor(n)): n for n in p.morphisms}
        d = k.dom
        left = FinFunctor(
            dom=d,
            cod=p,
            obj_map={x: obj_of[(x, f.ob(k.ob(x)))] for x in d.objects},
            mor_map={m: mor_of[(m, f.mor(k.mor(m)))] for m in d.morphisms},
        )
        counit = {o: mor_of[(d.id_of(pb.left.ob(o)), s.eps(pb.right.ob(o)))] for o in p.objects}
        return self.make_coreflection(left, pb.left, counit), pb.right

    def pullback_coreflection(self, s: SplitCoreflection, k: FinFunctor) -> SplitCoreflection:
        """Pullback of ``s`` along ``k: D -> A``: left adjoint ``⟨1, f k⟩``, right the projection."""
        return self._pull_back(s, k)[0]

    # ------------------------------------------------------------------
    # Pushouts
    # ------------------------------------------------------------------

    def _iota_for(self, f: FinFunctor, a: FinCategory) -> FinFunctor:
        a0 = f.dom
        if set(a0.objects) != set(a.objects):
            raise PreconditionError("discrete domain and category have different objects")
        return FinFunctor(
            dom=a0,
            cod=a,
            obj_map={x: x for x in a0.objects},
            mor_map={a0.id_of(x): a.id_of(x) for x in a0.objects},
        )

    def twisted_from_pushout(self, f: FinFunctor, a: FinCategory) -> Tuple[TwistedCoreflection, PushoutSquare]:
        """
        Twisted coreflection ``A ↛ B`` obtained by pushing an initial
        ``f: A0 -> X`` out along ``ι_A``.
        """
        base = self.coreflection_from_initial(f)
        square = self.categories.pushout_along_discrete(f, self._iota_for(f, a))
        b = square.category
        q = base.right
        mor_map = {}
        for m in b.morphisms:
            if m in square.formal:
                mor_map[m] = square.formal[m][1]
            else:
                mor_map[m] = a.id_of(q.ob(b.src(m)))
        right = FinFunctor(dom=b, cod=a, obj_map={x: q.ob(x) for x in b.objects}, mor_map=mor_map)
        coreflection = self.make_coreflection(square.left, right, base.counit.components)
        witness = TwistedWitness(qbar={name: u for name, (u, _, _) in square.formal.items()})
        return TwistedCoreflection(coreflection=coreflection, witness=witness), square

    def split_to_twisted(self, s: SplitCoreflection) -> SplitToTwisted:
        """
        Cofree twisted coreflection on ``s`` and the comparison ``B' -> B``.

        The comparison is identity-on-objects; it is an isomorphism exactly
        when ``s`` is already twisted.
        """
        a, b = s.left.dom, s.left.cod
        _, iota = self.categories.discrete_of(a)
        pulled, projection = self._pull_back(s, iota)
        fibres, rename = self.categories.relabel(
            pulled.left.cod,
            {o: projection.ob(o) for o in pulled.left.cod.objects},
            {n: projection.mor(n) for n in pulled.left.cod.morphisms},
            name=f"fib({b.name})" if b.name else "",
        )
        initial = self.categories.compose_functors(rename, pulled.left)
        twisted, square = self.twisted_from_pushout(initial, a)
        inclusion = FinFunctor(
            dom=fibres,
            cod=b,
            obj_map={x: x for x in fibres.objects},
            mor_map={m: m for m in fibres.morphisms},
        )
        comparison = self.categories.pushout_mediator(square, s.left, inclusion)
        flags = self.categories.classify_functor(comparison)
        logger.debug(f"Cofree twisted coreflection: comparison iso={flags.isomorphism}")
        return SplitToTwisted(
            twisted=twisted,
            square=square,
            fibre_inclusion=inclusion,
            comparison=comparison,
            is_iso=flags.isomorphism,
        )

    def glue_initial_components(
        self, a: FinCategory, components: Dict[str, Tuple[FinCategory, str]]
    ) -> Tuple[TwistedCoreflection, PushoutSquare]:
        """
        Glue one category with a chosen initial object per object of ``a``.

        Args:
            a: Category whose objects index the components
            components: ``a -> (F_a, initial object of F_a)``

        Returns:
            The twisted coreflection out of ``a`` and its pushout square
        """
        a0, _ = self.categories.discrete_of(a)
        missing = [x for x in a.objects if x not in components]
        if missing:
            raise PreconditionError("no component for some objects", witness=missing)
        summands: Sequence[Tuple[str, FinCategory]] = [(x, components[x][0]) for x in a.objects]
        total, _ = self.categories.coproduct(summands, name=f"glue({a.name})" if a.name else "")
        f = FinFunctor(
            dom=a0,
            cod=total,
            obj_map={x: pair_name(x, components[x][1]) for x in a.objects},
            mor_map={a0.id_of(x): total.id_of(pair_name(x, components[x][1])) for x in a.objects},
        )
        return self.twisted_from_pushout(f, a)

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------

    def enumerate_coreflection_structures(self, f: FinFunctor) -> List[SplitCoreflection]:
        """All ``(q, ε)`` making ``f`` a split coreflection, in deterministic order."""
        a, b = f.dom, f.cod
        structures: List[SplitCoreflection] = []
        image = {f.ob(x) for x in a.objects}
        for q in self.categories.enumerate_functors(b, a):
            if any(q.ob(f.ob(x)) != x for x in a.objects):
                continue
            if any(q.mor(f.mor(m)) != m for m in a.morphisms):
                continue

            def candidates(x, assignment, q=q):
                fqx = f.ob(q.ob(x))
                if x in image:
                    return [b.id_of(x)] if fqx == x else []
                return [t for t in b.hom(fqx, x) if a.is_identity(q.mor(t))]

            def accept(x, assignment, q=q):
                for m in b.out_of(x):
                    y = b.tgt(m)
                    if y in assignment and b.compose(assignment[y], f.mor(q.mor(m))) != b.compose(m, assignment[x]):
                        return False
                for m in b.into(x):
                    y = b.src(m)
                    if y in assignment and b.compose(assignment[x], f.mor(q.mor(m))) != b.compose(m, assignment[y]):
                        return False
                return True

            for counit in self.categories.search.backtrack(list(b.objects), candidates, accept):
                structures.append(self.make_coreflection(f, q, counit))
        logger.debug(f"Found {len(structures)} split coreflection structures")
        return structures
