"""
Category service: law checks, classification and constructions on finite
categories and functors.
"""

import logging
from itertools import permutations
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from catlift.errors import LiftError, PreconditionError
from catlift.models import (
    CheckResult,
    ComprehensiveFactorization,
    FinCategory,
    FinFunctor,
    FunctorClass,
    NatTrans,
    Pullback,
    PushoutSquare,
    ValidationReport,
)
from catlift.models.naming import arrow_name, formal_name, identity_name, pair_name
from catlift.services.search_service import SearchService

logger = logging.getLogger(__name__)


class CategoryService:
    """Service for finite categories, functors and their constructions."""

    def __init__(self, search: Optional[SearchService] = None):
        """Initialize the category service."""
        self.search = search or SearchService()

    # ------------------------------------------------------------------
    # Law checks
    # ------------------------------------------------------------------

    def validate_category(self, c: FinCategory) -> ValidationReport:
        """
        Check typing, identities, totality, unit laws and associativity.

        Args:
            c: Category to check

        Returns:
            Report listing every violated law with a witness
        """
        report = ValidationReport()
        objects = set(c.objects)
        if len(objects) != len(c.objects):
            report.add("objects", "duplicate object identifiers")

        for m, (src, tgt) in c.morphisms.items():
            if src not in objects or tgt not in objects:
                report.add("typing", f"{m} has an endpoint outside the objects", m)

        for x in c.objects:
            i = c.identity.get(x)
            if i is None:
                report.add("identity", f"object {x} has no identity", x)
            elif c.morphisms.get(i) != (x, x):
                report.add("identity", f"identity {i} of {x} is not an endomorphism of {x}", i)

        well_typed = True
        for (g, f), h in c.comp.items():
            if g not in c.morphisms or f not in c.morphisms or h not in c.morphisms:
                report.add("typing", f"composite {g}∘{f} = {h} mentions an unknown morphism", g, f)
                well_typed = False
            elif c.tgt(f) != c.src(g):
                report.add("composability", f"{g}∘{f} is defined on a non-composable pair", g, f)
                well_typed = False
            elif c.morphisms[h] != (c.src(f), c.tgt(g)):
                report.add("typing", f"{g}∘{f} = {h} has the wrong endpoints", g, f)
                well_typed = False

        for g, f in c.composable_pairs():
            if (g, f) not in c.comp:
                report.add("totality", f"composite {g}∘{f} is missing", g, f)
                well_typed = False

        if not report.ok and not well_typed:
            return report

        for m, (src, tgt) in c.morphisms.items():
            if src not in c.identity or tgt not in c.identity:
                continue
            if c.comp.get((m, c.identity[src])) != m or c.comp.get((c.identity[tgt], m)) != m:
                report.add("unit", f"identity laws fail for {m}", m)

        for f in c.morphisms:
            for g in c.out_of(c.tgt(f)):
                gf = c.comp[(g, f)]
                for h in c.out_of(c.tgt(g)):
                    if c.comp[(h, gf)] != c.comp[(c.comp[(h, g)], f)]:
                        report.add("associativity", f"({h}∘{g})∘{f} ≠ {h}∘({g}∘{f})", h, g, f)
        return report

    def validate_functor(self, functor: FinFunctor) -> ValidationReport:
        """Check that a functor is total, typed and preserves identities and composites."""
        report = ValidationReport()
        dom, cod = functor.dom, functor.cod
        objects_ok = True
        for x in dom.objects:
            y = functor.obj_map.get(x)
            if y is None:
                report.add("totality", f"object {x} is not mapped", x)
                objects_ok = False
            elif y not in cod.identity:
                report.add("typing", f"object {x} maps outside the codomain", x)
                objects_ok = False
        if not objects_ok:
            return report

        for m, (src, tgt) in dom.morphisms.items():
            n = functor.mor_map.get(m)
            if n is None:
                report.add("totality", f"morphism {m} is not mapped", m)
            elif n not in cod.morphisms:
                report.add("typing", f"morphism {m} maps outside the codomain", m)
            elif cod.morphisms[n] != (functor.ob(src), functor.ob(tgt)):
                report.add("typing", f"{m} ↦ {n} does not respect source and target", m)
        if not report.ok:
            return report

        for x in dom.objects:
            if functor.mor(dom.id_of(x)) != cod.id_of(functor.ob(x)):
                report.add("identity", f"identity of {x} is not preserved", dom.id_of(x))
        for (g, f), h in dom.comp.items():
            if cod.comp.get((functor.mor(g), functor.mor(f))) != functor.mor(h):
                report.add("composition", f"composite {g}∘{f} is not preserved", g, f)
        return report

    def validate_nat_trans(self, alpha: NatTrans) -> ValidationReport:
        """Check typing and naturality of a transformation."""
        report = ValidationReport()
        F, G = alpha.dom, alpha.cod
        cod = F.cod
        for x in F.dom.objects:
            component = alpha.components.get(x)
            if component is None:
                report.add("totality", f"missing component at {x}", x)
            elif cod.morphisms.get(component) != (F.ob(x), G.ob(x)):
                report.add("typing", f"component {component} at {x} has the wrong endpoints", x)
        if not report.ok:
            return report
        for m, (x, y) in F.dom.morphisms.items():
            left = cod.compose(G.mor(m), alpha.components[x])
            right = cod.compose(alpha.components[y], F.mor(m))
            if left != right:
                report.add("naturality", f"naturality square at {m} does not commute", m)
        return report

    # ------------------------------------------------------------------
    # Functor algebra
    # ------------------------------------------------------------------

    def identity_functor(self, c: FinCategory) -> FinFunctor:
        return FinFunctor(
            dom=c,
            cod=c,
            obj_map={x: x for x in c.objects},
            mor_map={m: m for m in c.morphisms},
        )

    def compose_functors(self, g: FinFunctor, f: FinFunctor) -> FinFunctor:
        """Return ``g ∘ f``."""
        if f.cod is not g.dom and f.cod.objects != g.dom.objects:
            raise PreconditionError(
                "functors are not composable",
                witness=(f.cod.name or "?", g.dom.name or "?"),
            )
        return FinFunctor(
            dom=f.dom,
            cod=g.cod,
            obj_map={x: g.ob(y) for x, y in f.obj_map.items()},
            mor_map={m: g.mor(n) for m, n in f.mor_map.items()},
        )

    def functors_equal(self, f: FinFunctor, g: FinFunctor) -> bool:
        """Pointwise equality of two functors with the same endpoints."""
        return f.obj_map == g.obj_map and f.mor_map == g.mor_map

    def inverse_functor(self, f: FinFunctor) -> FinFunctor:
        """Inverse of an isomorphism of finite categories."""
        obj_inv = {y: x for x, y in f.obj_map.items()}
        mor_inv = {n: m for m, n in f.mor_map.items()}
        if len(obj_inv) != len(f.cod.objects) or len(mor_inv) != len(f.cod.morphisms):
            raise PreconditionError("functor is not invertible")
        return FinFunctor(dom=f.cod, cod=f.dom, obj_map=obj_inv, mor_map=mor_inv)

    # ------------------------------------------------------------------
    # Classification
    # ------------------------------------------------------------------

    def is_fully_faithful(self, f: FinFunctor) -> bool:
        dom, cod = f.dom, f.cod
        for a in dom.objects:
            for b in dom.objects:
                images = [f.mor(m) for m in dom.hom(a, b)]
                target = cod.hom(f.ob(a), f.ob(b))
                if len(set(images)) != len(images) or set(images) != set(target):
                    return False
        return True

    def is_bijective_on_objects(self, f: FinFunctor) -> bool:
        images = set(f.obj_map.values())
        return len(images) == len(f.dom.objects) and images == set(f.cod.objects)

    def is_initial(self, f: FinFunctor) -> bool:
        return all(self.is_connected(self.comma_category(f, b)) for b in f.cod.objects)

    def dopf_defect(self, f: FinFunctor) -> Optional[Tuple[str, str, int]]:
        """First ``(a, u, number of lifts)`` with a lift count other than one."""
        dom, cod = f.dom, f.cod
        for a in dom.objects:
            outgoing = dom.out_of(a)
            for u in cod.out_of(f.ob(a)):
                count = sum(1 for m in outgoing if f.mor(m) == u)
                if count != 1:
                    return a, u, count
        return None

    def classify_functor(self, f: FinFunctor) -> FunctorClass:
        """Compute every classification flag by its definition."""
        boo = self.is_bijective_on_objects(f)
        ioo = (
            boo
            and set(f.dom.objects) == set(f.cod.objects)
            and all(f.ob(x) == x for x in f.dom.objects)
        )
        ff = self.is_fully_faithful(f)
        return FunctorClass(
            fully_faithful=ff,
            bijective_on_objects=boo,
            identity_on_objects=ioo,
            initial=self.is_initial(f),
            discrete_opfibration=self.dopf_defect(f) is None,
            isomorphism=ff and boo,
        )

    # ------------------------------------------------------------------
    # Connectivity, discrete comonad, sums, relabelling
    # ------------------------------------------------------------------

    def connected_components(self, c: FinCategory) -> List[List[str]]:
        """Components in order of first object, objects in category order."""
        parent = {x: x for x in c.objects}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for src, tgt in c.morphisms.values():
            rs, rt = find(src), find(tgt)
            if rs != rt:
                parent[rt] = rs

        groups: Dict[str, List[str]] = {}
        for x in c.objects:
            groups.setdefault(find(x), []).append(x)
        return list(groups.values())

    def is_connected(self, c: FinCategory) -> bool:
        return len(self.connected_components(c)) == 1

    def discrete_of(self, a: FinCategory) -> Tuple[FinCategory, FinFunctor]:
        """The discrete category on the objects of ``a`` and its inclusion."""
        if a.is_discrete:
            return a, self.identity_functor(a)
        a0 = FinCategory(
            name=f"{a.name}_0" if a.name else "",
            objects=a.objects,
            morphisms={a.id_of(x): (x, x) for x in a.objects},
            identity=dict(a.identity),
            comp={(a.id_of(x), a.id_of(x)): a.id_of(x) for x in a.objects},
        )
        iota = FinFunctor(
            dom=a0,
            cod=a,
            obj_map={x: x for x in a.objects},
            mor_map={a.id_of(x): a.id_of(x) for x in a.objects},
        )
        return a0, iota

    def discrete_functor(self, f: FinFunctor) -> FinFunctor:
        """Action of the discrete comonad: ``f0: A0 -> B0``."""
        a0, _ = self.discrete_of(f.dom)
        b0, _ = self.discrete_of(f.cod)
        return FinFunctor(
            dom=a0,
            cod=b0,
            obj_map=dict(f.obj_map),
            mor_map={a0.id_of(x): b0.id_of(f.ob(x)) for x in a0.objects},
        )

    def coproduct(
        self, summands: Sequence[Tuple[str, FinCategory]], name: str = ""
    ) -> Tuple[FinCategory, List[FinFunctor]]:
        """Disjoint sum of tagged categories with identifiers ``(tag|x)``."""
        objects: List[str] = []
        morphisms: Dict[str, Tuple[str, str]] = {}
        identity: Dict[str, str] = {}
        comp: Dict[Tuple[str, str], str] = {}
        renames = []
        for tag, c in summands:
            obj_rename = {x: pair_name(tag, x) for x in c.objects}
            mor_rename = {
                m: identity_name(obj_rename[c.src(m)]) if c.is_identity(m) else pair_name(tag, m)
                for m in c.morphisms
            }
            objects.extend(obj_rename[x] for x in c.objects)
            for m, (src, tgt) in c.morphisms.items():
                morphisms[mor_rename[m]] = (obj_rename[src], obj_rename[tgt])
            for x in c.objects:
                identity[obj_rename[x]] = mor_rename[c.id_of(x)]
            for (g, f), h in c.comp.items():
                comp[(mor_rename[g], mor_rename[f])] = mor_rename[h]
            renames.append((c, obj_rename, mor_rename))

        total = FinCategory(name=name, objects=tuple(objects), morphisms=morphisms, identity=identity, comp=comp)
        injections = [
            FinFunctor(dom=c, cod=total, obj_map=obj_rename, mor_map=mor_rename)
            for c, obj_rename, mor_rename in renames
        ]
        return total, injections

    def relabel(
        self,
        c: FinCategory,
        obj_rename: Dict[str, str],
        mor_rename: Dict[str, str],
        name: str = "",
    ) -> Tuple[FinCategory, FinFunctor]:
        """Isomorphic copy of ``c`` under injective renamings, with the comparison iso."""
        obj_rename = {x: obj_rename.get(x, x) for x in c.objects}
        mor_rename = {m: mor_rename.get(m, m) for m in c.morphisms}
        if len(set(obj_rename.values())) != len(obj_rename):
            raise PreconditionError("object renaming is not injective")
        if len(set(mor_rename.values())) != len(mor_rename):
            raise PreconditionError("morphism renaming is not injective")
        copy = FinCategory(
            name=name or c.name,
            objects=tuple(obj_rename[x] for x in c.objects),
            morphisms={mor_rename[m]: (obj_rename[s], obj_rename[t]) for m, (s, t) in c.morphisms.items()},
            identity={obj_rename[x]: mor_rename[i] for x, i in c.identity.items()},
            comp={(mor_rename[g], mor_rename[f]): mor_rename[h] for (g, f), h in c.comp.items()},
        )
        return copy, FinFunctor(dom=c, cod=copy, obj_map=obj_rename, mor_map=mor_rename)

    # ------------------------------------------------------------------
    # Comma categories and pullbacks
    # ------------------------------------------------------------------

    def comma_objects(self, f: FinFunctor, b: str) -> List[Tuple[str, str]]:
        """Objects ``(a, u: fa -> b)`` of ``f/b`` in deterministic order."""
        return [(a, u) for a in f.dom.objects for u in f.cod.hom(f.ob(a), b)]

    def comma_category(self, f: FinFunctor, b: str) -> FinCategory:
        """The comma category ``f/b``."""
        if b not in f.cod.identity:
            raise PreconditionError(f"{b} is not an object of the codomain", witness=(b,))
        dom, cod = f.dom, f.cod
        pairs = self.comma_objects(f, b)
        names = {pair: pair_name(*pair) for pair in pairs}
        by_source: Dict[str, List[Tuple[str, str]]] = {}
        for pair in pairs:
            by_source.setdefault(pair[0], []).append(pair)

        morphisms: Dict[str, Tuple[str, str]] = {}
        identity: Dict[str, str] = {}
        info: Dict[str, Tuple[Tuple[str, str], str, Tuple[str, str]]] = {}
        for pair in pairs:
            name = identity_name(names[pair])
            identity[names[pair]] = name
            morphisms[name] = (names[pair], names[pair])
            info[name] = (pair, dom.id_of(pair[0]), pair)
        for w in dom.non_identities:
            fw = f.mor(w)
            for source in by_source.get(dom.src(w), []):
                for target in by_source.get(dom.tgt(w), []):
                    if cod.compose(target[1], fw) == source[1]:
                        name = arrow_name(names[source], w, names[target])
                        morphisms[name] = (names[source], names[target])
                        info[name] = (source, w, target)

        by_key = {(s, w, t): name for name, (s, w, t) in info.items()}
        comp: Dict[Tuple[str, str], str] = {}
        for first, (s1, w1, t1) in info.items():
            for second, (s2, w2, t2) in info.items():
                if s2 != t1:
                    continue
                comp[(second, first)] = by_key[(s1, dom.compose(w2, w1), t2)]

        category = FinCategory(
            name=f"{f.dom.name or 'dom'}/{b}",
            objects=tuple(names[p] for p in pairs),
            morphisms=morphisms,
            identity=identity,
            comp=comp,
        )
        logger.debug(f"Comma category over {b}: {len(pairs)} objects, {len(morphisms)} morphisms")
        return category

    def pullback(self, f: FinFunctor, g: FinFunctor) -> Pullback:
        """Pullback of ``f: A -> C`` and ``g: B -> C``, with its two projections."""
        if f.cod is not g.cod and f.cod.objects != g.cod.objects:
            raise PreconditionError("pullback legs have different codomains")
        a, b = f.dom, g.dom
        objects = [(x, y) for x in a.objects for y in b.objects if f.ob(x) == g.ob(y)]
        obj_names = {pair: pair_name(*pair) for pair in objects}
        keys: Dict[Tuple[str, str], str] = {}
        morphisms: Dict[str, Tuple[str, str]] = {}
        for m in a.morphisms:
            fm = f.mor(m)
            for n in b.morphisms:
                if g.mor(n) != fm:
                    continue
                src = obj_names[(a.src(m), b.src(n))]
                tgt = obj_names[(a.tgt(m), b.tgt(n))]
                name = identity_name(src) if a.is_identity(m) and b.is_identity(n) else pair_name(m, n)
                keys[(m, n)] = name
                morphisms[name] = (src, tgt)
        comp: Dict[Tuple[str, str], str] = {}
        for (m1, n1), first in keys.items():
            for (m2, n2), second in keys.items():
                if a.src(m2) == a.tgt(m1) and b.src(n2) == b.tgt(n1):
                    comp[(second, first)] = keys[(a.compose(m2, m1), b.compose(n2, n1))]

        category = FinCategory(
            objects=tuple(obj_names[p] for p in objects),
            morphisms=morphisms,
            identity={obj_names[p]: identity_name(obj_names[p]) for p in objects},
            comp=comp,
        )
        left = FinFunctor(
            dom=category,
            cod=a,
            obj_map={obj_names[p]: p[0] for p in objects},
            mor_map={name: m for (m, _), name in keys.items()},
        )
        right = FinFunctor(
            dom=category,
            cod=b,
            obj_map={obj_names[p]: p[1] for p in objects},
            mor_map={name: n for (_, n), name in keys.items()},
        )
        return Pullback(category=category, left=left, right=right)

    def is_pullback_square(
        self,
        left: FinFunctor,
        right: FinFunctor,
        bottom_left: FinFunctor,
        bottom_right: FinFunctor,
    ) -> CheckResult:
        """
        Decide whether the commuting square with corner ``P``, legs
        ``left: P -> A`` and ``right: P -> X``, and cospan
        ``bottom_left: A -> B`` and ``bottom_right: X -> B`` is a pullback.
        """
        corner = left.dom
        for x in corner.objects:
            if bottom_left.ob(left.ob(x)) != bottom_right.ob(right.ob(x)):
                return CheckResult(holds=False, witness=(x,), message="square does not commute")
        for m in corner.morphisms:
            if bottom_left.mor(left.mor(m)) != bottom_right.mor(right.mor(m)):
                return CheckResult(holds=False, witness=(m,), message="square does not commute")
        cone = self.pullback(bottom_left, bottom_right)
        by_pair_obj = {(cone.left.ob(p), cone.right.ob(p)): p for p in cone.category.objects}
        by_pair_mor = {(cone.left.mor(n), cone.right.mor(n)): n for n in cone.category.morphisms}
        comparison = FinFunctor(
            dom=corner,
            cod=cone.category,
            obj_map={x: by_pair_obj[(left.ob(x), right.ob(x))] for x in corner.objects},
            mor_map={m: by_pair_mor[(left.mor(m), right.mor(m))] for m in corner.morphisms},
        )
        flags = self.classify_functor(comparison)
        if not flags.isomorphism:
            return CheckResult(holds=False, message="comparison into the pullback is not an isomorphism")
        return CheckResult(holds=True)

    # ------------------------------------------------------------------
    # The special pushout
    # ------------------------------------------------------------------

    def pushout_along_discrete(self, f: FinFunctor, iota: FinFunctor) -> PushoutSquare:
        """
        Pushout of a fully faithful ``f: A0 -> X`` along ``iota: A0 -> A``.

        Sort-S1 morphisms are the morphisms of ``X``; sort-S2 morphisms are
        formal sequences ``[u;w;v]`` with ``w`` a non-identity morphism of ``A``.

        Args:
            f: Fully faithful functor out of a discrete category
            iota: Identity-on-objects functor from the same discrete category

        Returns:
            The pushout category with its two legs and the formal triples
        """
        a0, a, x = f.dom, iota.cod, f.cod
        if not a0.is_discrete:
            raise PreconditionError("pushout domain is not discrete", witness=a0.non_identities[:1])
        if iota.dom.objects != a0.objects or set(a.objects) != set(a0.objects):
            raise PreconditionError("iota must be identity-on-objects from the discrete domain")
        for obj in a0.objects:
            if iota.ob(obj) != obj:
                raise PreconditionError("iota is not identity-on-objects", witness=(obj,))
        if not self.is_fully_faithful(f):
            raise PreconditionError("pushout leg is not fully faithful")

        morphisms = dict(x.morphisms)
        formal: Dict[str, Tuple[str, str, str]] = {}
        for w in a.non_identities:
            fa, fa2 = f.ob(a.src(w)), f.ob(a.tgt(w))
            for u in x.into(fa):
                for v in x.out_of(fa2):
                    name = formal_name(u, w, v)
                    morphisms[name] = (x.src(u), x.tgt(v))
                    formal[name] = (u, w, v)
        by_formal = {triple: name for name, triple in formal.items()}

        comp = dict(x.comp)
        by_source: Dict[str, List[str]] = {}
        for name, (u, _, _) in formal.items():
            by_source.setdefault(x.src(u), []).append(name)
        for name, (u, w, v) in formal.items():
            for t in x.out_of(x.tgt(v)):
                comp[(t, name)] = by_formal[(u, w, x.compose(t, v))]
            for t in x.into(x.src(u)):
                comp[(name, t)] = by_formal[(x.compose(u, t), w, v)]
            for second in by_source.get(x.tgt(v), []):
                u2, w2, v2 = formal[second]
                bridge = x.compose(u2, v)
                if not x.is_identity(bridge):
                    raise PreconditionError(
                        "formal composite bridges through a non-identity morphism",
                        witness=(second, name, bridge),
                    )
                composite = a.compose(w2, w)
                if a.is_identity(composite):
                    comp[(second, name)] = x.compose(v2, u)
                else:
                    comp[(second, name)] = by_formal[(u, composite, v2)]

        b = FinCategory(
            objects=x.objects,
            morphisms=morphisms,
            identity=dict(x.identity),
            comp=comp,
        )
        left = FinFunctor(
            dom=a,
            cod=b,
            obj_map={obj: f.ob(obj) for obj in a.objects},
            mor_map={
                w: (
                    x.id_of(f.ob(a.src(w)))
                    if a.is_identity(w)
                    else by_formal[(x.id_of(f.ob(a.src(w))), w, x.id_of(f.ob(a.tgt(w))))]
                )
                for w in a.morphisms
            },
        )
        right = FinFunctor(
            dom=x,
            cod=b,
            obj_map={obj: obj for obj in x.objects},
            mor_map={m: m for m in x.morphisms},
        )
        logger.debug(f"Special pushout: {len(b.objects)} objects, {len(x.morphisms)} S1 and {len(formal)} S2 morphisms")
        return PushoutSquare(category=b, left=left, right=right, initial=f, iota=iota, formal=formal)

    def pushout_mediator(self, square: PushoutSquare, left: FinFunctor, right: FinFunctor) -> FinFunctor:
        """The unique ``B -> Z`` restricting to ``left: A -> Z`` and ``right: X -> Z``."""
        z = right.cod
        for obj in square.initial.dom.objects:
            if right.ob(square.initial.ob(obj)) != left.ob(square.iota.ob(obj)):
                raise PreconditionError("cocone legs disagree on the discrete domain", witness=(obj,))
        b = square.category
        mor_map = {}
        for m in b.morphisms:
            if m in square.formal:
                u, w, v = square.formal[m]
                mor_map[m] = z.compose(right.mor(v), left.mor(w), right.mor(u))
            else:
                mor_map[m] = right.mor(m)
        return FinFunctor(
            dom=b,
            cod=z,
            obj_map={obj: right.ob(obj) for obj in b.objects},
            mor_map=mor_map,
        )

    # ------------------------------------------------------------------
    # Lifting and the comprehensive factorisation
    # ------------------------------------------------------------------

    def boo_lift(self, g: FinFunctor, psi: FinFunctor) -> FinFunctor:
        """The unique ``ĝ`` with ``psi ∘ ĝ = g`` for discrete ``dom g`` and boo ``psi``."""
        if not g.dom.is_discrete:
            raise PreconditionError("boo lift needs a discrete domain", witness=g.dom.non_identities[:1])
        if not self.is_bijective_on_objects(psi):
            raise PreconditionError("boo lift needs a bijective-on-objects functor")
        a = psi.dom
        inverse = {y: x for x, y in psi.obj_map.items()}
        obj_map = {x: inverse[g.ob(x)] for x in g.dom.objects}
        return FinFunctor(
            dom=g.dom,
            cod=a,
            obj_map=obj_map,
            mor_map={g.dom.id_of(x): a.id_of(obj_map[x]) for x in g.dom.objects},
        )

    def unique_lift(self, g: FinFunctor, c: str, d: str) -> str:
        """The unique morphism out of ``c`` that ``g`` sends to ``d``."""
        found = [m for m in g.dom.out_of(c) if g.mor(m) == d]
        if not found:
            raise LiftError(LiftError.NOT_FOUND, f"no lift of {d} at {c}", witness=(c, d))
        if len(found) > 1:
            raise LiftError(LiftError.NON_UNIQUE, f"{len(found)} lifts of {d} at {c}", witness=(c, d, *found))
        return found[0]

    def orthogonal_lift(
        self,
        f: FinFunctor,
        g: FinFunctor,
        top: FinFunctor,
        bottom: FinFunctor,
        verify: bool = False,
    ) -> FinFunctor:
        """
        Diagonal filler of a square from an initial ``f`` to a discrete opfibration ``g``.

        Args:
            f: Left leg ``A -> B``
            g: Right leg ``C -> D``
            top: ``A -> C``
            bottom: ``B -> D``
            verify: Also compare against a brute-force search for fillers

        Returns:
            The unique ``ell: B -> C`` with ``ell ∘ f = top`` and ``g ∘ ell = bottom``
        """
        for obj in f.dom.objects:
            if g.ob(top.ob(obj)) != bottom.ob(f.ob(obj)):
                raise PreconditionError("lifting square does not commute", witness=(obj,))
        for m in f.dom.morphisms:
            if g.mor(top.mor(m)) != bottom.mor(f.mor(m)):
                raise PreconditionError("lifting square does not commute", witness=(m,))
        if not self.is_initial(f):
            raise PreconditionError("orthogonal lift needs an initial left leg")
        defect = self.dopf_defect(g)
        if defect is not None:
            a, u, count = defect
            raise PreconditionError(
                f"orthogonal lift needs a discrete opfibration; {count} lifts of {u} at {a}", witness=(a, u)
            )

        b, c = f.cod, g.dom
        obj_map: Dict[str, str] = {}
        for y in b.objects:
            targets = []
            for a, u in self.comma_objects(f, y):
                lifted = self.unique_lift(g, top.ob(a), bottom.mor(u))
                targets.append(c.tgt(lifted))
            if not targets:
                raise LiftError(LiftError.NOT_FOUND, f"no comma object over {y}", witness=(y,))
            if len(set(targets)) > 1:
                raise LiftError(LiftError.NOT_FOUND, f"lifts over {y} disagree", witness=(y, *sorted(set(targets))))
            obj_map[y] = targets[0]
        mor_map = {m: self.unique_lift(g, obj_map[b.src(m)], bottom.mor(m)) for m in b.morphisms}
        ell = FinFunctor(dom=b, cod=c, obj_map=obj_map, mor_map=mor_map)

        report = self.validate_functor(ell)
        if not report.ok:
            raise LiftError(LiftError.NOT_FOUND, "assembled filler is not a functor", witness=report.violations[0].witness)
        if not self.functors_equal(self.compose_functors(ell, f), top):
            raise LiftError(LiftError.NOT_FOUND, "filler does not restrict to the top leg")

        if verify:
            fillers = [
                h
                for h in self.enumerate_functors(b, c)
                if self.functors_equal(self.compose_functors(h, f), top)
                and self.functors_equal(self.compose_functors(g, h), bottom)
            ]
            if len(fillers) != 1 or not self.functors_equal(fillers[0], ell):
                raise LiftError(
                    LiftError.NON_UNIQUE,
                    f"brute force found {len(fillers)} fillers",
                    witness=(str(len(fillers)),),
                )
        return ell

    def comprehensive_factorize(self, f: FinFunctor) -> ComprehensiveFactorization:
        """Factor ``f`` as an initial functor followed by a discrete opfibration."""
        a, b = f.dom, f.cod
        representative: Dict[Tuple[str, str], str] = {}
        decode: Dict[Tuple[str, str], Tuple[str, str]] = {}
        objects: List[str] = []
        over: Dict[str, Tuple[str, str]] = {}
        for y in b.objects:
            for pair in self.comma_objects(f, y):
                decode[(y, pair_name(*pair))] = pair
            for component in self.connected_components(self.comma_category(f, y)):
                rep = component[0]
                for obj in component:
                    representative[(y, obj)] = rep
                name = pair_name(y, rep)
                objects.append(name)
                over[name] = (y, rep)

        morphisms: Dict[str, Tuple[str, str]] = {}
        identity: Dict[str, str] = {}
        arrows: Dict[Tuple[str, str], str] = {}
        for name, (y, rep) in over.items():
            pa, pu = decode[(y, rep)]
            for v in b.out_of(y):
                target_y = b.tgt(v)
                target = pair_name(target_y, representative[(target_y, pair_name(pa, b.compose(v, pu)))])
                arrow = identity_name(name) if b.is_identity(v) else pair_name(v, rep)
                arrows[(name, v)] = arrow
                morphisms[arrow] = (name, target)
                if b.is_identity(v):
                    identity[name] = arrow
        comp: Dict[Tuple[str, str], str] = {}
        for (name, v1), first in arrows.items():
            middle = morphisms[first][1]
            for v2 in b.out_of(b.tgt(v1)):
                comp[(arrows[(middle, v2)], first)] = arrows[(name, b.compose(v2, v1))]

        m = FinCategory(name=f"el({a.name or 'f'})", objects=tuple(objects), morphisms=morphisms, identity=identity, comp=comp)
        initial_obj = {x: pair_name(f.ob(x), representative[(f.ob(x), pair_name(x, b.id_of(f.ob(x))))]) for x in a.objects}
        initial = FinFunctor(
            dom=a,
            cod=m,
            obj_map=initial_obj,
            mor_map={w: arrows[(initial_obj[a.src(w)], f.mor(w))] for w in a.morphisms},
        )
        dopf = FinFunctor(
            dom=m,
            cod=b,
            obj_map={name: over[name][0] for name in objects},
            mor_map={arrow: v for (_, v), arrow in arrows.items()},
        )
        return ComprehensiveFactorization(initial=initial, middle=m, dopf=dopf)

    # ------------------------------------------------------------------
    # Brute-force oracles
    # ------------------------------------------------------------------

    def _irreducibles(self, c: FinCategory) -> List[str]:
        composites = {c.comp[(g, f)] for g, f in c.composable_pairs() if not c.is_identity(g) and not c.is_identity(f)}
        return [m for m in c.non_identities if m not in composites]

    def estimate_functor_space(
        self, a: FinCategory, b: FinCategory, allowed: Optional[Callable[[str, str, str], bool]] = None
    ) -> int:
        max_hom = max((len(ms) for ms in b.hom_table.values()), default=1)
        objects = 1
        for x in a.objects:
            choices = len(b.objects) if allowed is None else sum(1 for y in b.objects if allowed("o", x, y))
            objects *= choices
        return objects * max(max_hom, 1) ** len(self._irreducibles(a))

    def enumerate_functors(
        self,
        a: FinCategory,
        b: FinCategory,
        allowed: Optional[Callable[[str, str, str], bool]] = None,
    ) -> Iterator[FinFunctor]:
        """
        Every functor ``a -> b``, without duplicates, in deterministic order.

        Objects are assigned first, then non-identity morphisms; a composite
        constraint is checked as soon as its last morphism is assigned.
        ``allowed(kind, name, image)`` with kind ``"o"`` or ``"m"`` restricts
        the images considered.
        """
        self.search.check_space(
            self.estimate_functor_space(a, b, allowed),
            f"functor search {a.name or '?'} -> {b.name or '?'}",
        )
        objects = list(a.objects)
        arrows = list(a.non_identities)
        variables = [("o", x) for x in objects] + [("m", m) for m in arrows]
        position = {m: i for i, m in enumerate(arrows)}

        constraints: Dict[str, List[Tuple[str, str, str]]] = {m: [] for m in arrows}
        for (g, f), h in a.comp.items():
            if a.is_identity(g) or a.is_identity(f):
                continue
            members = [g, f] + ([h] if not a.is_identity(h) else [])
            last = max(members, key=lambda m: position[m])
            constraints[last].append((g, f, h))

        def image(assignment, m: str) -> str:
            if a.is_identity(m):
                return b.id_of(assignment[("o", a.src(m))])
            return assignment[("m", m)]

        def candidates(var, assignment):
            kind, name = var
            if kind == "o":
                options = b.objects
            else:
                options = b.hom(assignment[("o", a.src(name))], assignment[("o", a.tgt(name))])
            if allowed is None:
                return options
            return [y for y in options if allowed(kind, name, y)]

        def accept(var, assignment):
            kind, name = var
            if kind == "o":
                return True
            for g, f, h in constraints[name]:
                if b.comp[(image(assignment, g), image(assignment, f))] != image(assignment, h):
                    return False
            return True

        for assignment in self.search.backtrack(variables, candidates, accept):
            yield FinFunctor(
                dom=a,
                cod=b,
                obj_map={x: assignment[("o", x)] for x in objects},
                mor_map={m: image(assignment, m) for m in a.morphisms},
            )

    def find_isomorphism(self, c: FinCategory, d: FinCategory) -> Optional[FinFunctor]:
        """Search for an isomorphism ``c -> d``; ``None`` when there is none."""
        if len(c.objects) != len(d.objects) or len(c.morphisms) != len(d.morphisms):
            return None
        arrows = list(c.non_identities)
        for image in permutations(d.objects):
            obj_map = dict(zip(c.objects, image))
            if any(
                len(c.hom(x, y)) != len(d.hom(obj_map[x], obj_map[y]))
                for x in c.objects
                for y in c.objects
            ):
                continue

            def candidates(m, assignment, obj_map=obj_map):
                used = set(assignment.values())
                return [n for n in d.hom(obj_map[c.src(m)], obj_map[c.tgt(m)]) if n not in used and not d.is_identity(n)]

            def accept(m, assignment, obj_map=obj_map):
                def img(n):
                    return d.id_of(obj_map[c.src(n)]) if c.is_identity(n) else assignment.get(n)

                for g in c.out_of(c.tgt(m)):
                    if c.is_identity(g) or img(g) is None:
                        continue
                    h = img(c.comp[(g, m)])
                    if h is not None and d.comp[(img(g), img(m))] != h:
                        return False
                for f in c.into(c.src(m)):
                    if c.is_identity(f) or img(f) is None:
                        continue
                    h = img(c.comp[(m, f)])
                    if h is not None and d.comp[(img(m), img(f))] != h:
                        return False
                return True

            for assignment in self.search.backtrack(arrows, candidates, accept):
                mor_map = {m: d.id_of(obj_map[c.src(m)]) for m in c.morphisms if c.is_identity(m)}
                mor_map.update(assignment)
                candidate = FinFunctor(dom=c, cod=d, obj_map=obj_map, mor_map=mor_map)
                if self.validate_functor(candidate).ok:
                    return candidate
        return None
