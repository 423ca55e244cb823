"""
Lens service: delta lens axioms, composition, cells, tabulators and the
enumeration of lens structures on a functor.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple

from catlift.errors import PreconditionError
from catlift.models import (
    CheckResult,
    DeltaLens,
    FinCategory,
    FinFunctor,
    LensStructureCount,
    Tabulator,
    ValidationReport,
)
from catlift.services.category_service import CategoryService

logger = logging.getLogger(__name__)


class GeneratedVariant(str, Enum):
    """Which generating cells a lift table must be compatible with."""

    LENS = "lens"
    DOPF = "dopf"
    SOPF = "sopf"


class LensService:
    """Service for delta lenses."""

    def __init__(self, categories: Optional[CategoryService] = None):
        """Initialize the lens service."""
        self.categories = categories or CategoryService()

    @staticmethod
    def lift_index(f: FinFunctor) -> List[Tuple[str, str]]:
        """Every ``(a, u)`` with ``src u = f a``, objects first then morphisms."""
        return [(a, u) for a in f.dom.objects for u in f.cod.out_of(f.ob(a))]

    def identity_lens(self, c: FinCategory) -> DeltaLens:
        functor = self.categories.identity_functor(c)
        return DeltaLens(functor=functor, lifts={(a, u): u for a, u in self.lift_index(functor)})

    def check_delta_lens(self, lens: DeltaLens) -> ValidationReport:
        """
        Check the three lens axioms on every index of the lift table.

        Args:
            lens: Lens to check

        Returns:
            Report of DL1-DL3 violations with ``(a, u[, v])`` witnesses
        """
        report = ValidationReport()
        f = lens.functor
        a_cat, b_cat = f.dom, f.cod
        index = self.lift_index(f)
        for a, u in index:
            lifted = lens.lifts.get((a, u))
            if lifted is None:
                report.add("totality", f"no lift chosen at ({a}, {u})", a, u)
            elif a_cat.morphisms.get(lifted, (None, None))[0] != a:
                report.add("typing", f"lift {lifted} at ({a}, {u}) does not start at {a}", a, u)
            elif f.mor(lifted) != u:
                report.add("DL1", f"lift {lifted} does not map to {u}", a, u)
        if not report.ok:
            return report

        for a in a_cat.objects:
            if lens.lift(a, b_cat.id_of(f.ob(a))) != a_cat.id_of(a):
                report.add("DL2", f"lift of the identity at {a} is not the identity", a, b_cat.id_of(f.ob(a)))

        for a, u in index:
            first = lens.lift(a, u)
            a2 = a_cat.tgt(first)
            for v in b_cat.out_of(b_cat.tgt(u)):
                expected = a_cat.compose(lens.lift(a2, v), first)
                if lens.lift(a, b_cat.compose(v, u)) != expected:
                    report.add("DL3", f"lift of {v}∘{u} at {a} is not the composite of lifts", a, u, v)
        return report

    def compose_lenses(self, first: DeltaLens, second: DeltaLens) -> DeltaLens:
        """Composite lens ``A -> B -> C`` with lifts ``φ(a, ψ(fa, u))``."""
        f, g = first.functor, second.functor
        if f.cod.objects != g.dom.objects or set(f.cod.morphisms) != set(g.dom.morphisms):
            raise PreconditionError("lenses are not composable")
        composite = self.categories.compose_functors(g, f)
        lifts = {(a, u): first.lift(a, second.lift(f.ob(a), u)) for a, u in self.lift_index(composite)}
        return DeltaLens(functor=composite, lifts=lifts)

    def lens_from_dopf(self, f: FinFunctor) -> DeltaLens:
        """The unique lens structure on a discrete opfibration."""
        defect = self.categories.dopf_defect(f)
        if defect is not None:
            a, u, count = defect
            raise PreconditionError(f"not a discrete opfibration: {count} lifts of {u} at {a}", witness=(a, u))
        return DeltaLens(
            functor=f,
            lifts={(a, u): self.categories.unique_lift(f, a, u) for a, u in self.lift_index(f)},
        )

    def is_opcartesian(self, lens: DeltaLens, a: str, u: str) -> Optional[str]:
        """First ``w'`` out of ``a`` violating opcartesianness of the lift at ``(a, u)``."""
        f = lens.functor
        a_cat, b_cat = f.dom, f.cod
        chosen = lens.lift(a, u)
        middle = a_cat.tgt(chosen)
        for other in a_cat.out_of(a):
            for v in b_cat.out_of(b_cat.tgt(u)):
                if b_cat.compose(v, u) != f.mor(other):
                    continue
                fillers = [
                    t
                    for t in a_cat.hom(middle, a_cat.tgt(other))
                    if f.mor(t) == v and a_cat.compose(t, chosen) == other
                ]
                if len(fillers) != 1:
                    return other
        return None

    def is_split_opfibration(self, lens: DeltaLens) -> CheckResult:
        """True iff every chosen lift is opcartesian; otherwise the first failing ``(a, u, w')``."""
        for a, u in self.lift_index(lens.functor):
            other = self.is_opcartesian(lens, a, u)
            if other is not None:
                return CheckResult(
                    holds=False,
                    witness=(a, u, other),
                    message=f"lift of {u} at {a} is not opcartesian against {other}",
                )
        return CheckResult(holds=True)

    def is_lens_cell(self, h: FinFunctor, k: FinFunctor, first: DeltaLens, second: DeltaLens) -> CheckResult:
        """Whether ``(h, k)`` preserves chosen lifts from ``first`` to ``second``."""
        f, g = first.functor, second.functor
        for a in f.dom.objects:
            if k.ob(f.ob(a)) != g.ob(h.ob(a)):
                raise PreconditionError("lens cell square does not commute", witness=(a,))
        for m in f.dom.morphisms:
            if k.mor(f.mor(m)) != g.mor(h.mor(m)):
                raise PreconditionError("lens cell square does not commute", witness=(m,))
        for a, u in self.lift_index(f):
            if h.mor(first.lift(a, u)) != second.lift(h.ob(a), k.mor(u)):
                return CheckResult(holds=False, witness=(a, u), message=f"lift at ({a}, {u}) is not preserved")
        return CheckResult(holds=True)

    def tabulator(self, lens: DeltaLens) -> Tabulator:
        """Wide subcategory of chosen lifts, with its inclusion and ``f ∘ inclusion``."""
        a_cat = lens.functor.dom
        chosen = set(lens.lifts.values())
        chosen.update(a_cat.identity.values())
        morphisms = {m: ends for m, ends in a_cat.morphisms.items() if m in chosen}
        comp = {(g, f): h for (g, f), h in a_cat.comp.items() if g in chosen and f in chosen}
        category = FinCategory(
            name=f"tab({a_cat.name})" if a_cat.name else "",
            objects=a_cat.objects,
            morphisms=morphisms,
            identity=dict(a_cat.identity),
            comp=comp,
        )
        left = FinFunctor(
            dom=category,
            cod=a_cat,
            obj_map={x: x for x in category.objects},
            mor_map={m: m for m in morphisms},
        )
        right = self.categories.compose_functors(lens.functor, left)
        logger.debug(f"Tabulator keeps {len(morphisms)} of {len(a_cat.morphisms)} morphisms")
        return Tabulator(category=category, left=left, right=right)

    def induce_into_tabulator(self, lens: DeltaLens, h: FinFunctor, k: FinFunctor) -> FinFunctor:
        """The unique ``j: X -> Λ`` with ``piA ∘ j = h`` for a cell ``(h, k)`` out of an identity lens."""
        x = h.dom
        source = self.identity_lens(x)
        cell = self.is_lens_cell(h, k, source, lens)
        if not cell.holds:
            raise PreconditionError("not a cell into the lens", witness=cell.witness)
        tab = self.tabulator(lens)
        return FinFunctor(dom=x, cod=tab.category, obj_map=dict(h.obj_map), mor_map=dict(h.mor_map))

    def lens_from_diagram(self, psi: FinFunctor, f: FinFunctor) -> DeltaLens:
        """Lens on ``f`` whose lifts are images under ``psi`` of the unique ``f ∘ psi`` lifts."""
        if not self.categories.is_bijective_on_objects(psi):
            raise PreconditionError("psi is not bijective on objects")
        composite = self.categories.compose_functors(f, psi)
        defect = self.categories.dopf_defect(composite)
        if defect is not None:
            a, u, count = defect
            raise PreconditionError(f"f∘psi has {count} lifts of {u} at {a}", witness=(a, u))
        preimage = {y: x for x, y in psi.obj_map.items()}
        lifts = {
            (a, u): psi.mor(self.categories.unique_lift(composite, preimage[a], u))
            for a, u in self.lift_index(f)
        }
        return DeltaLens(functor=f, lifts=lifts)

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------

    def _dl3_consistent(self, f: FinFunctor, table: Dict[Tuple[str, str], str]) -> bool:
        a_cat, b_cat = f.dom, f.cod
        for (a, u), first in table.items():
            a2 = a_cat.tgt(first)
            for v in b_cat.out_of(b_cat.tgt(u)):
                second = table.get((a2, v))
                composite = table.get((a, b_cat.compose(v, u)))
                if second is not None and composite is not None:
                    if composite != a_cat.compose(second, first):
                        return False
        return True

    def _candidates(self, f: FinFunctor, a: str, u: str) -> List[str]:
        if f.cod.is_identity(u):
            return [f.dom.id_of(a)]
        return [m for m in f.dom.out_of(a) if f.mor(m) == u]

    def _estimate(self, f: FinFunctor) -> int:
        estimate = 1
        for a, u in self.lift_index(f):
            estimate *= max(len(self._candidates(f, a, u)), 1)
        return estimate

    def enumerate_lens_structures(self, f: FinFunctor, materialize: bool = True) -> LensStructureCount:
        """
        All lift tables on ``f`` satisfying DL1-DL3.

        Args:
            f: Underlying functor
            materialize: Keep the structures, not only their count

        Returns:
            Count and (optionally) the lenses, in deterministic order
        """
        self.categories.search.check_space(self._estimate(f), "lens structure search")
        index = self.lift_index(f)

        def candidates(var, assignment):
            return self._candidates(f, *var)

        def accept(var, assignment):
            return self._dl3_consistent(f, assignment)

        structures = [
            DeltaLens(functor=f, lifts=table)
            for table in self.categories.search.backtrack(index, candidates, accept)
        ]
        logger.debug(f"Found {len(structures)} lens structures")
        return LensStructureCount(functor=f, count=len(structures), structures=structures if materialize else None)

    def generated_index(self, f: FinFunctor) -> List[Tuple[str, str, str]]:
        """
        Search variables for generated structures.

        Each lift ``("lift", a, u)`` is followed by the second-step choices
        ``("step", w, u)`` for every ``w`` into ``a``, so a step is decided
        right after the lift it must agree with.
        """
        index: List[Tuple[str, str, str]] = []
        for a, u in self.lift_index(f):
            index.append(("lift", a, u))
            index.extend(("step", w, u) for w in f.dom.into(a))
        return index

    def _generated_violation(
        self,
        f: FinFunctor,
        variant: GeneratedVariant,
        lifts: Dict[Tuple[str, str], str],
        steps: Dict[Tuple[str, str], str],
        focus: Optional[Tuple[str, str, str]] = None,
    ) -> Optional[Tuple[str, Tuple[str, ...]]]:
        """First violated cell as ``(cell, witness)``; only cells touching ``focus`` when given."""
        a_cat, b_cat = f.dom, f.cod
        lift_items = list(lifts.items())
        step_items = list(steps.items())
        if focus is not None:
            kind, x, v = focus
            lift_items = [((x, v), lifts[(x, v)])] if kind == "lift" else []
            step_items = [((x, v), steps[(x, v)])] if kind == "step" else []
        for (a, u), chosen in lift_items:
            if b_cat.is_identity(u) and chosen != a_cat.id_of(a):
                return "identity", (a, u, chosen)
            if variant is GeneratedVariant.DOPF:
                if any(f.mor(w) == u and w != chosen for w in a_cat.out_of(a)):
                    return "discrete", (a, u, chosen)
            if variant is GeneratedVariant.SOPF:
                single = DeltaLens(functor=f, lifts={(a, u): chosen})
                other = self.is_opcartesian(single, a, u)
                if other is not None:
                    return "opcartesian", (a, u, other)
        for (w, v), chosen in step_items:
            expected = lifts.get((a_cat.tgt(w), v))
            if expected is not None and chosen != expected:
                return "step", (w, v, chosen)
        for (a, u), first in lifts.items():
            for v in b_cat.out_of(b_cat.tgt(u)):
                second = steps.get((first, v))
                composite = lifts.get((a, b_cat.compose(v, u)))
                if second is not None and composite is not None and composite != a_cat.compose(second, first):
                    return "composite", (a, u, v)
        return None

    def check_generated_cells(
        self,
        f: FinFunctor,
        lifts: Dict[Tuple[str, str], str],
        steps: Dict[Tuple[str, str], str],
        variant: GeneratedVariant = GeneratedVariant.LENS,
    ) -> CheckResult:
        """
        Check a lift table and its second-step choices against the generating cells.

        Args:
            f: Underlying functor
            lifts: ``(a, u) -> φ(a, u)``
            steps: ``(w, v) -> γ(w, v)`` for ``v`` out of ``f (tgt w)``
            variant: Which extra cells apply

        Returns:
            Holds, or the first violated cell (``identity``, ``discrete``,
            ``opcartesian``, ``step`` or ``composite``) with its witness
        """
        violation = self._generated_violation(f, GeneratedVariant(variant), lifts, steps)
        if violation is None:
            return CheckResult(holds=True)
        cell, witness = violation
        return CheckResult(holds=False, witness=witness, message=f"{cell} cell fails at {', '.join(witness)}")

    def enumerate_generated_structures(
        self,
        f: FinFunctor,
        variant: GeneratedVariant = GeneratedVariant.LENS,
        materialize: bool = True,
    ) -> LensStructureCount:
        """
        Lift tables compatible with the generating cells of each variant.

        A structure chooses a lift ``φ(a, u)`` for every square from ``1 -> 2``
        and a second step ``γ(w, v)`` for every square from ``2 -> 3``, each
        among the morphisms over the given one. Compatibility with the
        generators asks that ``γ(w, v) = φ(tgt w, v)``, that identities lift
        to identities and that ``φ(a, v ∘ u) = γ(φ(a, u), v) ∘ φ(a, u)``.
        The ``dopf`` variant also makes every morphism ``w`` the chosen lift
        of ``f w``; the ``sopf`` variant asks for a unique comparison ``θ``
        for every further factorization. Accepted structures are reported by
        their lift tables.
        """
        variant = GeneratedVariant(variant)
        a_cat = f.dom
        self.categories.search.check_space(
            self._estimate(f), f"{variant.value} generated structure search"
        )

        def candidates(var, assignment):
            kind, x, v = var
            origin = x if kind == "lift" else a_cat.tgt(x)
            return [m for m in a_cat.out_of(origin) if f.mor(m) == v]

        def accept(var, assignment):
            lifts = {(x, v): m for (kind, x, v), m in assignment.items() if kind == "lift"}
            steps = {(x, v): m for (kind, x, v), m in assignment.items() if kind == "step"}
            return self._generated_violation(f, variant, lifts, steps, focus=var) is None

        structures: List[DeltaLens] = []
        seen = set()
        for assignment in self.categories.search.backtrack(
            self.generated_index(f), candidates, accept, budget=f"{variant.value} generated structure search"
        ):
            lifts = {(x, v): m for (kind, x, v), m in assignment.items() if kind == "lift"}
            lens = DeltaLens(functor=f, lifts=lifts)
            if lens.signature not in seen:
                seen.add(lens.signature)
                structures.append(lens)
        logger.debug(f"Found {len(structures)} {variant.value}-generated structures")
        return LensStructureCount(functor=f, count=len(structures), structures=structures if materialize else None)
