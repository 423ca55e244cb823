"""
Domain models for finite categories, functors, lenses and coreflections.
"""

from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from catlift.models.naming import identity_name


class FinCategory(BaseModel):
    """A finite category stored as total tables.

    ``comp[(g, f)]`` is ``g ∘ f`` and is defined exactly on pairs with
    ``tgt f == src g``. Identities are ordinary morphisms listed in
    ``identity``.
    """

    model_config = ConfigDict(frozen=True)

    name: str = ""
    objects: Tuple[str, ...]
    morphisms: Dict[str, Tuple[str, str]]
    identity: Dict[str, str]
    comp: Dict[Tuple[str, str], str]

    @classmethod
    def from_table(
        cls,
        objects: List[str],
        morphisms: Dict[str, Tuple[str, str]],
        comp: Dict[Tuple[str, str], str],
        name: str = "",
    ) -> "FinCategory":
        """Build a category from its non-identity part, synthesizing identities."""
        identity = {x: identity_name(x) for x in objects}
        table: Dict[str, Tuple[str, str]] = {identity[x]: (x, x) for x in objects}
        for m, (src, tgt) in morphisms.items():
            if m in table and table[m] == (src, tgt) and src == tgt and identity.get(src) == m:
                continue
            table[m] = (src, tgt)

        full: Dict[Tuple[str, str], str] = {}
        for m, (src, tgt) in table.items():
            if src in identity:
                full[(m, identity[src])] = m
            if tgt in identity:
                full[(identity[tgt], m)] = m
        full.update(comp)
        return cls(name=name, objects=tuple(objects), morphisms=table, identity=identity, comp=full)

    @cached_property
    def identity_set(self) -> frozenset:
        return frozenset(self.identity.values())

    @cached_property
    def out_table(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {x: [] for x in self.objects}
        for m, (src, _) in self.morphisms.items():
            out.setdefault(src, []).append(m)
        return {x: tuple(ms) for x, ms in out.items()}

    @cached_property
    def in_table(self) -> Dict[str, Tuple[str, ...]]:
        into: Dict[str, List[str]] = {x: [] for x in self.objects}
        for m, (_, tgt) in self.morphisms.items():
            into.setdefault(tgt, []).append(m)
        return {x: tuple(ms) for x, ms in into.items()}

    @cached_property
    def hom_table(self) -> Dict[Tuple[str, str], Tuple[str, ...]]:
        homs: Dict[Tuple[str, str], List[str]] = {}
        for m, ends in self.morphisms.items():
            homs.setdefault(ends, []).append(m)
        return {ends: tuple(ms) for ends, ms in homs.items()}

    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def tgt(self, m: str) -> str:
        return self.morphisms[m][1]

    def id_of(self, x: str) -> str:
        return self.identity[x]

    def is_identity(self, m: str) -> bool:
        return m in self.identity_set

    def hom(self, x: str, y: str) -> Tuple[str, ...]:
        return self.hom_table.get((x, y), ())

    def out_of(self, x: str) -> Tuple[str, ...]:
        return self.out_table.get(x, ())

    def into(self, y: str) -> Tuple[str, ...]:
        return self.in_table.get(y, ())

    def compose(self, *ms: str) -> str:
        """Compose right to left: ``compose(h, g, f) == h ∘ g ∘ f``."""
        result = ms[-1]
        for m in reversed(ms[:-1]):
            result = self.comp[(m, result)]
        return result

    @cached_property
    def key(self) -> Tuple:
        """Hashable content of the category, independent of its name."""
        return (
            self.objects,
            tuple(sorted(self.morphisms.items())),
            tuple(sorted(self.identity.items())),
            tuple(sorted(self.comp.items())),
        )

    @cached_property
    def non_identities(self) -> Tuple[str, ...]:
        return tuple(m for m in self.morphisms if m not in self.identity_set)

    @property
    def is_discrete(self) -> bool:
        return not self.non_identities

    def composable_pairs(self):
        for f in self.morphisms:
            for g in self.out_of(self.tgt(f)):
                yield g, f


class FinFunctor(BaseModel):
    """A functor between finite categories given by its object and morphism maps."""

    model_config = ConfigDict(frozen=True)

    dom: FinCategory
    cod: FinCategory
    obj_map: Dict[str, str]
    mor_map: Dict[str, str]

    def ob(self, x: str) -> str:
        return self.obj_map[x]

    def mor(self, m: str) -> str:
        return self.mor_map[m]

    @cached_property
    def signature(self) -> Tuple[Tuple[Tuple[str, str], ...], Tuple[Tuple[str, str], ...]]:
        """Hashable summary used to compare functors with the same endpoints."""
        return (
            tuple(sorted(self.obj_map.items())),
            tuple(sorted(self.mor_map.items())),
        )

    @cached_property
    def key(self) -> Tuple:
        """Signature together with both endpoints."""
        return (self.dom.key, self.cod.key, self.signature)


class NatTrans(BaseModel):
    """A natural transformation between parallel functors."""

    model_config = ConfigDict(frozen=True)

    dom: FinFunctor
    cod: FinFunctor
    components: Dict[str, str]


class FunctorClass(BaseModel):
    """Classification flags of a functor."""

    model_config = ConfigDict(frozen=True)

    fully_faithful: bool
    bijective_on_objects: bool
    identity_on_objects: bool
    initial: bool
    discrete_opfibration: bool
    isomorphism: bool


class Violation(BaseModel):
    """A single failed law with the identifiers witnessing the failure."""

    model_config = ConfigDict(frozen=True)

    law: str
    message: str
    witness: Tuple[str, ...] = ()


class ValidationReport(BaseModel):
    """Report-valued result of a law check; empty means every law holds."""

    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, message: str, *witness: str) -> None:
        self.violations.append(Violation(law=law, message=message, witness=tuple(witness)))


class CheckResult(BaseModel):
    """Boolean check result with an optional counterexample."""

    model_config = ConfigDict(frozen=True)

    holds: bool
    witness: Tuple[str, ...] = ()
    message: str = ""


class SizeGuard(BaseModel):
    """Bounds for brute-force searches."""

    model_config = ConfigDict(frozen=True)

    max_search: int = 200_000
    max_objects: int = 3
    max_morphisms: int = 8


class Pullback(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: FinCategory
    left: FinFunctor
    right: FinFunctor


class PushoutSquare(BaseModel):
    """The pushout of ``initial: A0 -> X`` along ``iota: A0 -> A``.

    ``left: A -> B`` and ``right: X -> B`` are the output legs; ``formal`` maps
    each sort-S2 morphism of ``B`` to its ``(u, w, v)`` triple.
    """

    model_config = ConfigDict(frozen=True)

    category: FinCategory
    left: FinFunctor
    right: FinFunctor
    initial: FinFunctor
    iota: FinFunctor
    formal: Dict[str, Tuple[str, str, str]]


class ComprehensiveFactorization(BaseModel):
    model_config = ConfigDict(frozen=True)

    initial: FinFunctor
    middle: FinCategory
    dopf: FinFunctor


class DeltaLens(BaseModel):
    """A functor with a chosen lift for every ``(a, u: fa -> b)``."""

    model_config = ConfigDict(frozen=True)

    functor: FinFunctor
    lifts: Dict[Tuple[str, str], str]

    def lift(self, a: str, u: str) -> str:
        return self.lifts[(a, u)]

    @cached_property
    def signature(self) -> Tuple[Tuple[Tuple[str, str], str], ...]:
        return tuple(sorted(self.lifts.items()))

    @cached_property
    def key(self) -> Tuple:
        return (self.functor.key, self.signature)


class LensStructureCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    functor: FinFunctor
    count: int
    structures: Optional[List[DeltaLens]] = None


class Tabulator(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: FinCategory
    left: FinFunctor
    right: FinFunctor


class SplitCoreflection(BaseModel):
    """Left adjoint ``f``, right adjoint ``q`` and counit ``ε: fq => 1``."""

    model_config = ConfigDict(frozen=True)

    left: FinFunctor
    right: FinFunctor
    counit: NatTrans

    def eps(self, x: str) -> str:
        return self.counit.components[x]

    @cached_property
    def key(self) -> Tuple:
        return (self.left.key, self.right.key, tuple(sorted(self.counit.components.items())))


class TwistedWitness(BaseModel):
    """The unique ``q̄u: x -> fqx`` for every ``u`` with non-identity ``q u``."""

    model_config = ConfigDict(frozen=True)

    qbar: Dict[str, str]


class TwistedCoreflection(BaseModel):
    model_config = ConfigDict(frozen=True)

    coreflection: SplitCoreflection
    witness: TwistedWitness

    @property
    def left(self) -> FinFunctor:
        return self.coreflection.left

    @property
    def right(self) -> FinFunctor:
        return self.coreflection.right

    def eps(self, x: str) -> str:
        return self.coreflection.eps(x)

    def qbar(self, u: str) -> str:
        return self.witness.qbar[u]


class TwistednessResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    holds: bool
    witness: Optional[TwistedWitness] = None
    counterexample: Optional[str] = None
    message: str = ""


class SplitToTwisted(BaseModel):
    """Cofree twisted coreflection on a split coreflection.

    ``square.initial`` lands in the sum of fibres of ``q``, relabelled onto the
    names of ``B``; ``fibre_inclusion`` is its inclusion into ``B``.
    """

    model_config = ConfigDict(frozen=True)

    twisted: TwistedCoreflection
    square: PushoutSquare
    fibre_inclusion: FinFunctor
    comparison: FinFunctor
    is_iso: bool


class CosliceSum(BaseModel):
    """The sum of coslices ``fa/B`` over the objects of a discrete ``A0``."""

    model_config = ConfigDict(frozen=True)

    category: FinCategory
    inclusion: FinFunctor
    source: FinFunctor
    target: FinFunctor
    coreflection: SplitCoreflection
    objects_info: Dict[str, Tuple[str, str]]
    arrows: Dict[str, Tuple[str, str, str]]


class EfFactorization(BaseModel):
    """Factorisation ``f = Rf ∘ Lf`` through the category ``Ef``.

    ``e1`` records each sort-E1 morphism as ``(a, u1, u2, v)`` and ``e2``
    each sort-E2 morphism as ``(a1, u1, a2, u2, v, w)``.
    """

    model_config = ConfigDict(frozen=True)

    functor: FinFunctor
    category: FinCategory
    left: FinFunctor
    right: FinFunctor
    source: FinFunctor
    phi: FinFunctor
    twisted: TwistedCoreflection
    lens: DeltaLens
    coslices: CosliceSum
    square: PushoutSquare
    objects_info: Dict[str, Tuple[str, str]]
    e1: Dict[str, Tuple[str, str, str, str]]
    e2: Dict[str, Tuple[str, str, str, str, str, str]]

    @cached_property
    def object_index(self) -> Dict[Tuple[str, str], str]:
        return {info: name for name, info in self.objects_info.items()}

    @cached_property
    def e1_index(self) -> Dict[Tuple[str, str, str], str]:
        return {(a, u1, v): name for name, (a, u1, _, v) in self.e1.items()}

    @cached_property
    def e2_index(self) -> Dict[Tuple[str, str, str, str, str], str]:
        return {(a1, u1, v, w, u2): name for name, (a1, u1, _, u2, v, w) in self.e2.items()}

    def object_named(self, a: str, u: str) -> str:
        return self.object_index[(a, u)]

    def e1_named(self, a: str, u1: str, v: str) -> str:
        return self.e1_index[(a, u1, v)]

    def e2_named(self, a1: str, u1: str, v: str, w: str, u2: str) -> str:
        return self.e2_index[(a1, u1, v, w, u2)]


class LiftStrategy(str, Enum):
    """Algorithm used to compute a lift."""

    FORMULA = "formula"
    UNIVERSAL = "universal"
    BOTH = "both"


class LiftResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    j: FinFunctor
    strategy: LiftStrategy
    intermediates: Optional[Tuple[FinFunctor, FinFunctor]] = None


class UniversalArrow(BaseModel):
    """Result of a universal-arrow construction: the mediating ``j`` and the
    intermediate coslice-sum functor ``ell`` it was built from."""

    model_config = ConfigDict(frozen=True)

    ell: FinFunctor
    j: FinFunctor


class Coalgebra(BaseModel):
    model_config = ConfigDict(frozen=True)

    functor: FinFunctor
    beta: FinFunctor


class Algebra(BaseModel):
    model_config = ConfigDict(frozen=True)

    functor: FinFunctor
    alpha: FinFunctor


class LiftingSquare(BaseModel):
    """A commuting square from a coreflection's left adjoint to a lens."""

    model_config = ConfigDict(frozen=True)

    coreflection: SplitCoreflection
    lens: DeltaLens
    top: FinFunctor
    bottom: FinFunctor


class Corpus(BaseModel):
    """Corpus categories with the functors, structures and squares derived from them."""
    model_config = ConfigDict(frozen=True)

    categories: Tuple[FinCategory, ...]
    functors: Tuple[FinFunctor, ...] = ()
    coreflections: Tuple[SplitCoreflection, ...] = ()
    lenses: Tuple[DeltaLens, ...] = ()
    squares: Tuple[LiftingSquare, ...] = ()


class SuiteReport(BaseModel):
    """Outcome of one self-test suite."""
    name: str
    checked: int = 0
    skipped: int = 0
    failures: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures
