"""
Corpus service: the catalog fixtures, exhaustive and random category
generation, and the functors, structures and squares derived from them.
"""

import logging
import random
from itertools import islice, permutations, product
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, TypeVar

from catlift.errors import PreconditionError, SizeLimitExceeded
from catlift.models import (
    Corpus,
    DeltaLens,
    FinCategory,
    FinFunctor,
    LiftingSquare,
    SplitCoreflection,
)
from catlift.models.documents import CorpusMode, CorpusSpec, DocumentKind
from catlift.models.naming import identity_name
from catlift.models.settings import get_settings
from catlift.services.category_service import CategoryService
from catlift.services.coreflection_service import CoreflectionService
from catlift.services.document_service import DocumentService
from catlift.services.lens_service import LensService

logger = logging.getLogger(__name__)

CATALOG = ("One", "Two", "Three", "DiscTwo", "NonTwisted", "TwoLifts", "Bex")

T = TypeVar("T")
_SPENT = object()


def _distributions(total: int, cells: int) -> Iterator[Tuple[int, ...]]:
    """Ways to place `total` morphisms into `cells` hom-sets, lexicographically."""
    if cells == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _distributions(total - first, cells - 1):
            yield (first,) + rest


def grid(rows: int, cols: int) -> Iterator[Tuple[int, int]]:
    """Index pairs ordered by ``max(i, j)``, so early pairs mix early rows and columns."""
    for d in range(max(rows, cols)):
        if d < cols:
            for i in range(min(d, rows)):
                yield i, d
        if d < rows:
            for j in range(min(d + 1, cols)):
                yield d, j


def _draw(source: Iterator[T]):
    try:
        return next(source)
    except StopIteration:
        return _SPENT
    except SizeLimitExceeded as e:
        logger.debug(f"Dropping a source over the guard: {e}")
        return _SPENT


def interleave(sources: Iterable[Iterator[T]]) -> Iterator[T]:
    """
    One item from each source in turn.

    Sources are opened lazily on the first pass and dropped once spent or
    once they trip a size guard.
    """
    active: List[Iterator[T]] = []
    for source in sources:
        item = _draw(source)
        if item is not _SPENT:
            active.append(source)
            yield item
    while active:
        still: List[Iterator[T]] = []
        for source in active:
            item = _draw(source)
            if item is not _SPENT:
                still.append(source)
                yield item
        active = still


class CorpusService:
    """Service for generating test corpora."""

    def __init__(
        self,
        categories: Optional[CategoryService] = None,
        documents: Optional[DocumentService] = None,
        data_dir: Optional[Path] = None,
    ):
        """Initialize the corpus service."""
        self.categories = categories or CategoryService()
        self.documents = documents or DocumentService(self.categories)
        self.lenses: LensService = self.documents.lenses
        self.coreflections: CoreflectionService = self.documents.coreflections
        self.data_dir = Path(data_dir or get_settings().data_dir)
        self._catalog: Optional[Dict[str, FinCategory]] = None
        self._exhaustive: Dict[Tuple[int, int], List[FinCategory]] = {}

    # ------------------------------------------------------------------
    # Categories
    # ------------------------------------------------------------------

    def catalog(self) -> List[FinCategory]:
        """The seven fixture categories, in their fixed order."""
        if self._catalog is None:
            self._catalog = {
                name: self.documents.read(self.data_dir / "catalog" / f"{name}.json", DocumentKind.CATEGORY)
                for name in CATALOG
            }
            logger.debug(f"Loaded {len(self._catalog)} catalog categories from {self.data_dir}")
        return [self._catalog[name] for name in CATALOG]

    def catalog_category(self, name: str) -> FinCategory:
        self.catalog()
        if name not in self._catalog:
            raise PreconditionError(f"no catalog category named {name}")
        return self._catalog[name]

    @staticmethod
    def _is_canonical_graph(n: int, counts: Tuple[int, ...]) -> bool:
        """Whether ``counts`` is the least hom-size matrix among its object relabellings."""
        for sigma in permutations(range(n)):
            moved = tuple(counts[sigma[x] * n + sigma[y]] for x in range(n) for y in range(n))
            if moved < counts:
                return False
        return True

    @staticmethod
    def _symmetries(objects: List[str], morphisms: Dict[str, Tuple[str, str]]) -> List[Dict[str, str]]:
        """Every non-trivial relabelling of the graph, identities included."""
        cells: Dict[Tuple[str, str], List[str]] = {}
        for m, ends in morphisms.items():
            cells.setdefault(ends, []).append(m)
        group = []
        for image in permutations(objects):
            sigma = dict(zip(objects, image))
            if any(len(cells.get((sigma[x], sigma[y]), ())) != len(ms) for (x, y), ms in cells.items()):
                continue
            options = [
                [dict(zip(ms, chosen)) for chosen in permutations(cells[(sigma[x], sigma[y])])]
                for (x, y), ms in cells.items()
            ]
            for parts in product(*options):
                pi = {identity_name(x): identity_name(sigma[x]) for x in objects}
                for part in parts:
                    pi.update(part)
                if any(pi[m] != m for m in pi):
                    group.append(pi)
        return group

    def _tables(self, objects: List[str], morphisms: Dict[str, Tuple[str, str]]) -> Iterator[Dict[Tuple[str, str], str]]:
        """
        Associative composition tables on the given graph, one per relabelling class.

        A table is kept only when it is lexicographically least among its
        images under the graph's relabellings; partial tables that already
        lose to an image are pruned.
        """
        identity = {x: identity_name(x) for x in objects}
        ids = set(identity.values())
        arrows = list(morphisms)
        pairs = [(g, f) for f in arrows for g in arrows if morphisms[f][1] == morphisms[g][0]]
        position = {pair: i for i, pair in enumerate(pairs)}
        rank = {m: i for i, m in enumerate(list(identity.values()) + arrows)}

        moves = []
        for pi in self._symmetries(objects, morphisms):
            inverse = {image: m for m, image in pi.items()}
            moves.append((pi, [position[(inverse[g], inverse[f])] for g, f in pairs]))

        by_first: Dict[str, List[Tuple[str, str, str]]] = {m: [] for m in arrows}
        by_last: Dict[str, List[Tuple[str, str, str]]] = {m: [] for m in arrows}
        for g, f in pairs:
            for h in arrows:
                if morphisms[g][1] == morphisms[h][0]:
                    by_first[h].append((h, g, f))
                    by_last[f].append((h, g, f))
        relevant = {(g, f): by_first[g] + by_last[f] for g, f in pairs}

        def hom(x: str, y: str) -> List[str]:
            found = [m for m in arrows if morphisms[m] == (x, y)]
            return ([identity[x]] if x == y else []) + found

        def times(assignment, g: str, f: str) -> Optional[str]:
            if g in ids:
                return f
            if f in ids:
                return g
            return assignment.get((g, f))

        def associative(var, assignment) -> bool:
            for h, g, f in relevant[var]:
                hg, gf = times(assignment, h, g), times(assignment, g, f)
                if hg is None or gf is None:
                    continue
                left, right = times(assignment, hg, f), times(assignment, h, gf)
                if left is not None and right is not None and left != right:
                    return False
            return True

        def least(var, assignment) -> bool:
            depth = position[var]
            for pi, back in moves:
                for p in range(depth + 1):
                    q = back[p]
                    if q > depth:
                        break
                    mine, theirs = rank[assignment[pairs[p]]], rank[pi[assignment[pairs[q]]]]
                    if mine != theirs:
                        if mine > theirs:
                            return False
                        break
            return True

        def accept(var, assignment):
            return associative(var, assignment) and least(var, assignment)

        def candidates(var, assignment):
            g, f = var
            return hom(morphisms[f][0], morphisms[g][1])

        yield from self.categories.search.backtrack(pairs, candidates, accept, budget="composition table search")

    def exhaustive(self, max_objects: int, max_nonidentity: int) -> List[FinCategory]:
        """
        All categories within the bounds, one per isomorphism class.

        Args:
            max_objects: Largest object count
            max_nonidentity: Largest number of non-identity morphisms

        Returns:
            Categories ordered by object count, then morphism count, then table order
        """
        if max_objects < 1 or max_nonidentity < 0:
            raise PreconditionError("exhaustive bounds need at least one object")
        key = (max_objects, max_nonidentity)
        if key in self._exhaustive:
            return list(self._exhaustive[key])

        found: List[FinCategory] = []
        for n in range(1, max_objects + 1):
            objects = [str(i) for i in range(n)]
            cells = [(x, y) for x in objects for y in objects]
            for m in range(max_nonidentity + 1):
                for counts in _distributions(m, len(cells)):
                    if not self._is_canonical_graph(n, counts):
                        continue
                    morphisms: Dict[str, Tuple[str, str]] = {}
                    for (x, y), k in zip(cells, counts):
                        for _ in range(k):
                            morphisms[f"m{len(morphisms) + 1}"] = (x, y)
                    for table in self._tables(objects, morphisms):
                        candidate = FinCategory.from_table(objects, morphisms, table, name=f"E{n}.{m}.{len(found)}")
                        if self.categories.validate_category(candidate).ok:
                            found.append(candidate)
        logger.info(f"Exhaustive corpus: {len(found)} categories within {max_objects} objects / {max_nonidentity} morphisms")
        self._exhaustive[key] = found
        return list(found)

    def random_posets(self, max_objects: int, max_nonidentity: int, seed: int, count: int) -> List[FinCategory]:
        """Seed-reproducible random posets within the bounds."""
        rng = random.Random(seed)
        found: List[FinCategory] = []
        for k in range(count):
            n = rng.randint(1, max_objects)
            objects = [str(i) for i in range(n)]
            below = set()
            for _ in range(100):
                drawn = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5}
                closed = set(drawn)
                for mid in range(n):
                    closed |= {(i, j) for i, m1 in closed if m1 == mid for m2, j in closed if m2 == mid}
                if len(closed) <= max_nonidentity:
                    below = closed
                    break
            morphisms = {f"{i}{j}": (str(i), str(j)) for i, j in sorted(below)}
            comp = {
                (f"{j}{l}", f"{i}{j}"): f"{i}{l}"
                for i, j in sorted(below)
                for j2, l in sorted(below)
                if j2 == j
            }
            found.append(FinCategory.from_table(objects, morphisms, comp, name=f"R{seed}.{k}"))
        return found

    def generate_corpus(self, spec: Optional[CorpusSpec] = None) -> List[FinCategory]:
        """
        Corpus categories in the requested mode.

        Args:
            spec: Mode and bounds; catalog mode ignores the bounds

        Returns:
            Categories in deterministic order
        """
        spec = spec or CorpusSpec()
        if spec.mode is CorpusMode.CATALOG:
            return self.catalog()
        if spec.mode is CorpusMode.EXHAUSTIVE:
            return self.exhaustive(spec.max_objects, spec.max_nonidentity_morphisms)
        return self.random_posets(spec.max_objects, spec.max_nonidentity_morphisms, spec.seed, spec.count)

    def acceptance_categories(self, max_objects: int = 3, max_nonidentity: int = 5) -> List[FinCategory]:
        """The catalog followed by every category within the bounds."""
        return self.catalog() + self.exhaustive(max_objects, max_nonidentity)

    # ------------------------------------------------------------------
    # Derived layers
    # ------------------------------------------------------------------

    def _take(self, items: Iterator[T], limit: int, layer: str) -> List[T]:
        found = list(islice(items, limit))
        if len(found) >= limit:
            logger.warning(f"{layer} layer truncated at {limit}")
        return found

    def functors(self, cats: List[FinCategory], limit: Optional[int] = None) -> List[FinFunctor]:
        """Functors between ordered pairs of corpus categories, drawn a pair at a time, up to ``limit``."""
        limit = limit or get_settings().suite_limit
        sources = (self.categories.enumerate_functors(cats[i], cats[j]) for i, j in grid(len(cats), len(cats)))
        return self._take(interleave(sources), limit, "Functor")

    def split_coreflections(self, functors: List[FinFunctor], limit: Optional[int] = None) -> List[SplitCoreflection]:
        limit = limit or get_settings().suite_limit
        found: List[SplitCoreflection] = []
        for f in functors:
            if len(set(f.obj_map.values())) != len(f.dom.objects) or not self.categories.is_fully_faithful(f):
                continue
            try:
                found.extend(self.coreflections.enumerate_coreflection_structures(f))
            except SizeLimitExceeded:
                continue
            if len(found) >= limit:
                logger.warning(f"Coreflection layer truncated at {limit}")
                return found[:limit]
        return found

    def lens_structures(self, functors: List[FinFunctor], limit: Optional[int] = None) -> List[DeltaLens]:
        limit = limit or get_settings().suite_limit
        found: List[DeltaLens] = []
        for f in functors:
            try:
                found.extend(self.lenses.enumerate_lens_structures(f).structures)
            except SizeLimitExceeded:
                continue
            if len(found) >= limit:
                logger.warning(f"Lens layer truncated at {limit}")
                return found[:limit]
        return found

    def commuting_pairs(self, f: FinFunctor, g: FinFunctor) -> Iterator[Tuple[FinFunctor, FinFunctor]]:
        """Every ``(h, k)`` with ``k ∘ f = g ∘ h``; stops quietly at the size guard."""
        try:
            for k in self.categories.enumerate_functors(f.cod, g.cod):
                def allowed(kind, name, image, k=k):
                    if kind == "o":
                        return g.ob(image) == k.ob(f.ob(name))
                    return g.mor(image) == k.mor(f.mor(name))

                for h in self.categories.enumerate_functors(f.dom, g.dom, allowed):
                    yield h, k
        except SizeLimitExceeded as e:
            logger.debug(f"Commuting squares cut short: {e}")

    def lens_cells(self, first: DeltaLens, second: DeltaLens) -> Iterator[Tuple[FinFunctor, FinFunctor]]:
        """Lens cells ``(h, k)`` from ``first`` to ``second``, lazily."""
        for h, k in self.commuting_pairs(first.functor, second.functor):
            if self.lenses.is_lens_cell(h, k, first, second).holds:
                yield h, k

    def coref_cells(
        self, first: SplitCoreflection, second: SplitCoreflection
    ) -> Iterator[Tuple[FinFunctor, FinFunctor]]:
        """Coreflection cells ``(h, k)`` from ``first`` to ``second``, lazily."""
        for h, k in self.commuting_pairs(first.left, second.left):
            if self.coreflections.is_coref_cell(h, k, first, second).holds:
                yield h, k

    def _square_stream(self, s: SplitCoreflection, lens: DeltaLens) -> Iterator[LiftingSquare]:
        for h, k in self.commuting_pairs(s.left, lens.functor):
            yield LiftingSquare(coreflection=s, lens=lens, top=h, bottom=k)

    def squares_for(self, s: SplitCoreflection, lens: DeltaLens, limit: Optional[int] = None) -> List[LiftingSquare]:
        """Every commuting square from the left adjoint of ``s`` to ``lens``."""
        limit = limit or get_settings().suite_limit
        return list(islice(self._square_stream(s, lens), limit))

    def squares(
        self,
        coreflections: List[SplitCoreflection],
        lenses: List[DeltaLens],
        limit: Optional[int] = None,
    ) -> List[LiftingSquare]:
        """Squares from twisted coreflections to lenses, drawn a pair at a time, up to ``limit``."""
        limit = limit or get_settings().suite_limit
        twisted = [s for s in coreflections if self.coreflections.is_twisted(s).holds]
        sources = (self._square_stream(twisted[i], lenses[j]) for i, j in grid(len(twisted), len(lenses)))
        return self._take(interleave(sources), limit, "Square")

    def derive(self, cats: List[FinCategory], limit: Optional[int] = None) -> Corpus:
        """Corpus with every derived layer filled in within ``limit`` per layer."""
        limit = limit or get_settings().suite_limit
        functors = self.functors(cats, limit)
        coreflections = self.split_coreflections(functors, limit)
        lenses = self.lens_structures(functors, limit)
        squares = self.squares(coreflections, lenses, limit)
        logger.info(
            f"Derived corpus: {len(functors)} functors, {len(coreflections)} coreflections, "
            f"{len(lenses)} lenses, {len(squares)} squares"
        )
        return Corpus(
            categories=tuple(cats),
            functors=tuple(functors),
            coreflections=tuple(coreflections),
            lenses=tuple(lenses),
            squares=tuple(squares),
        )
