"""
Self-test service: acceptance suites run over the catalog and exhaustive corpus.
"""

import logging
import tempfile
from functools import partial
from itertools import islice
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from catlift.errors import CatliftError, SizeLimitExceeded
from catlift.models import (
    Corpus,
    FinFunctor,
    LiftingSquare,
    LiftStrategy,
    SplitCoreflection,
    SuiteReport,
    TwistedCoreflection,
)
from catlift.models.documents import DocumentKind
from catlift.models.settings import get_settings
from catlift.services.awfs_service import AwfsService
from catlift.services.corpus_service import CorpusService, interleave
from catlift.services.lens_service import GeneratedVariant

logger = logging.getLogger(__name__)

SUITES = (
    "factorisation",
    "twistedness",
    "lift",
    "lifting-axioms",
    "universal",
    "generation",
    "fixtures",
    "comprehensive",
    "algebras",
    "awfs-morphisms",
    "cli",
)


class SelftestService:
    """Service running the acceptance suites."""

    def __init__(
        self,
        corpus: Optional[CorpusService] = None,
        awfs: Optional[AwfsService] = None,
        limit: Optional[int] = None,
        bounds: Tuple[int, int] = (3, 5),
    ):
        """
        Initialize the self-test service.

        Args:
            corpus: Corpus service supplying categories and derived layers
            awfs: Factorisation service under test
            limit: Instances per suite; the configured suite limit when None
            bounds: Object and non-identity morphism bounds of the exhaustive categories
        """
        self.corpus_service = corpus or CorpusService()
        self.categories = self.corpus_service.categories
        self.lenses = self.corpus_service.lenses
        self.coreflections = self.corpus_service.coreflections
        self.documents = self.corpus_service.documents
        self.awfs = awfs or AwfsService(self.categories, self.lenses, self.coreflections)
        self.limit = limit or get_settings().suite_limit
        self.bounds = bounds
        self._corpus: Optional[Corpus] = None
        self.suites: Dict[str, Callable[[SuiteReport], None]] = {
            "factorisation": self._factorisation,
            "twistedness": self._twistedness,
            "lift": self._lift,
            "lifting-axioms": self._lifting_axioms,
            "universal": self._universal,
            "generation": self._generation,
            "fixtures": self._fixtures,
            "comprehensive": self._comprehensive,
            "algebras": self._algebras,
            "awfs-morphisms": self._awfs_morphisms,
            "cli": self._cli,
        }

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            cats = self.corpus_service.acceptance_categories(*self.bounds)
            self._corpus = self.corpus_service.derive(cats, self.limit)
        return self._corpus

    def run(self, names: Optional[List[str]] = None) -> List[SuiteReport]:
        """
        Run suites by name.

        Args:
            names: Suites to run; all of them when empty

        Returns:
            One report per suite, in the order requested
        """
        names = names or list(self.suites)
        unknown = [n for n in names if n not in self.suites]
        if unknown:
            raise CatliftError(f"unknown suite {unknown[0]}; choose from {', '.join(self.suites)}")
        reports = []
        for name in names:
            report = SuiteReport(name=name)
            logger.info(f"Running suite {name}")
            try:
                self.suites[name](report)
            except CatliftError as e:
                report.failures.append(f"suite aborted: {e}")
            finally:
                self.awfs.clear_caches()
            logger.info(
                f"Suite {name}: {report.checked} checked, {report.skipped} skipped, {len(report.failures)} failed"
            )
            reports.append(report)
        return reports

    def _each(self, report: SuiteReport, items, check: Callable) -> None:
        """Run ``check`` on each item, counting guard trips as skips and errors as failures."""
        for item in islice(items, self.limit):
            try:
                message = check(item)
            except SizeLimitExceeded:
                report.skipped += 1
                continue
            except CatliftError as e:
                message = str(e)
            report.checked += 1
            if message:
                report.failures.append(message)

    def _twisted(self) -> List[SplitCoreflection]:
        return [s for s in self.corpus.coreflections if self.coreflections.is_twisted(s).holds]

    # ------------------------------------------------------------------
    # Suites
    # ------------------------------------------------------------------

    def _factorisation(self, report: SuiteReport) -> None:
        def check(f: FinFunctor) -> Optional[str]:
            ff = self.awfs.factorize(f)
            if not self.categories.functors_equal(self.categories.compose_functors(ff.right, ff.left), f):
                return f"Rf∘Lf ≠ f for {f.signature}"
            if not self.categories.validate_category(ff.category).ok:
                return "Ef is not a category"
            if not self.coreflections.is_twisted(ff.twisted.coreflection).holds:
                return "Lf is not twisted"
            if not self.lenses.check_delta_lens(ff.lens).ok:
                return "Rf lens fails the lens laws"
            return None

        self._each(report, self.corpus.functors, check)

    def _twistedness(self, report: SuiteReport) -> None:
        def check(s: SplitCoreflection) -> Optional[str]:
            twisted = self.coreflections.is_twisted(s).holds
            iso = self.coreflections.split_to_twisted(s).is_iso
            if twisted != iso:
                return f"twisted={twisted} but comparison iso={iso}"
            return None

        self._each(report, self.corpus.coreflections, check)

    def _lift(self, report: SuiteReport) -> None:
        def check(sq: LiftingSquare) -> Optional[str]:
            t = self.coreflections.as_twisted(sq.coreflection)
            j = self.awfs.lift(t, sq.lens, sq.top, sq.bottom, LiftStrategy.BOTH).j
            if not self.categories.functors_equal(self.categories.compose_functors(j, t.left), sq.top):
                return "j∘f ≠ h"
            if not self.categories.functors_equal(self.categories.compose_functors(sq.lens.functor, j), sq.bottom):
                return "g∘j ≠ k"
            return None

        self._each(report, self.corpus.squares, check)

    def _vertical_lens(self, sq: LiftingSquare, t: TwistedCoreflection) -> Iterator[Callable]:
        for second in self.corpus.lenses:
            if second.functor.dom.key == sq.lens.functor.cod.key:
                k = self.categories.compose_functors(second.functor, sq.bottom)
                yield partial(self.awfs.check_vertical_lens, t, sq.lens, second, sq.top, k)

    def _vertical_coref(
        self, sq: LiftingSquare, t: TwistedCoreflection, twisted: List[TwistedCoreflection]
    ) -> Iterator[Callable]:
        for first in twisted:
            if first.left.cod.key == t.left.dom.key:
                h = self.categories.compose_functors(sq.top, first.left)
                yield partial(self.awfs.check_vertical_coref, first, t, sq.lens, h, sq.bottom)

    def _horizontal_lens(self, sq: LiftingSquare, t: TwistedCoreflection) -> Iterator[Callable]:
        for other in self.corpus.lenses:
            for top, bottom in self.corpus_service.lens_cells(sq.lens, other):
                yield partial(self.awfs.check_horizontal_lens, t, sq.lens, other, sq.top, sq.bottom, top, bottom)

    def _horizontal_coref(
        self, sq: LiftingSquare, t: TwistedCoreflection, twisted: List[TwistedCoreflection]
    ) -> Iterator[Callable]:
        for source in twisted:
            for top, bottom in self.corpus_service.coref_cells(source.coreflection, t.coreflection):
                yield partial(self.awfs.check_horizontal_coref, source, t, sq.lens, top, bottom, sq.top, sq.bottom)

    def _lifting_axioms(self, report: SuiteReport) -> None:
        twisted = [self.coreflections.as_twisted(s) for s in self._twisted()]
        pairs = [(sq, self.coreflections.as_twisted(sq.coreflection)) for sq in self.corpus.squares]
        # one stream per axiom, each spread across the squares, so the limit is shared evenly
        streams = [
            interleave(self._vertical_lens(sq, t) for sq, t in pairs),
            interleave(self._vertical_coref(sq, t, twisted) for sq, t in pairs),
            interleave(self._horizontal_lens(sq, t) for sq, t in pairs),
            interleave(self._horizontal_coref(sq, t, twisted) for sq, t in pairs),
        ]

        def check(instance: Callable) -> Optional[str]:
            result = instance()
            return None if result.holds else result.message

        self._each(report, interleave(streams), check)

    def _universal(self, report: SuiteReport) -> None:
        def check(sq: LiftingSquare) -> Optional[str]:
            t = self.coreflections.as_twisted(sq.coreflection)
            self.awfs.free_lens_universal(self.awfs.factorize(t.left), sq.lens, sq.top, sq.bottom, verify=True)
            self.awfs.cofree_coref_universal(t, self.awfs.factorize(sq.lens.functor), sq.top, sq.bottom, verify=True)
            return None

        self._each(report, self.corpus.squares, check)

    def _generation(self, report: SuiteReport) -> None:
        def check(f: FinFunctor) -> Optional[str]:
            lenses = self.lenses.enumerate_lens_structures(f).structures
            generated = self.lenses.enumerate_generated_structures(f, GeneratedVariant.LENS).structures
            if {l.signature for l in lenses} != {l.signature for l in generated}:
                return f"generated lenses differ from lens structures on {f.signature}"
            dopf = self.lenses.enumerate_generated_structures(f, GeneratedVariant.DOPF, materialize=False).count
            if dopf != (1 if self.categories.classify_functor(f).discrete_opfibration else 0):
                return f"dopf-generated count {dopf} does not match the dopf flag"
            sopf = self.lenses.enumerate_generated_structures(f, GeneratedVariant.SOPF).structures
            expected = {l.signature for l in lenses if self.lenses.is_split_opfibration(l).holds}
            if {l.signature for l in sopf} != expected:
                return "sopf-generated structures are not the split opfibrations"
            return None

        self._each(report, self.corpus.functors, check)

    def _fixtures(self, report: SuiteReport) -> None:
        two = self.corpus_service.catalog_category("Two")
        three = self.corpus_service.catalog_category("Three")
        one = self.corpus_service.catalog_category("One")
        delta2 = FinFunctor(
            dom=two,
            cod=three,
            obj_map={"0": "0", "1": "1"},
            mor_map={"1_0": "1_0", "1_1": "1_1", "01": "01"},
        )
        delta1 = FinFunctor(dom=one, cod=two, obj_map={"*": "0"}, mor_map={"1_*": "1_0"})

        def unique_twisted(f: FinFunctor) -> Optional[str]:
            structures = self.coreflections.enumerate_coreflection_structures(f)
            count = sum(1 for s in structures if self.coreflections.is_twisted(s).holds)
            return None if count == 1 else f"{count} twisted structures instead of 1"

        def twisted(path: str, expected: bool, witness: Optional[str] = None) -> Callable[[], Optional[str]]:
            def check() -> Optional[str]:
                s = self.documents.read(self.corpus_service.data_dir / "examples" / path, DocumentKind.COREFLECTION)
                result = self.coreflections.is_twisted(s)
                if result.holds != expected:
                    return f"{path}: twisted={result.holds}"
                if witness is not None and result.counterexample != witness:
                    return f"{path}: witness {result.counterexample} instead of {witness}"
                return None

            return check

        checks = [
            lambda: unique_twisted(delta2),
            lambda: unique_twisted(delta1),
            twisted("delta2_coref.json", True),
            twisted("bex_coref.json", True),
            twisted("nontwisted_coref.json", False, "u"),
        ]
        self._each(report, checks, lambda c: c())

    def _comprehensive(self, report: SuiteReport) -> None:
        def check(f: FinFunctor) -> Optional[str]:
            cf = self.categories.comprehensive_factorize(f)
            if not self.categories.functors_equal(self.categories.compose_functors(cf.dopf, cf.initial), f):
                return "comprehensive factors do not compose to f"
            if not self.categories.classify_functor(cf.initial).initial:
                return "first factor is not initial"
            if not self.categories.classify_functor(cf.dopf).discrete_opfibration:
                return "second factor is not a discrete opfibration"
            ell = self.categories.orthogonal_lift(cf.initial, cf.dopf, cf.initial, cf.dopf, verify=True)
            if not self.categories.functors_equal(ell, self.categories.identity_functor(cf.middle)):
                return "orthogonal lift of the factorisation square is not the identity"
            return None

        self._each(report, self.corpus.functors, check)

    def _algebras(self, report: SuiteReport) -> None:
        def check(f: FinFunctor) -> Optional[str]:
            twisted = [
                self.coreflections.as_twisted(s)
                for s in self.corpus_service.split_coreflections([f], self.limit)
                if self.coreflections.is_twisted(s).holds
            ]
            coalgebras = self.awfs.enumerate_coalgebras(f)
            if len(coalgebras) != len(twisted):
                return f"{len(coalgebras)} coalgebras for {len(twisted)} twisted structures"
            for t in twisted:
                back = self.awfs.coalgebra_to_twisted(f, self.awfs.twisted_to_coalgebra(t).beta)
                if (
                    back.right.signature != t.right.signature
                    or back.coreflection.counit.components != t.coreflection.counit.components
                    or back.witness.qbar != t.witness.qbar
                ):
                    return "coalgebra round trip changed the twisted coreflection"
            lenses = self.lenses.enumerate_lens_structures(f).structures
            algebras = self.awfs.enumerate_algebras(f)
            if len(algebras) != len(lenses):
                return f"{len(algebras)} algebras for {len(lenses)} lens structures"
            for lens in lenses:
                back = self.awfs.algebra_to_lens(f, self.awfs.lens_to_algebra(lens).alpha)
                if back.signature != lens.signature:
                    return "algebra round trip changed the lens"
            return None

        self._each(report, self.corpus.functors, check)

    def _awfs_morphisms(self, report: SuiteReport) -> None:
        squares = [
            sq
            for sq in self.corpus.squares
            if self.categories.classify_functor(sq.lens.functor).discrete_opfibration
        ]

        def check(sq: LiftingSquare) -> Optional[str]:
            t = self.coreflections.as_twisted(sq.coreflection)
            result = self.awfs.is_awfs_coherent(t, sq.lens, sq.top, sq.bottom)
            return None if result.holds else result.message

        self._each(report, squares, check)

    def _cli(self, report: SuiteReport) -> None:
        from catlift.main import run_command

        examples = self.corpus_service.data_dir / "examples"
        documents = [self.corpus_service.data_dir / "catalog" / f"{n}.json" for n in ("Two", "Bex")]
        documents += sorted(examples.glob("*.json"))

        def round_trip(path: Path) -> Optional[str]:
            obj = self.documents.read(path)
            text = self.documents.dumps(self.documents.to_document(obj))
            again = self.documents.to_domain(self.documents.parse(text))
            if self.documents.dumps(self.documents.to_document(again)) != text:
                return f"{path.name}: canonical text is not stable"
            return None

        def exit_code(args: List[str], expected: int) -> Callable[[], Optional[str]]:
            def check() -> Optional[str]:
                code = run_command(args)
                return None if code == expected else f"{' '.join(args)} exited {code}, expected {expected}"

            return check

        self._each(report, documents, round_trip)
        with tempfile.TemporaryDirectory() as scratch:
            checks = [
                exit_code(["check", "twisted", str(examples / "delta2_coref.json")], 0),
                exit_code(["check", "twisted", str(examples / "bex_coref.json")], 0),
                exit_code(["check", "twisted", str(examples / "nontwisted_coref.json")], 1),
                exit_code(["factorize", str(examples / "twolifts_lens.json"), "-o", scratch], 0),
                exit_code(["lift", "--square", str(examples / "lift_square.json"), "--strategy", "both"], 0),
            ]
            self._each(report, checks, lambda c: c())
