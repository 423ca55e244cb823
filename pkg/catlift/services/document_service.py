"""
Document service: parsing, validating and writing the JSON documents that
carry categories, functors, lenses, coreflections and lifting squares.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from catlift.errors import DocumentError
from catlift.models import (
    DeltaLens,
    FinCategory,
    FinFunctor,
    LiftingSquare,
    SplitCoreflection,
    ValidationReport,
)
from catlift.models.documents import (
    PAYLOADS,
    SCHEMA_VERSION,
    CategoryPayload,
    CompEntry,
    CoreflectionPayload,
    Document,
    DocumentKind,
    FunctorPayload,
    LensPayload,
    LiftEntry,
    MorphismEntry,
    SquarePayload,
)
from catlift.services.category_service import CategoryService
from catlift.services.coreflection_service import CoreflectionService
from catlift.services.lens_service import LensService

logger = logging.getLogger(__name__)

DomainObject = Union[FinCategory, FinFunctor, DeltaLens, SplitCoreflection, LiftingSquare]


def _location(loc) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path


class DocumentService:
    """Service for reading and writing documents."""

    def __init__(
        self,
        categories: Optional[CategoryService] = None,
        lenses: Optional[LensService] = None,
        coreflections: Optional[CoreflectionService] = None,
    ):
        """Initialize the document service."""
        self.categories = categories or CategoryService()
        self.lenses = lenses or LensService(self.categories)
        self.coreflections = coreflections or CoreflectionService(self.categories)

    # ------------------------------------------------------------------
    # Text and files
    # ------------------------------------------------------------------

    def parse(self, text: str, source: str = "<document>") -> Document:
        """
        Parse and schema-check a document.

        Args:
            text: JSON text
            source: Name used in error locations

        Returns:
            The document with its payload in canonical key order
        """
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(e.msg, location=f"{source}:{e.lineno}:{e.colno}")
        try:
            document = Document.model_validate(raw)
        except ValidationError as e:
            error = e.errors()[0]
            raise DocumentError(error["msg"], location=f"{source}:{_location(error['loc'])}")
        if document.schema_version != SCHEMA_VERSION:
            raise DocumentError(
                f"unsupported schema version {document.schema_version}",
                location=f"{source}:schema_version",
            )
        try:
            payload = PAYLOADS[document.kind].model_validate(document.payload)
        except ValidationError as e:
            error = e.errors()[0]
            raise DocumentError(error["msg"], location=f"{source}:payload.{_location(error['loc'])}")
        return Document(
            kind=document.kind,
            schema_version=document.schema_version,
            payload=payload.model_dump(by_alias=True),
        )

    def dumps(self, document: Document) -> str:
        """Canonical text: two-space indent, declared key order, trailing newline."""
        return json.dumps(document.model_dump(mode="json", by_alias=True), indent=2, ensure_ascii=False) + "\n"

    def load_document(self, path: Union[str, Path]) -> Document:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise DocumentError(f"cannot read document: {e.strerror}", location=str(path))
        return self.parse(text, source=path.name)

    def save_document(self, document: Document, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(document), encoding="utf-8")
        logger.debug(f"Wrote {document.kind.value} document to {path}")

    def read(self, path: Union[str, Path], kind: Optional[DocumentKind] = None, validate: bool = True) -> DomainObject:
        """Load a document and build its domain object."""
        document = self.load_document(path)
        if kind is not None and document.kind != kind:
            raise DocumentError(f"expected a {kind.value} document, got {document.kind.value}", location=Path(path).name)
        return self.to_domain(document, validate=validate, source=Path(path).name)

    def write(self, obj: DomainObject, path: Union[str, Path]) -> None:
        self.save_document(self.to_document(obj), path)

    # ------------------------------------------------------------------
    # Payload -> domain
    # ------------------------------------------------------------------

    def to_domain(self, document: Document, validate: bool = True, source: str = "<document>") -> DomainObject:
        """
        Build the domain object a document describes.

        Args:
            document: Parsed document
            validate: Raise on law violations
            source: Name used in error locations

        Returns:
            Category, functor, lens, coreflection or lifting square
        """
        payload = PAYLOADS[document.kind].model_validate(document.payload)
        loc = f"{source}:payload"
        if document.kind is DocumentKind.CATEGORY:
            return self._category(payload, loc, validate)
        if document.kind is DocumentKind.FUNCTOR:
            return self._functor(payload, loc, validate)
        if document.kind is DocumentKind.LENS:
            return self._lens(payload, loc, validate)
        if document.kind is DocumentKind.COREFLECTION:
            return self._coreflection(payload, loc, validate)
        return self._square(payload, loc, validate)

    def _raise_on(self, report: ValidationReport, loc: str) -> None:
        if not report.ok:
            first = report.violations[0]
            raise DocumentError(f"{first.law}: {first.message}", location=loc, witness=first.witness)

    def _category(self, payload: CategoryPayload, loc: str, validate: bool) -> FinCategory:
        objects = set(payload.objects)
        if len(objects) != len(payload.objects):
            raise DocumentError("duplicate object identifiers", location=f"{loc}.objects")
        known = {f"1_{x}" for x in payload.objects}
        morphisms: Dict[str, tuple] = {}
        for i, entry in enumerate(payload.morphisms):
            for end in ("src", "tgt"):
                if getattr(entry, end) not in objects:
                    raise DocumentError(
                        f"unknown object {getattr(entry, end)}",
                        location=f"{loc}.morphisms[{i}].{end}",
                    )
            morphisms[entry.name] = (entry.src, entry.tgt)
            known.add(entry.name)
        comp = {}
        for i, entry in enumerate(payload.comp):
            for field, value in (("g", entry.g), ("f", entry.f), ("=", entry.result)):
                if value not in known:
                    raise DocumentError(f"unknown morphism {value}", location=f"{loc}.comp[{i}].{field}")
            comp[(entry.g, entry.f)] = entry.result
        category = FinCategory.from_table(payload.objects, morphisms, comp, name=payload.name)
        if validate:
            self._raise_on(self.categories.validate_category(category), loc)
        return category

    def _functor(
        self,
        payload: FunctorPayload,
        loc: str,
        validate: bool,
        dom: Optional[FinCategory] = None,
        cod: Optional[FinCategory] = None,
    ) -> FinFunctor:
        dom = dom or self._category(payload.dom, f"{loc}.dom", validate)
        cod = cod or self._category(payload.cod, f"{loc}.cod", validate)
        for x, y in payload.objects.items():
            if x not in dom.identity or y not in cod.identity:
                raise DocumentError(f"unknown object in mapping {x} ↦ {y}", location=f"{loc}.objects.{x}")
        mor_map = {
            dom.id_of(x): cod.id_of(payload.objects[x])
            for x in dom.objects
            if x in payload.objects
        }
        for m, n in payload.morphisms.items():
            if m not in dom.morphisms or n not in cod.morphisms:
                raise DocumentError(f"unknown morphism in mapping {m} ↦ {n}", location=f"{loc}.morphisms.{m}")
            mor_map[m] = n
        functor = FinFunctor(dom=dom, cod=cod, obj_map=dict(payload.objects), mor_map=mor_map)
        if validate:
            self._raise_on(self.categories.validate_functor(functor), loc)
        return functor

    def _lens(
        self,
        payload: LensPayload,
        loc: str,
        validate: bool,
        dom: Optional[FinCategory] = None,
        cod: Optional[FinCategory] = None,
    ) -> DeltaLens:
        functor = self._functor(payload, loc, validate, dom, cod)
        lifts = {
            (a, u): functor.dom.id_of(a)
            for a, u in self.lenses.lift_index(functor)
            if functor.cod.is_identity(u)
        }
        for i, entry in enumerate(payload.lifts):
            if entry.obj not in functor.dom.identity or entry.over not in functor.cod.morphisms:
                raise DocumentError("lift entry refers to unknown identifiers", location=f"{loc}.lifts[{i}]")
            lifts[(entry.obj, entry.over)] = entry.lift
        lens = DeltaLens(functor=functor, lifts=lifts)
        if validate:
            self._raise_on(self.lenses.check_delta_lens(lens), f"{loc}.lifts")
        return lens

    def _coreflection(
        self,
        payload: CoreflectionPayload,
        loc: str,
        validate: bool,
    ) -> SplitCoreflection:
        left = self._functor(payload, loc, validate)
        right = self._functor(payload.right, f"{loc}.right", validate, dom=left.cod, cod=left.dom)
        for x in payload.counit:
            if x not in left.cod.identity:
                raise DocumentError(f"counit at unknown object {x}", location=f"{loc}.counit.{x}")
        coreflection = self.coreflections.make_coreflection(left, right, payload.counit)
        if validate:
            self._raise_on(self.coreflections.check_split_coreflection(coreflection), f"{loc}.counit")
        return coreflection

    def _square(self, payload: SquarePayload, loc: str, validate: bool) -> LiftingSquare:
        coreflection = self._coreflection(payload.coref, f"{loc}.coref", validate)
        lens = self._lens(payload.lens, f"{loc}.lens", validate)
        top = self._functor(payload.top, f"{loc}.top", validate, dom=coreflection.left.dom, cod=lens.functor.dom)
        bottom = self._functor(payload.bottom, f"{loc}.bottom", validate, dom=coreflection.left.cod, cod=lens.functor.cod)
        return LiftingSquare(coreflection=coreflection, lens=lens, top=top, bottom=bottom)

    # ------------------------------------------------------------------
    # Domain -> payload
    # ------------------------------------------------------------------

    def category_payload(self, c: FinCategory) -> CategoryPayload:
        return CategoryPayload(
            name=c.name,
            objects=list(c.objects),
            morphisms=[MorphismEntry(name=m, src=c.src(m), tgt=c.tgt(m)) for m in c.non_identities],
            comp=[
                CompEntry(g=g, f=f, result=h)
                for (g, f), h in c.comp.items()
                if not c.is_identity(g) and not c.is_identity(f)
            ],
        )

    def functor_payload(self, functor: FinFunctor) -> FunctorPayload:
        return FunctorPayload(**self._functor_fields(functor))

    def _functor_fields(self, functor: FinFunctor) -> Dict[str, Any]:
        return {
            "dom": self.category_payload(functor.dom),
            "cod": self.category_payload(functor.cod),
            "objects": dict(functor.obj_map),
            "morphisms": {m: functor.mor(m) for m in functor.dom.non_identities},
        }

    def lens_payload(self, lens: DeltaLens) -> LensPayload:
        f = lens.functor
        return LensPayload(
            **self._functor_fields(f),
            lifts=[
                LiftEntry(obj=a, over=u, lift=lens.lift(a, u))
                for a, u in self.lenses.lift_index(f)
                if not (f.cod.is_identity(u) and lens.lift(a, u) == f.dom.id_of(a))
            ],
        )

    def coreflection_payload(self, s: SplitCoreflection) -> CoreflectionPayload:
        return CoreflectionPayload(
            **self._functor_fields(s.left),
            right=self.functor_payload(s.right),
            counit=dict(s.counit.components),
        )

    def to_document(self, obj: DomainObject) -> Document:
        """Wrap a domain object in a canonical document."""
        if isinstance(obj, FinCategory):
            kind, payload = DocumentKind.CATEGORY, self.category_payload(obj)
        elif isinstance(obj, FinFunctor):
            kind, payload = DocumentKind.FUNCTOR, self.functor_payload(obj)
        elif isinstance(obj, DeltaLens):
            kind, payload = DocumentKind.LENS, self.lens_payload(obj)
        elif isinstance(obj, SplitCoreflection):
            kind, payload = DocumentKind.COREFLECTION, self.coreflection_payload(obj)
        elif isinstance(obj, LiftingSquare):
            kind = DocumentKind.SQUARE
            payload = SquarePayload(
                coref=self.coreflection_payload(obj.coreflection),
                lens=self.lens_payload(obj.lens),
                top=self.functor_payload(obj.top),
                bottom=self.functor_payload(obj.bottom),
            )
        else:
            raise DocumentError(f"cannot serialize {type(obj).__name__}")
        return Document(kind=kind, payload=payload.model_dump(by_alias=True))
