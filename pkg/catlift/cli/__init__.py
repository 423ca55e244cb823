"""
Command modules and the services they share.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel

from catlift.errors import PreconditionError
from catlift.models import (
    DeltaLens,
    FinCategory,
    FinFunctor,
    LiftingSquare,
    SplitCoreflection,
    ValidationReport,
)
from catlift.services.awfs_service import AwfsService
from catlift.services.category_service import CategoryService
from catlift.services.document_service import DocumentService

logger = logging.getLogger(__name__)

categories = CategoryService()
documents = DocumentService(categories)
lenses = documents.lenses
coreflections = documents.coreflections
awfs = AwfsService(categories, lenses, coreflections)


def emit(payload: Any) -> None:
    """Write a command result to stdout as JSON."""
    if isinstance(payload, BaseModel):
        print(payload.model_dump_json(indent=2))
    else:
        print(json.dumps(payload, indent=2, ensure_ascii=False))


def emit_object(obj, output: Optional[str]) -> None:
    """Write a domain object as a document, to a file when ``output`` is given."""
    document = documents.to_document(obj)
    if output:
        documents.save_document(document, output)
        logger.info(f"Wrote {document.kind.value} document to {output}")
    else:
        print(documents.dumps(document), end="")


def read_functor(path: str, validate: bool = True) -> FinFunctor:
    """The functor of a functor document, or the underlying functor of a lens or coreflection."""
    obj = documents.read(Path(path), validate=validate)
    if isinstance(obj, FinFunctor):
        return obj
    if isinstance(obj, DeltaLens):
        return obj.functor
    if isinstance(obj, SplitCoreflection):
        return obj.left
    raise PreconditionError(f"{path} does not describe a functor")


def _merge(report: ValidationReport, other: ValidationReport, prefix: str) -> bool:
    for v in other.violations:
        report.add(v.law, f"{prefix}{v.message}", *v.witness)
    return other.ok


def validation_report(obj) -> ValidationReport:
    """Every law violation of a domain object, checking the parts before the whole."""
    report = ValidationReport()
    if isinstance(obj, FinCategory):
        _merge(report, categories.validate_category(obj), "")
    elif isinstance(obj, FinFunctor):
        if _merge(report, categories.validate_category(obj.dom), "dom: ") & _merge(
            report, categories.validate_category(obj.cod), "cod: "
        ):
            _merge(report, categories.validate_functor(obj), "")
    elif isinstance(obj, DeltaLens):
        if _merge(report, validation_report(obj.functor), ""):
            _merge(report, lenses.check_delta_lens(obj), "")
    elif isinstance(obj, SplitCoreflection):
        if _merge(report, validation_report(obj.left), "left: ") & _merge(
            report, categories.validate_functor(obj.right), "right: "
        ):
            _merge(report, coreflections.check_split_coreflection(obj), "")
    elif isinstance(obj, LiftingSquare):
        parts = [
            _merge(report, validation_report(obj.coreflection), "coref: "),
            _merge(report, validation_report(obj.lens), "lens: "),
            _merge(report, categories.validate_functor(obj.top), "top: "),
            _merge(report, categories.validate_functor(obj.bottom), "bottom: "),
        ]
        if all(parts):
            f, g = obj.coreflection.left, obj.lens.functor
            for m in f.dom.morphisms:
                if obj.bottom.mor(f.mor(m)) != g.mor(obj.top.mor(m)):
                    report.add("square", "square does not commute", m)
                    break
    return report
