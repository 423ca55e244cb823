"""
Inspection commands: validate, analyze, check, tabulate and enumerate.
"""

import argparse
import logging
from pathlib import Path

from catlift.cli import (
    categories,
    coreflections,
    documents,
    emit,
    emit_object,
    lenses,
    read_functor,
    validation_report,
)
from catlift.errors import PreconditionError
from catlift.models import DeltaLens, SplitCoreflection
from catlift.models.documents import DocumentKind
from catlift.services.lens_service import GeneratedVariant

logger = logging.getLogger(__name__)

ENUMERATE_TARGETS = ["lenses"] + [f"generated:{v.value}" for v in GeneratedVariant]


def validate(args: argparse.Namespace) -> int:
    """
    Validate any document against the laws of the object it describes.

    Returns:
        0 when every law holds, 1 otherwise
    """
    document = documents.load_document(args.document)
    obj = documents.to_domain(document, validate=False, source=Path(args.document).name)
    report = validation_report(obj)
    emit({"kind": document.kind.value, "ok": report.ok, "violations": [v.model_dump() for v in report.violations]})
    if not report.ok:
        first = report.violations[0]
        logger.error(f"{args.document}: {first.law}: {first.message}")
    return 0 if report.ok else 1


def analyze(args: argparse.Namespace) -> int:
    f = read_functor(args.functor)
    emit(categories.classify_functor(f))
    return 0


def check(args: argparse.Namespace) -> int:
    """Check a twistedness, lens or coreflection property; exit 1 with a witness when it fails."""
    if args.property == "twisted":
        s = documents.read(args.document, DocumentKind.COREFLECTION)
        result = coreflections.is_twisted(s)
        emit(
            {
                "property": "twisted",
                "holds": result.holds,
                "witness": [result.counterexample] if result.counterexample else [],
                "message": result.message,
            }
        )
        return 0 if result.holds else 1

    expected = DeltaLens if args.property == "lens" else SplitCoreflection
    obj = documents.to_domain(documents.load_document(args.document), validate=False, source=Path(args.document).name)
    if not isinstance(obj, expected):
        raise PreconditionError(f"{args.document} is not a {args.property} document")
    report = validation_report(obj)
    emit({"property": args.property, "holds": report.ok, "violations": [v.model_dump() for v in report.violations]})
    return 0 if report.ok else 1


def tabulate(args: argparse.Namespace) -> int:
    lens = documents.read(args.lens, DocumentKind.LENS)
    tab = lenses.tabulator(lens)
    emit_object(tab.category, args.output)
    return 0


def enumerate_structures(args: argparse.Namespace) -> int:
    """List every lens structure, or every structure generated by one of the generating classes."""
    f = read_functor(args.functor)
    if args.what == "lenses":
        found = lenses.enumerate_lens_structures(f)
    else:
        found = lenses.enumerate_generated_structures(f, GeneratedVariant(args.what.split(":", 1)[1]))
    emit(
        {
            "what": args.what,
            "count": found.count,
            "structures": [
                [entry.model_dump() for entry in documents.lens_payload(lens).lifts]
                for lens in found.structures
            ],
        }
    )
    return 0


def register(subparsers) -> None:
    """Add the inspection commands."""
    parser = subparsers.add_parser("validate", help="check a document against its laws")
    parser.add_argument("document")
    parser.set_defaults(handler=validate)

    parser = subparsers.add_parser("analyze", help="classify a functor")
    parser.add_argument("functor")
    parser.set_defaults(handler=analyze)

    parser = subparsers.add_parser("check", help="check a property of a lens or coreflection")
    parser.add_argument("property", choices=["twisted", "lens", "coref"])
    parser.add_argument("document")
    parser.set_defaults(handler=check)

    parser = subparsers.add_parser("tabulate", help="tabulator category of a lens")
    parser.add_argument("lens")
    parser.add_argument("-o", "--output")
    parser.set_defaults(handler=tabulate)

    parser = subparsers.add_parser("enumerate", help="enumerate lens structures on a functor")
    parser.add_argument("what", choices=ENUMERATE_TARGETS)
    parser.add_argument("functor")
    parser.set_defaults(handler=enumerate_structures)
