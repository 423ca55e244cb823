"""
Construction commands: factorize, lift and compose.
"""

import argparse
import logging
from pathlib import Path

from catlift.cli import awfs, coreflections, documents, emit, emit_object, lenses, read_functor
from catlift.errors import PreconditionError
from catlift.models import LiftStrategy
from catlift.models.documents import DocumentKind

logger = logging.getLogger(__name__)


def factorize(args: argparse.Namespace) -> int:
    """Write Ef, Lf, Rf, the free lens and the cofree twisted coreflection of a functor."""
    f = read_functor(args.functor)
    ff = awfs.factorize(f)
    out = Path(args.output)
    written = {
        "Ef.json": ff.category,
        "Lf.json": ff.left,
        "Rf.json": ff.right,
        "lens.json": ff.lens,
        "coreflection.json": ff.twisted.coreflection,
    }
    for name, obj in written.items():
        documents.save_document(documents.to_document(obj), out / name)
    logger.info(f"Factorized through Ef with {len(ff.category.objects)} objects and {len(ff.category.morphisms)} morphisms")
    emit({"written": [str(out / name) for name in written]})
    return 0


def lift(args: argparse.Namespace) -> int:
    """
    Diagonal filler of a square from a twisted coreflection to a lens.

    The square comes either from one square document or from four separate
    documents; the filler is written as a functor document.
    """
    if args.square:
        square = documents.read(args.square, DocumentKind.SQUARE)
        s, lens, top, bottom = square.coreflection, square.lens, square.top, square.bottom
    else:
        missing = [n for n in ("coref", "lens", "top", "bottom") if getattr(args, n) is None]
        if missing:
            raise PreconditionError("lift needs --square or all of --coref --lens --top --bottom", witness=missing)
        s = documents.read(args.coref, DocumentKind.COREFLECTION)
        lens = documents.read(args.lens, DocumentKind.LENS)
        top = read_functor(args.top)
        bottom = read_functor(args.bottom)
    t = coreflections.as_twisted(s)
    result = awfs.lift(t, lens, top, bottom, LiftStrategy(args.strategy))
    if result.strategy is LiftStrategy.BOTH:
        logger.info("Formula and universal strategies agree")
    emit_object(result.j, args.output)
    return 0


def compose(args: argparse.Namespace) -> int:
    if args.what == "lens":
        first = documents.read(args.first, DocumentKind.LENS)
        second = documents.read(args.second, DocumentKind.LENS)
        composite = lenses.compose_lenses(first, second)
    else:
        first = documents.read(args.first, DocumentKind.COREFLECTION)
        second = documents.read(args.second, DocumentKind.COREFLECTION)
        composite = coreflections.compose_coreflections(first, second)
    emit_object(composite, args.output)
    return 0


def register(subparsers) -> None:
    """Add the construction commands."""
    parser = subparsers.add_parser("factorize", help="factor a functor through Ef")
    parser.add_argument("functor")
    parser.add_argument("-o", "--output", required=True, help="directory for the five documents")
    parser.set_defaults(handler=factorize)

    parser = subparsers.add_parser("lift", help="lift a twisted coreflection against a lens")
    parser.add_argument("--square")
    parser.add_argument("--coref")
    parser.add_argument("--lens")
    parser.add_argument("--top")
    parser.add_argument("--bottom")
    parser.add_argument("--strategy", choices=[s.value for s in LiftStrategy], default=LiftStrategy.FORMULA.value)
    parser.add_argument("-o", "--output")
    parser.set_defaults(handler=lift)

    parser = subparsers.add_parser("compose", help="compose two lenses or two coreflections")
    parser.add_argument("what", choices=["lens", "coref"])
    parser.add_argument("first")
    parser.add_argument("second")
    parser.add_argument("-o", "--output")
    parser.set_defaults(handler=compose)
