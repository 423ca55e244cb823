"""
Document schemas: the JSON wire format for categories, functors, lenses,
coreflections and lifting squares.
"""

from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1


class DocumentKind(str, Enum):
    """Document kind enumeration."""
    CATEGORY = "category"
    FUNCTOR = "functor"
    LENS = "lens"
    COREFLECTION = "coreflection"
    SQUARE = "square"


class MorphismEntry(BaseModel):
    """A non-identity morphism."""
    name: str = Field(min_length=1)
    src: str
    tgt: str


class CompEntry(BaseModel):
    """A composite ``g ∘ f`` of two non-identity morphisms."""
    model_config = ConfigDict(populate_by_name=True)

    g: str
    f: str
    result: str = Field(alias="=")


class CategoryPayload(BaseModel):
    """Category payload; identities and their composites are implicit."""
    name: str = ""
    objects: List[str]
    morphisms: List[MorphismEntry] = Field(default_factory=list)
    comp: List[CompEntry] = Field(default_factory=list)


class FunctorPayload(BaseModel):
    """Functor payload; identity morphisms map to identities implicitly."""
    dom: CategoryPayload
    cod: CategoryPayload
    objects: Dict[str, str]
    morphisms: Dict[str, str] = Field(default_factory=dict)


class LiftEntry(BaseModel):
    """Chosen lift ``φ(obj, over) = lift``."""
    obj: str
    over: str
    lift: str


class LensPayload(FunctorPayload):
    """Lens payload; lifts of identities are implicit."""
    lifts: List[LiftEntry] = Field(default_factory=list)


class CoreflectionPayload(FunctorPayload):
    """Coreflection payload: the left adjoint, plus right adjoint and counit."""
    right: FunctorPayload
    counit: Dict[str, str]


class SquarePayload(BaseModel):
    """Lifting square: a coreflection, a lens and the top and bottom functors."""
    coref: CoreflectionPayload
    lens: LensPayload
    top: FunctorPayload
    bottom: FunctorPayload


PAYLOADS = {
    DocumentKind.CATEGORY: CategoryPayload,
    DocumentKind.FUNCTOR: FunctorPayload,
    DocumentKind.LENS: LensPayload,
    DocumentKind.COREFLECTION: CoreflectionPayload,
    DocumentKind.SQUARE: SquarePayload,
}


class Document(BaseModel):
    """Top-level document envelope."""
    kind: DocumentKind
    schema_version: int = SCHEMA_VERSION
    payload: Dict[str, Any]


class CorpusMode(str, Enum):
    """Corpus generation mode."""
    CATALOG = "catalog"
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"


class CorpusSpec(BaseModel):
    """Bounds and mode for corpus generation; catalog mode ignores the bounds."""
    mode: CorpusMode = CorpusMode.CATALOG
    max_objects: int = Field(default=2, gt=0)
    max_nonidentity_morphisms: int = Field(default=2, gt=0)
    seed: int = 0
    count: int = Field(default=8, gt=0)
