"""
Test configuration and fixtures for catlift.
"""

from typing import Dict, Optional

import pytest

from catlift.models import FinCategory, FinFunctor, SizeGuard
from catlift.models.documents import DocumentKind
from catlift.models.settings import REPO_ROOT
from catlift.services.awfs_service import AwfsService
from catlift.services.category_service import CategoryService
from catlift.services.corpus_service import CorpusService
from catlift.services.document_service import DocumentService
from catlift.services.search_service import SearchService

DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def guard():
    """Explicit guard so tests do not depend on the environment."""
    return SizeGuard(max_search=200_000, max_objects=3, max_morphisms=8)


@pytest.fixture(scope="session")
def categories(guard):
    return CategoryService(SearchService(guard))


@pytest.fixture(scope="session")
def documents(categories):
    return DocumentService(categories)


@pytest.fixture(scope="session")
def lenses(documents):
    return documents.lenses


@pytest.fixture(scope="session")
def coreflections(documents):
    return documents.coreflections


@pytest.fixture(scope="session")
def awfs(categories, lenses, coreflections):
    return AwfsService(categories, lenses, coreflections)


@pytest.fixture(scope="session")
def corpus(categories, documents):
    return CorpusService(categories, documents, data_dir=DATA_DIR)


@pytest.fixture(scope="session")
def examples_dir():
    return DATA_DIR / "examples"


@pytest.fixture(scope="session")
def catalog(corpus) -> Dict[str, FinCategory]:
    """Catalog categories by name."""
    return {c.name: c for c in corpus.catalog()}


@pytest.fixture(scope="session")
def one(catalog):
    return catalog["One"]


@pytest.fixture(scope="session")
def two(catalog):
    return catalog["Two"]


@pytest.fixture(scope="session")
def three(catalog):
    return catalog["Three"]


@pytest.fixture(scope="session")
def disc_two(catalog):
    return catalog["DiscTwo"]


@pytest.fixture(scope="session")
def twolifts(catalog):
    return catalog["TwoLifts"]


@pytest.fixture(scope="session")
def make_functor():
    """Build a functor from its object map and non-identity morphism map."""

    def build(dom: FinCategory, cod: FinCategory, objects: Dict[str, str], morphisms: Optional[Dict[str, str]] = None):
        mor_map = {dom.id_of(x): cod.id_of(y) for x, y in objects.items()}
        mor_map.update(morphisms or {})
        return FinFunctor(dom=dom, cod=cod, obj_map=dict(objects), mor_map=mor_map)

    return build


@pytest.fixture(scope="session")
def delta1(make_functor, one, two):
    """One -> Two picking the object 0."""
    return make_functor(one, two, {"*": "0"})


@pytest.fixture(scope="session")
def delta0(make_functor, one, two):
    """One -> Two picking the object 1."""
    return make_functor(one, two, {"*": "1"})


@pytest.fixture(scope="session")
def delta2(make_functor, two, three):
    return make_functor(two, three, {"0": "0", "1": "1"}, {"01": "01"})


@pytest.fixture(scope="session")
def bang(make_functor, two, one):
    return make_functor(two, one, {"0": "*", "1": "*"}, {"01": "1_*"})


@pytest.fixture(scope="session")
def iota_two(make_functor, disc_two, two):
    return make_functor(disc_two, two, {"0": "0", "1": "1"})


@pytest.fixture(scope="session")
def elements():
    """Category of elements of 0 -> {p, q}, 1 -> {r}."""
    return FinCategory.from_table(["p", "q", "r"], {"m1": ("p", "r"), "m2": ("q", "r")}, {}, name="Elements")


@pytest.fixture(scope="session")
def elements_dopf(make_functor, elements, two):
    """The discrete opfibration of the category of elements over Two."""
    return make_functor(elements, two, {"p": "0", "q": "0", "r": "1"}, {"m1": "01", "m2": "01"})


@pytest.fixture(scope="session")
def twolifts_lens(documents, examples_dir):
    """Lens on TwoLifts -> Two choosing u2 over 01."""
    return documents.read(examples_dir / "twolifts_lens.json", DocumentKind.LENS)


@pytest.fixture(scope="session")
def delta2_coref(documents, examples_dir):
    return documents.read(examples_dir / "delta2_coref.json", DocumentKind.COREFLECTION)


@pytest.fixture(scope="session")
def nontwisted_coref(documents, examples_dir):
    return documents.read(examples_dir / "nontwisted_coref.json", DocumentKind.COREFLECTION)


@pytest.fixture(scope="session")
def bex_coref(documents, examples_dir):
    return documents.read(examples_dir / "bex_coref.json", DocumentKind.COREFLECTION)


@pytest.fixture(scope="session")
def lift_square(documents, examples_dir):
    """delta1 with its right adjoint, the TwoLifts lens, top picking a, identity bottom."""
    return documents.read(examples_dir / "lift_square.json", DocumentKind.SQUARE)


@pytest.fixture(scope="session")
def delta1_coref(lift_square):
    return lift_square.coreflection


@pytest.fixture(scope="session")
def corpus_functors(corpus, one, two, three, disc_two):
    """All functors between a few small catalog categories."""
    return corpus.functors([one, two, three, disc_two], limit=60)


@pytest.fixture(scope="session")
def split_idempotent():
    """L and M with the idempotent sr split through L, beside a lone point R."""
    return FinCategory.from_table(
        ["L", "M", "R"],
        {"s": ("L", "M"), "r": ("M", "L"), "sr": ("M", "M")},
        {("r", "s"): "1_L", ("s", "r"): "sr", ("sr", "sr"): "sr", ("r", "sr"): "r", ("sr", "s"): "s"},
        name="SplitIdempotent",
    )


@pytest.fixture(scope="session")
def split_idempotent_initial(make_functor, disc_two, split_idempotent):
    """DiscTwo -> SplitIdempotent picking L and R, an initial functor."""
    return make_functor(disc_two, split_idempotent, {"0": "L", "1": "R"})


@pytest.fixture(scope="session")
def bang_lens(lenses, bang):
    """The only lens structure on Two -> One."""
    return lenses.enumerate_lens_structures(bang).structures[0]


@pytest.fixture(scope="session")
def corpus_lenses(corpus, corpus_functors, twolifts_lens, bang_lens):
    """Lens structures on the corpus functors together with the TwoLifts and bang lenses."""
    return corpus.lens_structures(corpus_functors, limit=60) + [twolifts_lens, bang_lens]
