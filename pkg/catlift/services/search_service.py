"""
Backtracking search with size guards, shared by every brute-force enumeration.
"""

import logging
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence

from catlift.errors import SizeLimitExceeded
from catlift.models import SizeGuard
from catlift.models.settings import get_settings

logger = logging.getLogger(__name__)

Assignment = Dict[Hashable, Any]


def default_guard() -> SizeGuard:
    """Guard built from the environment settings."""
    settings = get_settings()
    return SizeGuard(
        max_search=settings.size_guard,
        max_objects=settings.max_objects,
        max_morphisms=settings.max_morphisms,
    )


class SearchService:
    """Service for guarded exhaustive searches."""

    def __init__(self, guard: Optional[SizeGuard] = None):
        """Initialize the search service with an optional explicit guard."""
        self._guard = guard

    @property
    def guard(self) -> SizeGuard:
        if self._guard is None:
            self._guard = default_guard()
        return self._guard

    def _refuse(self, amount: int, what: str, measure: str) -> SizeLimitExceeded:
        logger.warning(f"Refusing {what}: {amount} {measure}, guard {self.guard.max_search}")
        return SizeLimitExceeded(
            f"{what} needs about {amount} {measure}, guard is {self.guard.max_search}",
            witness=(str(amount),),
        )

    def check_space(self, estimate: int, what: str) -> None:
        """Raise ``SizeLimitExceeded`` when ``estimate`` exceeds the guard."""
        if estimate > self.guard.max_search:
            raise self._refuse(estimate, what, "candidates")
        logger.debug(f"{what}: estimated search space {estimate}")

    def backtrack(
        self,
        variables: Sequence[Hashable],
        candidates: Callable[[Hashable, Assignment], Iterable[Any]],
        accept: Callable[[Hashable, Assignment], bool],
        budget: Optional[str] = None,
    ) -> Iterator[Assignment]:
        """
        Enumerate complete assignments depth first.

        Args:
            variables: Variables in assignment order
            candidates: Candidate values for a variable given the partial assignment
            accept: Called right after a variable is assigned; False prunes
            budget: When given, the search is named by it and may visit at most
                ``guard.max_search`` accepted nodes

        Returns:
            Iterator over complete assignments (fresh dicts), in candidate order
        """
        assignment: Assignment = {}
        # explicit stack of candidate iterators keeps deep searches off the call stack
        stack: List[Iterator[Any]] = []
        visited = 0
        if not variables:
            yield {}
            return
        stack.append(iter(candidates(variables[0], assignment)))
        while stack:
            depth = len(stack) - 1
            var = variables[depth]
            advanced = False
            for value in stack[-1]:
                assignment[var] = value
                if accept(var, assignment):
                    advanced = True
                    break
                del assignment[var]
            if not advanced:
                stack.pop()
                if stack:
                    del assignment[variables[len(stack) - 1]]
                continue
            visited += 1
            if budget is not None and visited > self.guard.max_search:
                raise self._refuse(visited, budget, "visited nodes")
            if depth + 1 == len(variables):
                yield dict(assignment)
                del assignment[var]
                continue
            stack.append(iter(candidates(variables[depth + 1], assignment)))
