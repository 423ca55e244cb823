"""
Canonical identifier encodings for constructed objects and morphisms.

Every construction names its output deterministically from the names of its
inputs, so results are diffable and reproducible across runs.
"""

IDENTITY_PREFIX = "1_"


def identity_name(obj: str) -> str:
    return f"{IDENTITY_PREFIX}{obj}"


def pair_name(first: str, second: str) -> str:
    """Pullback objects and morphisms, comma and Ef objects."""
    return f"({first}|{second})"


def triple_name(first: str, second: str, third: str) -> str:
    """Coslice morphisms (a|u|v): the morphism v out of the object (a|u)."""
    return f"({first}|{second}|{third})"


def formal_name(before: str, middle: str, after: str) -> str:
    """Sort-S2 morphisms of the special pushout."""
    return f"[{before};{middle};{after}]"


def arrow_name(source: str, label: str, target: str) -> str:
    """Morphisms whose label alone does not determine their endpoints."""
    return f"<{source},{label},{target}>"
