"""
catlift: delta lenses, twisted coreflections and the factorisation system
connecting them, computed on finite categories.
"""

__version__ = "1.0.0"
__author__ = "catlift developers"
