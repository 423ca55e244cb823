"""
Services implementing the category, lens, coreflection and factorisation operations.
"""
