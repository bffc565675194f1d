"""Bucket Sort, balls-into-bins and random-trie tail experiments."""

__version__ = "0.1.0"
