"""Semantic textual relatedness toolkit.

Lexical, embedding-metric, NGD and co-occurrence relatedness scorers with
a trainable feature regressor and a Spearman evaluation harness.
"""

__version__ = "0.1.0"
