"""Reproducibility-prediction features for scholarly papers.

The package turns paper records into a 41-column feature matrix (with a
default mask), prunes and scores the features, and evaluates classical
classifiers under stratified cross-validation. See ``reprofeat.cli`` for the
command-line pipeline.
"""

__version__ = "0.1.0"
