"""Localized reduced basis approximation with residual based and globally coupled online enrichment."""
# enrichment before diagnostics: the trace records import the enrichment state types
from locred import base, fem, decomposition, enrichment, diagnostics, runner

__version__ = "0.1.0"
