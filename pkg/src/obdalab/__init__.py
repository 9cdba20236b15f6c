"""Ontology-mediated query rewriting, hypergraph programs and circuit translations."""
__version__ = "0.1.0"
