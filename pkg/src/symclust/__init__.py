"""Oracle-free correctness estimation for sets of candidate programs.

Candidates written in SnipLang are clustered by bounded symbolic
equivalence; uncertainty scores computed over the clusters serve as a
proxy for correctness.
"""

__version__ = "0.1.0"
