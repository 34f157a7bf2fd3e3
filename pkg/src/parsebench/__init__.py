"""parsebench: a deterministic shift-reduce parsing workbench.

Parse decisions are learned from supervisor-acquired parse-action examples
through a feature language over parse states, and evaluated with bracket
scoring under cross-validation.
"""

__version__ = "0.1.0"
