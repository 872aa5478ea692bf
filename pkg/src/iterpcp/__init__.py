"""Post correspondence problem encoded as derivability in an iterative
propositional calculus: formulas, word codes, pair derivations, a
saturation prover with replayable certificates, and the reduction itself."""

__version__ = "0.1.0"
