"""feynhopf: exact desk-scale Feynman calculus and Hopf-algebraic renormalization."""

__version__ = "0.1.0"
