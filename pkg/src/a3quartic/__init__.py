"""Counting rational points of bounded height on a split quartic del Pezzo
surface with an A3 singularity, through its universal torsor.

Modules: ``surface`` (the surface and direct counts), ``torsor`` (the torsor
parametrization), ``arithfun`` (arithmetic functions and summation checks),
``density`` (the leading constant), ``verify`` (lemma oracles and the
asymptotic fit) and ``cli``.
"""
__version__ = "0.1.0"
