"""Reducibility of X_b for a few finite Blaschke products.

Run with ``python demos/blaschke_walkthrough.py``.
"""

from hbspace import SymbolSpec, decide_reducibility, gram_model_space, inner_case_check

SYMBOLS = {
    "z^3": SymbolSpec.blaschke([0, 0, 0]),
    "even, zeros +-0.5": SymbolSpec.blaschke([0.5, -0.5]),
    "z * B_0.5": SymbolSpec.blaschke([0, 0.5]),
    "generic": SymbolSpec.blaschke([0.3 + 0.4j, -0.5, 0.1 - 0.6j]),
}

for label, spec in SYMBOLS.items():
    cert = decide_reducibility(spec)
    exact = inner_case_check(spec)
    G = gram_model_space(spec, 4)
    print(f"{label:>20}: {cert.decision:<11} solutions={cert.solution_set.kind:<7}"
          f" exact={exact.reducible!s:<5} G[1,1]={G[1, 1].real:.4f}")
