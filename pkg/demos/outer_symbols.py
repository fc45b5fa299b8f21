"""Outer symbols built from a prescribed boundary modulus.

An even modulus gives a one-parameter family of reducing pairs on the
circle beta = -conj(alpha); an odd one only the trivial pair; an
asymmetric one none at all.

Run with ``python demos/outer_symbols.py``.
"""

from pathlib import Path

from hbspace import decide_reducibility, parse_symbol

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

for name in ("outer_even_two_arc", "outer_odd", "outer_asymmetric"):
    spec = parse_symbol(CORPUS / f"{name}.json")
    cert = decide_reducibility(spec)
    sol = cert.solution_set
    print(f"{name:>20}: parity={cert.parity:<8} decision={cert.decision:<11}"
          f" kind={sol.kind:<7} relation={sol.relation}")
    for pair in sol.pairs[:3]:
        print(f"{'':>22}alpha={pair.alpha:.3f} beta={pair.beta:.3f}")
