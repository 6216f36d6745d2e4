"""Bounds on the analog category of a finite group, computed from Sylow data.

The package is organized in layers: finite groups as multiplication tables
(`groups`), brute-force subgroup enumeration used as a cross-check oracle
(`enumeration`), Sylow subgroups and intersection-depth lattices (`sylow`),
integral/mod-p chain homology with certified Smith normal forms (`homology`),
simplex skeletons and their fixed subcomplexes (`complexes`), the category
bounds themselves (`bounds`), equivariant cell complexes and the construction
routines (`equivariant`), verification suites (`verify`), shared request
handlers (`api`), and the service/CLI front ends (`service`, `cli`).
"""

__version__ = "0.1.0"
