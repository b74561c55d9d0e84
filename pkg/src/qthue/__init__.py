"""Workbench for quantum Thue systems and their spectral gadgets.

Submodules: ``linalg`` (operators, eigensolvers, gates), ``graphs``
(Laplacians and kernel-angle bounds), ``ulg`` (unitary labelled graphs),
``qts`` (rewriting systems, chain operators, deciding), ``qrm`` (ring
machines), ``wheelbarrow`` (the explicit two-local rule system),
``hardness`` (assembled Hamiltonians and promise gaps), ``acceptance``
(the end-to-end verification suite), ``cli``.
"""

__version__ = "0.1.0"
