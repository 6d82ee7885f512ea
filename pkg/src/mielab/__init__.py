"""Desk-scale laboratory for measurement-induced entanglement in shallow 2D circuits.

Modules
-------
lattice       site lattices, region partitions, cell blocking, dual graphs
saw           self-avoiding walk enumeration and certified partition functions
bounds        closed-form inequality chain and threshold constants
statevec      dense simulation, projected ensembles, distillation
quasientropy  replica-2 Ising enumeration
stabilizer    Clifford tableaux and tripartite entanglement shapes
bmps          boundary-MPS contraction and SEBD sampling
cli           command line entry point
"""

__version__ = "0.1.0"
