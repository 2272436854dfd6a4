"""Toolkit for modal substitution calculus programs and message-passing circuits.

The package runs MSC/MMSC/CMSC/MPMSC programs and message-passing circuits
as synchronized distributed systems over Kripke models with identifiers,
translates between all of those formalisms, and generates Cole-Vishkin
style distributed coloring programs together with a direct algorithmic
oracle for checking them.
"""

__version__ = "0.1.0"
