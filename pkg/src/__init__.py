"""
Hawkes Homophily Toolkit

Simulation, estimation and stability analysis of group-structured Hawkes processes
under link-recommendation feedback, with empirical and instantaneous bias measures.
"""

__version__ = "0.1.0"
__author__ = "Anuradha"
