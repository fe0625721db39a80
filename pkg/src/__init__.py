"""
Rearrangement Kit: discrete rearrangements, energy functionals and verification suites.
"""
