# Author: Green Mountain Systems AI Inc.

"""Matrix A2 Lab - desk-scale verification of the 2x2 matrix-weight counterexample."""

__version__ = "0.1.0"
