# Author: Green Mountain Systems AI Inc.

"""Unit tests for the Matrix A2 Lab."""
