# Author: Green Mountain Systems AI Inc.

"""Tests for the Matrix A2 Lab."""
