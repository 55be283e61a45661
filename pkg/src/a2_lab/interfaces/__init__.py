# Author: Green Mountain Systems AI Inc.

"""User-facing interfaces."""
