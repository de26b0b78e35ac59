"""
Command groups of the kdet CLI.
"""

from kdet.commands import homology, relations, relative

GROUPS = (homology, relative, relations)

# options whose values may start with "-", such as --unit -10/3
SIGNED_OPTIONS = ("--unit", "--rel")
