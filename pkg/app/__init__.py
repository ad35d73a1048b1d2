"""
ddl - rational closure for defeasible description logics compiled into dl-programs.
"""

__version__ = "1.0.0"
