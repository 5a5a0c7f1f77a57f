"""Country-level publication analytics.

Fractional publication counting, field-normalized citation impact,
researcher mobility classification, and a composite openness indicator,
with a self-contained statistical kernel and a command line front end.
"""

__version__ = "0.1.0"
