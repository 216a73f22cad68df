"""Arc translation for annulus homeomorphisms: Farey arithmetic, rotation
sets, brick decompositions and certificate checking."""

__version__ = "0.1.0"
