class BlockoError(Exception):
    """Base class for mathematical rejections (CLI exit code 2)."""


class CartanError(BlockoError):
    """Invalid or non-symmetrizable generalized Cartan matrix."""


class CriticalityError(BlockoError):
    """Operation refused on a critical (or undecidable) block."""


class TruncationError(BlockoError):
    """A height/length/degree bound was too small to certify the result."""


class UnsupportedError(BlockoError):
    """Input outside the supported scope (e.g. singular block character)."""
