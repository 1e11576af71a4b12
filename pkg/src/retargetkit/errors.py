"""Exception types shared across the toolkit."""


class RetargetKitError(Exception):
    """Base class for all toolkit errors."""


class UnsupportedFormatError(RetargetKitError):
    """File is not one of the supported image formats (PNG, binary PPM/PGM)."""


class CorruptDataError(RetargetKitError):
    """File claims a supported format but its contents cannot be decoded."""


class SeamOutOfBoundsError(RetargetKitError):
    """Seam coordinates do not fit the image they are applied to."""


class EnlargementTooLargeError(RetargetKitError):
    """Requested seam insertion count exceeds the 50% single-pass cap."""


class EmptyImageError(RetargetKitError):
    """Inpainting hole covers every pixel, leaving no boundary data."""


class NoForegroundError(RetargetKitError):
    """Mask contains no foreground pixels where some are required."""


class ExternalToolError(RetargetKitError):
    """External helper process exited with a nonzero status."""


class DimensionMismatchError(RetargetKitError):
    """Image dimensions do not match what the operation requires."""


class UnparsableScoreError(RetargetKitError):
    """External scorer output could not be parsed as a decimal number."""


class FootprintOutOfBoundsError(RetargetKitError):
    """Sprite footprint leaves the background canvas or has no area."""


class SpriteTooLargeError(RetargetKitError):
    """Sprite does not fit the background at any allowed size."""
