"""Exception hierarchy shared by all modules."""


class SchmidtError(ValueError):
    """Base class for every error raised by this package."""


class NonFinite(SchmidtError):
    pass


class NotHermitian(SchmidtError):
    pass


class NotUnitary(SchmidtError):
    pass


class ShapeMismatch(SchmidtError):
    pass


class DimensionMismatch(SchmidtError):
    pass


class ZeroVector(SchmidtError):
    pass


class InvalidBipartition(SchmidtError):
    pass


class CoeffsExceedDimension(SchmidtError):
    pass


class NotNormalized(SchmidtError):
    pass


class TooFewParties(SchmidtError):
    pass


class InvalidMixture(SchmidtError):
    pass
