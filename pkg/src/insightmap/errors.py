"""Exception hierarchy shared across the package."""


class InsightMapError(Exception):
    """Base class for all library errors."""


class EmptyInput(InsightMapError):
    """CSV source has no header or no data rows."""


class RaggedRow(InsightMapError):
    def __init__(self, row_index, expected, got):
        self.row_index = row_index
        super().__init__(
            f"row {row_index}: expected {expected} cells, got {got}"
        )


class UnknownOverrideField(InsightMapError):
    pass


class AllMissing(InsightMapError):
    """Every cell of a column is missing."""


class EmptyRowSet(InsightMapError):
    """Aggregate over an empty row set (count excepted)."""


class MissingOrderBy(InsightMapError):
    """Gradient aggregation requires an ordinal order-by field."""


class BreakdownFiltered(InsightMapError):
    """Breakdown dimension is already fixed by a subspace filter."""


class MixedKinds(InsightMapError):
    """Embeddings of different kinds cannot be compared."""


class NotSymmetric(InsightMapError):
    pass


class TooFewPoints(InsightMapError):
    pass


class PerplexityTooLarge(InsightMapError):
    pass


class NoPoints(InsightMapError):
    pass


class UnknownField(InsightMapError):
    pass


class UnknownType(InsightMapError):
    pass


class UnknownInsight(InsightMapError):
    pass


class SchemaVersionMismatch(InsightMapError):
    pass


class MalformedCatalog(InsightMapError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{message} (at {path or '/'})")
