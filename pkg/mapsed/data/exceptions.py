from mapsed.types.exceptions import MapsedError


class IngestionError(MapsedError):
    description = 'Event records could not be ingested'


class MissingColumnError(IngestionError):
    def __init__(self, column: str, available: object = None) -> None:
        self.column = column
        message = f'Mapped column {column!r} is missing from the CSV header'
        if available is not None:
            message += f' (available: {available!r})'
        super().__init__(message)


class EmptyCategoryListError(MapsedError):
    description = 'Grid has no categories to rasterize'


class PeriodAlignmentError(MapsedError):
    description = 'Period bounds are not aligned to the interval'


class GridTooSmallError(MapsedError):
    description = 'Grid is too small for the requested stimulus'


class DatasetFormatError(MapsedError):
    description = 'Dataset file is malformed'


class CategoryIndexError(MapsedError, IndexError):
    description = 'Category index is out of range'
