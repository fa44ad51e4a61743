"""Exception types raised across the package."""


class SkelGcnError(Exception):
    pass


class ParameterError(SkelGcnError, ValueError):
    pass


class ImageFormatError(SkelGcnError):
    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class GraphFormatError(SkelGcnError):
    pass


class EmptyGraphError(SkelGcnError, ValueError):
    pass


class InsufficientDataError(SkelGcnError, ValueError):
    pass


class UndefinedIndexError(SkelGcnError, ValueError):
    """Davies-Bouldin index requested with fewer than two clusters."""


class DegenerateClustersError(SkelGcnError, ValueError):
    def __init__(self, label_a, label_b):
        self.pair = (label_a, label_b)
        super().__init__(f"clusters {label_a!r} and {label_b!r} have coincident centroids")


class ManifestError(SkelGcnError):
    def __init__(self, message, unmatched=()):
        self.unmatched = list(unmatched)
        if self.unmatched:
            message = f"{message}: {', '.join(map(str, self.unmatched))}"
        super().__init__(message)
