class SvddCleanError(Exception):
    """Base class for every error raised by svdd_clean."""


class ConfigError(SvddCleanError):
    pass


class DataError(SvddCleanError):
    pass


class DatasetFormatError(DataError):
    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SmallClassError(DataError):
    pass


class MissingArtifactError(DataError):
    pass


class EmbeddingError(DataError):
    pass


class TransportError(EmbeddingError):
    pass


class ProtocolError(EmbeddingError):
    pass


class TrainingError(SvddCleanError):
    def __init__(self, message: str, epoch: int = None, path: str = None):
        details = []
        if epoch is not None:
            details.append(f"epoch {epoch}")
        if path is not None:
            details.append(f"parameter '{path}'")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.epoch = epoch
        self.path = path


class ContractError(SvddCleanError, ValueError):
    """A caller broke a documented precondition."""


class ShapeError(ContractError):
    pass


class NumericError(ContractError):
    pass
