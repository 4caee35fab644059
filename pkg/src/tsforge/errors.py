"""Exception hierarchy shared by every tsforge subpackage"""


class TsforgeError(Exception):
    """Base class for all tsforge errors"""
    exit_code = 3


class ConfigError(TsforgeError):
    """Invalid or missing configuration"""
    exit_code = 1


class ParameterError(TsforgeError, ValueError):
    """Scalar argument outside its allowed range"""
    exit_code = 1


class DimensionError(TsforgeError, ValueError):
    """Tensor or sequence shapes do not line up"""
    exit_code = 3


class ContractError(TsforgeError):
    """API used outside its contract (e.g. backward on a non-scalar)"""
    exit_code = 3


class DataError(TsforgeError):
    """Dataset could not be built, loaded or validated"""
    exit_code = 2


class MetricError(TsforgeError):
    """Evaluation preconditions violated"""
    exit_code = 3


class CheckpointError(TsforgeError):
    """Checkpoint file could not be read"""
    exit_code = 2


class BadMagicError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class TruncatedCheckpointError(CheckpointError):
    pass


class NumericError(TsforgeError):
    """Training produced a non-finite value"""
    exit_code = 3
