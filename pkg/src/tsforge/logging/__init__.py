from .run import RunLogger, LOSS_FILE

__all__ = ['RunLogger', 'LOSS_FILE']
