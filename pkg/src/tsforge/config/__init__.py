from .settings import SettingsManager, SEED_ENV
from .defaults import DEFAULT_SETTINGS, PRESETS

__all__ = ['SettingsManager', 'SEED_ENV', 'DEFAULT_SETTINGS', 'PRESETS']
