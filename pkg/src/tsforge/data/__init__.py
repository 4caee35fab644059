from .types import SequenceBatch, DatasetSpec
from .simulate import simulate_sinusoids, write_parameter_log, read_parameter_log
from .csv_io import load_csv, save_csv
from .preprocess import (
    NormalizationStats,
    channel_statistics,
    normalize_channelwise,
    slice_window,
    filter_class,
    train_holdout_split,
)
from .batching import batch_iter, batches_per_epoch, epoch_generator
from .sources import PreparedDataset, build_dataset

__all__ = [
    'SequenceBatch', 'DatasetSpec',
    'simulate_sinusoids', 'write_parameter_log', 'read_parameter_log',
    'load_csv', 'save_csv',
    'NormalizationStats', 'channel_statistics', 'normalize_channelwise',
    'slice_window', 'filter_class', 'train_holdout_split',
    'batch_iter', 'batches_per_epoch', 'epoch_generator',
    'PreparedDataset', 'build_dataset',
]
