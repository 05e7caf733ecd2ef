"""Encoder-decoder LSTM for multi-step traffic forecasting."""

from .data import SourceDataset, load_source, write_predictions
from .model import EncoderDecoder, ForecasterConfig, load_model, save_model
from .train import TrainingReport, evaluate, predict_rows, train

__version__ = "0.1.0"
