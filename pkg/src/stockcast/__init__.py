"""Weekly NIFTY 50 close_norm forecasting: shallow learners, an LSTM, Granger tests and a sentiment-fused SOFNN."""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402

__all__ = ["__version__", "BACKEND"]
