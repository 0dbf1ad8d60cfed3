"""Check-worthiness classification toolkit for multilingual tweets."""

__version__ = "0.1.0"

from .corpus import ColumnMap, Dataset, Label, LabeledTweet, Language, Split  # noqa: F401
from .features import SparseVector, TfIdfModel  # noqa: F401
