"""Neonatal EEG seizure-detection pipeline.

Thin Python surface over the C++ core: EDF ingest, preprocessing, the
11-feature extractor, PCA, the compressed prototype classifier and its kNN
baseline, evaluation metrics, and model persistence.
"""

from nsd._core import *  # noqa: F401,F403
from nsd._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = (__doc__ or "") + "\n\n" + (_core_doc or "")
