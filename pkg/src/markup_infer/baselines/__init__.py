from .kgb import (KGBPrediction, LinkingClientConfig, LinkingError, SpotlightClient, kgb_batch,
                  kgb_classify, resolve_kgb)
from .random_baseline import RandomClassifier, predict_random
from .sdtype import SDTypeClassifier, SDTypeStatistics, predict_sdtype, train_sdtype

__all__ = ["KGBPrediction", "LinkingClientConfig", "LinkingError", "RandomClassifier",
           "SDTypeClassifier", "SDTypeStatistics", "SpotlightClient", "kgb_batch", "kgb_classify",
           "predict_random", "predict_sdtype", "resolve_kgb", "train_sdtype"]
