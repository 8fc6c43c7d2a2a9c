from .forest import RandomForest, majority_vote
from .naive_bayes import GaussianNB
from .search import SPACES, SearchResult, random_search
from .svm import LinearSVM
from .tree import DecisionTree

ALGORITHMS = {
    "gnb": GaussianNB,
    "dtree": DecisionTree,
    "rforest": RandomForest,
    "svm": LinearSVM,
}


def make_classifier(algorithm: str, **params):
    try:
        cls = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}") from None
    return cls(**params)


def algorithm_tag(estimator) -> str:
    for tag, cls in ALGORITHMS.items():
        if type(estimator) is cls:
            return tag
    raise ValueError(f"not a known classifier: {estimator!r}")


__all__ = ["ALGORITHMS", "DecisionTree", "GaussianNB", "LinearSVM", "RandomForest", "SPACES",
           "SearchResult", "algorithm_tag", "majority_vote", "make_classifier", "random_search"]
