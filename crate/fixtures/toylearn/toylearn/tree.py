"""Decision trees."""

_MAX_DEPTH = 32


class DecisionTreeClassifier:
    """A decision tree classifier."""

    def __init__(self, criterion="gini", splitter="best", max_depth=None, min_samples_split=2, max_leaf=_MAX_DEPTH):
        self.criterion = criterion
        self.splitter = splitter
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_leaf = max_leaf

    def fit(self, X, y):
        return self

    def predict(self, X, check_input=True):
        return [0 for _ in X]

    @classmethod
    def from_params(cls, params):
        return cls(**params)
