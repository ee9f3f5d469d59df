"""Support vector machines."""


class SVC:
    """C-support vector classification."""

    def __init__(self, kernel="rbf", degree=3, gamma="scale", C=1.0, verbose=False, cache_size=200):
        self.kernel = kernel
        self.degree = degree
        self.gamma = gamma
        self.C = C
        self.verbose = verbose
        self.cache_size = cache_size

    def fit(self, X, y, sample_weight=None):
        return self

    def predict(self, X):
        return [0 for _ in X]

    def decision_function(self, X):
        return [0.0 for _ in X]

    @property
    def n_support_(self):
        return 0

    @staticmethod
    def kernels():
        return ["linear", "poly", "rbf"]
