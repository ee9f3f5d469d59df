class Ridge:
    """Linear least squares with l2 regularization."""

    def __init__(self, alpha=1.0, fit_intercept=True, normalize=False):
        self.alpha = alpha

    def fit(self, X, y):
        return self

    def predict(self, X):
        return X


class Lasso:
    def __init__(self, alpha=1.0, copy_X=True):
        self.alpha = alpha

    def fit(self, X, y):
        return self


class LinearSVC:
    def __init__(self, C=1.0, loss="squared_hinge"):
        self.C = C

    def fit(self, X, y):
        return self


class OldRegressor:
    def __init__(self, alpha=1.0):
        self.alpha = alpha
