class Ridge:
    """Linear least squares with l2 regularization.

    .. deprecated:: 1.1
       Use `minilearn.models.Ridge2` instead. Will be removed in 1.3.

    Parameters
    ----------
    normalize : bool
        .. deprecated:: 1.1
           Will be removed in 1.3.
    """

    def __init__(self, alpha=1.0, fit_intercept=True, normalize=False, positive=False):
        self.alpha = alpha

    def fit(self, X, y):
        return self

    def predict(self, X):
        return X


class Ridge2:
    """Linear least squares with l2 regularization."""

    def __init__(self, alpha=1.0, fit_intercept=True, positive=False):
        self.alpha = alpha

    def fit(self, X, y):
        return self

    def predict(self, X):
        return X


class Lasso:
    def __init__(self, alpha=1.0, copy_X=True, selection="cyclic"):
        self.alpha = alpha

    def fit(self, X, y):
        return self


class LinearSVC:
    def __init__(self, C=1.0, loss="squared_hinge"):
        self.C = C

    def fit(self, X, y):
        return self
