"""Small estimators used as an extraction fixture."""


class Ridge:
    """Linear least squares with l2 regularization."""

    def __init__(self, alpha=1.0, fit_intercept=True):
        self.alpha = alpha
        self.fit_intercept = fit_intercept

    def fit(self, X, y):
        """Fit the model."""
        return self

    def predict(self, X):
        return X


class Lasso:
    """Linear model trained with an l1 prior."""

    def __init__(self, alpha=1.0, copy_X=True):
        self.alpha = alpha
        self.copy_X = copy_X

    def fit(self, X, y):
        def _inner(z):
            return z

        return self


class DecisionTreeClassifier:
    def __init__(self, criterion="gini", max_depth=None):
        self.criterion = criterion
        self.max_depth = max_depth
