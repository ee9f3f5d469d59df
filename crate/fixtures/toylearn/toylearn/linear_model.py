"""Linear models."""


class Lasso:
    """Linear model trained with an l1 prior."""

    def __init__(self, alpha=1.0, *, copy_X=True, tol=1e-4, warm_start=False):
        self.alpha = alpha
        self.copy_X = copy_X
        self.tol = tol
        self.warm_start = warm_start

    def fit(self, X, y, check_input=True):
        return self


def lasso_path(X, y, *, eps=1e-3, n_alphas=100, alphas=None):
    return []
