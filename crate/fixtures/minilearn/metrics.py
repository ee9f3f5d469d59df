"""Evaluation metrics."""


def mse(y_true, y_pred):
    """Mean squared error."""
    return _helper(y_true) - _helper(y_pred)


def _helper(x):
    return x
