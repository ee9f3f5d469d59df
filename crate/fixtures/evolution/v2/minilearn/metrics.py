from ._utils import deprecated


def mse(y_true, y_pred):
    return 0.0


@deprecated("deprecated in 1.1 and will be removed in 1.3; use d2_score instead")
def r2(y_true, y_pred):
    return 1.0


def d2_score(y_true, y_pred):
    return 1.0
