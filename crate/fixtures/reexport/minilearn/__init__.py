from ._impl import Solver
from ._internal import check_array as _check

__all__ = ["Solver", "version"]


def version():
    return "0.1"
