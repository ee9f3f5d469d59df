from ._utils import deprecated


def a1():
    """Fit.

    .. deprecated:: 0.24
       Use `minilearn.models.Ridge2` instead. Will be removed in 0.26.
    """


def a2():
    """.. deprecated:: 1.0"""


def a3():
    """Compute.

    .. deprecated:: 1.2
        This will be removed in 1.4.
    """


def a4():
    """.. deprecated:: 0.22
       Use ``new_score`` instead.
    """


@deprecated
def a5():
    """Does things."""


@deprecated("Function a6 is deprecated in 1.1 and will be removed in 1.3.")
def a6():
    """Old helper."""


@deprecated("deprecated in 0.23; use :func:`b7` instead")
def a7():
    """Older helper."""


def a8():
    """Deprecated since version 0.20. Will be removed in version 0.22."""


def a9():
    """This function will be removed in 2.0. Use `a10` instead."""


def a10():
    """Score.

    deprecated in version 1.5, use score2() instead
    """


def a11():
    """Plain docstring with no markers."""


def a12():
    """This is a deprecated alias; do not use."""


class C13:
    """Model.

    Parameters
    ----------
    alpha : float
        .. deprecated:: 1.0
           Use ``beta`` instead.
    beta : float
        Strength.
    """

    def __init__(self, alpha=1.0, beta=1.0):
        self.alpha = alpha
        self.beta = beta


class C14:
    """.. deprecated:: 0.21
       Will be removed in 0.23.
    """


def a15():
    """Both markers.

    .. deprecated:: 3.0

    Deprecated since version 2.0.
    """


@deprecated("use new16 instead")
def a16():
    """.. deprecated:: 0.19"""


def a17():
    """Sentence case: DEPRECATED SINCE VERSION 4.1."""


def a18():
    """Mentions deprecation of the `foo` option in passing."""


def a19(x, mode="a"):
    """Transform.

    Parameters
    ----------
    x : array
        Input.
    mode : str
        Deprecated since version 0.5; will be removed in 0.7.
    """


class C20:
    def m20(self):
        """.. deprecated:: 2.1
           Use :meth:`C20.m21` instead.
        """

    def m21(self):
        pass
