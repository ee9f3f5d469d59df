def deprecated(extra=""):
    def wrap(obj):
        return obj

    if callable(extra):
        return extra
    return wrap
