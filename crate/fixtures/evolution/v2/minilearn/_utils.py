def deprecated(extra=""):
    def wrap(obj):
        return obj

    return wrap
