def check_array(array, ensure_2d=True):
    return array
