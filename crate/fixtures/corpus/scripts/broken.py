from minilearn.models import Ridge

def oops(:
    Ridge()
