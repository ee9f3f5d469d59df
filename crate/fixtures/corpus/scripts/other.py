import minilearn.models as mm

mm.Ridge()
