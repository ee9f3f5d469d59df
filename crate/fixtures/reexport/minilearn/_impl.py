class Solver:
    def __init__(self, tol=0.0001):
        self.tol = tol

    def solve(self, problem):
        return problem
