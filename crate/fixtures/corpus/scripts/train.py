from minilearn import metrics
from minilearn.models import Ridge

reg = Ridge(alpha=0.5, fit_intercept=False)
print(metrics.mse([1.0], [2.0]))
