"""
Constants used throughout MNPCA.
"""

# Model defaults: one singular space per observation, rank-2 truncation
DEFAULT_R = 2
DEFAULT_M = 1
DEFAULT_EPS = 0.2

# Numerical tolerances
TIE_TOL = 1e-10          # relative gap below which singular values count as tied
SYMMETRY_TOL = 1e-10
MAX_CONDITION = 1e12     # regularized kernel matrices beyond this are rejected
PINV_RTOL = 1e-10        # eigenvalues below this fraction of the largest are dropped
PSD_TOL = 1e-8
ORTHONORMAL_TOL = 1e-8

# QDA covariance ridge, as a fraction of trace(cov) / dim
QDA_RIDGE = 1e-6

# Exponents a of the bandwidth grid sigma2 = 2**a * sigma0_2
SIGMA_GRID = (-6, -5, -4, -3, -2, -1, 0, 1, 2)

# Simulation
CURVE_LENGTH = 10

# FashionMNIST: sandals and ankle boots
FASHION_CLASSES = (5, 9)
FASHION_SHAPE = (28, 28)
PIXEL_MAX = 255.0

# Experiments
MAX_REDRAWS = 10
DEFAULT_SEED = 20240601

# Output
FLOAT_FORMAT = '%.17g'

# Method names as they appear in accuracy tables
METHOD_MNPCA_ODD = 'mnpca-odd'
METHOD_MNPCA_EVEN = 'mnpca-even'
METHOD_KONG = 'kong'
METHOD_2D2PCA = '2d2pca'
ALL_METHODS = (METHOD_MNPCA_ODD, METHOD_MNPCA_EVEN, METHOD_KONG, METHOD_2D2PCA)
