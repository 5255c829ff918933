NORM_LINF = 0
NORM_L1 = 1
NORM_L2 = 2
