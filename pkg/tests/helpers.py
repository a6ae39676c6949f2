FIG2_COUPLINGS = [(0.5, -0.5), (0.5, 0.5), (0.5, 0.0), (0.0, -0.5)]
