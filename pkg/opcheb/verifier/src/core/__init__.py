# Numerical core of the operator Chebyshev verifier
