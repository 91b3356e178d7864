"""Pure-Python polynomial roots: the companion-matrix eigensolve of numpy."""
import numpy as np


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial given in descending order."""
    return np.roots(coeffs)
