"""How fast does the Radon spectrum decay?

Prints the squared singular values of the k-plane transform on S^{n-1} at
even degrees, checks the closed form against direct quadrature, and shows
the variance bound they imply for a set of measure one half.
"""

from radon_sampling import (
    SpectrumQuery,
    eigenvalue_general,
    eigenvalue_quadrature,
    variance_bound,
)

n = 50
print(f"squared singular values on S^{n - 1}, degree 2*ell")
print("ell  " + "  ".join(f"k={k:<10d}" for k in (2, 3, 10, n - 1)))
for ell in range(6):
    row = [eigenvalue_general(SpectrumQuery(n, k, ell)) for k in (2, 3, 10, n - 1)]
    print(f"{ell:<4d} " + "  ".join(f"{v:<12.4e}" for v in row))

# Two independent routes to the same number.
q = SpectrumQuery(n, 3, 4)
closed, quad = eigenvalue_general(q), eigenvalue_quadrature(SpectrumQuery(n, 3, 8))
print(f"\nk=3, ell=4: closed form {closed:.15e}, quadrature {quad:.15e}")

# The largest nontrivial eigenvalue controls the spread of section measures.
for k in (2, 3, 10, n - 1):
    print(f"Var bound for |A| = 1/2, k={k:2d}: {variance_bound(n, k, 0.5):.5f}")
