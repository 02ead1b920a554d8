"""Tour of the machinery behind the certified comparison.

The ordering argument rests on a vector y solving y (I - B) = mu. This
script shows the two ways to obtain it and why they agree:

* a direct dense solve of the transposed system, and
* a fixed-point iteration y <- mu_tilde + y A_tilde started from zero,
  which converges because every column of A_tilde sums to strictly less
  than one; the factor q bounds the per-step contraction.

On instances satisfying the separation condition, every iterate (and hence
the limit) is nonincreasing across classes, which is exactly what makes the
sojourn-difference expansion single-signed.
"""

import numpy as np

from dpsq import (
    a_tilde,
    contraction_factor,
    mu_tilde,
    sojourn_difference_expansion,
    solve_sojourn,
    weight_family,
    well_separated_instance,
    y_direct,
    y_fixed_point,
)


def main() -> None:
    params = well_separated_instance()
    g = weight_family(3.0, 3)
    print(f"instance: {params.describe()}")
    print(f"weights : {np.array2string(g.g, precision=5)}")
    print()

    mu_t = mu_tilde(params, g)
    update = a_tilde(params, g)
    q = contraction_factor(params, g)
    print(f"transformed rates mu_tilde : {np.array2string(mu_t, precision=5)}")
    print(f"update matrix column sums  : "
          f"{np.array2string(update.sum(axis=0), precision=5)} (all < 1)")
    print(f"contraction factor q       : {q:.6f}")
    print()

    direct = y_direct(params, g)
    print(f"direct y  : {np.array2string(direct.y, precision=8)} "
          f"(residual {direct.residual:.2e})")

    print("fixed-point iterates (infinity-norm step):")
    y = np.zeros(params.class_count)
    for n in range(1, 200):
        y_next = mu_t + y @ update
        step = float(np.max(np.abs(y_next - y)))
        y = y_next
        if n <= 5 or n % 25 == 0 or step <= 1e-10:
            ordered = bool(np.all(np.diff(y) <= 1e-9 * y[0]))
            print(f"  n={n:>3}  y = {np.array2string(y, precision=6):<42} "
                  f"step = {step:.2e}  nonincreasing = {ordered}")
        if step <= 1e-10:
            break

    fixed = y_fixed_point(params, g, tol=1e-10)
    gap = float(np.max(np.abs(fixed.y - direct.y)))
    print(f"converged in {fixed.iterations} iterations; "
          f"agreement with direct solve: {gap:.2e}")
    print()

    # the expansion the y-vector powers: difference of two policies
    alpha, beta = weight_family(5.0, 3), weight_family(2.0, 3)
    expansion = sojourn_difference_expansion(params, alpha, beta)
    direct_diff = (
        solve_sojourn(params, alpha).aggregate - solve_sojourn(params, beta).aggregate
    )
    print(f"difference via expansion   : {expansion:+.10f}")
    print(f"difference via two solves  : {direct_diff:+.10f}")
    print(f"they agree to {abs(expansion - direct_diff):.2e}")


if __name__ == "__main__":
    main()
