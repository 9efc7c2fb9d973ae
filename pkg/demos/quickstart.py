"""Build a small sparse PMI problem, solve it and inspect the certificate.

    python3 demos/quickstart.py
"""
import numpy as np

from sparsepmi import (MatrixPolynomial, ProblemInstance, SparsityPattern, recover_certificate,
                       run_hierarchy, second_order_check, solve_relaxation, variables,
                       verify_certificate)

x1, x2, x3 = variables(3)

# two cliques sharing x2
pattern = SparsityPattern.from_lists(3, [[1, 2], [2, 3]])
f1 = -x1 * x2
f2 = (x3 - x2) ** 2
G1 = MatrixPolynomial.from_rows([[1 - x1 ** 2 + x1, x1 * x2 - x2 ** 2 + 1],
                                 [x1 * x2 - x2 ** 2 + 1, 2 - x2 ** 2]], 3)
G2 = MatrixPolynomial.from_rows([[1 - x3 ** 2 + x3 * x2, x2 - x3, 0 * x2],
                                 [x2 - x3, 2 - x2 ** 2, 0 * x2],
                                 [0 * x2, 0 * x2, 1 - x3 ** 2]], 3)
problem = ProblemInstance(pattern, (f1, f2), (G1, G2), name="demo")

res = run_hierarchy(problem)
print(f"status {res.status}, bound {res.bound:.6f} at k={res.k} (gate {res.gate})")
if res.minimizers:
    for x in res.minimizers.points:
        print("  minimizer", np.round(x, 6), "f =", round(problem.evaluate(x), 6))
        rep = second_order_check(problem, x)
        print("  objective Hessians PD:", rep.objective_hessians_pd)

# SOS certificate of the lower bound at the certified order
relax = solve_relaxation(problem, res.k or problem.k0)
cert = recover_certificate(problem, relax)
chk = verify_certificate(cert, problem)
print(f"certificate gamma {cert.gamma:.6f}, coefficient residual "
      f"{chk.coefficient_residual:.1e}, verified {chk.passed}")
