"""Reference optimum for the L1 logistic regression tests.

Objective: mean_i log(1 + exp(-s_i (w.x_i + b))) + lam * ||w||_1, s_i = 2 y_i - 1.
The design matrix is generated by closed-form expressions mirrored in
tests/baselines.rs so no data file is needed.

Run: python3 l1_logreg_oracle.py   (requires cvxpy, numpy)
"""
import math

import cvxpy as cp
import numpy as np

N, D = 20, 10
X = np.array([[math.sin(0.7 * i + 1.3 * j + 0.5) + 0.3 * math.cos(1.1 * i * j + 0.2)
               for j in range(D)] for i in range(N)])
y = np.array([1.0 if (X[i, 0] - 0.5 * X[i, 3] + 0.25 * math.sin(3.0 * i)) > 0 else 0.0
              for i in range(N)])
s = 2 * y - 1

for lam in (0.01, 0.05, 0.2):
    w = cp.Variable(D)
    b = cp.Variable()
    margins = cp.multiply(s, X @ w + b)
    obj = cp.sum(cp.logistic(-margins)) / N + lam * cp.norm1(w)
    prob = cp.Problem(cp.Minimize(obj))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    wv, bv = w.value, b.value
    exact = np.mean(np.logaddexp(0, -s * (X @ wv + bv))) + lam * np.abs(wv).sum()
    print(f"lam={lam} objective={exact!r} y={y.astype(int).tolist()}")
