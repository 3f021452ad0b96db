"""Posterior moments of the one-predictor Bayesian Lasso by direct quadrature.

Integrates the joint density of (beta, ln sigma2, ln lambda2) over a box that
holds all but a negligible fraction of the mass. Values feed the sampler
tests in crates/core/tests/gibbs.rs.
"""

import numpy as np

X = np.array([-1.2, -0.7, 0.1, 0.4, 0.6, 0.8])
Y = np.array([-1.1, -0.2, 0.3, -0.1, 0.9, 0.2])
A_T, B_T, U, V = 1.0, 1.0, 1.0, 1.0
N = len(X)
SXX, SXY, SYY = X @ X, X @ Y, Y @ Y


def log_joint(beta, s, t):
    sigma2, lam2 = np.exp(s), np.exp(t)
    sigma, lam = np.sqrt(sigma2), np.sqrt(lam2)
    rss = SYY - 2 * beta * SXY + beta * beta * SXX
    return (
        -0.5 * N * s - rss / (2 * sigma2)
        + np.log(lam / (2 * sigma)) - lam * abs(beta) / sigma
        - (A_T + 1) * s - B_T / sigma2 + s
        + (U - 1) * t - V * lam2 + t
    )


SHIFT = log_joint(SXY / SXX, np.log(SYY / N), 0.0)


def nodes(lo, hi, k):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def moments(k):
    # beta split at the kink of |beta|
    bn, bw = map(np.concatenate, zip(nodes(-6.0, 0.0, k), nodes(0.0, 6.0, k)))
    sn, sw = nodes(-9.0, 6.0, k)
    tn, tw = nodes(-12.0, 10.0, k)
    S, T = np.meshgrid(sn, tn, indexing="ij")
    W2 = np.outer(sw, tw)
    acc = np.zeros(5)
    for b, wb in zip(bn, bw):
        dens = wb * W2 * np.exp(log_joint(b, S, T) - SHIFT)
        acc += [dens.sum(), b * dens.sum(), b * b * dens.sum(),
                (np.exp(S) * dens).sum(), (np.exp(T) * dens).sum()]
    return acc[1:] / acc[0]


if __name__ == "__main__":
    names = ["beta_mean", "beta_sq", "sigma2_mean", "lambda2_mean"]
    for k in (200, 400):
        print(k, dict(zip(names, moments(k))))
