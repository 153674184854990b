"""Independent oracles used to freeze expected values in the test suite.

Nothing here imports from the package under test.  Each oracle computes a
reference quantity by a route deliberately different from the library's
own (direct per-term series instead of recurrences, ODE integration
instead of series/asymptotics, quadrature instead of closed forms,
rejection sampling instead of matrix models), so agreement is evidence
rather than tautology.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

# Ai(0) and Ai'(0); standard constants, shared with any correct evaluator.
AIRY_AT_ZERO = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIRY_PRIME_AT_ZERO = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)


def airy_ode_oracle(xs):
    """Solve y'' = x*y from 0 with the Ai initial data, high-accuracy RK.

    Returns (ai, aip) arrays at the requested points (must lie in a range
    the integrator can reach; growth on the right limits practical use to
    roughly x <= 12).
    """
    xs = np.asarray(xs, dtype=float)
    ai = np.empty_like(xs)
    aip = np.empty_like(xs)

    def rhs(t, y):
        return [y[1], t * y[0]]

    for negative_side in (True, False):
        sel = (xs < 0) if negative_side else (xs >= 0)
        if not np.any(sel):
            continue
        pts = xs[sel]
        end = float(np.min(pts)) if negative_side else float(np.max(pts))
        if end == 0.0:
            ai[sel] = AIRY_AT_ZERO
            aip[sel] = AIRY_PRIME_AT_ZERO
            continue
        sol = solve_ivp(
            rhs,
            (0.0, end),
            [AIRY_AT_ZERO, AIRY_PRIME_AT_ZERO],
            method="DOP853",
            rtol=1e-13,
            atol=1e-16,
            dense_output=True,
        )
        vals = sol.sol(pts)
        ai[sel] = vals[0]
        aip[sel] = vals[1]
    return ai, aip


def bessel_series_oracle(alpha: float, x: float, terms: int = 200) -> float:
    """First-kind cylinder function by direct per-term evaluation."""
    if x == 0.0:
        return 1.0 if alpha == 0 else 0.0
    total = 0.0
    for k in range(terms):
        ln_mag = (alpha + 2 * k) * math.log(x / 2.0) - math.lgamma(k + 1.0) - math.lgamma(alpha + k + 1.0)
        term = (-1.0) ** k * math.exp(ln_mag)
        total += term
        if abs(term) < 1e-20 * max(abs(total), 1e-300) and k > 4:
            break
    return total


def bessel_series_prime_oracle(alpha: float, x: float, terms: int = 200) -> float:
    """Derivative of the cylinder function by direct per-term evaluation."""
    total = 0.0
    for k in range(terms):
        ln_mag = (alpha + 2 * k - 1) * math.log(x / 2.0) - math.lgamma(k + 1.0) - math.lgamma(alpha + k + 1.0)
        term = (-1.0) ** k * 0.5 * (alpha + 2.0 * k) * math.exp(ln_mag)
        total += term
        if abs(term) < 1e-20 * max(abs(total), 1e-300) and k > 4:
            break
    return total


def bessel_integral_oracle(alpha: int, x: float, nodes: int = 200001) -> float:
    """Integer-order cylinder function via the cosine integral representation."""
    if alpha != int(alpha):
        raise ValueError("integral representation used for integer order only")
    tau = np.linspace(0.0, math.pi, nodes)
    f = np.cos(alpha * tau - x * np.sin(tau))
    h = tau[1] - tau[0]
    # composite Simpson (nodes is odd)
    s = f[0] + f[-1] + 4.0 * np.sum(f[1:-1:2]) + 2.0 * np.sum(f[2:-1:2])
    return float(s * h / 3.0 / math.pi)


def gauss_tail_oracle(t: float, span: float = 13.0, h: float = 1e-5) -> float:
    """Upper normal tail integral by plain trapezoid quadrature."""
    n = int(span / h) + 1
    xs = np.linspace(t, t + span, n)
    ys = np.exp(-0.5 * xs * xs) / math.sqrt(2.0 * math.pi)
    step = xs[1] - xs[0]
    return float(step * (0.5 * ys[0] + np.sum(ys[1:-1]) + 0.5 * ys[-1]))


def soft_edge_pair_rejection(beta: float, n_draws: int, rng: np.random.Generator) -> np.ndarray:
    """Brute-force rejection sampler for the 2-particle edge ensemble.

    Target on raw spectral variables: |l1-l2|^beta * exp(-(beta/4)(l1^2+l2^2)).
    Proposal: iid Normal(0, 4/beta); the weight |d|^beta exp(-beta(s^2+d^2)/16)
    is maximized at s=0, d^2=8.  Returns edge coordinates, shape (n_draws, 2).
    """
    n_sys = 2
    out = np.empty((n_draws, 2))
    w_max = 8.0 ** (beta / 2.0) * math.exp(-beta / 2.0)
    filled = 0
    while filled < n_draws:
        m = max(4 * (n_draws - filled), 1024)
        lam = rng.normal(0.0, math.sqrt(4.0 / beta), size=(m, 2))
        s = lam[:, 0] + lam[:, 1]
        d = lam[:, 0] - lam[:, 1]
        w = np.abs(d) ** beta * np.exp(-beta * (s * s + d * d) / 16.0)
        keep = rng.uniform(0.0, 1.0, size=m) < (w / w_max)
        acc = lam[keep]
        take = min(len(acc), n_draws - filled)
        edge = n_sys ** (1.0 / 6.0) * (acc[:take] - 2.0 * math.sqrt(n_sys))
        out[filled : filled + take] = edge
        filled += take
    return out


def wishart_hard_edge_oracle(n: int, alpha: int, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Exact matrix-model sampler for the hard-edge equilibrium, integer alpha.

    Eigenvalues u of G*G with G complex standard Gaussian of shape
    (n+alpha, n) follow pdf prop. to prod u^alpha prod |du|^2 exp(-sum u);
    scaling x = 4n*u matches the weight exp(-x/(4n)) x^alpha with
    quadratic-exponent repulsion.  Returns shape (n_samples, n), ascending.
    """
    out = np.empty((n_samples, n))
    for k in range(n_samples):
        g = (rng.standard_normal((n + alpha, n)) + 1j * rng.standard_normal((n + alpha, n))) / math.sqrt(2.0)
        u = np.linalg.eigvalsh(g.conj().T @ g)
        out[k] = 4.0 * n * np.sort(u)
    return out


def pair_distance_cdf_oracle(
    beta: float,
    c: float,
    theta: float,
    n_particles: int,
    pair_potential,
    r_grid: np.ndarray,
    r_max: float,
    nodes: int = 400001,
) -> np.ndarray:
    """CDF of the pair distance for TWO particles in 3d with a quadratic
    confinement c|x|^2 / n^theta and pair potential ``pair_potential``.

    In center/difference coordinates the difference decouples with radial
    density prop. to r^2 exp(-beta*c*r^2/(2 n^theta) - beta*pair_potential(r)).
    """
    rs = np.linspace(0.0, r_max, nodes)
    with np.errstate(divide="ignore", over="ignore"):
        expo = -beta * c * rs**2 / (2.0 * n_particles**theta) - beta * pair_potential(rs)
    expo[0] = -np.inf
    dens = np.where(np.isfinite(expo), rs**2 * np.exp(expo - np.nanmax(expo[np.isfinite(expo)])), 0.0)
    h = rs[1] - rs[0]
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * h)])
    cum /= cum[-1]
    return np.interp(np.asarray(r_grid, dtype=float), rs, cum)


# plain double-loop drift references, one per family ------------------------


def drift_oracle_soft_edge(beta, n, xs, i):
    s = sum(1.0 / (xs[i] - xs[j]) for j in range(n) if j != i)
    cbrt = n ** (1.0 / 3.0)
    return 0.5 * beta * (s - cbrt - xs[i] / (2.0 * cbrt))


def drift_oracle_planar(pts, i):
    x = np.asarray(pts[i], dtype=float)
    acc = -x.copy()
    for j, y in enumerate(pts):
        if j == i:
            continue
        d = x - np.asarray(y, dtype=float)
        acc += d / float(d @ d)
    return acc


def drift_oracle_hard_edge(alpha, n, xs, i):
    s = sum(1.0 / (xs[i] - xs[j]) for j in range(n) if j != i)
    return -1.0 / (8.0 * n) + alpha / (2.0 * xs[i]) + s


def drift_oracle_squared(alpha, n, xs, i):
    s = sum(xs[i] / (xs[i] - xs[j]) for j in range(n) if j != i)
    return 4.0 * (-xs[i] / (8.0 * n) + 0.5 * (alpha + 1.0) + s)


def drift_oracle_root_squared(alpha, n, xs, i):
    s = sum(2.0 * xs[i] / (xs[i] ** 2 - xs[j] ** 2) for j in range(n) if j != i)
    return -xs[i] / (4.0 * n) + (alpha + 0.5) / xs[i] + s


def drift_oracle_lennard_jones(beta, c, theta, n, pts, i):
    x = np.asarray(pts[i], dtype=float)
    acc = -(beta * c / n**theta) * x
    for j, y in enumerate(pts):
        if j == i:
            continue
        d = x - np.asarray(y, dtype=float)
        r = math.sqrt(float(d @ d))
        acc += 0.5 * beta * (12.0 / r**14 - 6.0 / r**8) * d
    return acc


def drift_oracle_riesz(beta, a, c, theta, n, pts, i):
    x = np.asarray(pts[i], dtype=float)
    acc = -(beta * c / n**theta) * x
    for j, y in enumerate(pts):
        if j == i:
            continue
        d = x - np.asarray(y, dtype=float)
        r = math.sqrt(float(d @ d))
        acc += 0.5 * beta * d / r ** (a + 2.0)
    return acc


def one_sample_ks(values: np.ndarray, cdf) -> float:
    """Kolmogorov distance of an empirical sample to a reference CDF."""
    v = np.sort(np.asarray(values, dtype=float))
    n = len(v)
    u = np.asarray(cdf(v), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def normal_cdf(x, mean=0.0, sd=1.0):
    z = (np.asarray(x, dtype=float) - mean) / sd
    return 0.5 * np.array([math.erfc(-t / math.sqrt(2.0)) for t in np.atleast_1d(z)]).reshape(np.shape(z))
