"""Independent reference values frozen into the Rust test suites.

Each value is computed by a route that does not share code with the crate:
mpmath high-precision evaluation, direct summation, brute-force grids and
finite differences. Run with `python3 tools/oracles.py`.
"""
import math
import mpmath as mp
from scipy.integrate import quad

mp.mp.dps = 40

F, C_LIGHT, W, N0, RATE, S_BS = 2.4e9, 3e8, 1e4, 5e-15, 1e4, 1e4
ENVS = {
    "urban": (9.61, 0.16, 1.0, 20.0),
    "dense-urban": (12.08, 0.11, 1.6, 23.0),
    "suburban": (4.88, 0.43, 0.1, 21.0),
}


def p_los(r, h, env):
    a, b, _, _ = env
    theta = mp.mpf(90) if r == 0 else mp.degrees(mp.atan(mp.mpf(h) / r))
    return 1 / (1 + a * mp.exp(-b * (theta - a)))


def avg_loss(r, h, env):
    _, _, e0, e1 = env
    fspl = (4 * mp.pi * F / C_LIGHT) ** 2
    return fspl * (mp.mpf(r) ** 2 + mp.mpf(h) ** 2) * (e1 + p_los(r, h, env) * (e0 - e1))


def per_user_power(r, h, env):
    return avg_loss(r, h, env) * N0 * W * (2 ** (mp.mpf(RATE) / W) - 1)


def kernel(h1, env):
    """Dimensionless P_tr,1 integral (float64 quad, tight tolerance)."""
    a, b, e0, e1 = env

    def f(r):
        if r == 0.0:
            return 0.0
        th = math.degrees(math.atan(h1 / r))
        p = 1 / (1 + a * math.exp(-b * (th - a)))
        return 2 * math.pi * r * (r * r + h1 * h1) * (e1 + p * (e0 - e1))

    return quad(f, 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=500)[0]


def grid_argmin(env, step=1e-4):
    coarse = [i * 1e-2 for i in range(0, 501)]
    c = min(coarse, key=lambda h: kernel(h, env))
    fine = [max(0.0, c - 0.02) + i * step for i in range(0, 401)]
    return min(fine, key=lambda h: kernel(h, env))


TABLE_I = {
    "E": (8.35e11, 3.24e-4, [(4, 0.06, -0.3), (28, 0.5, 2.36), (56, 0.08, 0.69)]),
}


def reconstruct(sub, n, N=4032):
    gamma, x0, coeffs = TABLE_I[sub]
    total = mp.mpc(x0)
    for k, mag, ph in coeffs:
        xk = mag * mp.expj(ph)
        total += xk * mp.expj(2 * mp.pi * k * n / N)
        total += mp.conj(xk) * mp.expj(2 * mp.pi * (N - k) * n / N)
    return gamma / N * total


def main():
    urban = ENVS["urban"]
    print("per_user_tx_power urban r=100 h=100:", mp.nstr(per_user_power(100, 100, urban), 17))
    x0 = reconstruct("E", 0)
    print("reconstruct E n=0:", mp.nstr(x0.real, 17), "imag", mp.nstr(x0.imag, 5))
    print("reconstruct E n=100:", mp.nstr(reconstruct("E", 100).real, 17))
    print("user_density E t=0:", mp.nstr(x0.real / (RATE * S_BS), 17))
    for name, env in ENVS.items():
        print("grid h1*", name, f"{grid_argmin(env):.4f}")

    # Joint (R, h) brute force of the static RF with S/(pi E_b) = 1.
    lam, pcu = 0.1, 0.5
    nw_fspl = N0 * W * float((4 * mp.pi * F / C_LIGHT) ** 2)

    def phi(R, h):
        ptr = lam * R ** 4 * nw_fspl * kernel(h / R, urban)
        return (pcu + ptr) / R ** 2

    best = (float("inf"), 0, 0)
    R0, h0 = 30.0, 27.0
    for span, n in [(10.0, 40), (1.0, 40), (0.1, 40), (0.01, 40)]:
        for i in range(-n, n + 1):
            for j in range(-n, n + 1):
                R = R0 + span * i / n
                h = h0 + span * j / n
                v = phi(R, h)
                if v < best[0]:
                    best = (v, R, h)
        _, R0, h0 = best
    print("min static rf urban lam=0.1 pcu=0.5:", repr(best[0]), "at R", best[1], "h", best[2])

    # Subregion eigenvalue from the second derivative of the static RF.
    lam = 3.0
    h1 = grid_argmin(urban, 1e-5)
    p1 = nw_fspl * kernel(h1, urban)

    def phi_r(R):
        return pcu / R ** 2 + lam * p1 * R ** 2

    def rstar(l):
        return (pcu / (l * p1)) ** 0.25

    R = rstar(lam)
    dR = R * 1e-3
    d2 = (phi_r(R + dR) - 2 * phi_r(R) + phi_r(R - dR)) / dR ** 2
    dl = lam * 1e-5
    drdl = (rstar(lam + dl) - rstar(lam - dl)) / (2 * dl)
    # S/(4 pi E_b) convention: S/(pi E_b) = 1 multiplies phi_r.
    print("eigenvalue urban lam=3:", repr(0.5 * d2 * drdl ** 2))


if __name__ == "__main__":
    main()
