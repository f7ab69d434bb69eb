"""Symbolic reference values for the three-dimensional Milnor-frame contact models.

Frame E1, E2, E3 is orthonormal with brackets
    [E2, E3] = 2 E1,  [E3, E1] = l2 E2,  [E1, E2] = l3 E3,
xi = E1, eta = E1^flat, phi E2 = E3, phi E3 = -E2, and
d eta(X, Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X, Y])).

Everything is computed from the Koszul formula for a constant metric in a
left-invariant frame, independently of the Rust implementation. The script
prints closed forms and the numeric values frozen into the Rust tests.

Run: python3 tools/oracle/milnor_oracle.py
"""

import itertools

import sympy as sp

l2, l3 = sp.symbols("l2 l3", real=True)
D = 3


def structure_constants(a2, a3):
    c = [[[sp.Integer(0)] * D for _ in range(D)] for _ in range(D)]  # c[i][j][k] = c^k_ij

    def put(i, j, k, v):
        c[i][j][k] += v
        c[j][i][k] -= v

    put(1, 2, 0, 2)
    put(2, 0, 1, a2)
    put(0, 1, 2, a3)
    return c


def bracket(c, x, y):
    return [sum(x[i] * y[j] * c[i][j][k] for i in range(D) for j in range(D)) for k in range(D)]


def christoffel(c, g):
    """Gamma[l][i][j]: nabla_{E_i} E_j = Gamma^l_ij E_l, constant metric g."""
    ginv = g.inv()

    def gb(i, j, k):  # g([E_i, E_j], E_k)
        return sum(c[i][j][m] * g[m, k] for m in range(D))

    low = [[[sp.Rational(1, 2) * (gb(i, j, k) - gb(i, k, j) - gb(j, k, i)) for k in range(D)]
            for j in range(D)] for i in range(D)]
    return [[[sp.simplify(sum(ginv[l, k] * low[i][j][k] for k in range(D))) for j in range(D)]
             for i in range(D)] for l in range(D)]


def curvature(c, gam):
    """R[l][k][i][j] = (R(E_i, E_j) E_k)^l for constant frame data."""
    R = [[[[0] * D for _ in range(D)] for _ in range(D)] for _ in range(D)]
    for l, k, i, j in itertools.product(range(D), repeat=4):
        v = sum(gam[m][j][k] * gam[l][i][m] - gam[m][i][k] * gam[l][j][m] - c[i][j][m] * gam[l][m][k]
                for m in range(D))
        R[l][k][i][j] = sp.simplify(v)
    return R


def lie_matrix(c, x):
    """Columns: frame components of [X, E_j] for constant X."""
    return sp.Matrix(D, D, lambda m, j: sum(x[a] * c[a][j][m] for a in range(D)))


def main():
    c = structure_constants(l2, l3)
    g = sp.eye(D)
    xi = [1, 0, 0]
    phi = sp.Matrix([[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    eta = sp.Matrix([1, 0, 0])

    deta = sp.Matrix(D, D, lambda a, b: -sp.Rational(1, 2) * sum(eta[m] * c[a][b][m] for m in range(D)))
    print("d eta matrix:", deta.tolist())
    print("compat g(X, phi Y) - d eta:", sp.simplify(g * phi - deta).tolist())

    B = lie_matrix(c, xi)
    h = sp.simplify((B * phi - phi * B) / 2)
    print("h =", h.tolist())

    gam = christoffel(c, g)
    R = curvature(c, gam)

    # R(X, Y) xi - kappa (eta(Y) X - eta(X) Y) - mu (eta(Y) h X - eta(X) h Y) on frame pairs
    kap, mu = sp.symbols("kappa mu")
    eqs = []
    for i, j in itertools.product(range(D), repeat=2):
        for l in range(D):
            lhs = R[l][0][i][j]
            ex = [1 if l == i else 0, 1 if l == j else 0]
            rhs = kap * (eta[j] * ex[0] - eta[i] * ex[1]) + mu * (eta[j] * h[l, i] - eta[i] * h[l, j])
            eqs.append(sp.simplify(lhs - rhs))
    sol = sp.solve([e for e in eqs if e != 0], [kap, mu], dict=True)
    print("nullity solution:", sol)
    kappa_expr = sp.factor(sol[0][kap])
    mu_expr = sp.factor(sol[0][mu])
    print("kappa =", kappa_expr, "  mu =", mu_expr)

    # Lie_xi h - (2 - mu) phi h - 2 (1 - kappa) phi
    lie_h = B * h - h * B
    ident = sp.simplify(lie_h - (2 - mu_expr) * phi * h - 2 * (1 - kappa_expr) * phi)
    print("Lie_xi h identity residual:", ident.tolist())

    grid = [(1, 3), (3, 1), (-1, 1), (0, 2), (2, sp.Rational(1, 2)), (-2, -sp.Rational(1, 2)),
            (sp.Rational(1, 2), -sp.Rational(3, 2)), (-3, -1), (sp.Rational(3, 2), sp.Rational(3, 2)),
            (0, 0)]
    print("\n# frozen values: (l2, l3) -> kappa, mu, lambda_h, index")
    for a2, a3 in grid:
        k = kappa_expr.subs({l2: a2, l3: a3})
        m = mu_expr.subs({l2: a2, l3: a3})
        lam = sp.sqrt(1 - k)
        idx = (1 - m / 2) / lam if lam != 0 else sp.zoo
        print(f"({float(a2)}, {float(a3)}) -> kappa={float(k)!r}, mu={float(m)!r}, "
              f"lambda_h={float(lam)!r}, index={idx if idx == sp.zoo else float(idx)!r}")

    # Canonical base metric and its Sasakian lift for a concrete |I| > 1 model.
    a2, a3 = 1, 3
    cs = structure_constants(a2, a3)
    hs = h.subs({l2: a2, l3: a3})
    k = kappa_expr.subs({l2: a2, l3: a3})
    m = mu_expr.subs({l2: a2, l3: a3})
    idx = (1 - m / 2) / sp.sqrt(1 - k)
    cfac = abs(idx) / sp.sqrt(idx ** 2 - 1)
    P = sp.eye(D) - sp.Matrix(xi) * eta.T
    gbase = cfac * (P.T * g * P + P.T * g * (hs / (1 - m / 2)) * P)
    gbar = sp.simplify(gbase + eta * eta.T)
    print("\nlift over (1, 3): index =", idx, " base factors:", sp.simplify(gbase).tolist())
    gam_bar = christoffel(cs, gbar)
    Rbar = curvature(cs, gam_bar)
    worst = 0
    for i, j in itertools.product(range(D), repeat=2):
        for l in range(D):
            target = (eta[j] * (1 if l == i else 0) - eta[i] * (1 if l == j else 0))
            worst = max(worst, abs(float(sp.simplify(Rbar[l][0][i][j] - target))))
    print("lifted Sasakian nullity residual (exact):", worst)

    # Christoffel symbols of Milnor (1, 3), frozen for the Koszul test.
    gs = christoffel(cs, g)
    nz = [((l, i, j), gs[l][i][j]) for l, i, j in itertools.product(range(D), repeat=3) if gs[l][i][j] != 0]
    print("\nChristoffel (l, i, j) nonzero for (1, 3):", nz)


if __name__ == "__main__":
    main()
