#!/usr/bin/env python3
"""Independent high-precision evaluation of the closed-form quantities for the
reference system (N=3, M=2). Writes tests/fixtures/reference_oracle.json.

Everything here is computed from scratch with mpmath at 40 digits using the
two-state closed forms pi = (b, a)/(a+b), lambda2 = 1-a-b; it shares no code
with the C++ library.
"""
import json
import pathlib

from mpmath import mp, mpf, sqrt, log, ceil

mp.dps = 40

# (states, a = P[0][1], b = P[1][0])
ARMS = [
    ((mpf(1), mpf(2)), mpf("0.1"), mpf("0.2")),
    ((mpf(1), mpf(2)), mpf("0.5"), mpf("0.5")),
    ((mpf("0.5"), mpf("1.5")), mpf("0.3"), mpf("0.4")),
]
M = 2
N = len(ARMS)


def two_state(states, a, b):
    pi = (b / (a + b), a / (a + b))
    mu = states[0] * pi[0] + states[1] * pi[1]
    lam = abs(1 - a - b)
    return pi, mu, 1 - lam


info = [two_state(*arm) for arm in ARMS]
pis = [i[0] for i in info]
mus = [i[1] for i in info]
eps = [i[2] for i in info]
sizes = [len(arm[0]) for arm in ARMS]

pi_min = min(min(p) for p in pis)
eps_min, eps_max = min(eps), max(eps)
s_all = [s for arm in ARMS for s in arm[0]]
s_min, s_max = min(s_all), max(s_all)
card_max = max(sizes)

order = sorted(range(N), key=lambda i: -mus[i])  # sigma, 0-based
mu_s = [mus[i] for i in order]
size_s = [sizes[i] for i in order]
gap_min = min(mu_s[j] - mu_s[j + 1] for j in range(M))


def l_threshold(factor=4):
    return (factor * 20 * s_max**2 * card_max**2 / (3 - 2 * sqrt(2)) + 10 * s_max**2) / eps_min


def d_threshold(L):
    return 4 * L / gap_min**2


def lemma1():
    total = mpf(0)
    for (states, _, _), pi in zip(ARMS, pis):
        total += sum(states) / min(pi)
    return total


def exploration_time_bound(t, D):
    return (4 * (3 * D * log(t) + 1) - 1) / 3


def exploitation_count_bound(t):
    x = mpf(3) / 2 * (t - N) + 1
    return int(ceil(log(x) / log(4)))


def mistake_factor(L):
    return 1 + eps_max * sqrt(L) / (10 * s_min)


def inversion(i, j, t_n, L):
    v = (sizes[i] + sizes[j]) / pi_min * mistake_factor(L) / t_n
    return min(v, mpf(1))


def exploration_term(t, D):
    top = sum(mu_s[:M])
    return exploration_time_bound(t, D) * (top - mpf(M) / N * sum(mu_s))


def bound_shared(t, L, D):
    c = 3 * exploitation_count_bound(t) * mistake_factor(L)
    a = mpf(0)
    for i in range(M - 1):
        for j in range(N):
            if j != i:
                a += mu_s[i] * (size_s[i] + size_s[j]) / pi_min
    b = mpf(0)
    for j in range(M, N):
        b += (mu_s[M - 1] - mu_s[j]) * (size_s[M - 1] + size_s[j]) / pi_min
    cc = mpf(0)
    for j in range(M - 1):
        cc += mu_s[M - 1] * (size_s[M - 1] + size_s[j]) / pi_min
    return exploration_term(t, D) + c * (a + b + cc) + lemma1()


def bound_zero(t, L, D):
    c = 3 * exploitation_count_bound(t) * mistake_factor(L)
    inner = mpf(0)
    for i in range(M):
        for j in range(N):
            if j != i:
                inner += (size_s[i] + size_s[i]) / pi_min
    return c * sum(mu_s[:M]) * inner + exploration_term(t, D) + lemma1()


def f(x):
    return float(x)


L_star = l_threshold()
D_star = d_threshold(L_star)
cases = []
for t in [4, 10, 100, 1000, 10**4, 10**5]:
    for (L, D) in [(L_star, D_star), (mpf(2), mpf(10))]:
        cases.append({
            "t": t, "L": f(L), "D": f(D),
            "exploration_time_bound": f(exploration_time_bound(t, D)),
            "exploitation_count_bound": exploitation_count_bound(t),
            "bound_shared": f(bound_shared(t, L, D)),
            "bound_zero": f(bound_zero(t, L, D)),
        })

out = {
    "stationary": [[f(p) for p in pi] for pi in pis],
    "mu": [f(m) for m in mus],
    "epsilon": [f(e) for e in eps],
    "sigma": [i + 1 for i in order],
    "pi_min": f(pi_min), "eps_min": f(eps_min), "eps_max": f(eps_max),
    "s_min": f(s_min), "s_max": f(s_max), "card_max": card_max,
    "gap_min": f(gap_min),
    "l_threshold": f(L_star),
    "l_threshold_factor7": f(l_threshold(7)),
    "d_threshold": f(D_star),
    "lemma1_constant": f(lemma1()),
    "lemma1_per_arm": [f(sum(arm[0]) / min(pi)) for arm, pi in zip(ARMS, pis)],
    "inversion": [
        {"i": i + 1, "j": j + 1, "t_n": tn, "L": f(L), "value": f(inversion(i, j, tn, L))}
        for (i, j, tn, L) in [(2, 0, 1000, L_star), (2, 1, 10**5, L_star), (0, 1, 500, mpf(2)), (2, 0, 1, mpf(2))]
    ],
    "bounds": cases,
}

path = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "reference_oracle.json"
path.write_text(json.dumps(out, indent=2) + "\n")
print(json.dumps({k: out[k] for k in ["mu", "epsilon", "gap_min", "l_threshold", "d_threshold", "lemma1_constant"]}, indent=1))
