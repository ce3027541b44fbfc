"""Brute-force Markov-chain oracle for walks on classical groups.

Everything here works on plain weight vectors and subsets of group elements,
independently of the block-algebra machinery it is used to check: reachability
closure decides irreducibility, the gcd of return times decides the period.
"""

import math

import numpy as np


def convolve_weights(group, a, b):
    """(a * b)({s}) = sum_t a({s t^-1}) b({t})."""
    out = np.zeros(group.order)
    for s in range(group.order):
        out[s] = sum(a[group.mul(s, group.inv(t))] * b[t] for t in range(group.order))
    return out


def product_set(group, A, B):
    return {group.mul(a, b) for a in A for b in B}


def support_powers(group, supp, kmax):
    """supp^1, supp^2, ..., supp^kmax as sets."""
    powers = [set(supp)]
    for _ in range(kmax - 1):
        powers.append(product_set(group, supp, powers[-1]))
    return powers


def generated_subgroup(group, supp):
    """Union of all support powers; a subgroup, since the group is finite."""
    seen = set()
    cur = set(supp)
    union = set()
    while frozenset(cur) not in seen:
        seen.add(frozenset(cur))
        union |= cur
        cur = product_set(group, supp, cur)
    return union


def classify_weights(group, weights, tol=1e-12):
    """("reducible", subgroup) | ("ergodic",) | ("periodic", d, normal_part).

    normal_part is the subgroup generated by the d-th support power, i.e. the
    classical counterpart of the p_0 projection.
    """
    supp = {g for g in range(group.order) if weights[g] > tol}
    reach = generated_subgroup(group, supp)
    if len(reach) < group.order:
        return ("reducible", frozenset(reach))
    kmax = 3 * group.order + 3
    powers = support_powers(group, supp, kmax)
    returns = [k + 1 for k, pw in enumerate(powers) if group.identity in pw]
    d = 0
    for k in returns:
        d = math.gcd(d, k)
    if d == 1:
        return ("ergodic",)
    supp_d = powers[d - 1]
    return ("periodic", d, frozenset(generated_subgroup(group, supp_d)))


def structured_states(group):
    """Point masses, subgroup uniforms, coset uniforms, and lazy mixtures."""
    from qergodic.groups import subgroups

    states = []
    for g in range(group.order):
        w = np.zeros(group.order)
        w[g] = 1.0
        states.append((f"point({group.names[g]})", w))
    for H in subgroups(group):
        w = np.zeros(group.order)
        w[list(H)] = 1.0 / len(H)
        states.append((f"uniform({H})", w))
        cosets = {frozenset(group.mul(g, h) for h in H) for g in range(group.order)}
        for coset in sorted(cosets, key=sorted):
            w = np.zeros(group.order)
            w[list(coset)] = 1.0 / len(coset)
            states.append((f"coset({sorted(coset)})", w))
    for g in range(group.order):
        w = np.zeros(group.order)
        w[group.identity] += 0.5
        w[g] += 0.5
        states.append((f"lazy({group.names[g]})", w))
    for g in range(group.order):
        for h in range(g + 1, group.order):
            w = np.zeros(group.order)
            w[g] = w[h] = 0.5
            states.append((f"pair({group.names[g]},{group.names[h]})", w))
    for g in range(1, group.order):
        w = np.zeros(group.order)
        w[group.identity] = 0.3
        w[g] = 0.7
        states.append((f"tilted({group.names[g]})", w))
    return states
