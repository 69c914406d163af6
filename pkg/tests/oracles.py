"""Reference computations that share no code with the package under test."""
import itertools


def closed_form(variant, n, x, y):
    """Objective value by direct integer arithmetic on the decoded factors."""
    variant = str(variant)
    if variant == "EQ1":
        return n * n * (n - x * y) ** 2 + x * (x - y) ** 2
    if variant == "EQ2":
        num = n * n * (n - x * y) ** 2 - n * n + 2 * n**3 - n**4 + x * (x - y) ** 2
        assert num % 4 == 0
        return num // 4
    if variant == "SIMPLIFIED_NO_N2":
        return (n - x * y) ** 2 - (n - 1) ** 2 + x * (x - y) ** 2
    if variant == "SIMPLIFIED_PLAIN":
        return (n - x * y) ** 2
    raise ValueError(variant)


def odd_from_bits(bits):
    """``1 + 2*b1 + 4*b2 + ...`` for ``bits = [b1, b2, ...]``."""
    return 1 + sum(b << (i + 1) for i, b in enumerate(bits))


def bit_patterns(k):
    return itertools.product((0, 1), repeat=k)


def brute_min_over(vars_fixed, free_vars, energy):
    """``min`` of ``energy(assignment)`` over all values of ``free_vars``."""
    best = None
    for bits in itertools.product((0, 1), repeat=len(free_vars)):
        a = dict(vars_fixed)
        a.update(zip(free_vars, bits))
        e = energy(a)
        if best is None or e < best:
            best = e
    return best


def qubo_terms_energy(linear, quadratic, offset, a):
    """Plain double loop over a QUBO's term maps."""
    e = offset
    for v, c in linear.items():
        e += c * a[v]
    for (u, v), c in quadratic.items():
        e += c * a[u] * a[v]
    return e


def brute_ground(linear, quadratic, offset, vars):
    """All argmin assignments by full enumeration."""
    best, arg = None, []
    for bits in itertools.product((0, 1), repeat=len(vars)):
        a = dict(zip(vars, bits))
        e = qubo_terms_energy(linear, quadratic, offset, a)
        if best is None or e < best:
            best, arg = e, [a]
        elif e == best:
            arg.append(a)
    return best, arg


def all_energies(linear, quadratic, offset, vars):
    """Energy of every assignment, row ``k`` having bit ``i`` of ``k`` for ``vars[i]``.

    Uses an explicit 0/1 matrix; int64 for integer QUBOs.
    """
    import numpy as np

    n = len(vars)
    idx = {v: i for i, v in enumerate(vars)}
    states = np.arange(2**n, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(n)) & 1).astype(np.int64)
    is_int = all(isinstance(c, int) for c in list(linear.values()) + list(quadratic.values()) + [offset])
    dtype = np.int64 if is_int else np.float64
    e = np.full(2**n, offset, dtype=dtype)
    for v, c in linear.items():
        e += c * bits[:, idx[v]]
    for (u, v), c in quadratic.items():
        e += c * (bits[:, idx[u]] & bits[:, idx[v]])
    return e
