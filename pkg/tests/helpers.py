"""Shared test data builders."""

import numpy as np

from coordsketch.core import Key, WeightedSetCollection


def random_collection(seed, n=60, num_sets=3, density=0.45, mixed=True):
    rng = np.random.default_rng(seed)
    w = np.where(rng.random(n) < 0.5, 1.0, 1.0 + rng.pareto(1.5, n)) if mixed else np.ones(n)
    mem = rng.random((num_sets, n)) < density
    mem[rng.integers(0, num_sets, n), np.arange(n)] = True
    ground = [Key(i + 1, float(w[i]), {"label": (i + 1) % 10}) for i in range(n)]
    sets = {f"A{a + 1}": [i + 1 for i in range(n) if mem[a, i]] for a in range(num_sets)}
    return WeightedSetCollection(ground, sets)


def rho2_brute_force(rule, k, counts, weights):
    """Conditional selectivities by enumerating every labeled with-replacement sequence.

    WSR: sequences of length ``k`` over the ground keys whose distinct set is
    the sampled set. WSRD: sequences of length ``sum(counts)`` over the
    sampled keys that contain each of them at least once.
    """
    import itertools
    from fractions import Fraction

    sampled = sorted(counts)
    if rule == "WSR":
        alphabet, length = sorted(weights), k
    else:
        alphabet, length = sampled, sum(counts.values())
    total_w = sum(Fraction(weights[i]) for i in alphabet)
    mass = Fraction(0)
    acc = {i: Fraction(0) for i in sampled}
    for seq in itertools.product(alphabet, repeat=length):
        if set(seq) != set(sampled):
            continue
        p = Fraction(1)
        for i in seq:
            p *= Fraction(weights[i]) / total_w
        mass += p
        for i in sampled:
            acc[i] += p * seq.count(i)
    return {i: float(acc[i] / mass / length) for i in sampled}


ACCEPTANCE_LOG: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    """Log one acceptance verdict; the terminal summary prints the log."""
    line = f"{'PASS' if ok else 'FAIL'} {criterion}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LOG.append(line)
    print(line)
    return ok
