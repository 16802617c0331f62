"""Shared builders for randomized model-level tests."""

import numpy as np

from isarith.interval import Interval
from isarith.model import Domain, SuperpositionModel
from isarith.univariate import Atom

ATOM_NP = {
    Atom.NEG: lambda x: -x,
    Atom.SQR: np.square,
    Atom.INV: lambda x: 1.0 / x,
    Atom.EXP: np.exp,
    Atom.LOG: np.log,
    Atom.SIN: np.sin,
    Atom.COS: np.cos,
    Atom.TAN: np.tan,
}


def make_model(domain, rows, support=None):
    coeffs = tuple(tuple(Interval(lo, hi) for lo, hi in row) for row in rows)
    if support is None:
        support = range(len(rows))
    return SuperpositionModel(domain, coeffs, frozenset(support))


def unit_domain(n, branches):
    return Domain.of([(0.0, 1.0)] * n, branches)


def random_model_for_atom(rng, atom, n, branches):
    """Random coefficient matrix whose range satisfies the atom's domain with
    a comfortable margin."""
    if atom in (Atom.LOG, Atom.INV):
        lo_band, width = (0.4, 1.2), 0.5
    elif atom is Atom.TAN:
        lo_band, width = (-0.35 / n, 0.25 / n), 0.4 / n
    else:
        lo_band, width = (-1.2, 0.8), 0.9
    rows = []
    for _ in range(n):
        lo = rng.uniform(*lo_band, size=branches)
        w = rng.uniform(0.01, width, size=branches)
        rows.append([(float(a), float(a + b)) for a, b in zip(lo, w)])
    return make_model(unit_domain(n, branches), rows)


def random_separable_model(rng, atom, n, branches, wide_row=None):
    """All rows degenerate constants except one."""
    wide = int(rng.integers(0, n)) if wide_row is None else wide_row
    if atom in (Atom.LOG, Atom.INV):
        base, width = (0.5, 1.0), 0.6
    elif atom is Atom.TAN:
        base, width = (-0.3 / n, 0.2 / n), 0.5 / n
    else:
        base, width = (-1.0, 0.7), 0.8
    rows = []
    for i in range(n):
        if i == wide:
            lo = rng.uniform(*base, size=branches)
            w = rng.uniform(0.05, width, size=branches)
            rows.append([(float(a), float(a + b)) for a, b in zip(lo, w)])
        else:
            c = float(rng.uniform(*base))
            rows.append([(c, c)] * branches)
    return make_model(unit_domain(n, branches), rows)


def admissible_offsets(m, centers, rng, trials):
    """Uniform draws plus all corner vectors of the admissible offset box."""
    import itertools

    rb = m.range_bounds()
    lo = np.array([l - a for l, a in zip(rb.row_lo, centers)])
    hi = np.array([h - a for h, a in zip(rb.row_hi, centers)])
    draws = rng.uniform(lo, hi, size=(trials, len(centers)))
    corners = np.array(list(itertools.product(*zip(lo, hi))))
    zero = np.zeros((1, len(centers)))
    return np.vstack([draws, corners, zero])


def defect_values(atom, omega, deltas):
    """|sum g(w+d_i) - (n-1) g(w) - g(w + sum d_i)| for each offset row."""
    g = ATOM_NP[atom]
    n = deltas.shape[1]
    return np.abs(
        g(omega + deltas).sum(axis=1) - (n - 1) * g(omega) - g(omega + deltas.sum(axis=1))
    )


def defect_noise_floor(atom, omega, deltas):
    """Resolution of the float64 defect measurement: each of the n + 2 terms
    carries about one ulp of its own magnitude."""
    g = ATOM_NP[atom]
    n = deltas.shape[1]
    gmax = max(
        float(np.abs(g(omega + deltas)).max()),
        abs(g(omega)) * (n - 1),
        float(np.abs(g(omega + deltas.sum(axis=1))).max()),
        1e-30,
    )
    return 8.0 * (n + 2) * np.finfo(float).eps * gmax
