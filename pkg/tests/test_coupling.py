import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from contextuality import (ConnectionView, Coupling, maximal_pair_probability,
                           multimaximal_coupling, restrict_coupling,
                           verify_coupling)


def view(marginals, content="q"):
    entries = tuple((f"c{i + 1}", Fraction(m) if isinstance(m, int) else m)
                    for i, m in enumerate(marginals))
    return ConnectionView(content=content, entries=entries)


def frac(s):
    return Fraction(s)


# --- independent oracle: LP over the coupling polytope -----------------------

def outcomes(m):
    return list(itertools.product((1, -1), repeat=m))


def coupling_polytope(marginals):
    """Equality rows fixing each Pr[T_i = +1]; columns are joint outcomes."""
    m = len(marginals)
    outs = outcomes(m)
    A = [[1.0] * len(outs)]
    b = [1.0]
    for i in range(m):
        A.append([1.0 if o[i] == 1 else 0.0 for o in outs])
        b.append(float(marginals[i]))
    return np.array(A), np.array(b), outs


def lp_max_pair_equality(p, q):
    """Maximize Pr[X = Y] over all couplings of two binary marginals."""
    A, b, outs = coupling_polytope([p, q])
    c = np.array([-1.0 if o[0] == o[1] else 0.0 for o in outs])
    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


def lp_coupling_is_unique(marginals, coupling, tol=1e-8):
    """Exhaustively search the polytope of couplings achieving every pairwise
    bound: min/max of each coordinate must pin down a single point, equal to
    the constructed coupling."""
    m = len(marginals)
    A, b, outs = coupling_polytope(marginals)
    rows = list(A)
    rhs = list(b)
    for i in range(m):
        for j in range(i + 1, m):
            rows.append([1.0 if o[i] == o[j] else 0.0 for o in outs])
            rhs.append(float(maximal_pair_probability(marginals[i], marginals[j])))
    A_eq, b_eq = np.array(rows), np.array(rhs)
    expected = [float(coupling.pmf.get(o, 0)) for o in outs]
    for k in range(len(outs)):
        c = np.zeros(len(outs))
        for sign in (1.0, -1.0):
            c[k] = sign
            res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                          method="highs")
            assert res.status == 0, f"polytope unexpectedly empty: {res.message}"
            if abs(sign * res.fun - expected[k]) > tol:
                return False
        c[k] = 0.0
    return True


# --- maximal_pair_probability ------------------------------------------------

@pytest.mark.parametrize("p,q,expected", [
    (frac("1/2"), frac("1/2"), Fraction(1)),
    (frac("3/10"), frac("4/5"), frac("1/2")),   # frozen from the LP oracle
    (Fraction(1), frac("2/5"), frac("2/5")),    # frozen from the LP oracle
])
def test_pair_probability_examples(p, q, expected):
    assert maximal_pair_probability(p, q) == expected
    assert abs(lp_max_pair_equality(p, q) - float(expected)) < 1e-9


def test_pair_probability_random_against_lp():
    rng = random.Random(7)
    for _ in range(50):
        p = Fraction(rng.randint(0, 100), 100)
        q = Fraction(rng.randint(0, 100), 100)
        assert abs(float(maximal_pair_probability(p, q))
                   - lp_max_pair_equality(p, q)) < 1e-9


def test_pair_probability_domain():
    with pytest.raises(ValueError):
        maximal_pair_probability(Fraction(3, 2), Fraction(1, 2))


# --- multimaximal_coupling ---------------------------------------------------

def test_nested_coupling_frozen_example():
    c = multimaximal_coupling(view([frac("1/5"), frac("1/2"), frac("9/10")]))
    assert c.pmf == {
        (1, 1, 1): frac("1/5"),
        (-1, 1, 1): frac("3/10"),
        (-1, -1, 1): frac("2/5"),
        (-1, -1, -1): frac("1/10"),
    }


def test_single_variable_coupling_is_itself():
    c = multimaximal_coupling(view([frac("3/10")]))
    assert c.pmf == {(1,): frac("3/10"), (-1,): frac("7/10")}


def test_deterministic_components():
    c = multimaximal_coupling(view([Fraction(1), Fraction(1), frac("3/10")]))
    assert c.pmf == {(1, 1, 1): frac("3/10"), (1, 1, -1): frac("7/10")}


def test_empty_view_rejected():
    with pytest.raises(ValueError):
        multimaximal_coupling(ConnectionView(content="q", entries=()))


def test_support_size_bound():
    rng = random.Random(3)
    for _ in range(100):
        m = rng.randint(1, 5)
        ps = [Fraction(rng.randint(0, 20), 20) for _ in range(m)]
        c = multimaximal_coupling(view(ps))
        assert len(c.pmf) <= m + 1
        assert sum(c.pmf.values()) == 1


def test_permutation_equivariance():
    rng = random.Random(11)
    for _ in range(30):
        m = rng.randint(2, 5)
        ps = [Fraction(rng.randint(0, 30), 30) for _ in range(m)]
        perm = list(range(m))
        rng.shuffle(perm)
        base = multimaximal_coupling(view(ps))
        permuted = multimaximal_coupling(view([ps[i] for i in perm]))
        remapped = {tuple(o[perm.index(k)] for k in range(m)): p
                    for o, p in permuted.pmf.items()}
        assert remapped == base.pmf


def test_uniqueness_small_vectors():
    rng = random.Random(5)
    for _ in range(20):
        m = rng.randint(2, 4)
        ps = [Fraction(rng.randint(0, 10), 10) for _ in range(m)]
        c = multimaximal_coupling(view(ps))
        assert lp_coupling_is_unique(ps, c)


# --- verify_coupling ---------------------------------------------------------

def test_verify_accepts_construction():
    v = view([frac("1/5"), frac("1/2"), frac("9/10")])
    audit = verify_coupling(multimaximal_coupling(v), v)
    assert audit.ok()
    assert all(p.achieved == p.bound for p in audit.pairs)
    assert all(r == 0 for r in audit.residuals)


def test_verify_flags_product_coupling():
    v = view([frac("1/2"), frac("1/2")])
    product = Coupling(content="q", contexts=("c1", "c2"), pmf={
        (1, 1): frac("1/4"), (1, -1): frac("1/4"),
        (-1, 1): frac("1/4"), (-1, -1): frac("1/4"),
    })
    audit = verify_coupling(product, v)
    assert not audit.ok()
    assert audit.pairs[0].achieved == frac("1/2")
    assert audit.pairs[0].bound == 1


def test_verify_flags_marginal_residual():
    v = view([frac("1/2")])
    skew = Coupling(content="q", contexts=("c1",),
                    pmf={(1,): frac("2/5"), (-1,): frac("3/5")})
    audit = verify_coupling(skew, v)
    assert audit.residuals == (frac("1/10"),)


def test_verify_shape_mismatch():
    v = view([frac("1/2"), frac("1/2")])
    c = multimaximal_coupling(view([frac("1/2")]))
    with pytest.raises(ValueError):
        verify_coupling(c, v)


# --- restrict_coupling -------------------------------------------------------

def test_restrict_frozen_example():
    c = multimaximal_coupling(view([frac("1/5"), frac("1/2"), frac("9/10")]))
    r = restrict_coupling(c, [0, 2])
    assert r.pmf == {(1, 1): frac("1/5"), (-1, 1): frac("7/10"),
                     (-1, -1): frac("1/10")}
    assert r.contexts == ("c1", "c3")


def test_restrict_identity_and_singleton():
    c = multimaximal_coupling(view([frac("1/5"), frac("9/10")]))
    assert restrict_coupling(c, [0, 1]).pmf == c.pmf
    single = multimaximal_coupling(view([frac("3/10")]))
    assert restrict_coupling(single, [0]).pmf == single.pmf


def test_restrict_empty_subset():
    c = multimaximal_coupling(view([frac("1/2")]))
    with pytest.raises(ValueError):
        restrict_coupling(c, [])


def test_subcoupling_closure_random():
    rng = random.Random(13)
    for _ in range(50):
        m = rng.randint(1, 5)
        ps = [Fraction(rng.randint(0, 24), 24) for _ in range(m)]
        full = multimaximal_coupling(view(ps))
        for size in range(1, m + 1):
            for subset in itertools.combinations(range(m), size):
                direct = multimaximal_coupling(
                    view([ps[i] for i in subset]))
                restricted = restrict_coupling(full, subset)
                assert restricted.pmf == direct.pmf
