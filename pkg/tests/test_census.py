import io
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticepc import census as cs

from oracles import polymer_counts, window_edge_subsets


def test_one_dim_tree_counts():
    c = cs.enumerate_polymers("trees", 1, 1, max_vertices=4)
    assert c.counts == {(1, 0): 1, (2, 1): 2, (3, 2): 3, (4, 3): 4}


def test_square_neighbours():
    assert cs.enumerate_polymers("trees", 2, 1, max_vertices=2).by_vertices()[2] == 8


def test_animals_include_triangles():
    a = cs.enumerate_polymers("animals", 2, 1, max_vertices=3)
    t = cs.enumerate_polymers("trees", 2, 1, max_vertices=3)
    assert a.counts[(3, 3)] > 0
    assert a.by_vertices()[3] > t.by_vertices()[3]


@pytest.mark.parametrize("model", ["trees", "animals"])
def test_window_edge_subset_oracle(model):
    # literal brute force over every edge subset with <= 3 edges of a 5x5 window
    assert cs.enumerate_polymers(model, 2, 1, max_vertices=3).counts == {
        k: v for k, v in window_edge_subsets(model, 2, 1, 3, 2).items() if k[0] <= 3
    }


@pytest.mark.parametrize("model", ["trees", "animals"])
@pytest.mark.parametrize("max_vertices", [2, 3, 4, 5])
def test_square_lattice_oracle(model, max_vertices):
    got = cs.enumerate_polymers(model, 2, 1, max_vertices=max_vertices).counts
    assert got == polymer_counts(model, 2, 1, max_vertices)


@pytest.mark.parametrize(
    "model, d, L, N, norm",
    [("trees", 1, 3, 5, "sup"), ("animals", 1, 2, 5, "sup"), ("trees", 3, 1, 4, "sup"), ("animals", 2, 2, 3, "l2")],
)
def test_other_lattices_oracle(model, d, L, N, norm):
    got = cs.enumerate_polymers(model, d, L, norm=norm, max_vertices=N).counts
    assert got == polymer_counts(model, d, L, N, norm="euclidean" if norm == "l2" else norm)


def test_required_pair_oracle():
    for model in ("trees", "animals"):
        for x in ((1, 0), (2, 1), (3, 0)):
            got = cs.enumerate_polymers(model, 2, 1, required=[(0, 0), x], max_vertices=4).counts
            assert got == polymer_counts(model, 2, 1, 4, required=[(0, 0), x])


def test_census_invariants():
    for model in ("trees", "animals"):
        c = cs.enumerate_polymers(model, 2, 1, max_vertices=5)
        assert c.counts[(1, 0)] == 1
        for n, k in c.counts:
            if model == "trees":
                assert k == n - 1
            else:
                assert n - 1 <= k <= c.lambda_size * n / 2


def test_one_point_series_pins():
    g = cs.one_point_series(cs.enumerate_polymers("trees", 1, 1, max_vertices=4))
    assert g.coefficients == (1, 1, Fraction(3, 4), Fraction(1, 2))
    assert g.truncation_order == 3
    for d, L in ((1, 2), (2, 1), (3, 1), (2, 2)):
        for model in ("trees", "animals"):
            s = cs.one_point_series(cs.enumerate_polymers(model, d, L, max_vertices=3))
            assert s.coefficient(0) == 1 and s.coefficient(1) == 1
            assert all(c >= 0 for c in s.coefficients)


def test_series_evaluation():
    g = cs.one_point_series(cs.enumerate_polymers("trees", 1, 1, max_vertices=4))
    assert g(0.5) == pytest.approx(1 + 0.5 + 0.75 / 4 + 0.5 / 8)
    assert g.exact(Fraction(1, 2)) == Fraction(1) + Fraction(1, 2) + Fraction(3, 16) + Fraction(1, 16)
    assert g.derivative(0.5) == pytest.approx(1 + 1.5 * 0.5 + 1.5 * 0.25)


def test_two_point_one_dim():
    tau = cs.two_point_series("trees", 1, 1, x=(1,), max_vertices=6)
    assert tau.coefficient(0) == 0
    for n in range(2, 7):
        assert tau.coefficient(n - 1) == Fraction(n - 1, 2 ** (n - 1))


def test_two_point_far_point_is_zero():
    tau = cs.two_point_series("animals", 2, 1, x=(5, 0), max_vertices=4)
    assert all(c == 0 for c in tau.coefficients)


def test_two_point_at_origin_is_one_point():
    g = cs.one_point_series(cs.enumerate_polymers("trees", 2, 1, max_vertices=4))
    assert cs.two_point_series("trees", 2, 1, x=(0, 0), max_vertices=4) == g


def test_two_point_symmetry():
    g, tau = cs.two_point_table("animals", 2, 1, max_vertices=4)
    for x, s in tau.items():
        neg = tuple(-c for c in x)
        swap = (x[1], x[0])
        assert tau[neg].coefficients == s.coefficients
        assert tau[swap].coefficients == s.coefficients


def test_two_point_table_matches_single_series():
    g, tau = cs.two_point_table("trees", 2, 1, max_vertices=4)
    for x in ((1, 0), (1, 1), (2, 1), (3, 3)):
        assert tau[x].coefficients == cs.two_point_series("trees", 2, 1, x=x, max_vertices=4).coefficients
    assert max(max(abs(c) for c in x) for x in tau) == 3


def test_chi_identity():
    for model in ("trees", "animals"):
        chi = cs.chi_series(model, 1, 1, max_vertices=8)
        g, tau = cs.two_point_table(model, 1, 1, max_vertices=8)
        for k in range(len(chi)):
            total = g.coefficient(k) + sum(s.coefficient(k) for s in tau.values())
            assert chi.coefficient(k) == total


def test_chi_closed_form_and_models_agree_in_one_dim():
    chi_t = cs.chi_series("trees", 1, 1, max_vertices=15)
    chi_a = cs.chi_series("animals", 1, 1, max_vertices=15)
    assert chi_t.coefficients == chi_a.coefficients
    assert all(chi_t.coefficient(k) == Fraction((k + 1) ** 2, 2**k) for k in range(15))


def test_tn_and_supermultiplicativity():
    tn = cs.tn_table(cs.enumerate_polymers("trees", 1, 1, max_vertices=10))
    assert all(tn[n] == 1 for n in range(1, 11))
    for d, L, N in ((2, 1, 6), (1, 2, 7), (3, 1, 4)):
        tn = cs.tn_table(cs.enumerate_polymers("trees", d, L, max_vertices=N))
        assert tn[1] == 1
        assert all(tn[a + b] >= tn[a] * tn[b] for a in range(1, N) for b in range(1, N - a + 1))
    with pytest.raises(IndexError):
        tn[0]


def test_growth_estimates():
    est = cs.growth_pc_estimate(cs.tn_table(cs.enumerate_polymers("trees", 1, 1, max_vertices=40)), 2)
    assert all(e > 0 for e in est)
    # (n^2 / 2^(n-1))^(-1/n) -> 2
    assert abs(est[-1] - 2) < abs(est[10] - 2) < abs(est[2] - 2)
    est2 = cs.growth_pc_estimate(cs.tn_table(cs.enumerate_polymers("trees", 2, 1, max_vertices=6)), 8)
    assert all(a > b for a, b in zip(est2[1:], est2[2:]))
    assert est2[-1] < 1


def test_budget_error():
    with pytest.raises(cs.CensusBudgetError) as info:
        cs.enumerate_polymers("animals", 2, 1, max_vertices=6, budget=1000)
    assert info.value.parameter == "max_vertices"


def test_enumerate_rejects_bad_input():
    with pytest.raises(ValueError):
        cs.enumerate_polymers("trees", 2, 1, required=[(0,)], max_vertices=3)
    with pytest.raises(ValueError):
        cs.enumerate_polymers("walks", 2, 1, max_vertices=3)
    with pytest.raises(ValueError):
        cs.one_point_series(cs.enumerate_polymers("trees", 1, 1, required=[(0,), (1,)], max_vertices=3))


def test_census_round_trip_file(tmp_path):
    c = cs.enumerate_polymers("animals", 2, 1, required=[(0, 0), (1, 1)], max_vertices=4)
    path = tmp_path / "census.txt"
    cs.write_census(c, path)
    assert cs.read_census(path) == c
    text = path.read_text()
    assert text.startswith("# latticepc polymer census\nformat_version=1\n")
    assert "required=0,0;1,1\n" in text


@settings(max_examples=50, deadline=None)
@given(
    model=st.sampled_from(["trees", "animals"]),
    d=st.integers(1, 3),
    N=st.integers(1, 9),
    counts=st.dictionaries(st.tuples(st.integers(1, 9), st.integers(0, 30)), st.integers(0, 10**30), max_size=12),
)
def test_census_round_trip_text(model, d, N, counts):
    c = cs.PolymerCensus(model, d, 1, "sup", ((0,) * d,), N, counts)
    assert cs.loads_census(cs.dumps_census(c)) == c


@pytest.mark.parametrize(
    "text",
    [
        "",
        "format_version=1\nmodel=trees\n",
        "format_version=2\nmodel=trees\nd=1\nL=1\nnorm=sup\nrequired=0\nmax_vertices=2\nn_vertices,n_edges,count\n",
        "format_version=1\nmodel=trees\nd=1\nL=1\nnorm=sup\nrequired=0\nmax_vertices=2\nn_vertices,n_edges,count\n1,0\n",
        "format_version=1\nmodel=trees\nd=1\nL=1\nnorm=sup\nrequired=0\nmax_vertices=2\nn_vertices,n_edges,count\n1,0,1\n1,0,1\n",
        "garbage\n",
    ],
)
def test_census_format_errors(text):
    with pytest.raises(cs.CensusFormatError):
        cs.loads_census(text)


def test_read_from_stream():
    c = cs.enumerate_polymers("trees", 1, 1, max_vertices=3)
    assert cs.read_census(io.StringIO(cs.dumps_census(c))) == c
