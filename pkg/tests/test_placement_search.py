import math

from gwcache.placement_search import (
    N_PACKETS,
    coded_placement_worst_case,
    decodable,
    distinct_demands,
    min_code_dim,
    search_uncoded,
    subspaces_by_dim,
    unit,
    wanted_units,
)


def gaussian_binomial(n, k, q=2):
    num = math.prod(q ** (n - i) - 1 for i in range(k))
    den = math.prod(q ** (i + 1) - 1 for i in range(k))
    return num // den


def test_subspace_counts():
    layers = subspaces_by_dim()
    assert [len(layer) for layer in layers] == [gaussian_binomial(N_PACKETS, k) for k in range(N_PACKETS + 1)]
    assert all(len(S) == 2**k for k, layer in enumerate(layers) for S in layer)


def test_demands():
    demands = distinct_demands()
    assert len(demands) == 6
    assert ("12", "13", "23") in demands


def test_decodable_basic():
    code = frozenset({0, unit("12", 1)})
    assert decodable(code, frozenset({0}), [unit("12", 1)])
    assert not decodable(code, frozenset({0}), [unit("12", 2)])


def test_no_cache_needs_everything_wanted():
    # without side information the code must carry all wanted packets
    assert min_code_dim([], [], ("12", "13", "23")) == 6
    assert len(wanted_units("12", "13")) == 4


def test_uncoded_placements_need_five():
    result = search_uncoded()
    assert len(result.table) == 36
    assert result.best_worst_case == 5
    assert result.best_worst_case >= math.ceil(7 * 2 / 3)


def test_coded_placement_needs_four():
    assert coded_placement_worst_case() == 4
