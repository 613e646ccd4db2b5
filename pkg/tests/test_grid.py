import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import naive_adjacency

from srah.cost import compute_cost_field
from srah.errors import ConfigurationError, ContractViolation
from srah.grid import (
    Coord,
    Grid,
    blocked_adjacency8,
    is_free,
    manhattan,
    neighbors4,
    render_ascii,
    sample_grid,
    set_blocked,
)

coords = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


def test_sample_grid_paper_density():
    g = sample_grid(15, 0.20, 11)
    assert g.blocked_count == 45 == g.static_count
    assert len(g.blocked) == 225
    assert g.start == (0, 0) and g.goal == (14, 14)
    assert is_free(g, g.start) and is_free(g, g.goal)


@pytest.mark.parametrize("rho,expected", [(0.10, 23), (0.15, 34), (0.20, 45), (0.25, 56), (0.30, 68)])
def test_sample_grid_exact_counts(rho, expected):
    # 0.10*225 = 22.5 rounds half up; 0.15*225 = 33.75; 0.25*225 = 56.25; 0.30*225 = 67.5
    for seed in range(20):
        assert sample_grid(15, rho, seed).blocked_count == expected


def test_sample_grid_zero_density():
    g = sample_grid(5, 0.0, 7)
    assert g.blocked_count == 0


def test_sample_grid_deterministic():
    assert sample_grid(15, 0.20, 3) == sample_grid(15, 0.20, 3)
    assert sample_grid(15, 0.20, 3).blocked != sample_grid(15, 0.20, 4).blocked


def test_sample_grid_is_roughly_uniform():
    counts = [0] * 225
    for seed in range(2000):
        for i, b in enumerate(sample_grid(15, 0.2, seed).blocked):
            counts[i] += b
    assert counts[0] == counts[224] == 0
    # each eligible cell is blocked with probability 45/223
    expected = 2000 * 45 / 223
    assert all(abs(c - expected) < 0.25 * expected for c in counts[1:224])


@pytest.mark.parametrize("n,rho", [(1, 0.0), (5, -0.1), (5, 1.5), (3, 1.0)])
def test_sample_grid_rejects_bad_config(n, rho):
    with pytest.raises(ConfigurationError):
        sample_grid(n, rho, 0)


def test_full_density_except_endpoints():
    g = sample_grid(4, 14 / 16, 1)
    assert g.blocked_count == 14


def test_is_free_and_bounds():
    g = Grid.from_rows(["..", ".."])
    assert all(is_free(g, c) for c in g.cells())
    g = Grid.from_rows([".#", ".."])
    assert not is_free(g, Coord(0, 1))
    with pytest.raises(ContractViolation):
        is_free(g, Coord(2, 0))


def test_neighbors4_order_and_clipping():
    g = Grid.from_rows(["." * 5] * 5)
    assert neighbors4(g, Coord(0, 0)) == [(1, 0), (0, 1)]
    assert neighbors4(g, Coord(2, 2)) == [(1, 2), (3, 2), (2, 1), (2, 3)]
    walled = Grid.from_rows(["S#...", "#....", ".....", ".....", "....."])
    assert neighbors4(walled, Coord(0, 0)) == []
    boxed = Grid.from_rows([".....", "..#..", ".#.#.", "..#..", "....."])
    assert neighbors4(boxed, Coord(2, 2)) == []


def test_blocked_adjacency8_examples():
    g = Grid.from_rows([".....", ".#.#.", ".....", ".#...", "....."])
    # (2,2) sees diagonals (1,1), (1,3), (3,1)
    assert blocked_adjacency8(g, Coord(2, 2)) == 3
    empty = Grid.from_rows(["...", "...", "..."])
    assert all(blocked_adjacency8(empty, c) == 0 for c in empty.cells())


def test_border_positions_do_not_count():
    g = Grid.from_rows(["...", "...", "..."])
    assert blocked_adjacency8(g, Coord(0, 0)) == 0
    g = Grid.from_rows([".#.", "##.", "..."])
    assert blocked_adjacency8(g, Coord(0, 0)) == 3


def test_adjacency_matches_naive_oracle():
    for seed in range(100):
        g = sample_grid(8, 0.3, seed)
        for c in g.cells():
            assert blocked_adjacency8(g, c) == naive_adjacency(g, *c)


@given(coords, coords)
def test_manhattan_properties(a, b):
    assert manhattan(a, b) == manhattan(b, a) >= 0
    assert manhattan(a, a) == 0


def test_manhattan_examples():
    assert manhattan(Coord(0, 0), Coord(0, 0)) == 0
    assert manhattan(Coord(0, 0), Coord(3, 4)) == 7


def test_set_blocked():
    g = sample_grid(6, 0.0, 0)
    before = g.blocked_count
    set_blocked(g, Coord(2, 3))
    assert not is_free(g, Coord(2, 3))
    assert g.blocked_count == before + 1
    snapshot = g.copy()
    set_blocked(g, Coord(2, 3))
    assert g == snapshot
    with pytest.raises(ContractViolation):
        set_blocked(g, g.goal)


def test_copy_is_independent():
    g = sample_grid(6, 0.2, 1)
    h = g.copy()
    set_blocked(h, Coord(3, 3))
    assert g.blocked != h.blocked or g.blocked[3 * 6 + 3]


def test_grid_rejects_blocked_endpoints():
    with pytest.raises(ContractViolation):
        Grid.from_rows(["#.", ".."])
    with pytest.raises(ContractViolation):
        Grid(n=2, blocked=[False] * 3, start=(0, 0), goal=(1, 1), static_count=0)


def test_render_empty_2x2():
    assert render_ascii(Grid.from_rows(["..", ".."])) == "S.\n.G"


def test_render_glyphs():
    # risk by hand: (1,0), (2,0), (2,2) each touch two obstacles; row 3 touches one
    g = Grid.from_rows(["...#", "....", ".#..", "...."])
    set_blocked(g, Coord(1, 1))
    path = [Coord(0, 0), Coord(0, 1), Coord(0, 2), Coord(1, 2), Coord(1, 3), Coord(2, 3), Coord(3, 3)]
    out = render_ascii(g, path, compute_cost_field(g))
    assert out.splitlines() == [
        "S**#",
        "oD**",
        "o#o*",
        "...G",
    ]


def test_render_shape_and_path_marks():
    g = sample_grid(15, 0.2, 5)
    from srah.planners import bfs_shortest

    out = bfs_shortest(g, g.start, g.goal)
    text = render_ascii(g, out.path.cells if out.path else None, compute_cost_field(g))
    lines = text.split("\n")
    assert len(lines) == 15 and all(len(line) == 15 for line in lines)
    if out.path:
        assert text.count("*") == len(out.path) - 2


def test_render_rejects_out_of_bounds_path():
    g = Grid.from_rows(["..", ".."])
    with pytest.raises(ContractViolation):
        render_ascii(g, [Coord(0, 0), Coord(0, 2)])
