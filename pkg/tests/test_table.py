import numpy as np
import pytest

from graphtab.harness import flatten_features
from graphtab.table import (
    assemble,
    export_table,
    import_table,
    standardize,
)

from conftest import random_graph


def make_blocks(n=12, d=10, k=16, C=3, seed=40):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.3, rng)
    X = rng.standard_normal((n, d))
    flat = flatten_features(g, X, k=min(k, n - 2), c_options=(C,))
    return X, flat


def test_full_width():
    X, flat = make_blocks(n=30, d=10, k=16, C=3)
    table = assemble(X, flat.embedding, flat.chars, flat.banks[3])
    assert table.width == 10 + 16 + 2 + 40
    assert [g.tag for g in table.groups[:4]] == ["raw", "lap", "deg", "pagerank"]
    assert [g.tag for g in table.groups[4:]] == [
        "nbr(0,3)",
        "nbr(1,2)",
        "nbr(2,1)",
        "nbr(3,0)",
    ]


def test_raw_only_mask_is_identity():
    X, flat = make_blocks()
    table = assemble(X, mask=("raw",))
    np.testing.assert_array_equal(table.values, X)
    assert len(table.groups) == 1
    assert (table.groups[0].tag, table.groups[0].start, table.groups[0].stop) == (
        "raw",
        0,
        X.shape[1],
    )


def test_raw_nbr_width():
    rng = np.random.default_rng(41)
    g = random_graph(20, 0.2, rng)
    X = rng.standard_normal((20, 25))
    flat = flatten_features(g, X, k=4, c_options=(1,))
    table = assemble(X, bank=flat.banks[1], mask=("raw", "nbr"))
    assert table.width == 25 + 50


def test_empty_mask_and_unknown_group():
    X, flat = make_blocks()
    with pytest.raises(ValueError):
        assemble(X, mask=())
    with pytest.raises(ValueError):
        assemble(X, mask=("raw", "bogus"))


def test_missing_block_for_mask():
    X, _ = make_blocks()
    with pytest.raises(ValueError):
        assemble(X, mask=("raw", "lap"))


def test_row_mismatch():
    X, flat = make_blocks()
    with pytest.raises(ValueError):
        assemble(X[:-1], flat.embedding, flat.chars, flat.banks[3])


def test_standardize_disabled_is_identity():
    X, flat = make_blocks()
    table = assemble(X, mask=("raw",))
    out = standardize(table, enabled=False)
    assert out is table


def test_standardize_population_zscore():
    table = assemble(np.array([[0.0], [2.0]]), mask=("raw",))
    out = standardize(table, enabled=True)
    np.testing.assert_allclose(out.values, [[-1.0], [1.0]])


def test_standardize_constant_column_unchanged():
    table = assemble(np.array([[3.0, 0.0], [3.0, 2.0]]), mask=("raw",))
    out = standardize(table, enabled=True)
    np.testing.assert_allclose(out.values[:, 0], [3.0, 3.0])


def test_export_import_round_trip(tmp_path):
    X, flat = make_blocks(n=15, d=4, C=2)
    table = assemble(X, flat.embedding, flat.chars, flat.banks[2])
    path = tmp_path / "t.csv"
    export_table(table, path)
    back = import_table(path)
    np.testing.assert_array_equal(back.values, table.values)
    assert back.groups == table.groups


def test_import_missing_header(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1.0,2.0\n3.0,4.0\n")
    with pytest.raises(ValueError):
        import_table(p)
    p.write_text("")
    with pytest.raises(ValueError):
        import_table(p)


def test_import_width_mismatch(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("raw_0,raw_1\n1.0\n")
    with pytest.raises(ValueError, match=":2:"):
        import_table(p)


def test_import_hand_written_groups(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("raw_0,raw_1,deg\n1.0,2.0,3.0\n4.0,5.0,6.0\n")
    table = import_table(p)
    spans = [(g.tag, g.start, g.stop) for g in table.groups]
    assert spans == [("raw", 0, 2), ("deg", 2, 3)]


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        assemble(np.array([[np.nan]]), mask=("raw",))
