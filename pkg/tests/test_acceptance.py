"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -s`."""

import contextlib
import time
from itertools import combinations_with_replacement

import numpy as np
import pytest

from graphtab import harness
from graphtab.backend import BackendProtocolError, InContextTask, predict_external
from graphtab.graph import from_edges
from graphtab.metrics import auprc, auroc
from graphtab.spectral import (
    count_zero_eigenvalues,
    dense_laplacian,
    laplacian_embeddings,
    laplacian_matvec,
    laplacian_operator,
)
from graphtab.structural import pagerank
from graphtab.synth import make_dataset
from graphtab.wavelet import apply_wavelet, beta_coefficient, wavelet_bank

from conftest import random_graph


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


def test_wavelet_partition_identity():
    with criterion("wavelet partition identity"):
        rng = np.random.default_rng(100)
        t0 = time.perf_counter()
        for _ in range(100):
            n = int(rng.integers(5, 201))
            g = random_graph(n, rng.choice([1.5, 4.0]) / n, rng)
            X = rng.standard_normal((n, int(rng.integers(1, 6))))
            for C in (1, 2, 3):
                bank = wavelet_bank(g, X, C)
                np.testing.assert_allclose(
                    sum(bank.blocks), (C + 1) / 2 * X, rtol=1e-10, atol=1e-12
                )
        assert time.perf_counter() - t0 < 10.0


def test_wavelet_psd_and_dense_equivalence():
    with criterion("wavelet PSD + dense equivalence"):
        rng = np.random.default_rng(101)
        t0 = time.perf_counter()
        for _ in range(20):
            n = int(rng.integers(5, 101))
            g = random_graph(n, rng.choice([2.0, 6.0]) / n, rng)
            L = dense_laplacian(g)
            X = rng.standard_normal((n, 3))
            C = int(rng.integers(1, 4))
            for p in range(C + 1):
                q = C - p
                dense_filter = beta_coefficient(p, q) * (
                    np.linalg.matrix_power(L / 2, p)
                    @ np.linalg.matrix_power(np.eye(n) - L / 2, q)
                )
                vals = np.linalg.eigvalsh(0.5 * (dense_filter + dense_filter.T))
                assert vals.min() >= -1e-10
                np.testing.assert_allclose(
                    apply_wavelet(g, X, p, q), dense_filter @ X, atol=1e-9
                )
        assert time.perf_counter() - t0 < 30.0


def test_spectral_correctness():
    with criterion("spectral correctness vs dense oracle"):
        rng = np.random.default_rng(102)
        t0 = time.perf_counter()
        for trial in range(50):
            n = int(rng.integers(10, 501))
            # sparse probabilities keep a healthy share of disconnected graphs
            g = random_graph(n, rng.choice([1.0, 2.0, 8.0]) / n, rng)
            k = int(rng.integers(1, 17))
            emb = laplacian_embeddings(g, k, method="iterative", seed=trial)
            dense_vals = np.linalg.eigvalsh(dense_laplacian(g))

            # discarded zero-pair count equals the component count of the
            # edge-bearing subgraph (= dense zero multiplicity)
            assert emb.n_zero_discarded == count_zero_eigenvalues(g)
            assert emb.n_zero_discarded == int((dense_vals <= 1e-8).sum())

            live = emb.eigenvalues > 0
            assert np.all(emb.eigenvalues[live] > 1e-8)
            assert np.all(emb.eigenvalues[live] <= 2 + 1e-8)

            expected = dense_vals[dense_vals > 1e-8][: int(live.sum())]
            np.testing.assert_allclose(emb.eigenvalues[live], expected, atol=1e-6)

            op = laplacian_operator(g)
            for j in np.flatnonzero(live):
                u, lam = emb.vectors[:, j], emb.eigenvalues[j]
                assert (
                    np.linalg.norm(laplacian_matvec(op, u) - lam * u)
                    <= 1e-6 * np.linalg.norm(u)
                )
        assert time.perf_counter() - t0 < 60.0


def test_pagerank():
    with criterion("pagerank properties and star oracle"):
        rng = np.random.default_rng(103)
        for _ in range(10):
            g = random_graph(int(rng.integers(5, 150)), 0.08, rng)
            assert abs(pagerank(g).sum() - 1.0) <= 1e-8
        cyc = from_edges([(i, (i + 1) % 12) for i in range(12)], 12)
        np.testing.assert_allclose(pagerank(cyc), np.full(12, 1 / 12), atol=1e-10)
        k7 = from_edges([(i, j) for i in range(7) for j in range(i + 1, 7)], 7)
        np.testing.assert_allclose(pagerank(k7), np.full(7, 1 / 7), atol=1e-10)

        star = from_edges([(0, i) for i in range(1, 4)], 4)
        # dense power-iteration oracle on the 4x4 transition matrix
        M = np.zeros((4, 4))
        M[1:, 0] = 1.0 / 3.0
        M[0, 1:] = 1.0
        x = np.full(4, 0.25)
        for _ in range(2000):
            x = 0.85 * (M @ x) + 0.15 / 4
        np.testing.assert_allclose(pagerank(star), x / x.sum(), atol=1e-8)


def _oracle_auroc_batch(S, Y):
    pos = Y == 1
    n_pos = pos.sum(axis=1)
    n_neg = (~pos).sum(axis=1)
    diff = S[:, :, None] - S[:, None, :]
    pair = pos[:, :, None] & ~pos[:, None, :]
    ordered = ((diff > 0) & pair).sum(axis=(1, 2)) + 0.5 * ((diff == 0) & pair).sum(
        axis=(1, 2)
    )
    return ordered / (n_pos * n_neg)


def _oracle_auprc_batch(S, Y, grid_desc):
    pos = Y == 1
    n_pos = pos.sum(axis=1)
    pred = S[:, None, :] >= grid_desc[None, :, None]  # (B, T, L)
    tp = (pred & pos[:, None, :]).sum(axis=2).astype(float)
    pp = pred.sum(axis=2)
    recall = tp / n_pos[:, None]
    precision = np.where(pp > 0, tp / np.maximum(pp, 1), 0.0)
    delta = np.diff(recall, axis=1, prepend=0.0)
    return (delta * precision).sum(axis=1)


def test_metric_oracle_equivalence():
    # Both metrics are permutation invariant (asserted in the unit suite), so
    # enumerating multisets of (score, label) cells covers every assignment
    # of length <= 8 over the 9-value grid.
    with criterion("metric oracle equivalence (exhaustive <= 8)"):
        grid = np.arange(1, 10) / 10.0
        grid_desc = grid[::-1].copy()
        cells_s = np.tile(grid, 2)
        cells_y = np.repeat([0, 1], 9)
        checked = 0
        for L in range(2, 9):
            combos = np.fromiter(
                (c for combo in combinations_with_replacement(range(18), L) for c in combo),
                dtype=np.int64,
            ).reshape(-1, L)
            for lo in range(0, len(combos), 200_000):
                batch = combos[lo : lo + 200_000]
                S = cells_s[batch]
                Y = cells_y[batch]
                n_pos = Y.sum(axis=1)
                both = (n_pos > 0) & (n_pos < L)
                any_pos = n_pos > 0

                roc_oracle = np.full(len(batch), np.nan)
                roc_oracle[both] = _oracle_auroc_batch(S[both], Y[both])
                ap_oracle = np.full(len(batch), np.nan)
                ap_oracle[any_pos] = _oracle_auprc_batch(S[any_pos], Y[any_pos], grid_desc)

                for i in range(len(batch)):
                    if both[i]:
                        assert abs(auroc(S[i], Y[i]) - roc_oracle[i]) <= 1e-12
                    if any_pos[i]:
                        assert abs(auprc(S[i], Y[i]) - ap_oracle[i]) <= 1e-12
                        checked += 1
        assert checked > 1_000_000


def test_end_to_end_separation():
    with criterion("end-to-end ablation separation"):
        t0 = time.perf_counter()
        dataset = make_dataset(
            n=1000, d=10, n_contextual=25, n_structural=25, clique_size=5,
            candidate_pool=50, seed=0,
        )
        seeds = tuple(range(10))
        full = harness.run_experiment(
            harness.ExperimentConfig(seeds=seeds, k=16, C="auto"), dataset=dataset
        )
        raw = harness.run_experiment(
            harness.ExperimentConfig(seeds=seeds, k=16, C="1", mask=("raw",)),
            dataset=dataset,
        )
        assert all(not r.error for r in full.results + raw.results)
        gap = full.aggregate()["auroc"][0] - raw.aggregate()["auroc"][0]
        assert gap >= 0.05, f"full-vs-raw AUROC gap {gap:.4f} below 0.05"
        assert time.perf_counter() - t0 < 60.0


def test_backend_protocol(tmp_path):
    with criterion("backend protocol round-trip and error doubles"):
        import sys
        import textwrap

        def script(body, name):
            p = tmp_path / name
            p.write_text(textwrap.dedent(body))
            return f"{sys.executable} {p} {{train_x}} {{train_y}} {{test_x}} {{out}}"

        task = InContextTask(
            np.array([[0.0], [1.0]]), np.array([0, 1]), np.array([[0.2], [0.4], [0.9]])
        )
        echo = script(
            """
            import sys
            u = sum(1 for _ in open(sys.argv[3])) - 1
            open(sys.argv[4], "w").write("0.5\\n" * u)
            """,
            "echo.py",
        )
        assert predict_external(task, echo).tolist() == [0.5, 0.5, 0.5]

        short = script(
            """
            import sys
            open(sys.argv[4], "w").write("0.5\\n0.5\\n")
            """,
            "short.py",
        )
        with pytest.raises(BackendProtocolError, match="expected 3"):
            predict_external(task, short)

        out_of_range = script(
            """
            import sys
            open(sys.argv[4], "w").write("0.5\\n1.7\\n0.5\\n")
            """,
            "range.py",
        )
        with pytest.raises(BackendProtocolError, match="line 2"):
            predict_external(task, out_of_range)
