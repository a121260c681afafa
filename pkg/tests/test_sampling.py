import numpy as np
import pytest

from graphon_spectra.graphon import (
    GraphonSignal,
    StepGraphon,
    cut_norm,
    graphon_from_graph,
    lift_signal,
    uniform_measures,
)
from graphon_spectra.gft import signal_distance
from graphon_spectra.sampling import (
    make_rng,
    sample_fixed_blocks,
    sample_w_random,
    sampled_signal,
    task_seed,
)


class TestWRandom:
    def test_complete_graph(self):
        rec = sample_w_random(StepGraphon.constant(1.0), 30, seed=4)
        assert rec.graph.edge_count == 30 * 29 // 2

    def test_empty_graph(self):
        rec = sample_w_random(StepGraphon.constant(0.0), 30, seed=4)
        assert rec.graph.edge_count == 0

    def test_half_density(self):
        for seed in range(5):
            rec = sample_w_random(StepGraphon.constant(0.5), 2000, seed)
            assert abs(rec.graph.density() - 0.5) <= 0.01

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_density_concentration(self, p):
        n = 400
        pairs = n * (n - 1) / 2
        for seed in range(4):
            d = sample_w_random(StepGraphon.constant(p), n, seed).graph.density()
            assert abs(d - p) <= 4 * np.sqrt(p * (1 - p) / pairs)

    def test_latents_sorted(self, s3):
        rec = sample_w_random(s3.graphon, 300, 9)
        assert np.all(np.diff(rec.latents) >= 0)
        assert np.array_equal(rec.cells, s3.graphon.cell_of(rec.latents))

    def test_deterministic(self, s3):
        a = sample_w_random(s3.graphon, 250, 17)
        b = sample_w_random(s3.graphon, 250, 17)
        assert np.array_equal(a.graph.adjacency, b.graph.adjacency)
        assert np.array_equal(a.latents, b.latents)
        c = sample_w_random(s3.graphon, 250, 18)
        assert not np.array_equal(a.graph.adjacency, c.graph.adjacency)

    def test_stream_order(self, s3):
        # independent replay: latents first, then one uniform per pair in row-major i<j order
        n, seed = 40, 123
        rec = sample_w_random(s3.graphon, n, seed)
        gen = make_rng(seed)
        lat = np.sort(gen.random(n))
        cells = s3.graphon.cell_of(lat)
        adj = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            for j in range(i + 1, n):
                if gen.random() < s3.graphon.values[cells[i], cells[j]]:
                    adj[i, j] = adj[j, i] = 1
        assert np.array_equal(rec.graph.adjacency, adj)

    def test_rejects_empty(self, s3):
        with pytest.raises(ValueError):
            sample_w_random(s3.graphon, 0, 1)


class TestFixedBlocks:
    def test_single_block_complete(self):
        rec = sample_fixed_blocks([[1.0]], 7, seed=0)
        assert rec.graph.edge_count == 21

    def test_bipartite(self):
        rec = sample_fixed_blocks([[0, 1], [1, 0]], 3, seed=0)
        expected = np.kron([[0, 1], [1, 0]], np.ones((3, 3), dtype=int))
        assert np.array_equal(rec.graph.adjacency, expected)

    def test_block_major_cells(self, s3):
        rec = sample_fixed_blocks(s3.graphon.values, 5, seed=2)
        assert rec.cells.tolist() == sum(([c] * 5 for c in range(6)), [])
        assert rec.latents is None

    def test_rejects_empty_blocks(self):
        with pytest.raises(ValueError):
            sample_fixed_blocks([[0.5]], 0, 1)


class TestSampledSignal:
    def test_constant_evaluate(self):
        rec = sample_w_random(StepGraphon.constant(0.5), 4, 0)
        f = GraphonSignal(np.ones(1), np.ones(1))
        g = sampled_signal(f, rec)
        np.testing.assert_allclose(g, 0.5)
        np.testing.assert_allclose(lift_signal(g, 4).values, 1.0)

    def test_indicator_block(self, s3):
        rec = sample_fixed_blocks(s3.graphon.values, 1000, seed=0)
        g = sampled_signal(None, rec, mode="indicator", block=0)
        assert g.sum() == 1000 and set(np.unique(g.real)) == {0.0, 1.0}

    def test_unknown_block(self, s3):
        rec = sample_fixed_blocks(s3.graphon.values, 2, seed=0)
        with pytest.raises(ValueError):
            sampled_signal(None, rec, mode="indicator", block=6)
        with pytest.raises(ValueError):
            sampled_signal(None, rec, mode="nearest")

    def test_step_signal_lift_error(self):
        # the lift differs from f exactly on the |N_0 - n/2| misaligned vertex cells,
        # N_0 = number of latents below 1/2, so the L2 error is sqrt(|N_0 - n/2| / n)
        n = 1000
        w = StepGraphon.uniform(np.full((2, 2), 0.3))
        f = GraphonSignal(np.array([1.0, 0.0]), uniform_measures(2))
        errs = []
        for seed in range(20):
            rec = sample_w_random(w, n, seed)
            lifted = lift_signal(sampled_signal(f, rec), n)
            err = signal_distance(lifted, f)
            n0 = int(np.sum(rec.latents < 0.5))
            assert abs(err - np.sqrt(abs(n0 - n / 2) / n)) < 1e-12
            errs.append(err)
        # E|N_0 - n/2| ~ 0.8 sqrt(n)/2, so typical errors sit near 0.1 at n = 1000
        assert np.median(errs) <= 0.15


def test_task_seeds():
    assert [task_seed(5, i) for i in range(4)] == [5, 4, 7, 6]


def test_cut_distance_shrinks(s3):
    """Median heuristic cut norm of w_G - w drops as n grows."""
    medians = []
    for n in (100, 400, 1600):
        vals = []
        for seed in range(5):
            rec = sample_w_random(s3.graphon, n, seed)
            diff = graphon_from_graph(rec.graph) - s3.graphon
            vals.append(cut_norm(diff, mode="heuristic", seed=seed, starts=16).value)
        medians.append(np.median(vals))
    assert medians[0] > medians[1] > medians[2]
