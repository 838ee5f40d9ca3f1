import numpy as np
import pytest

from dynaph.apps import (AnnulusConfig, BoidConfig, CrockerStack, annulus_frame, annulus_snapshot_frames,
                         betti_at, boid_family, crocker, crocker_stack, gen_annulus, gen_boids,
                         torus_distances)
from dynaph.engine import run_naive
from dynaph.reduce import decomposition_from_filtration, extract_pairs
from oracles import inclusion_rank, random_tied_filtration


@pytest.fixture(scope="module")
def annulus():
    fam = gen_annulus(10)
    return fam, run_naive(fam).diagrams


def test_annulus_size_and_determinism(annulus):
    fam, _ = annulus
    assert all(K.m == 417 for K in fam)
    assert fam[0].counts() == [81, 208, 128]
    again = gen_annulus(10)
    assert again[0].simplices == fam[0].simplices and again[0].grades == fam[0].grades
    assert np.array_equal(annulus_frame(0.3), annulus_frame(0.3))


def test_annulus_snapshots(annulus):
    _, dgms = annulus
    cfg = AnnulusConfig()
    got = [betti_at(dgms[k], cfg.half_width) for k in annulus_snapshot_frames(10, cfg)]
    assert got == [(1, 0, 0), (1, 1, 0), (1, 1, 0), (1, 1, 0), (4, 0, 0)]


def test_annulus_events_are_interior(annulus):
    _, dgms = annulus
    b = [betti_at(d, AnnulusConfig().half_width) for d in dgms]
    first_cycle = next(k for k, x in enumerate(b) if x[1] == 1)
    split = next(k for k, x in enumerate(b) if x[0] == 4)
    assert 0 < first_cycle < split < len(b) - 1


def test_torus_distances():
    X = np.array([[0.05, 0.5], [0.95, 0.5], [0.5, 0.5]])
    D = torus_distances(X)
    assert D[0, 1] == pytest.approx(0.1)
    assert D[0, 2] == pytest.approx(0.45)
    assert np.allclose(D, D.T) and (D <= np.sqrt(0.5) + 1e-12).all()


def test_boids_deterministic_and_shaped():
    cfg = BoidConfig(agents=8, samples=12, wraps=1)
    a, b = gen_boids(cfg, seed=3), gen_boids(cfg, seed=3)
    assert len(a) == 12 and a[0].shape == (8, 2)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert all(((x >= 0) & (x < 1)).all() for x in a)
    c = gen_boids(cfg, seed=4)
    assert not np.array_equal(a[-1], c[-1])
    with pytest.raises(ValueError):
        gen_boids(BoidConfig(agents=0))


def test_boid_family_shares_simplex_set():
    clouds = gen_boids(BoidConfig(agents=6, samples=5, wraps=1), seed=0)
    fam = boid_family(clouds, eps_max=0.3)
    assert len({frozenset(K.simplices) for K in fam}) == 1
    assert max(max(K.grades) for K in fam) <= 0.3


def test_crocker_stack_against_rank_oracle():
    rng = np.random.default_rng(12)
    eps = np.arange(0.0, 6.0, 0.5)
    alpha = np.array([0.0, 0.5, 1.5])
    for _ in range(15):
        K = random_tied_filtration(rng)
        dgm = extract_pairs(decomposition_from_filtration(K), K.grades)
        for p in (0, 1):
            stack = crocker_stack([dgm], p, eps, alpha)
            assert np.array_equal(stack.layer(0), crocker([dgm], p, eps))
            assert (np.diff(stack.ranks, axis=2) <= 0).all()
            for e, x in enumerate(eps):
                for a, al in enumerate(alpha):
                    assert stack.ranks[0, e, a] == inclusion_rank(K, p, x - al, x + al)


def test_crocker_errors_and_csv():
    with pytest.raises(ValueError):
        crocker_stack([[]], 1, [0.1], [-0.1])
    st = CrockerStack(np.array([[[2, 1]]]), np.array([0.5]), np.array([0.0, 0.25]), np.array([0]))
    assert st.csv() == "t,eps,alpha,rank\n0,0.5,0,2\n0,0.5,0.25,1\n"
    assert crocker([[]], 0, [0.0, 1.0]).tolist() == [[0, 0]]
