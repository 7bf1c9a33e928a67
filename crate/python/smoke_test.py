"""Smoke test for the coorbit Python bindings.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/coorbit-*.whl
"""

import math
import random

import coorbit


def close(a, b, tol=1e-10):
    return all(abs(u - v) <= tol * max(1.0, abs(u), abs(v)) for u, v in zip(a, b))


def main():
    g = coorbit.Group.cyclic(4)
    assert g.order == 4 and g.dim == 4
    g.validate()
    assert g.apply(1, [1.0, 0.0, 0.0, 0.0]) == [0.0, 1.0, 0.0, 0.0]
    assert len(g.orbit([1.0, 1.0, 0.0, 0.0])) == 4
    assert g.stabilizer([1.0, 1.0, 1.0, 1.0]) == [0, 1, 2, 3]
    assert coorbit.Group.permutations(3, [[1, 0, 2], [1, 2, 0]]).order == 6

    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    assert coorbit.Group.from_matrices([[[c, -s], [s, c]]]).order == 6

    d, aligner = coorbit.Group.sign_flips(1).distance([2.0], [-3.0])
    assert d == 1.0 and aligner == 1

    windows = coorbit.random_unit_windows(3, 4, seed=1)
    emb = coorbit.CoorbitEmbedding(g, windows, top_k=2)
    assert emb.embedding_dim == 6
    rng = random.Random(0)
    for _ in range(100):
        x = [rng.gauss(0, 1) for _ in range(4)]
        phi = emb.embed(x)
        assert close(phi, emb.embed(g.apply(rng.randrange(4), x)))
        assert close([2.5 * v for v in phi], emb.embed([2.5 * v for v in x]))
    assert emb.embed_batch([[1.0, 2.0, 3.0, 4.0]])[0] == emb.embed([1.0, 2.0, 3.0, 4.0])

    scalar = coorbit.CoorbitEmbedding(coorbit.Group.sign_flips(1), [[1.0]], full=True)
    assert scalar.embed([-3.0]) == [3.0, -3.0]
    assert abs(scalar.upper_bound_exact() - math.sqrt(2.0)) < 1e-12

    report = emb.lipschitz(pairs=500, seed=3, refine_steps=50)
    assert 0.0 < report["lower_bound_empirical"] <= report["upper_bound_exact"]
    assert report["upper_violations"] == 0
    assert emb.lipschitz(pairs=500, seed=3, refine_steps=50) == report

    proj = coorbit.Projection.random(emb.embedding_dim, 8, seed=2)
    assert proj.shape == (8, 6)
    assert len(proj.project_embed(emb, [1.0, 0.0, 0.0, 0.0])) == 8
    check = emb.inject_check(trials=300, seed=1, projection=proj)
    assert check["violations"] == 0 and check["projected"]

    checks = emb.selftest(trials=50, seed=7)
    assert [c["violations"] for c in checks] == [0] * len(checks)

    try:
        emb.embed([1.0, 2.0])
    except ValueError as e:
        assert "4" in str(e)
    else:
        raise AssertionError("dimension mismatch not raised")

    try:
        coorbit.CoorbitEmbedding(g, windows, top_k=2, full=True)
    except ValueError:
        pass
    else:
        raise AssertionError("conflicting selectors not rejected")

    print("python smoke test passed:", repr(g), repr(emb))


if __name__ == "__main__":
    main()
