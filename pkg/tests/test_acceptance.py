"""Exit criteria.  Each test records one PASS/FAIL line, printed after the run."""

import json
import math
import time

import jsonschema
import numpy as np

from polarschmidt.bipartite import (
    degeneracy_report,
    entanglement_entropy,
    expectation_consistency,
    rotate_group,
    schmidt_decompose,
)
from polarschmidt.cli import main
from polarschmidt.linalg import hermitian_eig, numerical_rank, polar_decompose, svd
from polarschmidt.multipartite import (
    EXISTS,
    IS_PRODUCT,
    NOT_EXISTS,
    NOT_PRODUCT,
    MixtureSpec,
    counting_check,
    generalized_schmidt_test,
    product_test,
    pure_vs_mixture_gap,
)
from polarschmidt.report import load_schema
from polarschmidt.states import (
    Bipartition,
    apply_local_unitary,
    ghz,
    make_correlated_state,
    random_state,
    singlet,
    w_state,
)

from conftest import brute_partial_trace, haar_unitary, random_hermitian, random_matrix, state_from_schmidt

SPLIT = Bipartition((0,), (1,))
R = 1 / math.sqrt(2)


def test_01_bipartite_oracle_equivalence(record):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for seed in range(200):
        dl, dr = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        s = random_state((dl, dr), seed)
        w = schmidt_decompose(s, SPLIT).weights
        keep = [0] if dl <= dr else [1]
        lam = np.linalg.eigvalsh(brute_partial_trace(s.amps, s.dims, keep))[::-1]
        oracle = np.sqrt(np.clip(lam, 0, None))[: min(dl, dr)]
        assert len(w) == len(oracle)
        worst = max(worst, float(np.max(np.abs(w - oracle))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 10
    record(1, ok, f"bipartite oracle: max |dw| = {worst:.2e} (< 1e-10), {elapsed:.2f} s (< 10 s)")
    assert ok


def test_02_singlet_fixture(record):
    s = singlet()
    d = schmidt_decompose(s, SPLIT)
    rep = degeneracy_report(d)
    prod = product_test(s)
    dw = float(np.max(np.abs(d.weights - R)))
    dh = abs(entanglement_entropy(d) - math.log(2))
    ok = (
        len(d.weights) == 2
        and dw < 1e-12
        and dh < 1e-12
        and rep.sizes == (2,)
        and prod.verdict == NOT_PRODUCT
        and prod.witness.rank == 2
    )
    record(2, ok, f"singlet: |dw| = {dw:.1e}, |dS| = {dh:.1e}, groups {rep.sizes}, {prod.verdict} rank {prod.witness.rank}")
    assert ok


def test_03_trace_identity(record):
    rng = np.random.default_rng(3)
    worst = 0.0
    for seed in range(100):
        dl, dr = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        lhs, rhs = expectation_consistency(random_state((dl, dr), 1000 + seed), SPLIT, random_hermitian(dr, rng))
        worst = max(worst, abs(lhs - rhs))
    ok = worst < 1e-10
    record(3, ok, f"trace identity: max |<1(x)B> - Tr(rho B)| = {worst:.2e} (< 1e-10) over 100 pairs")
    assert ok


def test_04_degeneracy_invariance(record):
    rng = np.random.default_rng(4)
    worst_w, worst_rec = 0.0, 0.0
    for _ in range(50):
        dl, dr = int(rng.integers(3, 6)), int(rng.integers(3, 6))
        k = min(dl, dr)
        w = np.sort(rng.random(k) + 0.05)[::-1]
        j = int(rng.integers(0, k - 1))
        w[j + 1] = w[j]
        s, _, _ = state_from_schmidt(w / np.linalg.norm(w), dl, dr, rng)
        d = schmidt_decompose(s, SPLIT)
        g = next(i for i, grp in enumerate(d.groups) if len(grp) >= 2)
        idx = list(d.groups[g])
        v = haar_unitary(len(idx), rng)
        # a) rotate the stored basis inside the group: second decomposition
        d2 = rotate_group(d, g, v)
        worst_rec = max(worst_rec, float(np.max(np.abs(d2.reconstruct().ravel() - s.amps))))
        # b) act with that rotation on the right factor: weights unchanged
        phi = d.right_vectors[:, idx]
        op = phi @ v @ phi.conj().T + np.eye(dr) - phi @ phi.conj().T
        w2 = schmidt_decompose(apply_local_unitary(s, 1, op), SPLIT).weights
        worst_w = max(worst_w, float(np.max(np.abs(np.sort(w2) - np.sort(d.weights)))), float(np.max(np.abs(d2.weights - d.weights))))
    ok = worst_w < 1e-10 and worst_rec < 1e-10
    record(4, ok, f"degenerate rotation: max |dw| = {worst_w:.2e}, reconstruction {worst_rec:.2e} (both < 1e-10), 50 states")
    assert ok


def test_05_tripartite_verdicts(record):
    g = generalized_schmidt_test(ghz())
    w = generalized_schmidt_test(w_state())
    c = generalized_schmidt_test(make_correlated_state([0.6, 0.8], (2, 2, 2)))
    ok = (
        g.verdict == EXISTS
        and np.max(np.abs(g.weights - [R, R])) < 1e-10
        and w.verdict == NOT_EXISTS
        and w.witness.rank == 2
        and c.verdict == EXISTS
        and np.max(np.abs(c.weights - [0.8, 0.6])) < 1e-10
    )
    record(5, ok, f"GHZ {g.verdict} {np.round(g.weights, 12)}, W {w.verdict} rank {w.witness.rank}, (0.6,0.8) {c.verdict} {np.round(c.weights, 12)}")
    assert ok


def test_06_uniqueness_under_degeneracy(record):
    s = ghz()
    results = [generalized_schmidt_test(s, seeds=[seed, seed + 1000]) for seed in range(10)]
    ref = results[0]
    spread = max(float(np.max(np.abs(r.weights - ref.weights))) for r in results)
    overlap = min(
        float(np.min(np.abs(np.sum(x.conj() * y, axis=0))))
        for r in results
        for x, y in zip(r.party_bases, ref.party_bases)
    )
    ok = all(r.verdict == EXISTS for r in results) and spread < 1e-8 and overlap > 1 - 1e-6
    record(6, ok, f"GHZ over 10 seeds: weight spread {spread:.1e} (< 1e-8), min basis overlap {overlap:.12f} (> 1 - 1e-6)")
    assert ok


def test_07_genericity_sweep(record):
    start = time.perf_counter()
    exists = products = 0
    for seed in range(1000):
        s = random_state((2, 2, 2), seed)
        exists += generalized_schmidt_test(s, tol=1e-8).verdict == EXISTS
        products += product_test(s, tol=1e-8).verdict == IS_PRODUCT
    elapsed = time.perf_counter() - start
    c = counting_check(2, 3)
    ok = exists == 0 and products == 0 and (c.equations, c.unknowns) == (8, 6) and c.overdetermined and elapsed < 60
    record(7, ok, f"1000 Haar (2,2,2): {exists} Exists, {products} IsProduct; counting {c.equations} vs {c.unknowns}; {elapsed:.2f} s (< 60 s)")
    assert ok


def test_08_pure_vs_mixture_gap(record):
    rng = np.random.default_rng(8)
    min_gap = math.inf
    trials = 0
    while trials < 100:
        n = int(rng.integers(2, 5))
        d = int(rng.integers(n, 7))
        lam = rng.dirichlet(np.ones(n))
        if lam.max() > 0.9:
            continue
        mix = MixtureSpec(lam, haar_unitary(d, rng)[:, :n])
        psi = random_state((d,), int(rng.integers(2**32))).amps
        if trials % 2:
            # worst case: psi along the heaviest component, gap = 1 - lam_max
            psi = np.exp(2j * np.pi * rng.random()) * mix.components[:, np.argmax(lam)]
        min_gap = min(min_gap, pure_vs_mixture_gap(psi, mix))
        trials += 1
    psi = random_state((4,), 0).amps
    boundary = pure_vs_mixture_gap(psi, MixtureSpec([1.0], psi.reshape(-1, 1)))
    ok = min_gap >= 0.1 - 1e-12 and abs(boundary) < 1e-12
    record(8, ok, f"mixture gap: min g = {min_gap:.4f} (>= 0.1 - 1e-12) over 100 trials; boundary g = {boundary:.1e}")
    assert ok


def test_09_polar_canonical_contracts(record):
    rng = np.random.default_rng(9)
    worst_rec = worst_psd = worst_idem = 0.0
    rank_one_ok = True
    for _ in range(100):
        rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        m = random_matrix(rows, cols, rng)
        smax = np.linalg.svd(m, compute_uv=False)[0]
        p = polar_decompose(m)
        worst_rec = max(worst_rec, float(np.max(np.abs(p.isometry @ p.positive_part - m))) / smax)
        rep = svd(m)
        worst_rec = max(worst_rec, float(np.max(np.abs(rep.reconstruct() - m))) / smax)
        worst_psd = min(worst_psd, float(hermitian_eig(p.positive_part).eigenvalues[-1]))
        proj = p.isometry.conj().T @ p.isometry
        worst_idem = max(worst_idem, float(np.max(np.abs(proj @ proj - proj))))
        rank_one_ok &= numerical_rank(random_matrix(rows, 1, rng) @ random_matrix(1, cols, rng)) == 1
    ok = worst_rec < 1e-10 and worst_psd > -1e-10 and worst_idem < 1e-10 and rank_one_ok
    record(9, ok, f"polar/canonical: residual/s_max {worst_rec:.1e}, min eig |A| {worst_psd:.1e}, idempotency {worst_idem:.1e}, rank-one ok {rank_one_ok}")
    assert ok


def _cli(argv, capsys):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    return code, capsys.readouterr().out


def test_10_cli_determinism_and_schema(record, tmp_path, capsys):
    validator = jsonschema.Draft202012Validator(load_schema())
    for name, args in {
        "singlet": ["singlet"],
        "ghz": ["ghz"],
        "w": ["w"],
        "premeasure_0.6_0.8": ["correlated", "--coeffs", "0.6,0.8", "--parties", "3", "--dim", "2"],
        "product": ["correlated", "--coeffs", "1", "--dims", "2,2"],
        "product3": ["correlated", "--coeffs", "1", "--parties", "3", "--dim", "2"],
        "random222": ["random", "--dims", "2,2,2", "--seed", "42"],
    }.items():
        assert _cli(["gen", *args, "--out", tmp_path / f"{name}.json"], capsys)[0] == 0
    (tmp_path / "bad.json").write_text('{"dims": [2, 2], "amps": [[1, 0]]}')
    f = lambda n: tmp_path / f"{n}.json"

    matrix = [
        (["decompose", f("singlet"), "--split", "0|1"], 0),
        (["decompose", f("product")], 0),
        (["schmidt-test", f("ghz"), "--seed", "7"], 0),
        (["schmidt-test", f("premeasure_0.6_0.8")], 0),
        (["schmidt-test", f("w")], 1),
        (["schmidt-test", f("random222")], 1),
        (["product-test", f("product3")], 0),
        (["product-test", f("singlet")], 1),
        (["product-test", f("random222")], 1),
        (["decompose", f("bad")], 2),
        (["product-test", f("bad")], 2),
        (["schmidt-test", f("bad")], 2),
        (["schmidt-test", f("singlet")], 3),
        (["decompose", f("singlet"), "--split", "0|5"], 3),
        (["decompose", f("singlet"), "--tol", "-1"], 3),
        (["gen", "correlated"], 3),
    ]
    failures = []
    for argv, expected in matrix:
        code1, out1 = _cli(argv, capsys)
        code2, out2 = _cli(argv, capsys)
        if code1 != expected or code2 != expected or out1 != out2:
            failures.append((argv[0], str(argv[1]).split("/")[-1], code1, expected))
            continue
        if expected in (0, 1) and argv[0] != "gen":
            errors = list(validator.iter_errors(json.loads(out1)))
            if errors:
                failures.append((argv[0], str(argv[1]).split("/")[-1], "schema", errors[0].message))
    ok = not failures
    record(10, ok, f"CLI: {len(matrix)} invocations x2, exit codes/bytes/schema mismatches: {failures or 'none'}")
    assert ok
