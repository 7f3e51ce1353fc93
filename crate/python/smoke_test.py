"""Import the compiled extension from target/ and exercise the main surface.

Build first:  cargo build -p toricmc-py
Then run:     python3 python/smoke_test.py
"""

import fractions
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_extension():
    names = ["libtoricmc_py.so", "libtoricmc_py.dylib", "toricmc_py.dll"]
    for profile in ("debug", "release"):
        for name in names:
            cand = ROOT / "target" / profile / name
            if cand.exists():
                return cand
    sys.exit("extension not found; run `cargo build -p toricmc-py` first")


stage = tempfile.mkdtemp(prefix="toricmc_py_")
suffix = ".pyd" if sys.platform == "win32" else ".so"
shutil.copy(locate_extension(), pathlib.Path(stage) / ("toricmc_py" + suffix))
sys.path.insert(0, stage)

import toricmc_py as tm  # noqa: E402

# Binomial sampling model: counts 0..5 with binomial weights.
model = tm.Model(
    [[1] * 6, [0, 1, 2, 3, 4, 5]],
    mu=[1, 5, 10, 10, 5, 1],
)
kernel = model.kernel_basis()
assert len(kernel) == 4, kernel

t1 = 1.7
q = [t1**x for x in range(6)]
for plus, minus in model.invariants():
    lhs = math.prod(q[j] ** int(e) for j, e in enumerate(plus))
    rhs = math.prod(q[j] ** int(e) for j, e in enumerate(minus))
    assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(rhs), 1.0), (plus, minus)
print("ok invariants vanish on the binomial curve")

assert model.hilbert_basis() == [[0, 1, 2, 3, 4, 5], [5, 4, 3, 2, 1, 0]]
closure = model.closure()
assert closure.rows()[0] == [1] * 6
assert len(closure.rows()) == 3
print("ok hilbert basis and closure")

dens = model.density([1.0, 1.0])
assert abs(sum(d * m for d, m in zip(dens, [1, 5, 10, 10, 5, 1])) - 1.0) <= 1e-12
assert model.mu()[1] == fractions.Fraction(5)
assert abs(model.moment([1.0, 1.0], [1]) - 2.5) <= 1e-12
assert model.monomial_basis() == [[0], [1], [2], [3], [4], [5]]
terms = model.indicator([2])
assert sum(c * 2 ** e[0] for e, c in terms) == 1
assert sum(c * 4 ** e[0] for e, c in terms) == 0
print("ok density, moments, design basis, indicator")

# Reversible chains on the complete graph with loops.
k3 = tm.Graph.complete(3, loops=True)
s = [[0.0, 0.10, 0.12], [0.10, 0.0, 0.08], [0.12, 0.08, 0.0]]
p, kappa = tm.reversible_from_params(k3, s, [1.1, 0.9])
assert tm.kolmogorov_check(k3, p) is None
kappa2 = tm.detailed_balance_solve(k3, p)
assert kappa2 is not None
assert max(abs(a - b) for a, b in zip(kappa, kappa2)) <= 1e-12
s2, t2, loops2 = tm.params_from_reversible(k3, p)
p2, _ = tm.reversible_from_params(k3, s2, t2, loops2)
assert max(abs(p[v][w] - p2[v][w]) for v in range(3) for w in range(3)) <= 1e-12
assert tm.reversal_divergence(k3, kappa, p, 5) <= 1e-12
print("ok reversible build, detailed balance, round trip, divergence")

drift = [[0.2, 0.6, 0.2], [0.2, 0.2, 0.6], [0.6, 0.2, 0.2]]
witness = tm.kolmogorov_check(k3, drift)
assert witness == ["0", "1", "2"], witness
assert tm.detailed_balance_solve(k3, drift) is None
pi = tm.stationary_distribution(drift)
assert max(abs(x - 1 / 3) for x in pi) <= 1e-12
assert tm.reversal_divergence(k3, pi, drift, 3) > 1e-3
print("ok irreversibility detected with witness cycle")

joint = [[0.05, 0.10, 0.05], [0.02, 0.15, 0.13], [0.18, 0.20, 0.12]]
for combiner in ("min", "harmonic", "product"):
    pm = tm.metropolis(k3, joint, combiner)
    for v in range(3):
        assert pm[v][v] >= 0
        assert abs(sum(pm[v]) - sum(joint[v])) <= 1e-12, (combiner, v)
        for w in range(3):
            if v != w:
                assert pm[v][w] == pm[w][v]
print("ok metropolis symmetrizes under all three combiners")

k4 = tm.Graph.complete(4, loops=True)
census = k4.cycle_census()
assert census["oriented"] == {1: 4, 2: 6, 3: 8, 4: 6}
assert sum(census["unoriented"].values()) == 17
assert sum(census["undirected"].values()) == 11
print("ok cycle census")

ok, kind = tm.realizable(k3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
assert ok and kind == "closed"
ok, kind = tm.realizable(k3, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
assert ok and kind == "open 0 -> 2"
ok, _ = tm.realizable(k3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
assert not ok
print("ok realizability")

stoch = [[0.5, 0.25, 0.25], [0.3, 0.4, 0.3], [0.2, 0.2, 0.6]]
assert tm.homogeneity(k3, stoch) is not None
assert tm.homogeneity(k3, [[0.5, 0.25, 0.25], [0.3, 0.4, 0.4], [0.2, 0.2, 0.6]]) is None
z = tm.partition_function(k3, 1.0, [1.0, 1.0, 1.0], stoch, 4)
assert abs(z - 3.0) <= 1e-12
counts = tm.expected_counts(k3, 1.0, [1.0, 1.0, 1.0], stoch, 4)
assert abs(sum(map(sum, counts)) - 4.0) <= 1e-10
print("ok trajectory normalization and expected counts")

print("smoke test passed")
