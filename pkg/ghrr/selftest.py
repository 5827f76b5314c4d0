"""
Invariant checks behind ``ghrr selftest``.

The exactness checks run at machine precision in well under a second. The statistical
checks (``full=True``) are scaled reproductions of the qualitative results: concentration
about zero, kernel recovery, fixed vs varying Q, nested-dictionary disambiguation, the
diagonality/commutativity correlation, tree decoding against depth and capacity growth.
"""

from collections import namedtuple

import numpy as np

from ghrr import experiments, hdalg, matalg
from ghrr.exceptions import GHRRError
from ghrr.hdalg import BaseSamplerSpec
from ghrr.runner import ExperimentRunner, RunConfig

CheckResult = namedtuple('CheckResult', ['name', 'passed', 'detail'])

EXACT_TOL = 1e-12
UNBIND_TOL = 1e-10


def _base(rng, d=64, m=3, q_mode='varying'):
    return hdalg.sample_base(BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=q_mode), rng)


def check_self_similarity(rng):
    h = _base(rng)
    error = abs(hdalg.similarity(h, h) - 1.0)
    return error <= EXACT_TOL, 'error {0:.2e}'.format(error)


def check_binding_preserves_similarity(rng):
    h1, h2, h3 = _base(rng), _base(rng), _base(rng)
    reference = hdalg.similarity(h1, h2)
    left = abs(hdalg.similarity(hdalg.bind(h3, h1), hdalg.bind(h3, h2)) - reference)
    right = abs(hdalg.similarity(hdalg.bind(h1, h3), hdalg.bind(h2, h3)) - reference)
    return max(left, right) <= EXACT_TOL, 'left {0:.2e}, right {1:.2e}'.format(left, right)


def check_unbinding(rng):
    key, value = _base(rng), _base(rng)
    recovered = hdalg.bind(hdalg.inverse(key), hdalg.bind(key, value))
    error = float(np.max(np.abs(recovered.elements - value.elements)))
    return error <= UNBIND_TOL, 'max error {0:.2e}'.format(error)


def check_fhrr_reference(rng):
    """m = 1 operations against plain complex-number arithmetic."""
    d = 128
    a = np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    b = np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    h1, h2 = hdalg.from_elements(a), hdalg.from_elements(b)

    errors = [
        np.max(np.abs(hdalg.bind(h1, h2).elements.ravel() - a * b)),
        np.max(np.abs(hdalg.bundle(h1, h2).elements.ravel() - (a + b))),
        np.max(np.abs(hdalg.inverse(h1).elements.ravel() - np.conj(a))),
        np.max(np.abs(hdalg.permute(h1).elements.ravel() - np.roll(a, 1))),
        abs(hdalg.similarity(h1, h2) - np.mean(np.real(a * np.conj(b)))),
    ]
    worst = float(max(errors))
    return worst <= EXACT_TOL, 'max error {0:.2e}'.format(worst)


def check_commutativity_exact(rng):
    scalar = hdalg.degree_of_commutativity(_base(rng, m=1), _base(rng, m=1))
    diagonal_spec = BaseSamplerSpec(dim_d=64, dim_m=3, q_mode='shared')
    d1 = hdalg.sample_base(diagonal_spec, rng, q=np.eye(3))
    d2 = hdalg.sample_base(diagonal_spec, rng, q=np.eye(3))
    diagonal = hdalg.degree_of_commutativity(d1, d2)
    passed = scalar == 1.0 and abs(diagonal - 1.0) <= EXACT_TOL
    return passed, 'm=1 {0!r}, diagonal Q {1!r}'.format(scalar, diagonal)


def check_diagonality_extremes(rng):
    identity = matalg.diagonality(np.eye(3))
    derangement = matalg.diagonality(matalg.permutation_matrix([1, 2, 0]))
    return identity == 1.0 and derangement == 0.0, 'identity {0}, cyclic permutation {1}'.format(
        identity, derangement)


def check_tensor_view(rng):
    m = 3
    q = matalg.sample_unitary(m, 'haar', rng)
    r = matalg.sample_unitary(m, 'haar', rng)
    lam, eta = matalg.random_phases(m, rng), matalg.random_phases(m, rng)
    _, outer = hdalg.tensor_view(q, r, lam, eta)
    error = float(np.max(np.abs(outer - np.outer(lam.phasors(), eta.phasors()))))
    return error <= UNBIND_TOL, 'max error {0:.2e}'.format(error)


EXACT_CHECKS = [
    ('self-similarity', check_self_similarity),
    ('binding-preserves-similarity', check_binding_preserves_similarity),
    ('unbinding', check_unbinding),
    ('fhrr-reference', check_fhrr_reference),
    ('commutativity-exact', check_commutativity_exact),
    ('diagonality-extremes', check_diagonality_extremes),
    ('tensor-view', check_tensor_view),
]


def check_quasi_orthogonality(runner):
    result = experiments.exp_quasi_orthogonality(1000, 3, 2000, runner=runner)
    means = {row['histogram']: row['mean'] for row in result.summary}
    passed = all(abs(means[name]) < 0.01 for name in ('shared', 'varying', 'binding'))
    return passed, ', '.join('{0} mean {1:+.4f}'.format(k, v) for k, v in means.items())


def check_fixed_vs_varying_q(runner):
    result = experiments.exp_kernel_profile(1000, 3, 1, [0.0], 300, runner=runner,
                                            q_modes=('shared', 'varying'), pairing='resample')
    stds = {row['q_mode']: row['std'] for row in result.summary}
    return stds['varying'] < stds['shared'], 'std shared {0:.4f}, varying {1:.4f}'.format(
        stds['shared'], stds['varying'])


def check_kernel_recovery(runner):
    deltas = [0.0, 0.5, 1.0, 2.0]
    result = experiments.exp_kernel_profile(4000, 2, 1, deltas, 5, runner=runner)
    worst = max(abs(row['mean'] - np.exp(-row['delta_norm'] ** 2 / 2)) for row in result.summary)
    return worst < 0.05, 'max deviation {0:.4f}'.format(worst)


def check_nested_disambiguation(runner):
    ghrr = experiments.exp_nested_demo(200, 3, runner=runner)
    fhrr = experiments.exp_nested_demo(1800, 1, runner=runner)
    decoded = all(row['decoded'] == row['leaf'] for row in ghrr.summary)
    v2 = fhrr.summary[1]
    confusion = abs(v2['sim_V2'] - v2['sim_V3'])
    return decoded and confusion < 0.1, 'm=3 decodes all: {0}, m=1 V2/V3 gap {1:.4f}'.format(decoded, confusion)


def check_diagonality_correlation(runner):
    targets = [0.0, 1 / 3.0, 2 / 3.0, 1.0]
    result = experiments.exp_diagonality_commutativity([3], targets, 50, runner=runner, d=1000, pairing='matched')
    row = result.summary[0]
    r = row['pearson_r']
    passed = r is not None and r > 0.9 and row['skipped'] == 0
    return passed, 'pearson r {0}, {1} pairs, {2} skipped'.format(r, row['count'], row['skipped'])


def _curve(result, m):
    return {row['depth']: row['mean'] for row in result.summary if row['m'] == m}


def check_tree_depth_ordering(runner):
    """Non-commutative keys decode at least as well as FHRR before FHRR saturates."""
    depths = [1, 2, 3]
    result = experiments.exp_tree_accuracy(600, [1, 2, 3], depths, runner=runner, trials=10, round_dims=True)
    fhrr = _curve(result, 1)
    gaps = [_curve(result, m)[depth] - fhrr[depth] for m in (2, 3) for depth in depths]
    return min(gaps) >= -0.05, 'smallest m>1 minus m=1 gap {0:+.3f}'.format(min(gaps))


def check_permutation_holds_longer(runner):
    """Permuting subtrees keeps FHRR decoding perfect past the depth where plain FHRR fails."""
    depths = [1, 2, 3]
    plain = _curve(experiments.exp_tree_accuracy(600, [1], depths, runner=runner, trials=10), 1)
    permuted = _curve(experiments.exp_tree_accuracy(600, [1], depths, runner=runner, trials=10, permute=True), 1)

    def perfect_until(curve):
        last = 0
        for depth in depths:
            if curve[depth] < 1.0:
                break
            last = depth
        return last

    return perfect_until(permuted) > perfect_until(plain), 'perfect up to depth {0} permuted, {1} plain'.format(
        perfect_until(permuted), perfect_until(plain))


def check_capacity_growth(runner):
    """Single-symbol capacity grows with the total dimension for every m."""
    cfg = experiments.CapacityConfig.from_total_dims(1, [150, 300, 600], [1, 2, 3], round_dims=True, trials=3)
    result = experiments.exp_capacity(cfg, runner=runner)
    growing = []
    for m in (1, 2, 3):
        capacities = [row['capacity'] for row in sorted(result.summary, key=lambda row: row['total_dim'])
                      if row['m'] == m]
        growing.append(all(a < b for a, b in zip(capacities, capacities[1:])))
    fits = ', '.join('m={0} R^2 {1}'.format(t['m'], None if t['r_squared'] is None else round(t['r_squared'], 3))
                     for t in result.analysis)
    return all(growing), fits


STATISTICAL_CHECKS = [
    ('quasi-orthogonality', check_quasi_orthogonality),
    ('fixed-vs-varying-q', check_fixed_vs_varying_q),
    ('kernel-recovery', check_kernel_recovery),
    ('nested-disambiguation', check_nested_disambiguation),
    ('diagonality-correlation', check_diagonality_correlation),
    ('tree-depth-ordering', check_tree_depth_ordering),
    ('permutation-holds-longer', check_permutation_holds_longer),
    ('capacity-growth', check_capacity_growth),
]


def run_selftest(runner=None, full=False):
    """Run every check and return a list of CheckResult; a check that raises fails."""
    runner = runner or ExperimentRunner(RunConfig(command='selftest'))
    results = []
    for name, check in EXACT_CHECKS:
        results.append(_run(name, check, runner.rng('selftest', name)))
    if full:
        for name, check in STATISTICAL_CHECKS:
            results.append(_run(name, check, runner))
    return results


def _run(name, check, argument):
    try:
        passed, detail = check(argument)
    except GHRRError as ex:
        return CheckResult(name, False, 'error: {0}'.format(ex))
    return CheckResult(name, bool(passed), detail)
