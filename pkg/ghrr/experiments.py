"""
Scripted measurements: quasi-orthogonality histograms, kernel profiles (fixed vs varying Q),
the nested dictionary demo, diagonality vs commutativity, tree decoding accuracy and
bundling capacity.

Each experiment takes an :class:`~ghrr.runner.ExperimentRunner`, draws one random stream
per (experiment, point, trial) and returns an :class:`ExperimentResult` holding per-trial
records plus aggregated summary rows.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import stats

from ghrr import encoder, hdalg, matalg, structures
from ghrr.exceptions import CapacityError, ConvergenceError, DimensionError, GHRRError
from ghrr.hdalg import BaseSamplerSpec, Hypervector
from ghrr.runner import ExperimentRecord, ExperimentRunner

STRING_POOL = 15000
PAIRINGS = ('matched', 'independent')


@dataclass
class ExperimentResult(object):
    name: str
    records: list
    summary: list = field(default_factory=list)
    analysis: list = field(default_factory=list)


def dims_for(total_dim, m, round_dims=False, logger=None):
    """D such that D * m^2 is the total dimension; rounds down only when asked to."""
    if total_dim % (m * m):
        if not round_dims:
            raise DimensionError('Total dimension {0} is not divisible by m^2 = {1}'.format(total_dim, m * m))
        d = total_dim // (m * m)
        if logger is not None:
            logger.warning('Total dimension {0} rounded to {1} for m={2} (D={3})'.format(
                total_dim, d * m * m, m, d))
    else:
        d = total_dim // (m * m)
    if d < 1:
        raise DimensionError('Total dimension {0} is smaller than m^2 = {1}'.format(total_dim, m * m))
    return d


def summarize(records, keys, metric):
    """Mean, std and count of ``metric`` grouped by the point fields ``keys``, in first-seen order."""
    groups = {}
    for record in records:
        value = record.metrics.get(metric)
        if value is None:
            continue
        groups.setdefault(tuple(record.point.get(k) for k in keys), []).append(value)
    rows = []
    for group, values in groups.items():
        row = dict(zip(keys, group))
        row.update({'mean': float(np.mean(values)), 'std': float(np.std(values)), 'count': len(values)})
        rows.append(row)
    return rows


def _histogram(values, bins):
    counts, edges = np.histogram(values, bins=bins)
    return {'counts': counts.tolist(), 'edges': edges.tolist()}


def exp_quasi_orthogonality(d, m, pairs, q_mode='varying', runner=None, q_method='haar', angle_dist='uniform',
                            bins=40, identical=False):
    """
    Similarities of independent base pairs with shared Q, with varying Q, and of H1 against
    H1 * H2 (pairs drawn with ``q_mode``). ``identical`` compares each hypervector with itself.
    """
    runner = runner or ExperimentRunner()
    if pairs < 100:
        raise GHRRError('Histograms need at least 100 pairs, got {0}'.format(pairs))
    shared = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode='shared', q_method=q_method, angle_dist=angle_dist)
    varying = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode='varying', q_method=q_method, angle_dist=angle_dist)
    q_mode = hdalg.normalize_q_mode(q_mode)

    def trial(index):
        rng = runner.rng('quasi-orthogonality', d, m, q_method, index)
        (s1, s2), seconds = runner.timed(_pair, shared, rng, identical)
        v1, v2 = _pair(varying, rng, identical)
        b1, b2 = (v1, v2) if q_mode == 'varying' else (s1, s2)
        metrics = {
            'shared': hdalg.similarity(s1, s2),
            'varying': hdalg.similarity(v1, v2),
            'binding': hdalg.similarity(b1, hdalg.bind(b1, b2)),
        }
        return ExperimentRecord('quasi-orthogonality', {'d': d, 'm': m, 'q_mode': q_mode}, index, metrics, seconds)

    records = runner.map(trial, range(pairs))
    summary = []
    for name in ('shared', 'varying', 'binding'):
        values = np.array([r.metrics[name] for r in records])
        row = {'histogram': name, 'mean': float(values.mean()), 'std': float(values.std()),
               'min': float(values.min()), 'max': float(values.max())}
        row.update(_histogram(values, bins))
        summary.append(row)
    return ExperimentResult('quasi-orthogonality', records, summary)


def _pair(spec, rng, identical):
    first = hdalg.sample_base(spec, rng)
    return first, first if identical else hdalg.sample_base(spec, rng)


def exp_kernel_profile(d, m, n, deltas, trials, runner=None, freq_dist='gaussian', q_modes=('varying',),
                       pairing='same', q_method='haar'):
    """
    Empirical kernel at each displacement over freshly sampled encoders.

    ``pairing='same'`` uses one encoder on both sides (the RBF-style kernel); ``'resample'``
    pairs it with a Q-resampled copy, which at delta 0 is the fixed-vs-varying Q comparison.
    """
    runner = runner or ExperimentRunner()
    if pairing not in ('same', 'resample'):
        raise GHRRError('Pairing must be "same" or "resample", got "{0}"'.format(pairing))
    records, summary = [], []
    for q_mode in q_modes:
        rng = runner.rng('kernel', d, m, n, q_mode, pairing, q_method)
        template = encoder.make_encoder(n, d, m, q_mode=q_mode, freq_dist=freq_dist, rng=rng, q_method=q_method)
        partner = template if pairing == 'same' else encoder.resample_q(template, rng)
        points, seconds = runner.timed(encoder.kernel_profile, template, partner, deltas, trials, rng,
                                       runner.logger)
        for point in points:
            label = ' '.join(repr(c) for c in point.delta)
            norm = float(np.linalg.norm(point.delta))
            for trial, value in enumerate(point.values):
                records.append(ExperimentRecord(
                    'kernel', {'q_mode': template.q_mode, 'pairing': pairing, 'delta': label, 'delta_norm': norm},
                    trial, {'similarity': value}, seconds / (len(points) * trials)))
            summary.append({'q_mode': template.q_mode, 'pairing': pairing, 'delta': label, 'delta_norm': norm,
                            'mean': point.mean, 'std': point.std, 'analytic': point.analytic})
    return ExperimentResult('kernel', records, summary)


def exp_nested_demo(d, m, runner=None, value_points=(0.0, 1.0, 2.0, 3.0), grid=None, key_diagonality=None,
                    bandwidth=3.0, q_method='haar'):
    """
    Encode H = K1*(K1*V1 + K2*V2) + K2*(K1*V3 + K2*V4) with V_i = phi(x_i), decode every V_i'
    and sweep its similarity against phi(x) over ``grid``.
    """
    runner = runner or ExperimentRunner()
    if len(value_points) != 4:
        raise GHRRError('The nested demo encodes exactly four values')
    rng = runner.rng('nested-demo', d, m, q_method, key_diagonality)
    spec = structures.StructureSpec(depth=2, arity=2, value_count=4)

    key_q = None
    if key_diagonality is not None and m > 1:
        key_q = [matalg.optimize_diagonality(m, key_diagonality, rng=rng, logger=runner.logger) for _ in range(2)]
    keys = structures.make_codebook(2, 0, d, m, rng, q_method=q_method, key_q=key_q, logger=runner.logger).keys

    frequencies = encoder.FrequencyDistribution('gaussian', bandwidth)
    enc = encoder.make_encoder(1, d, m, q_mode='varying', freq_dist=frequencies, rng=rng, q_method=q_method)
    values = [encoder.encode(enc, [x]) for x in value_points]
    labels = ['V{0}'.format(i + 1) for i in range(4)]
    codebook = structures.Codebook(keys=keys, values=values, labels=labels)

    h = structures.encode_tree(spec, codebook)
    retrieved = structures.retrieve_leaves(h, spec, codebook)

    if grid is None:
        grid = np.linspace(min(value_points) - 1.0, max(value_points) + 1.0, 101)
    grid = np.asarray(grid, dtype=float)
    sweep = hdalg.similarity_matrix(retrieved, hdalg.stack(encoder.encode_batch(enc, [[x] for x in grid],
                                                                                runner.threads)))
    value_sims = hdalg.similarity_matrix(retrieved, codebook.value_stack)

    records, summary = [], []
    for leaf, path in enumerate(structures.leaf_paths(spec)):
        key_path = ','.join('K{0}'.format(b + 1) for b in path)
        for x, value in zip(grid, sweep[leaf]):
            records.append(ExperimentRecord('nested-demo', {'d': d, 'm': m, 'leaf': labels[leaf], 'keys': key_path,
                                                            'x': float(x)}, 0, {'similarity': float(value)}))
        row = {'leaf': labels[leaf], 'keys': key_path, 'true_x': float(value_points[leaf]),
               'peak_x': float(grid[int(np.argmax(sweep[leaf]))]), 'peak_similarity': float(sweep[leaf].max()),
               'decoded': labels[int(np.argmax(value_sims[leaf]))]}
        row.update({'sim_{0}'.format(label): float(s) for label, s in zip(labels, value_sims[leaf])})
        summary.append(row)
    return ExperimentResult('nested-demo', records, summary)


def exp_diagonality_commutativity(m_values, targets, pairs_per_target, runner=None, d=1000, free_samples=0,
                                  tol=0.02, max_iters=2000, q_method='haar', pairing='matched'):
    """
    Degree of commutativity against diag(Q1) + diag(Q2).

    Controlled rows optimize Q1 to each target. With ``matched`` pairing Q2 is optimized to
    the same target; with ``independent`` pairing its target is drawn from the same list.
    Free rows record the natural diagonality of sampled unitaries. Each hypervector uses one
    Q across all D elements. Pairs whose optimization fails are logged, skipped and counted
    in the summary.
    """
    runner = runner or ExperimentRunner()
    for target in targets:
        if not 0.0 <= target <= 1.0:
            raise GHRRError('Diagonality targets must be in [0, 1], got {0}'.format(target))
    if pairing not in PAIRINGS:
        raise GHRRError('Unknown pairing "{0}". Valid pairings are: {1}'.format(pairing, ', '.join(PAIRINGS)))
    logger = runner.logger

    def controlled(item):
        m, index, target, pair = item
        rng = runner.rng('diagonality', d, m, pairing, index, pair)
        partner = target if pairing == 'matched' else targets[int(rng.integers(len(targets)))]
        if m == 1 and min(target, partner) < 1.0 - tol:
            return None
        try:
            (q1, q2), seconds = runner.timed(
                lambda: tuple(matalg.optimize_diagonality(m, t, tol=tol, max_iters=max_iters, rng=rng, logger=logger)
                              for t in (target, partner)))
        except ConvergenceError as ex:
            logger.warning('Skipping m={0} pair {1}: {2}'.format(m, pair, ex))
            return None
        point = {'mode': 'controlled', 'pairing': pairing, 'm': m, 'target_1': target, 'target_2': partner}
        return _commutativity_record(d, m, q1, q2, rng, q_method, point, pair, seconds)

    def free(item):
        m, sample = item
        rng = runner.rng('diagonality-free', d, m, q_method, sample)
        q1, q2 = matalg.sample_unitaries(m, 2, q_method, rng)
        point = {'mode': 'free', 'pairing': None, 'm': m, 'target_1': None, 'target_2': None}
        return _commutativity_record(d, m, q1, q2, rng, q_method, point, sample, 0.0)

    items = [(m, i, t, p) for m in m_values for i, t in enumerate(targets) for p in range(pairs_per_target)]
    controlled_records = runner.map(controlled, items)
    skipped = {m: 0 for m in m_values}
    for (m, _, _, _), record in zip(items, controlled_records):
        if record is None:
            skipped[m] += 1
    if sum(skipped.values()):
        logger.warning('{0} of {1} controlled pairs were skipped'.format(sum(skipped.values()), len(items)))
    records = [r for r in controlled_records if r is not None]
    records += runner.map(free, [(m, s) for m in m_values for s in range(free_samples)])

    summary = []
    for mode in ('controlled', 'free'):
        for m in m_values:
            rows = [r for r in records if r.point['mode'] == mode and r.point['m'] == m]
            missing = skipped[m] if mode == 'controlled' else 0
            if not rows:
                if missing:
                    summary.append({'mode': mode, 'm': m, 'count': 0, 'skipped': missing, 'pearson_r': None,
                                    'median_diagonality': None, 'mean_commutativity': None})
                continue
            sums = np.array([r.metrics['diagonality_sum'] for r in rows])
            degrees = np.array([r.metrics['commutativity'] for r in rows])
            singles = np.array([r.metrics[k] for r in rows for k in ('diagonality_1', 'diagonality_2')])
            summary.append({'mode': mode, 'm': m, 'count': len(rows), 'skipped': missing,
                            'pearson_r': pearson(sums, degrees),
                            'median_diagonality': float(np.median(singles)),
                            'mean_commutativity': float(degrees.mean())})
    return ExperimentResult('diagonality', records, summary)


def _commutativity_record(d, m, q1, q2, rng, q_method, point, trial, seconds):
    spec = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode='shared', q_method=q_method)
    h1 = hdalg.sample_base(spec, rng, q=q1)
    h2 = hdalg.sample_base(spec, rng, q=q2)
    d1, d2 = matalg.diagonality(q1), matalg.diagonality(q2)
    metrics = {'diagonality_1': d1, 'diagonality_2': d2, 'diagonality_sum': d1 + d2,
               'commutativity': hdalg.degree_of_commutativity(h1, h2)}
    return ExperimentRecord('diagonality', dict(point, d=d), trial, metrics, seconds)


def pearson(xs, ys):
    """Pearson r, or None when either side is constant or too short."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) < 3 or np.ptp(xs) == 0 or np.ptp(ys) == 0:
        return None
    return float(stats.pearsonr(xs, ys)[0])


def exp_tree_accuracy(total_dim, m_values, depths, runner=None, permute=False, diagonality_targets=None, trials=25,
                      round_dims=False, q_mode='shared', q_method='haar', codebook_threshold=0.1, tol=0.02,
                      fresh_keys=False):
    """
    Mean decoding accuracy per (m, diagonality, depth) at a fixed total dimension D m^2.

    Without ``diagonality_targets`` keys use randomly sampled Q, one per hypervector with
    ``q_mode='shared'`` or one per element with ``q_mode='varying'``. With targets, every key
    gets one optimized Q of that diagonality (m = 1 only supports diagonality 1, other targets
    are skipped). ``permute`` permutes each subtree encoding before binding. Trials whose keys
    cannot be optimized are skipped and counted in the summary.
    """
    runner = runner or ExperimentRunner()
    logger = runner.logger
    targets = list(diagonality_targets) if diagonality_targets else [None]
    dims = {m: dims_for(total_dim, m, round_dims, logger) for m in m_values}

    def run(item):
        m, target, depth, trial = item
        d = dims[m]
        rng = runner.rng('tree-accuracy', total_dim, m, q_mode, permute, fresh_keys, target, depth, trial)
        spec = structures.StructureSpec(depth=depth, permute_subtrees=permute, fresh_keys=fresh_keys)
        key_q = None
        if target is not None and m > 1:
            try:
                key_q = [matalg.optimize_diagonality(m, target, tol=tol, rng=rng, logger=logger)
                         for _ in range(spec.key_count)]
            except ConvergenceError as ex:
                logger.warning('Skipping m={0} depth {1} trial {2}: {3}'.format(m, depth, trial, ex))
                return None
        codebook = structures.codebook_for(spec, d, m, rng, q_mode=q_mode, q_method=q_method, key_q=key_q,
                                           threshold=codebook_threshold, logger=logger)
        h, seconds = runner.timed(structures.encode_tree, spec, codebook)
        accuracy = structures.decode_tree_accuracy(h, spec, codebook)
        point = {'total_dim': d * m * m, 'm': m, 'd': d, 'q_mode': q_mode, 'depth': depth,
                 'diagonality': 'random' if target is None else target, 'permute': permute}
        return ExperimentRecord('tree-accuracy', point, trial, {'accuracy': accuracy}, seconds)

    items = []
    for m in m_values:
        for target in targets:
            if target is not None and m == 1 and target < 1.0 - tol:
                logger.warning('m=1 only has diagonality 1; skipping target {0}'.format(target))
                continue
            items += [(m, target, depth, trial) for depth in depths for trial in range(trials)]

    results = runner.map(run, items)
    records = [r for r in results if r is not None]
    keys = ['m', 'd', 'total_dim', 'q_mode', 'permute', 'diagonality', 'depth']
    summary = summarize(records, keys, 'accuracy')

    skipped = {}
    for (m, target, depth, _), record in zip(items, results):
        group = (m, 'random' if target is None else target, depth)
        skipped[group] = skipped.get(group, 0) + (record is None)
    if sum(skipped.values()):
        logger.warning('{0} of {1} tree trials were skipped'.format(sum(skipped.values()), len(items)))
    for row in summary:
        row['skipped'] = skipped[(row['m'], row['diagonality'], row['depth'])]
    seen = {(row['m'], row['diagonality'], row['depth']) for row in summary}
    for (m, diagonality, depth), count in skipped.items():
        if (m, diagonality, depth) not in seen:
            summary.append({'m': m, 'd': dims[m], 'total_dim': dims[m] * m * m, 'q_mode': q_mode,
                            'permute': permute, 'diagonality': diagonality, 'depth': depth,
                            'mean': None, 'std': None, 'count': 0, 'skipped': count})
    return ExperimentResult('tree-accuracy', records, summary)


def memorized(x_set, c1, c2, logger=None):
    """True iff every x in ``x_set`` is strictly more similar to c1 than to c2."""
    if len(x_set) == 0:
        if logger is not None:
            logger.warning('memorized() called with an empty set; vacuously true')
        return True
    sims = hdalg.similarity_matrix(x_set, [c1, c2])
    return bool(np.all(sims[:, 0] > sims[:, 1]))


def exp_memorization_histogram(total_dim, m, bundle_sizes, runner=None, round_dims=False, q_mode='varying',
                               q_method='haar'):
    """
    For each bundle size N: 2N base hypervectors split into X and X', and for every x in X its
    similarity to its own bundle C1 and to the other bundle C2.
    """
    runner = runner or ExperimentRunner()
    d = dims_for(total_dim, m, round_dims, runner.logger)
    spec = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=q_mode, q_method=q_method)
    records, summary = [], []
    for size in bundle_sizes:
        rng = runner.rng('memorization', d, m, q_mode, q_method, size)
        items = hdalg.stack([hdalg.sample_base(spec, rng) for _ in range(2 * size)])
        own = Hypervector(items[:size].sum(axis=0))
        other = Hypervector(items[size:].sum(axis=0))
        sims = hdalg.similarity_matrix(items[:size], [own, other])
        for index, (s_own, s_other) in enumerate(sims):
            records.append(ExperimentRecord('memorization', {'total_dim': d * m * m, 'm': m, 'bundle_size': size},
                                            index, {'own': float(s_own), 'other': float(s_other)}))
        gaps = sims[:, 0] - sims[:, 1]
        summary.append({'bundle_size': size, 'memorized': memorized(items[:size], own, other, runner.logger),
                        'min_gap': float(gaps.min()), 'overlapping': int(np.sum(gaps <= 0))})
    return ExperimentResult('memorization', records, summary)


def alphabet_size_for(n_components, pool=STRING_POOL):
    """Smallest a with a^n >= pool."""
    size = max(1, int(math.floor(pool ** (1.0 / n_components))))
    while size ** n_components < pool:
        size += 1
    return size


def available_strings(alphabet_size, n_components, distinct_permutations):
    if distinct_permutations:
        return alphabet_size ** n_components
    return math.comb(alphabet_size + n_components - 1, n_components)


def sample_strings(alphabet_size, n_components, count, distinct_permutations, rng):
    """
    ``count`` different strings of component indices, by rejection sampling against a seen
    set. Without ``distinct_permutations`` strings equal up to reordering count as one.
    """
    available = available_strings(alphabet_size, n_components, distinct_permutations)
    if count > available:
        raise CapacityError('Alphabet of {0} gives {1} strings of length {2}, {3} requested'.format(
            alphabet_size, available, n_components, count))
    seen, strings = set(), []
    while len(strings) < count:
        candidate = tuple(int(c) for c in rng.integers(0, alphabet_size, size=n_components))
        canonical = candidate if distinct_permutations else tuple(sorted(candidate))
        if canonical in seen:
            continue
        seen.add(canonical)
        strings.append(candidate)
    return strings


def find_capacity(evaluate, n_max, trials, mapper=map, n_start=1, logger=None):
    """
    Largest N <= n_max that passes, searching by doubling and then bisection.

    ``evaluate(N, trial)`` returns a bool; N passes when a strict majority of ``trials`` pass.
    Returns 0 when even ``n_start`` fails.
    """
    cache = {}

    def passes(size):
        if size not in cache:
            votes = list(mapper(lambda trial: evaluate(size, trial), range(trials)))
            cache[size] = sum(bool(v) for v in votes) * 2 > trials
            if logger is not None:
                logger.debug('Capacity search: N={0} {1}'.format(size, 'passes' if cache[size] else 'fails'))
        return cache[size]

    if n_max < n_start or not passes(n_start):
        return 0
    low = n_start
    while low * 2 <= n_max and passes(low * 2):
        low *= 2
    high = min(low * 2, n_max)
    if high == low:
        return low
    if high == n_max and passes(high):
        return high
    while high - low > 1:
        mid = (low + high) // 2
        if passes(mid):
            low = mid
        else:
            high = mid
    return low


@dataclass(frozen=True)
class CapacityConfig(object):
    """Capacity sweep: bound strings of ``n_components`` symbols over each (D, m)."""

    n_components: int
    dims: tuple
    permutations_distinct: bool = True
    trials: int = 5
    q_mode: str = 'shared'
    q_method: str = 'haar'
    string_pool: int = STRING_POOL

    def __post_init__(self):
        if self.n_components < 1:
            raise GHRRError('Strings need at least one component')
        if self.trials < 1:
            raise GHRRError('Capacity needs at least one trial per N')
        object.__setattr__(self, 'dims', tuple((int(d), int(m)) for d, m in self.dims))

    @classmethod
    def from_total_dims(cls, n_components, total_dims, m_values, round_dims=False, logger=None, **kwargs):
        dims = [(dims_for(t, m, round_dims, logger), m) for t in total_dims for m in m_values]
        return cls(n_components=n_components, dims=tuple(dims), **kwargs)

    @property
    def alphabet_size(self):
        return alphabet_size_for(self.n_components, self.string_pool)

    def to_dict(self):
        return {'n_components': self.n_components, 'dims': [list(p) for p in self.dims],
                'permutations_distinct': self.permutations_distinct, 'trials': self.trials,
                'alphabet_size': self.alphabet_size, 'q_mode': self.q_mode, 'q_method': self.q_method}


def exp_capacity(cfg, runner=None):
    """
    Capacity per (D, m): the largest N such that N bound strings bundled into C1 are all
    closer to C1 than to a bundle C2 of N other strings.
    """
    runner = runner or ExperimentRunner()
    n = cfg.n_components
    alphabet = cfg.alphabet_size
    available = available_strings(alphabet, n, cfg.permutations_distinct)
    records, summary = {}, []

    for d, m in cfg.dims:
        spec = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=cfg.q_mode, q_method=cfg.q_method)
        symbols = {}

        def symbol(trial, index):
            key = (trial, index)
            if key not in symbols:
                rng = runner.rng('capacity-symbol', d, m, n, cfg.q_mode, cfg.q_method, trial, index)
                symbols[key] = hdalg.sample_base(spec, rng).elements
            return symbols[key]

        def evaluate(size, trial):
            rng = runner.rng('capacity', d, m, n, cfg.permutations_distinct, size, trial)
            strings = sample_strings(alphabet, n, 2 * size, cfg.permutations_distinct, rng)
            bound = np.empty((2 * size, d, m, m), dtype=np.complex128)
            for row, string in enumerate(strings):
                element = symbol(trial, string[0])
                for component in string[1:]:
                    element = np.matmul(element, symbol(trial, component))
                bound[row] = element
            own = Hypervector(bound[:size].sum(axis=0))
            other = Hypervector(bound[size:].sum(axis=0))
            passed = memorized(bound[:size], own, other)
            records[(d, m, size, trial)] = ExperimentRecord(
                'capacity', {'total_dim': d * m * m, 'd': d, 'm': m, 'n_components': n,
                             'permutations_distinct': cfg.permutations_distinct, 'bundle_size': size},
                trial, {'memorized': passed})
            return passed

        capacity, seconds = runner.timed(find_capacity, evaluate, available // 2, cfg.trials, runner.map,
                                         logger=runner.logger)
        runner.logger.debug('Capacity at D={0}, m={1}: {2} ({3:.1f}s)'.format(d, m, capacity, seconds))
        summary.append({'total_dim': d * m * m, 'd': d, 'm': m, 'n_components': n,
                        'permutations_distinct': cfg.permutations_distinct, 'alphabet_size': alphabet,
                        'capacity': capacity})

    ordered = [records[key] for key in sorted(records)]
    return ExperimentResult('capacity', ordered, summary, capacity_trends(summary))


def capacity_trends(summary):
    """Per m: Spearman rank correlation and linear-fit R^2 of capacity against total dimension."""
    trends = []
    for m in sorted({row['m'] for row in summary}):
        rows = sorted((row for row in summary if row['m'] == m), key=lambda row: row['total_dim'])
        dims = np.array([row['total_dim'] for row in rows], dtype=float)
        capacities = np.array([row['capacity'] for row in rows], dtype=float)
        trend = {'m': m, 'points': len(rows), 'spearman_rho': None, 'slope': None, 'r_squared': None}
        if len(rows) >= 2 and np.ptp(dims) > 0 and np.ptp(capacities) > 0:
            trend['spearman_rho'] = float(stats.spearmanr(dims, capacities)[0])
            fit = stats.linregress(dims, capacities)
            trend['slope'] = float(fit.slope)
            trend['r_squared'] = float(fit.rvalue ** 2)
        trends.append(trend)
    return trends
