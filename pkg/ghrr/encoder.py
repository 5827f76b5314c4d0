"""
Random Fourier feature / fractional power encoding of real vectors into GHRR hypervectors.

phi(x)_j = Q^(j) diag(e^{i w_j1 . x}, ..., e^{i w_jm . x}). With the same encoder on both
sides the similarity approximates (1/m) sum_k K_k(x - y), K_k the kernel whose Fourier
transform is the frequency distribution; with different Q the kernels get reweighted by
the diagonal of Q_2^dagger Q_1.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import json

import numpy as np

from ghrr import hdalg, matalg
from ghrr.exceptions import GHRRError, InvalidDistributionError, NotUnitaryError, ShapeMismatchError
from ghrr.hdalg import Hypervector
from ghrr.log import console

FREQUENCY_KINDS = ('gaussian', 'cauchy', 'uniform')


@dataclass(frozen=True)
class FrequencyDistribution(object):
    """
    Per-component frequency distribution, centered at ``loc`` with spread ``scale``.

    gaussian -> RBF kernel, cauchy -> Laplace kernel, uniform on [-scale, scale] -> sinc kernel.
    Only symmetric, zero-mean distributions are accepted.
    """

    kind: str = 'gaussian'
    scale: float = 1.0
    loc: float = 0.0

    def __post_init__(self):
        if self.kind not in FREQUENCY_KINDS:
            raise InvalidDistributionError('Unknown frequency distribution "{0}". Valid kinds are: {1}'.format(
                self.kind, ', '.join(FREQUENCY_KINDS)))
        if not self.scale > 0:
            raise InvalidDistributionError('Frequency scale must be positive, got {0}'.format(self.scale))
        if self.loc != 0:
            raise InvalidDistributionError(
                'Frequency distribution must be symmetric about zero, got loc={0}'.format(self.loc))

    @classmethod
    def parse(cls, descriptor):
        """``kind``, ``kind:scale`` or ``kind:scale:loc``."""
        if isinstance(descriptor, cls):
            return descriptor
        parts = (descriptor or 'gaussian').split(':')
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError:
            raise InvalidDistributionError('Invalid frequency distribution descriptor "{0}"'.format(descriptor))
        if len(values) > 2:
            raise InvalidDistributionError('Invalid frequency distribution descriptor "{0}"'.format(descriptor))
        return cls(parts[0], *values)

    def describe(self):
        if self.scale == 1.0:
            return self.kind
        return '{0}:{1!r}'.format(self.kind, self.scale)

    def sample(self, rng, size):
        if self.kind == 'gaussian':
            return self.loc + self.scale * rng.standard_normal(size)
        if self.kind == 'cauchy':
            return self.loc + self.scale * rng.standard_cauchy(size)
        return rng.uniform(self.loc - self.scale, self.loc + self.scale, size=size)

    def characteristic(self, delta):
        """E[e^{i w delta}] for scalar components, element-wise over ``delta``."""
        delta = np.asarray(delta, dtype=float)
        if self.kind == 'gaussian':
            return np.exp(-0.5 * (self.scale * delta) ** 2)
        if self.kind == 'cauchy':
            return np.exp(-self.scale * np.abs(delta))
        return np.sinc(self.scale * delta / np.pi)


def analytic_kernel(freq_dist, delta):
    """Closed-form shift-invariant kernel for independent per-component frequencies."""
    freq_dist = FrequencyDistribution.parse(freq_dist)
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    return float(np.prod(freq_dist.characteristic(delta)))


@dataclass(frozen=True, eq=False)
class EncoderSpec(object):
    """Frozen sampled parameters of an encoder phi: R^n -> GHRR hyperspace."""

    n_features: int
    dim_d: int
    dim_m: int
    q_mode: str
    q_method: str
    freq_dist: FrequencyDistribution
    q_matrices: np.ndarray
    frequencies: np.ndarray
    seed: int = None

    def __post_init__(self):
        expected_q = 1 if self.q_mode == 'shared' else self.dim_d
        if self.q_matrices.shape != (expected_q, self.dim_m, self.dim_m):
            raise ShapeMismatchError('Encoder holds {0} Q matrices, expected {1} for {2} mode'.format(
                self.q_matrices.shape[0], expected_q, self.q_mode))
        if self.frequencies.shape != (self.dim_d, self.dim_m, self.n_features):
            raise ShapeMismatchError('Frequencies have shape {0}, expected {1}'.format(
                self.frequencies.shape, (self.dim_d, self.dim_m, self.n_features)))
        self.q_matrices.setflags(write=False)
        self.frequencies.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, EncoderSpec):
            return NotImplemented
        return (self.shape == other.shape and self.q_mode == other.q_mode
                and np.array_equal(self.q_matrices, other.q_matrices)
                and np.array_equal(self.frequencies, other.frequencies))

    __hash__ = None

    @property
    def shape(self):
        return self.n_features, self.dim_d, self.dim_m

    def q_stack(self):
        """Q for every dimension, as a (D, m, m) array."""
        return np.broadcast_to(self.q_matrices, (self.dim_d, self.dim_m, self.dim_m))

    def to_dict(self):
        return {
            'format': 'ghrr-encoder',
            'version': 1,
            'n_features': self.n_features,
            'dim_d': self.dim_d,
            'dim_m': self.dim_m,
            'q_mode': self.q_mode,
            'q_method': self.q_method,
            'freq_dist': self.freq_dist.describe(),
            'seed': self.seed,
            'frequencies': self.frequencies.tolist(),
            'q_real': self.q_matrices.real.tolist(),
            'q_imag': self.q_matrices.imag.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if data.get('format') != 'ghrr-encoder':
            raise GHRRError('Not a GHRR encoder document')
        q = np.array(data['q_real'], dtype=float) + 1j * np.array(data['q_imag'], dtype=float)
        return cls(n_features=data['n_features'], dim_d=data['dim_d'], dim_m=data['dim_m'],
                   q_mode=data['q_mode'], q_method=data['q_method'],
                   freq_dist=FrequencyDistribution.parse(data['freq_dist']),
                   q_matrices=q, frequencies=np.array(data['frequencies'], dtype=float), seed=data.get('seed'))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _sample_q(m, d, q_mode, q_method, rng):
    count = 1 if q_mode == 'shared' else d
    return matalg.sample_unitaries(m, count, q_method, rng)


def make_encoder(n, d, m, q_mode='varying', freq_dist='gaussian', rng=None, q_method='haar', q=None, seed=None):
    """
    Sample an encoder. Frequencies are drawn before Q, so the same seed always yields the
    same frequencies whatever Q mode is requested.

    ``q`` injects fixed unitaries (one m x m matrix for shared mode or a (D, m, m) stack).
    """
    if min(n, d, m) < 1:
        raise ShapeMismatchError('n, D and m must all be positive, got n={0}, D={1}, m={2}'.format(n, d, m))
    q_mode = hdalg.normalize_q_mode(q_mode)
    freq_dist = FrequencyDistribution.parse(freq_dist)
    rng = rng if rng is not None else np.random.default_rng(seed)

    frequencies = freq_dist.sample(rng, (d, m, n))
    if q is None:
        q_matrices = _sample_q(m, d, q_mode, q_method, rng)
    else:
        q_matrices = matalg.as_matrix(q)
        if q_matrices.ndim == 2:
            q_matrices = q_matrices[np.newaxis]
        if not matalg.is_unitary(q_matrices):
            raise NotUnitaryError('Injected encoder Q must be unitary')

    return EncoderSpec(n_features=n, dim_d=d, dim_m=m, q_mode=q_mode, q_method=q_method, freq_dist=freq_dist,
                       q_matrices=np.array(q_matrices), frequencies=frequencies, seed=seed)


def resample_q(enc, rng, q_method=None):
    """Same frequencies, fresh Q: the only sanctioned way to build a different-Q kernel partner."""
    q_method = q_method or enc.q_method
    return replace(enc, q_method=q_method, q_matrices=_sample_q(enc.dim_m, enc.dim_d, enc.q_mode, q_method, rng))


def _as_input(enc, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (enc.n_features,):
        raise ShapeMismatchError('Input has {0} features, encoder expects {1}'.format(x.size, enc.n_features))
    if not np.all(np.isfinite(x)):
        raise GHRRError('Input contains non-finite values')
    return x


def encode(enc, x, q_provider=None):
    """
    Encode one input vector.

    ``q_provider`` is an optional callable x -> unitary (m x m or (D, m, m)) that replaces
    the encoder's fixed Q for this input.
    """
    x = _as_input(enc, x)
    if q_provider is None:
        qs = enc.q_stack()
    else:
        provided = matalg.as_matrix(q_provider(x))
        if not matalg.is_unitary(provided):
            raise NotUnitaryError('Q provider returned a non-unitary matrix')
        qs = np.broadcast_to(provided, (enc.dim_d, enc.dim_m, enc.dim_m))

    phasors = np.exp(1j * (enc.frequencies @ x))
    return Hypervector(qs * phasors[:, np.newaxis, :], unitary=True)


def encode_batch(enc, xs, threads=1):
    """Encode many inputs; results are identical to sequential :func:`encode` calls."""
    xs = list(xs)
    if threads <= 1:
        return [encode(enc, x) for x in xs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda x: encode(enc, x), xs))


def fpe_base(enc, k):
    """
    Base hypervector of feature ``k`` for m = 1 encoders: element j is e^{i w_jk}, so that
    phi(x) is the binding of fpe_power(fpe_base(enc, k), x_k) over k when Q is trivial.
    """
    if enc.dim_m != 1:
        raise ShapeMismatchError('Fractional power base hypervectors are defined for m = 1')
    if not 0 <= k < enc.n_features:
        raise ShapeMismatchError('Feature index {0} out of range'.format(k))
    return Hypervector(np.exp(1j * enc.frequencies[:, :, k])[:, :, np.newaxis], unitary=True)


def fpe_power(h, t):
    """Element-wise real power of a unitary m = 1 hypervector, taken on the principal phase."""
    if h.dim_m != 1:
        raise ShapeMismatchError('Fractional powers are defined for m = 1 hypervectors')
    if not h.unitary:
        raise NotUnitaryError('Fractional powers need unit-modulus elements')
    return Hypervector(np.exp(1j * t * np.angle(h.elements)), unitary=True)


def _check_partners(enc1, enc2):
    if enc1.shape != enc2.shape or not np.array_equal(enc1.frequencies, enc2.frequencies):
        raise GHRRError('Kernel partners must share (n, D, m) and their frequency draws; use resample_q')


def empirical_kernel(enc1, enc2, x, y):
    """similarity(phi_1(x), phi_2(y))."""
    _check_partners(enc1, enc2)
    return hdalg.similarity(encode(enc1, x), encode(enc2, y))


@dataclass(frozen=True)
class KernelPoint(object):
    delta: tuple
    mean: float
    std: float
    analytic: float
    values: tuple


def kernel_profile(enc1, enc2, deltas, trials, rng=None, logger=None):
    """
    Mean and std of the empirical kernel at each displacement over ``trials`` freshly
    sampled encoder pairs with the configuration of (enc1, enc2).

    When enc2 is enc1 (or equal to it) every trial uses one encoder on both sides;
    otherwise the partner is a Q-resampled copy. Inputs are x = 0 and y = delta.
    """
    logger = logger or console
    deltas = [np.atleast_1d(np.asarray(delta, dtype=float)) for delta in deltas]
    if not deltas:
        raise GHRRError('kernel_profile needs at least one displacement')
    if trials < 2:
        raise GHRRError('kernel_profile needs at least 2 trials, got {0}'.format(trials))
    _check_partners(enc1, enc2)
    same = enc2 is enc1 or enc1 == enc2
    rng = rng if rng is not None else np.random.default_rng()
    n, d, m = enc1.shape

    values = np.empty((trials, len(deltas)))
    for trial in range(trials):
        first = make_encoder(n, d, m, q_mode=enc1.q_mode, freq_dist=enc1.freq_dist, rng=rng,
                             q_method=enc1.q_method)
        second = first if same else resample_q(first, rng, enc2.q_method)
        origin = encode(first, np.zeros(n))
        for i, delta in enumerate(deltas):
            values[trial, i] = hdalg.similarity(origin, encode(second, delta))
        logger.debug('Kernel profile trial {0}/{1} done'.format(trial + 1, trials))

    return [KernelPoint(delta=tuple(delta.tolist()), mean=float(values[:, i].mean()), std=float(values[:, i].std()),
                        analytic=analytic_kernel(enc1.freq_dist, delta) if same else float('nan'),
                        values=tuple(values[:, i].tolist()))
            for i, delta in enumerate(deltas)]
