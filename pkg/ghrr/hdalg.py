"""
The GHRR hypervector algebra.

A hypervector is a length-D sequence of m x m complex matrices, held as one
``(D, m, m)`` complex128 array. Bundling is element-wise addition, binding element-wise
matrix multiplication, similarity the normalized real trace inner product. With m = 1
every operation reduces to its FHRR counterpart.
"""

from dataclasses import dataclass, field
import json
import struct

import numpy as np

from ghrr import matalg
from ghrr.exceptions import GHRRError, NotUnitaryError, ShapeMismatchError, SingularMapError
from ghrr.matalg import AngleDistribution

BINARY_MAGIC = b'GHRR'
BINARY_VERSION = 1
_HEADER = struct.Struct('<4sHIIB')

Q_MODES = ('shared', 'varying')
_Q_MODE_ALIASES = {
    'shared': 'shared',
    'shared-across-dims': 'shared',
    'fixed': 'shared',
    'varying': 'varying',
    'varying-across-dims': 'varying',
}


def normalize_q_mode(q_mode):
    try:
        return _Q_MODE_ALIASES[q_mode]
    except KeyError:
        raise GHRRError('Invalid Q mode "{0}". Valid modes are: {1}'.format(q_mode, ', '.join(Q_MODES)))


class Hypervector(object):
    """An immutable (D, m, m) tensor of complex matrices plus its unitary flag."""

    def __init__(self, elements, unitary=False):
        elements = np.array(elements, dtype=np.complex128)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2] or elements.shape[0] < 1:
            raise ShapeMismatchError('Hypervector elements must have shape (D, m, m), got {0}'.format(elements.shape))
        elements.setflags(write=False)
        self._elements = elements
        self._unitary = bool(unitary)

    @property
    def elements(self):
        return self._elements

    @property
    def unitary(self):
        return self._unitary

    @property
    def dim_d(self):
        return self._elements.shape[0]

    @property
    def dim_m(self):
        return self._elements.shape[1]

    @property
    def shape(self):
        return self.dim_d, self.dim_m

    @property
    def effective_dim(self):
        """D * m, the effective dimension of the encoding."""
        return self.dim_d * self.dim_m

    @property
    def total_dim(self):
        """D * m^2, the number of complex parameters."""
        return self.dim_d * self.dim_m ** 2

    def __len__(self):
        return self.dim_d

    def __eq__(self, other):
        if not isinstance(other, Hypervector):
            return NotImplemented
        return self.unitary == other.unitary and np.array_equal(self._elements, other._elements)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def allclose(self, other, tol=1e-10):
        _check_shapes(self, other)
        return bool(np.max(np.abs(self._elements - other._elements)) <= tol)

    def __repr__(self):
        return 'Hypervector(D={0}, m={1}, unitary={2})'.format(self.dim_d, self.dim_m, self.unitary)

    def to_bytes(self):
        """Versioned binary layout: header then row-major little-endian complex128 payload."""
        header = _HEADER.pack(BINARY_MAGIC, BINARY_VERSION, self.dim_d, self.dim_m, int(self.unitary))
        return header + self._elements.astype('<c16').tobytes(order='C')

    @classmethod
    def from_bytes(cls, payload):
        if len(payload) < _HEADER.size:
            raise GHRRError('Hypervector payload is too short')
        magic, version, dim_d, dim_m, unitary = _HEADER.unpack_from(payload)
        if magic != BINARY_MAGIC:
            raise GHRRError('Not a GHRR hypervector payload')
        if version != BINARY_VERSION:
            raise GHRRError('Unsupported hypervector format version {0}'.format(version))
        expected = _HEADER.size + dim_d * dim_m * dim_m * 16
        if len(payload) != expected:
            raise GHRRError('Hypervector payload has {0} bytes, expected {1}'.format(len(payload), expected))
        elements = np.frombuffer(payload, dtype='<c16', offset=_HEADER.size).reshape(dim_d, dim_m, dim_m)
        return cls(elements, unitary=bool(unitary))

    def to_dict(self):
        return {
            'format': 'ghrr-hypervector',
            'version': BINARY_VERSION,
            'dim_d': self.dim_d,
            'dim_m': self.dim_m,
            'unitary': self.unitary,
            'real': self._elements.real.tolist(),
            'imag': self._elements.imag.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if data.get('format') != 'ghrr-hypervector':
            raise GHRRError('Not a GHRR hypervector document')
        elements = np.array(data['real'], dtype=float) + 1j * np.array(data['imag'], dtype=float)
        if elements.shape != (data['dim_d'], data['dim_m'], data['dim_m']):
            raise GHRRError('Hypervector document shape does not match its header')
        return cls(elements, unitary=data['unitary'])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, file_path):
        with open(file_path, mode='wb') as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, file_path):
        with open(file_path, mode='rb') as f:
            return cls.from_bytes(f.read())


def _check_shapes(h1, h2):
    if h1.shape != h2.shape:
        raise ShapeMismatchError('Hypervector shapes differ: (D={0}, m={1}) vs (D={2}, m={3})'.format(
            h1.dim_d, h1.dim_m, h2.dim_d, h2.dim_m))


def from_elements(elements, unitary=None):
    """Wrap a (D, m, m) array; the unitary flag is detected when not given and verified when claimed."""
    elements = np.asarray(elements, dtype=np.complex128)
    if elements.ndim == 1:
        elements = elements.reshape(-1, 1, 1)
    detected = matalg.is_unitary(elements)
    if unitary and not detected:
        raise NotUnitaryError('Elements are not unitary to {0}'.format(matalg.UNITARY_TOL))
    return Hypervector(elements, unitary=detected if unitary is None else unitary)


def identity(d, m):
    """The binding unit: every element is I_m."""
    return Hypervector(np.broadcast_to(np.eye(m), (d, m, m)), unitary=True)


def zeros(d, m):
    """The bundling unit."""
    return Hypervector(np.zeros((d, m, m)), unitary=False)


@dataclass(frozen=True)
class BaseSamplerSpec(object):
    """How to draw base hypervectors [Q_1 L_1, ..., Q_D L_D]."""

    dim_d: int
    dim_m: int
    q_mode: str = 'varying'
    q_method: str = 'haar'
    angle_dist: AngleDistribution = field(default_factory=AngleDistribution)
    seed: int = None

    def __post_init__(self):
        if self.dim_d < 1 or self.dim_m < 1:
            raise ShapeMismatchError('D and m must be positive, got D={0}, m={1}'.format(self.dim_d, self.dim_m))
        object.__setattr__(self, 'q_mode', normalize_q_mode(self.q_mode))
        object.__setattr__(self, 'angle_dist', AngleDistribution.parse(self.angle_dist))
        if self.q_method not in matalg.SAMPLING_MODES:
            raise GHRRError('Unknown unitary sampling mode "{0}"'.format(self.q_method))

    def to_dict(self):
        return {
            'dim_d': self.dim_d,
            'dim_m': self.dim_m,
            'q_mode': self.q_mode,
            'q_method': self.q_method,
            'angle_dist': self.angle_dist.describe(),
            'seed': self.seed,
        }


def sample_base(spec, rng=None, q=None):
    """
    Draw a base hypervector with element j = Q_j diag(e^{i theta_j1}, ..., e^{i theta_jm}).

    ``q`` overrides the sampled unitaries with either one m x m matrix (used for every
    element) or a (D, m, m) stack.
    """
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    d, m = spec.dim_d, spec.dim_m

    if q is not None:
        q = matalg.as_matrix(q)
        if q.shape[-1] != m or q.shape not in ((m, m), (d, m, m)):
            raise ShapeMismatchError('Injected Q has shape {0}, expected ({1}, {1}) or ({2}, {1}, {1})'.format(
                q.shape, m, d))
        if not matalg.is_unitary(q):
            raise NotUnitaryError('Injected Q is not unitary to {0}'.format(matalg.UNITARY_TOL))
        qs = np.broadcast_to(q, (d, m, m))
    elif spec.q_mode == 'shared':
        qs = np.broadcast_to(matalg.sample_unitary(m, spec.q_method, rng), (d, m, m))
    else:
        qs = matalg.sample_unitaries(m, d, spec.q_method, rng)

    phasors = np.exp(1j * spec.angle_dist.sample(rng, (d, m)))
    # Q diag(p) scales column k of Q by p_k
    return Hypervector(qs * phasors[:, np.newaxis, :], unitary=True)


def bundle(h1, h2):
    """Element-wise sum; the result is never renormalized."""
    _check_shapes(h1, h2)
    return Hypervector(h1.elements + h2.elements, unitary=False)


def bundle_all(hypervectors):
    """Left-to-right sum of a non-empty sequence."""
    hypervectors = list(hypervectors)
    if not hypervectors:
        raise GHRRError('Cannot bundle an empty sequence without a shape; use zeros(D, m)')
    total = hypervectors[0].elements.copy()
    for h in hypervectors[1:]:
        _check_shapes(hypervectors[0], h)
        total += h.elements
    return Hypervector(total, unitary=len(hypervectors) == 1 and hypervectors[0].unitary)


def bind(h1, h2):
    """Element-wise matrix product a_j b_j (non-commutative for m > 1)."""
    _check_shapes(h1, h2)
    return Hypervector(np.matmul(h1.elements, h2.elements), unitary=h1.unitary and h2.unitary)


def bind_all(hypervectors):
    """Left-to-right binding chain h_1 * h_2 * ... * h_n."""
    hypervectors = list(hypervectors)
    if not hypervectors:
        raise GHRRError('Cannot bind an empty sequence')
    result = hypervectors[0]
    for h in hypervectors[1:]:
        result = bind(result, h)
    return result


def similarity(h1, h2):
    """(1 / mD) Re tr(sum_j a_j b_j^dagger)."""
    _check_shapes(h1, h2)
    # vdot conjugates its first argument: sum conj(b) a == sum_j tr(a_j b_j^dagger)
    inner = np.vdot(h2.elements, h1.elements)
    return float(inner.real) / (h1.dim_m * h1.dim_d)


def stack(hypervectors):
    """(N, D, m, m) array from a sequence of Hypervectors; arrays pass through."""
    if isinstance(hypervectors, np.ndarray):
        return hypervectors
    return np.stack([h.elements for h in hypervectors])


def similarity_matrix(first, second):
    """
    Pairwise similarities between two collections, as one matrix product.

    Collections are sequences of Hypervectors or stacked (N, D, m, m) arrays.
    """
    a, b = stack(first), stack(second)
    if a.shape[1:] != b.shape[1:]:
        raise ShapeMismatchError('Collections hold hypervectors of different shapes')
    dim_d, dim_m = a.shape[1], a.shape[2]
    flat_a = a.reshape(a.shape[0], -1)
    flat_b = b.reshape(b.shape[0], -1)
    return np.real(flat_a @ np.conj(flat_b).T) / (dim_m * dim_d)


def inverse(h):
    """Element-wise conjugate transpose; only defined for unitary hypervectors."""
    if not h.unitary:
        raise NotUnitaryError('Only unitary hypervectors have an element-wise inverse; bundles do not')
    return Hypervector(matalg.dagger(h.elements), unitary=True)


def permute(h, shift=1):
    """Cyclic shift of the D element positions; the shift is taken modulo D."""
    return Hypervector(np.roll(h.elements, shift % h.dim_d, axis=0), unitary=h.unitary)


def degree_of_commutativity(h1, h2):
    """similarity(h1 * h2, h2 * h1); 1 when binding order does not matter."""
    _check_shapes(h1, h2)
    if not (h1.unitary and h2.unitary):
        raise NotUnitaryError('Degree of commutativity is defined for unitary hypervectors')
    if h1.dim_m == 1:
        # scalars commute
        return 1.0
    return similarity(bind(h1, h2), bind(h2, h1))


def _phasors(phases):
    if isinstance(phases, matalg.DiagonalPhases):
        return phases.phasors()
    return np.asarray(phases, dtype=np.complex128)


def tensor_view(q, r, lam, eta, tol=1e-10):
    """
    View one bound element as a transformed tensor product.

    Returns ``(bound, reconstructed_outer)`` where bound = Q diag(lam) R diag(eta) and
    reconstructed_outer is lam eta^T recovered column by column: column l of bound equals
    U_l (lam eta_l) with U_l = Q diag(R[:, l]), so each column map is inverted in turn.
    """
    q, r = matalg.as_matrix(q), matalg.as_matrix(r)
    lam, eta = _phasors(lam), _phasors(eta)
    m = q.shape[0]
    if r.shape != (m, m) or lam.shape != (m,) or eta.shape != (m,):
        raise ShapeMismatchError('tensor_view needs m x m matrices and length-m phases')

    bound = q @ np.diag(lam) @ r @ np.diag(eta)
    expansion = np.einsum('kn,nl,n,l->kl', q, r, lam, eta)
    if np.max(np.abs(bound - expansion)) > tol:
        raise GHRRError('Bound element disagrees with its tensor-product expansion')

    if np.any(r == 0):
        raise SingularMapError('Column maps are singular because R has zero entries')

    outer = np.empty((m, m), dtype=np.complex128)
    for l in range(m):
        u = q @ np.diag(r[:, l])
        outer[:, l] = np.linalg.solve(u, bound[:, l])
    return bound, outer
