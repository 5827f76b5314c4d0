"""
Compositional encoding and decoding: dictionaries, nested dictionaries (trees) and
similarity-based retrieval against a codebook.

A tree of depth d and arity a has a^d leaves. A node is encoded as
sum_k key_k * child_k (key on the left); leaves are value hypervectors. By default the same
``arity`` keys are reused at every level, which is what makes binding order matter.
"""

from dataclasses import dataclass, field
import itertools
import json

import numpy as np

from ghrr import hdalg, matalg
from ghrr.exceptions import CodebookError, DimensionError, GHRRError, NotUnitaryError
from ghrr.hdalg import BaseSamplerSpec, Hypervector
from ghrr.log import console

MAX_LEAVES = 2 ** 20


@dataclass(frozen=True)
class StructureSpec(object):
    """Declarative nested key/value tree."""

    depth: int
    arity: int = 2
    value_count: int = None
    permute_subtrees: bool = False
    fresh_keys: bool = False
    codebook_seed: int = None

    def __post_init__(self):
        if self.depth < 1:
            raise DimensionError('Tree depth must be at least 1, got {0}'.format(self.depth))
        if self.arity < 2:
            raise DimensionError('Tree arity must be at least 2, got {0}'.format(self.arity))
        if self.arity ** self.depth > MAX_LEAVES:
            raise DimensionError('A tree of depth {0} and arity {1} has more than {2} leaves'.format(
                self.depth, self.arity, MAX_LEAVES))
        if self.value_count is None:
            object.__setattr__(self, 'value_count', self.leaf_count)
        if self.value_count < 1:
            raise DimensionError('value_count must be positive')

    @property
    def leaf_count(self):
        return self.arity ** self.depth

    @property
    def key_count(self):
        return self.arity * (self.depth if self.fresh_keys else 1)

    def key_index(self, level, branch):
        """Codebook key used for ``branch`` at ``level`` (0 is the root)."""
        return level * self.arity + branch if self.fresh_keys else branch

    def to_dict(self):
        return {
            'depth': self.depth,
            'arity': self.arity,
            'value_count': self.value_count,
            'permute_subtrees': self.permute_subtrees,
            'fresh_keys': self.fresh_keys,
            'codebook_seed': self.codebook_seed,
        }


@dataclass
class Codebook(object):
    """Key and value hypervectors plus the labels of the values."""

    keys: list
    values: list
    labels: list = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = ['v{0}'.format(i) for i in range(len(self.values))]
        self._key_stack = None
        self._value_stack = None

    @property
    def key_stack(self):
        if self._key_stack is None:
            self._key_stack = hdalg.stack(self.keys)
        return self._key_stack

    @property
    def value_stack(self):
        if self._value_stack is None:
            self._value_stack = hdalg.stack(self.values)
        return self._value_stack

    def to_dict(self):
        return {
            'labels': list(self.labels),
            'keys': [k.to_dict() for k in self.keys],
            'values': [v.to_dict() for v in self.values],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(keys=[Hypervector.from_dict(k) for k in data['keys']],
                   values=[Hypervector.from_dict(v) for v in data['values']],
                   labels=list(data['labels']))


def make_codebook(n_keys, n_values, d, m, rng, q_mode='varying', q_method='haar', key_q=None,
                  threshold=0.1, max_rounds=20, labels=None, logger=None):
    """
    Sample quasi-orthogonal keys and values.

    Entries whose |similarity| with an earlier entry reaches ``threshold`` are re-sampled,
    up to ``max_rounds`` times. ``key_q`` optionally fixes the (shared) Q of each key.
    """
    logger = logger or console
    sampler = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=q_mode, q_method=q_method)
    if key_q is not None and len(key_q) != n_keys:
        raise CodebookError('Got {0} key unitaries for {1} keys'.format(len(key_q), n_keys))

    def draw(index):
        if index < n_keys and key_q is not None:
            return hdalg.sample_base(sampler, rng, q=key_q[index])
        return hdalg.sample_base(sampler, rng)

    entries = [draw(i) for i in range(n_keys + n_values)]
    for round_index in range(max_rounds + 1):
        sims = np.abs(hdalg.similarity_matrix(entries, entries))
        np.fill_diagonal(sims, 0.0)
        offending = sorted({int(j) for i, j in zip(*np.nonzero(np.triu(sims) >= threshold))})
        if not offending:
            return Codebook(keys=entries[:n_keys], values=entries[n_keys:], labels=labels or [])
        if round_index == max_rounds:
            break
        logger.debug('Codebook round {0}: re-sampling {1} entries'.format(round_index + 1, len(offending)))
        for index in offending:
            entries[index] = draw(index)

    raise CodebookError('Could not sample {0} entries with pairwise |similarity| < {1} at D={2}, m={3}'.format(
        len(entries), threshold, d, m))


def codebook_for(spec, d, m, rng, **kwargs):
    """Codebook sized for ``spec``."""
    return make_codebook(spec.key_count, spec.value_count, d, m, rng, **kwargs)


def _check_keys_unitary(keys):
    for key in keys:
        if not key.unitary:
            raise NotUnitaryError('Keys must be unitary hypervectors')


def encode_dict(pairs, shape=None):
    """
    sum_i key_i * value_i. An empty dictionary is the zero hypervector of ``shape`` (D, m).
    """
    pairs = list(pairs)
    if not pairs:
        if shape is None:
            raise GHRRError('An empty dictionary needs an explicit (D, m) shape')
        return hdalg.zeros(*shape)
    _check_keys_unitary(k for k, _ in pairs)
    return hdalg.bundle_all([hdalg.bind(k, v) for k, v in pairs])


def retrieve(h, key_path):
    """Unbind keys outermost first: path [Ka, Kb] gives Kb^-1 * (Ka^-1 * h)."""
    for key in key_path:
        h = hdalg.bind(hdalg.inverse(key), h)
    return h


def leaf_paths(spec):
    """Branch-index tuples in leaf order; element 0 is the branch taken at the root."""
    return list(itertools.product(range(spec.arity), repeat=spec.depth))


def leaf_values(spec):
    """Value index of every leaf; values cycle when leaves outnumber them."""
    return [i % spec.value_count for i in range(spec.leaf_count)]


def encode_tree(spec, codebook):
    """Encode the whole tree bottom-up, one level at a time."""
    _check_keys_unitary(codebook.keys)
    if len(codebook.keys) < spec.key_count or len(codebook.values) < spec.value_count:
        raise CodebookError('Codebook is too small for {0}'.format(spec))

    nodes = codebook.value_stack[leaf_values(spec)]
    keys = codebook.key_stack
    for level in reversed(range(spec.depth)):
        children = nodes.reshape((-1, spec.arity) + nodes.shape[1:])
        if spec.permute_subtrees:
            children = np.roll(children, 1, axis=2)
        nodes = np.matmul(keys[spec.key_index(level, 0)], children[:, 0])
        for branch in range(1, spec.arity):
            nodes = nodes + np.matmul(keys[spec.key_index(level, branch)], children[:, branch])
    return Hypervector(nodes[0], unitary=False)


@dataclass(frozen=True)
class LeafDecode(object):
    path: tuple
    true_index: int
    decoded_index: int
    margin: float

    @property
    def correct(self):
        return self.decoded_index == self.true_index


def retrieve_leaves(h, spec, codebook):
    """Approximate leaf hypervectors for every leaf path, as an (L, D, m, m) array."""
    _check_keys_unitary(codebook.keys)
    inverses = matalg.dagger(codebook.key_stack)
    current = h.elements[np.newaxis]
    for level in range(spec.depth):
        branches = [np.matmul(inverses[spec.key_index(level, branch)], current) for branch in range(spec.arity)]
        current = np.stack(branches, axis=1)
        if spec.permute_subtrees:
            current = np.roll(current, -1, axis=2)
        current = current.reshape((-1,) + current.shape[2:])
    return current


def decode_leaves(h, spec, codebook):
    """
    Retrieve every leaf and classify it by argmax similarity over all codebook values.
    A tie for the maximum decodes to -1.
    """
    sims = hdalg.similarity_matrix(retrieve_leaves(h, spec, codebook), codebook.value_stack)
    results = []
    for path, true_index, row in zip(leaf_paths(spec), leaf_values(spec), sims):
        order = np.argsort(row)[::-1]
        best = row[order[0]]
        runner_up = row[order[1]] if len(order) > 1 else -np.inf
        decoded = int(order[0]) if best > runner_up else -1
        results.append(LeafDecode(path=path, true_index=true_index, decoded_index=decoded,
                                  margin=float(best - runner_up)))
    return results


def decode_tree_accuracy(h, spec, codebook):
    """Fraction of leaves decoded to their own value."""
    decodes = decode_leaves(h, spec, codebook)
    return sum(1 for leaf in decodes if leaf.correct) / float(len(decodes))
