"""
Run configuration, derived random streams, the worker pool and the results writer.

Every unit of work (experiment, point, trial) draws from its own generator seeded by the
root seed plus a stable hash of its key, so any schedule of workers gives the same numbers
as a sequential run.
"""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
import hashlib
import json
import os
import time

import numpy as np

from ghrr.exceptions import GHRRError
from ghrr.log import console
from ghrr.version import __version__

OUTPUT_FORMATS = ('csv', 'json', 'both')
SEED_MASK = 2 ** 64 - 1


def draw_seed():
    """A fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().entropy) & SEED_MASK


def derive_seed_sequence(root_seed, *key):
    """SeedSequence for ``key`` under ``root_seed``; independent of call order and process."""
    digest = hashlib.sha256(repr(key).encode('utf-8')).digest()
    words = [int.from_bytes(digest[i:i + 4], 'little') for i in range(0, 16, 4)]
    return np.random.SeedSequence([int(root_seed) & SEED_MASK] + words)


def derive_rng(root_seed, *key):
    return np.random.default_rng(derive_seed_sequence(root_seed, *key))


@dataclass
class RunConfig(object):
    """Everything needed to replay a run; ``to_dict`` is the config echo written with results."""

    command: str = ''
    params: dict = field(default_factory=dict)
    seed: int = None
    out_dir: str = None
    output_format: str = 'both'
    threads: int = 1

    def __post_init__(self):
        if self.seed is None:
            self.seed = draw_seed()
        if not 0 <= int(self.seed) <= SEED_MASK:
            raise GHRRError('Seed must be a 64-bit unsigned integer, got {0}'.format(self.seed))
        if self.output_format not in OUTPUT_FORMATS:
            raise GHRRError('Invalid output format "{0}". Valid formats are: {1}'.format(
                self.output_format, ', '.join(OUTPUT_FORMATS)))
        if self.threads < 1:
            raise GHRRError('Thread count must be at least 1')

    def to_dict(self):
        data = asdict(self)
        data['version'] = __version__
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(command=data.get('command', ''), params=dict(data.get('params', {})), seed=data['seed'],
                   out_dir=data.get('out_dir'), output_format=data.get('output_format', 'both'),
                   threads=data.get('threads', 1))


@dataclass
class ExperimentRecord(object):
    """One trial-point row. ``wall_time`` is reported in the JSON summary only."""

    experiment: str
    point: dict
    trial: int
    metrics: dict
    wall_time: float = 0.0

    def row(self):
        data = {'experiment': self.experiment, 'trial': self.trial}
        data.update(self.point)
        data.update(self.metrics)
        return data


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if value is None:
        return ''
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if hasattr(value, 'describe'):
        return value.describe()
    return value


class ExperimentRunner(object):
    """Owns the run configuration, derives random streams, runs trials and writes results."""

    def __init__(self, config=None, logger=None):
        self.config = config or RunConfig()
        self.logger = logger or console

    @property
    def seed(self):
        return self.config.seed

    @property
    def threads(self):
        return self.config.threads

    def configure(self, command, params):
        """Record the command and its parameters for the config echo."""
        self.config.command = command
        self.config.params = _jsonable(dict(params))
        self.logger.debug('Running {0} with seed {1}'.format(command, self.seed))

    def rng(self, *key):
        """Generator dedicated to ``key``."""
        return derive_rng(self.seed, *key)

    def map(self, func, items):
        """``[func(item) for item in items]``, on up to ``threads`` workers, results in input order."""
        items = list(items)
        if self.threads <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(func, items))

    def timed(self, func, *args, **kwargs):
        """Call ``func`` and return ``(result, seconds)``."""
        start = time.perf_counter()
        result = func(*args, **kwargs)
        return result, time.perf_counter() - start

    def write(self, experiment, records, summary=None, analysis=None):
        """
        Write ``records.csv`` and/or ``summary.json`` under ``<out_dir>/<experiment>-<timestamp>``.

        Returns the directory, or None when no output directory is configured.
        """
        if not self.config.out_dir:
            return None

        stamp = datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%SZ')
        directory = os.path.join(self.config.out_dir, '{0}-{1}'.format(experiment, stamp))
        suffix = 1
        while os.path.exists(directory):
            suffix += 1
            directory = os.path.join(self.config.out_dir, '{0}-{1}-{2}'.format(experiment, stamp, suffix))
        os.makedirs(directory)

        echo = self.config.to_dict()
        if self.config.output_format in ('csv', 'both'):
            self._write_csv(os.path.join(directory, 'records.csv'), records, echo)
        if self.config.output_format in ('json', 'both'):
            payload = {
                'experiment': experiment,
                'config': echo,
                'summary': summary or [],
                'analysis': analysis or [],
                'record_count': len(records),
                'wall_time': sum(r.wall_time for r in records),
            }
            with open(os.path.join(directory, 'summary.json'), 'w') as f:
                json.dump(_jsonable(payload), f, indent=4, sort_keys=True)

        self.logger.info('Results written to {0}'.format(directory))
        return directory

    @staticmethod
    def _write_csv(file_path, records, echo):
        rows = [r.row() for r in records]
        fieldnames = []
        for row in rows:
            for name in row:
                if name not in fieldnames:
                    fieldnames.append(name)

        with open(file_path, 'w', newline='') as f:
            f.write('# config={0}\n'.format(json.dumps(_jsonable(echo), sort_keys=True)))
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([_format_cell(row.get(name)) for name in fieldnames])


def read_config_echo(csv_path):
    """Parse the config echo line of a ``records.csv`` back into a RunConfig."""
    with open(csv_path) as f:
        first = f.readline()
    if not first.startswith('# config='):
        raise GHRRError('{0} has no config echo'.format(csv_path))
    return RunConfig.from_dict(json.loads(first[len('# config='):]))
