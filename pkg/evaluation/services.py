"""Stealth benchmark and execution-cost sweep."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import editdistance
import numpy as np
from django.conf import settings

from cipher.services import default_charset, generate_ciphertext
from keygen.services import time_keygen
from obfuscation_backend.config import ConfigError
from obfuscation_backend.textio import read_text
from seq2seq_core.config import pipeline_config

from .exceptions import CorpusError, InsufficientData
from .models import EvalRecord, StealthRow

logger = logging.getLogger(__name__)

SOURCE_SUFFIX = '.deobf'
BENCHMARK_SUFFIX = '.obf-benchmark'
COST_VARIABLES = ('plaintext_len', 'lev_distance', 'encrypt_time_s', 'keygen_time_s',
                  'char_variation', 'ciphertext_len')


def levenshtein(a, b):
    """Unit-cost edit distance."""
    return editdistance.eval(a, b)


def char_variation(text):
    return len(set(text))


def normalized_distance(a, b):
    longest = max(len(a), len(b))
    return levenshtein(a, b) / longest if longest else 0.0


def trial_seed(seed, *path):
    """Independent 64-bit seed for the trial at ``path`` under the run seed."""
    return int(np.random.SeedSequence([seed, *path]).generate_state(1, dtype=np.uint64)[0])


def experiment_config(config=None):
    return config or pipeline_config(settings.SEQ2SEQ_HIDDEN_SIZE, max_decode_len=settings.MAX_DECODE_LEN)


def read_corpus(corpus_dir):
    """Sorted (set_id, source, benchmark) triples from <id>.deobf / <id>.obf-benchmark files."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise CorpusError(f'{corpus_dir} is not a directory')
    sources = {p.name[:-len(SOURCE_SUFFIX)]: p for p in corpus_dir.glob(f'*{SOURCE_SUFFIX}')}
    benchmarks = {p.name[:-len(BENCHMARK_SUFFIX)]: p for p in corpus_dir.glob(f'*{BENCHMARK_SUFFIX}')}
    unpaired = sorted(set(sources) ^ set(benchmarks))
    if unpaired:
        raise CorpusError(f'{corpus_dir}: unpaired set(s) {", ".join(unpaired)}')
    if not sources:
        raise CorpusError(f'{corpus_dir}: no *{SOURCE_SUFFIX} / *{BENCHMARK_SUFFIX} pairs')

    pairs = []
    for set_id in sorted(sources):
        source = read_text(sources[set_id])
        if not source:
            raise CorpusError(f'{sources[set_id]} is empty')
        pairs.append((set_id, source, read_text(benchmarks[set_id])))
    return pairs


@dataclass(frozen=True)
class StealthReport:
    rows: list
    mean_ratio: float = None
    std_ratio: float = None
    mean_ratio_excl: dict = field(default_factory=dict)
    std_ratio_excl: dict = field(default_factory=dict)
    mean_normalized_distance: float = None
    ciphertext_count: int = 0

    @property
    def valid_rows(self):
        return [row for row in self.rows if not row.flagged]


def _stealth_trial(source, config, randomness_index):
    ciphertext = generate_ciphertext(source, config=config, randomness_index=randomness_index).ciphertext
    return levenshtein(source, ciphertext), normalized_distance(source, ciphertext)


def stealth_benchmark(corpus_dir, trials_per_sample=None, config=None, seed=0,
                      randomness_index=None, jobs=None):
    """Compare generated ciphertexts against a benchmark obfuscation per corpus pair.

    Pairs whose benchmark distance is 0 are flagged and left out of the
    aggregates. Standard deviations are population (divide by N).
    """
    trials = settings.STEALTH_TRIALS if trials_per_sample is None else trials_per_sample
    if trials < 1:
        raise ConfigError(f'trials must be >= 1, got {trials}')
    jobs = settings.EVAL_JOBS if jobs is None else jobs
    if jobs < 1:
        raise ConfigError(f'jobs must be >= 1, got {jobs}')
    config = experiment_config(config)
    pairs = read_corpus(corpus_dir)

    rows = []
    normalized = []
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for set_index, (set_id, source, benchmark) in enumerate(pairs):
            configs = [config.replace(seed=trial_seed(seed, set_index, t)) for t in range(trials)]
            results = list(pool.map(lambda cfg: _stealth_trial(source, cfg, randomness_index), configs))
            distances = [distance for distance, _ in results]
            set_normalized = [value for _, value in results]
            normalized.extend(set_normalized)

            benchmark_distance = levenshtein(source, benchmark)
            proposed = float(np.mean(distances))
            rows.append(StealthRow(
                set_id=set_id,
                benchmark_distance=benchmark_distance,
                proposed_mean_distance=proposed,
                ratio=proposed / benchmark_distance if benchmark_distance else None,
                trials=trials,
                mean_normalized_distance=float(np.mean(set_normalized)),
                flagged=benchmark_distance == 0,
            ))
            if benchmark_distance == 0:
                logger.warning('Set %s: benchmark equals the source, excluded from aggregates', set_id)
            logger.info('Set %s: benchmark %d, proposed mean %.2f over %d trials',
                        set_id, benchmark_distance, proposed, trials)

    ratios = {row.set_id: row.ratio for row in rows if not row.flagged}
    aggregates = {}
    if ratios:
        values = np.array(list(ratios.values()))
        aggregates.update(mean_ratio=float(values.mean()), std_ratio=float(values.std()))
    if len(ratios) > 1:
        excluded = {
            set_id: np.array([r for other, r in ratios.items() if other != set_id])
            for set_id in ratios
        }
        aggregates.update(
            mean_ratio_excl={set_id: float(rest.mean()) for set_id, rest in excluded.items()},
            std_ratio_excl={set_id: float(rest.std()) for set_id, rest in excluded.items()},
        )
    return StealthReport(
        rows=rows,
        mean_normalized_distance=float(np.mean(normalized)),
        ciphertext_count=len(normalized),
        **aggregates,
    )


def sweep_lengths(min_len, max_len, n_points):
    if not 1 <= min_len < max_len:
        raise ConfigError(f'need 1 <= min < max, got min={min_len} max={max_len}')
    if n_points < 2:
        raise ConfigError(f'need at least 2 points, got {n_points}')
    return [int(n) for n in np.rint(np.linspace(min_len, max_len, n_points))]


def cost_experiment(min_len, max_len, n_points, config=None, seed=0, keygen_iterations=None,
                    randomness_index=None):
    """Encrypt and keygen timings over random plaintexts of evenly spaced lengths.

    Runs serially; keygen uses a fixed iteration count with no early stop.
    """
    iterations = settings.COST_KEYGEN_ITERATIONS if keygen_iterations is None else keygen_iterations
    config = experiment_config(config)
    alphabet = np.array(list(default_charset()))

    records = []
    for point, length in enumerate(sweep_lengths(min_len, max_len, n_points)):
        point_seed = trial_seed(seed, point)
        rng = np.random.default_rng(point_seed)
        plaintext = ''.join(rng.choice(alphabet, size=length))
        point_config = config.replace(seed=point_seed)

        start = time.perf_counter()
        ciphertext = generate_ciphertext(
            plaintext, config=point_config, randomness_index=randomness_index
        ).ciphertext
        encrypt_time = time.perf_counter() - start
        keygen_time = time_keygen(plaintext, ciphertext, point_config, iterations)

        records.append(EvalRecord(
            plaintext_len=length,
            lev_distance=levenshtein(plaintext, ciphertext),
            encrypt_time_s=encrypt_time,
            keygen_time_s=keygen_time,
            char_variation=char_variation(ciphertext),
            ciphertext_len=len(ciphertext),
            seed=point_seed,
        ))
        logger.info('Cost point %d/%d: length %d, encrypt %.3fs, keygen %.3fs',
                    point + 1, n_points, length, encrypt_time, keygen_time)
    at_cap = sum(r.ciphertext_len == config.max_decode_len for r in records)
    logger.info('Mean ciphertext length %.1f over %d plaintexts, %d at the %d-char cap',
                mean_ciphertext_length(records), len(records), at_cap, config.max_decode_len)
    return records


def mean_ciphertext_length(records):
    return float(np.mean([r.ciphertext_len for r in records])) if records else None


def correlation_matrix(records):
    """Pearson correlations of the six cost variables; NaN where a variable is constant."""
    if len(records) < 3:
        raise InsufficientData(f'correlation needs at least 3 records, got {len(records)}')
    data = np.array([[getattr(r, name) for name in COST_VARIABLES] for r in records], dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.corrcoef(data, rowvar=False)
