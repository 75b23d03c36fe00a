import logging

from obfuscation_backend.commands import PipelineCommand
from seq2seq_core.config import pipeline_config

from evaluation.exceptions import InsufficientData
from evaluation.models import EvalRecord, StealthRow
from evaluation.reports import write_correlation_csv, write_cost_csv, write_stealth_csv
from evaluation.services import (
    correlation_matrix, cost_experiment, mean_ciphertext_length, stealth_benchmark,
)

logger = logging.getLogger(__name__)


class Command(PipelineCommand):
    help = 'Run the stealth benchmark or the execution-cost sweep and write CSV results.'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='experiment', required=True)

        stealth = subparsers.add_parser('stealth', help='Levenshtein stealth benchmark on a corpus')
        stealth.add_argument('--corpus', required=True,
                             help='Directory of <id>.deobf / <id>.obf-benchmark pairs')
        stealth.add_argument('--trials', type=int, help='Ciphertexts per pair (default 100)')
        stealth.add_argument('--output', default='stealth.csv')
        stealth.add_argument('--jobs', type=int, help='Worker threads for the trials')

        cost = subparsers.add_parser('cost', help='Execution-cost sweep over plaintext lengths')
        cost.add_argument('--min', type=int, dest='min_len', default=10)
        cost.add_argument('--max', type=int, dest='max_len', default=400)
        cost.add_argument('--points', type=int, dest='n_points', default=20)
        cost.add_argument('--keygen-iterations', type=int, dest='keygen_iterations',
                          help='Fixed training iterations per keygen timing (default 200)')
        cost.add_argument('--output', default='cost.csv')
        cost.add_argument('--correlation-output', default='correlation.csv')

        for sub in (stealth, cost):
            sub.add_argument('--hidden', type=int, dest='hidden_size', help='Hidden size H')
            sub.add_argument('--max-decode-len', type=int, dest='max_decode_len')
            sub.add_argument('--n', type=int, dest='randomness_index', help='Randomness index')
            self.add_config_arguments(sub)

    def run(self, **options):
        seed = self.seed(options)
        config = pipeline_config(
            self.option('hidden_size', options),
            max_decode_len=self.option('max_decode_len', options),
            seed=seed,
        )
        randomness_index = self.option('randomness_index', options)
        if options['experiment'] == 'stealth':
            self.run_stealth(config, seed, randomness_index, options)
        else:
            self.run_cost(config, seed, randomness_index, options)

    def run_stealth(self, config, seed, randomness_index, options):
        report = stealth_benchmark(
            options['corpus'],
            trials_per_sample=self.option('trials', options),
            config=config,
            seed=seed,
            randomness_index=randomness_index,
            jobs=self.option('jobs', options),
        )
        write_stealth_csv(report, options['output'])
        if options['record']:
            StealthRow.objects.bulk_create(report.rows)
        self.emit_json({
            'rows': len(report.rows),
            'ciphertexts': report.ciphertext_count,
            'mean_ratio': report.mean_ratio,
            'std_ratio': report.std_ratio,
            'mean_normalized_distance': report.mean_normalized_distance,
            'output': options['output'],
        })

    def run_cost(self, config, seed, randomness_index, options):
        records = cost_experiment(
            options['min_len'], options['max_len'], options['n_points'],
            config=config,
            seed=seed,
            keygen_iterations=self.option('keygen_iterations', options),
            randomness_index=randomness_index,
        )
        write_cost_csv(records, options['output'])
        correlation_output = options['correlation_output']
        try:
            write_correlation_csv(correlation_matrix(records), correlation_output)
        except InsufficientData as exc:
            logger.warning('No correlation matrix written: %s', exc)
            correlation_output = None
        if options['record']:
            EvalRecord.objects.bulk_create(records)
        self.emit_json({
            'records': len(records),
            'mean_ciphertext_len': mean_ciphertext_length(records),
            'output': options['output'],
            'correlation_output': correlation_output,
        })
