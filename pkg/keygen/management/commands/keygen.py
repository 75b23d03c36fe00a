import os
from pathlib import Path

from obfuscation_backend.commands import PipelineCommand
from obfuscation_backend.textio import read_text
from seq2seq_core.config import pipeline_config

from cipher.services import read_cipher_files
from key_store.storage import KEY_SUFFIX, load_key, save_key
from keygen.exceptions import KeyGenFailed
from keygen.serializers import KeyGenReportSerializer
from keygen.services import generate_key, verify_roundtrip


class Command(PipelineCommand):
    help = 'Train a key that maps a ciphertext back to its plaintext and write <out>.dobk.'

    def add_arguments(self, parser):
        parser.add_argument('-p', '--plaintext', required=True, help='Plaintext source file')
        parser.add_argument('-c', '--cipher', required=True, help='Ciphertext file (.obf)')
        parser.add_argument('-m', '--meta', help='Sidecar (default: <cipher>.meta.json)')
        parser.add_argument('-o', '--output', required=True, help='Output prefix for the key file')
        parser.add_argument('--hidden', type=int, dest='hidden_size', help='Hidden size H')
        parser.add_argument('--max-iterations', type=int, dest='max_iterations',
                            help='Training iterations per attempt')
        parser.add_argument('--check-interval', type=int, dest='check_interval',
                            help='Iterations between round-trip checks')
        parser.add_argument('--attempts', type=int, dest='max_attempts',
                            help='Re-seeded attempts before giving up')
        parser.add_argument('--learning-rate', type=float, dest='learning_rate')
        self.add_config_arguments(parser)

    def run(self, **options):
        plaintext = read_text(options['plaintext'])
        cipher = read_cipher_files(options['cipher'], options['meta'])

        max_iterations = self.option('max_iterations', options)
        check_interval = self.option('check_interval', options)
        if max_iterations > 0 and options['check_interval'] is None:
            check_interval = min(check_interval, max_iterations)
        config = pipeline_config(
            self.option('hidden_size', options),
            learning_rate=self.option('learning_rate', options),
            max_iterations=max_iterations,
            check_interval=check_interval,
            seed=self.seed(options),
        )

        try:
            key, report = generate_key(plaintext, cipher, config, self.option('max_attempts', options))
        except KeyGenFailed as exc:
            self.finish(exc.report, options)
            raise

        path = Path(f"{options['output']}{KEY_SUFFIX}")
        staged = path.with_name(f'.{path.name}.unverified')
        save_key(key, staged)
        try:
            verified = verify_roundtrip(load_key(staged), cipher.ciphertext, plaintext)
            if verified:
                os.replace(staged, path)
        finally:
            if staged.exists():
                staged.unlink()
        if not verified:
            report.success = False
            self.finish(report, options)
            raise KeyGenFailed(report.attempts, report)
        self.finish(report, options)

    def finish(self, report, options):
        if options['record']:
            report.save()
        self.emit_json(KeyGenReportSerializer(report).data)
