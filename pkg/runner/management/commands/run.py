from django.core.management.base import CommandError

from obfuscation_backend.commands import PipelineCommand
from obfuscation_backend.exceptions import DigestMismatch
from obfuscation_backend.textio import read_text

from cipher.services import read_cipher_files
from key_store.storage import load_key
from runner.services import deobfuscate, execute, plaintext_digest
from text_codec.exceptions import UnknownCharacter

VERIFICATION_FAILED = DigestMismatch.exit_code


class Command(PipelineCommand):
    help = (
        'Recover the plaintext of a ciphertext with its key. Without --exec, print its '
        'digest and whether it matches the sidecar; with --exec, run it.'
    )

    def add_arguments(self, parser):
        parser.add_argument('-c', '--cipher', required=True, help='Ciphertext file (.obf)')
        parser.add_argument('-k', '--key', required=True, help='Key file (.dobk)')
        parser.add_argument('-m', '--meta', help='Sidecar (default: <cipher>.meta.json)')
        parser.add_argument('--exec', dest='interpreter_cmd',
                            help='Interpreter command template, e.g. "python3 {file}"')
        parser.add_argument('--no-verify', action='store_true',
                            help='Skip the digest check (executes whatever the key decodes)')
        parser.add_argument('--suffix', default='', help='Temporary file suffix, e.g. .py')
        parser.add_argument('--timeout', type=float, dest='timeout_s',
                            help='Kill the child after this many seconds')

    def run(self, **options):
        key = load_key(options['key'])
        if options['no_verify']:
            ciphertext = read_text(options['cipher'])
            expected = None
        else:
            record = read_cipher_files(options['cipher'], options['meta'])
            ciphertext = record.ciphertext
            expected = record.plaintext_digest

        try:
            if options['interpreter_cmd']:
                self.execute_plaintext(ciphertext, key, expected, options)
            else:
                self.report_plaintext(ciphertext, key, expected)
        except UnknownCharacter as exc:
            raise CommandError(str(exc), returncode=VERIFICATION_FAILED) from exc

    def report_plaintext(self, ciphertext, key, expected):
        digest = plaintext_digest(deobfuscate(ciphertext, key))
        self.stdout.write(f'sha256: {digest.hex()}')
        if expected is None:
            self.stdout.write('verified: skipped')
            return
        verified = digest == expected
        self.stdout.write(f"verified: {'true' if verified else 'false'}")
        if not verified:
            raise CommandError('recovered plaintext does not match the recorded digest',
                               returncode=VERIFICATION_FAILED)

    def execute_plaintext(self, ciphertext, key, expected, options):
        result = execute(
            ciphertext, key, options['interpreter_cmd'], verify_digest=expected,
            suffix=options['suffix'], timeout_s=options['timeout_s'],
        )
        self.stdout.write(result.stdout, ending='')
        self.stderr.write(result.stderr, ending='')
        if result.exit_code != 0:
            code = result.exit_code
            if code < 0:
                detail = f'killed by signal {-code}'
                code = 128 - code
            else:
                detail = f'exited with status {code}'
            raise CommandError(f'child process {detail}', returncode=code)
