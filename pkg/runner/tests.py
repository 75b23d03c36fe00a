import itertools
import os
import shlex
import sys
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from cipher.services import generate_ciphertext, write_cipher_files
from key_store.storage import save_key
from keygen.exceptions import KeyGenFailed
from keygen.services import generate_key
from obfuscation_backend.exceptions import DigestMismatch
from seq2seq_core.config import pipeline_config
from text_codec.exceptions import UnknownCharacter

from .exceptions import ExecutionConfigError, SpawnError
from .services import build_command, deobfuscate, execute, plaintext_digest

PLAINTEXT = 'print(1)'
PYTHON = shlex.quote(sys.executable)


def python_cmd(code):
    return f'{PYTHON} -c {shlex.quote(code)} {{file}}'


class KeyedPairMixin:
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cipher = generate_ciphertext(PLAINTEXT, config=pipeline_config(16, seed=21))
        cls.key, _ = generate_key(
            PLAINTEXT, cls.cipher, pipeline_config(16, seed=4, max_iterations=2000), max_attempts=3
        )


class DeobfuscateTests(KeyedPairMixin, SimpleTestCase):
    def test_recovers_plaintext(self):
        self.assertEqual(deobfuscate(self.cipher.ciphertext, self.key), PLAINTEXT)

    def test_key_is_not_modified(self):
        before = self.key.weights.copy()
        deobfuscate(self.cipher.ciphertext, self.key)
        self.assertTrue(self.key.weights.bitwise_equal(before))

    def test_empty_ciphertext_decodes_from_zero_state(self):
        recovered = deobfuscate('', self.key)
        self.assertLessEqual(len(recovered), self.key.config.max_decode_len)

    def test_unknown_character(self):
        with self.assertRaises(UnknownCharacter):
            deobfuscate(self.cipher.ciphertext + '\n', self.key)


class WrongKeyTests(SimpleTestCase):
    @tag('slow')
    def test_mismatched_keys_never_recover_the_plaintext(self):
        # Each plaintext has a digit no other one uses, so a foreign key's
        # decoder cannot spell it. The usual outcome is UnknownCharacter,
        # since the ciphertext strays outside the foreign encoder vocabulary.
        plaintexts = [f'print({digit} * 3)' for digit in '12456']
        pairs = []
        for index, plaintext in enumerate(plaintexts):
            cipher = generate_ciphertext(plaintext, config=pipeline_config(32, seed=30 + index))
            config = pipeline_config(32, seed=index, max_iterations=2000)
            try:
                key, _ = generate_key(plaintext, cipher, config, max_attempts=3)
            except KeyGenFailed:
                continue
            pairs.append((plaintext, cipher.ciphertext, key))
        self.assertGreaterEqual(len(pairs), 4)

        mismatches = [
            (plaintext, ciphertext, foreign_key)
            for (plaintext, ciphertext, _), (_, _, foreign_key) in itertools.permutations(pairs, 2)
        ][:10]
        self.assertEqual(len(mismatches), 10)
        for plaintext, ciphertext, foreign_key in mismatches:
            with self.subTest(plaintext=plaintext):
                try:
                    recovered = deobfuscate(ciphertext, foreign_key)
                except UnknownCharacter:
                    continue
                self.assertNotEqual(recovered, plaintext)


class BuildCommandTests(SimpleTestCase):
    def test_every_placeholder_is_replaced(self):
        self.assertEqual(
            build_command('cat {file} "--in={file}"', '/tmp/x'),
            ['cat', '/tmp/x', '--in=/tmp/x'],
        )

    def test_template_required(self):
        for template in (None, '', '   '):
            with self.assertRaises(ExecutionConfigError):
                build_command(template, '/tmp/x')

    def test_placeholder_required(self):
        with self.assertRaises(ExecutionConfigError):
            build_command('python3 script.py', '/tmp/x')

    def test_unbalanced_quotes(self):
        with self.assertRaises(ExecutionConfigError):
            build_command('python3 "{file}', '/tmp/x')


class ExecuteTests(KeyedPairMixin, SimpleTestCase):
    def test_runs_recovered_program(self):
        result = execute(self.cipher.ciphertext, self.key, f'{PYTHON} {{file}}',
                         verify_digest=self.cipher.plaintext_digest, suffix='.py')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stdout, '1\n')
        self.assertGreater(result.duration_s, 0)

    def test_hex_digest_accepted(self):
        result = execute(self.cipher.ciphertext, self.key, f'{PYTHON} {{file}}',
                         verify_digest=self.cipher.plaintext_sha256)
        self.assertEqual(result.stdout, '1\n')

    def test_private_temp_file_removed_afterwards(self):
        code = 'import os, sys; print(oct(os.stat(sys.argv[1]).st_mode & 0o777)); print(sys.argv[1])'
        result = execute(self.cipher.ciphertext, self.key, python_cmd(code))
        mode, path = result.stdout.split()
        self.assertEqual(mode, '0o600')
        self.assertFalse(os.path.exists(path))

    def test_digest_mismatch_executes_nothing(self):
        with tempfile.TemporaryDirectory() as tmp:
            marker = Path(tmp) / 'ran'
            code = f'open({str(marker)!r}, "w").close()'
            with self.assertRaises(DigestMismatch):
                execute(self.cipher.ciphertext, self.key, python_cmd(code),
                        verify_digest=plaintext_digest('print(2)'))
            self.assertFalse(marker.exists())

    def test_missing_template_fails_before_decoding(self):
        with self.assertRaises(ExecutionConfigError):
            execute(self.cipher.ciphertext, None, None)

    def test_nonzero_exit_is_reported(self):
        result = execute(self.cipher.ciphertext, self.key, python_cmd('import sys; sys.exit(4)'))
        self.assertEqual(result.exit_code, 4)

    def test_timeout(self):
        with self.assertRaises(SpawnError):
            execute(self.cipher.ciphertext, self.key, python_cmd('import time; time.sleep(10)'),
                    timeout_s=0.2)

    def test_missing_interpreter(self):
        with self.assertRaises(SpawnError):
            execute(self.cipher.ciphertext, self.key, '/nonexistent/interpreter {file}')


class RunCommandTests(KeyedPairMixin, SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.obf, _ = write_cipher_files(self.cipher, self.dir / 'prog')
        self.key_path = self.dir / 'prog.dobk'
        save_key(self.key, self.key_path)

    def tearDown(self):
        self.tmp.cleanup()

    def run_command(self, *extra):
        out, err = StringIO(), StringIO()
        call_command('run', '-c', str(self.obf), '-k', str(self.key_path), *extra,
                     stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def test_decode_only_verifies(self):
        out, _ = self.run_command()
        self.assertIn(f'sha256: {self.cipher.plaintext_sha256}', out)
        self.assertIn('verified: true', out)

    def test_tampered_ciphertext_exits_3(self):
        self.obf.write_text(self.cipher.ciphertext + '\t', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.run_command()
        self.assertEqual(ctx.exception.returncode, 3)

    def test_wrong_digest_exits_3(self):
        meta = self.dir / 'prog.obf.meta.json'
        meta.write_text(
            meta.read_text(encoding='utf-8').replace(self.cipher.plaintext_sha256, '0' * 64),
            encoding='utf-8',
        )
        with self.assertRaises(CommandError) as ctx:
            self.run_command()
        self.assertEqual(ctx.exception.returncode, 3)

    def test_no_verify_skips_sidecar(self):
        (self.dir / 'prog.obf.meta.json').unlink()
        out, _ = self.run_command('--no-verify')
        self.assertIn('verified: skipped', out)

    def test_exec_relays_streams(self):
        out, _ = self.run_command('--exec', f'{PYTHON} {{file}}', '--suffix', '.py')
        self.assertEqual(out, '1\n')

    def test_exec_relays_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('--exec', python_cmd('import sys; sys.exit(4)'))
        self.assertEqual(ctx.exception.returncode, 4)

    def test_missing_key_exits_1(self):
        self.key_path.unlink()
        with self.assertRaises(CommandError) as ctx:
            self.run_command()
        self.assertEqual(ctx.exception.returncode, 1)
