import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag

from cipher.models import CipherRecord
from cipher.services import generate_ciphertext, sha256_hex
from key_store.storage import encode_key, load_key
from obfuscation_backend.exceptions import DigestMismatch
from seq2seq_core.config import pipeline_config
from text_codec.exceptions import UnknownCharacter

from .exceptions import KeyGenFailed
from .models import KeyGenReport
from .services import generate_key, time_keygen, verify_roundtrip

SNIPPETS_DIR = Path(__file__).resolve().parent / 'fixtures' / 'snippets'


def keygen_config(hidden_size=16, seed=11, **values):
    values.setdefault('max_iterations', 2000)
    values.setdefault('check_interval', 50)
    return pipeline_config(hidden_size, seed=seed, **values)


def cipher_for(plaintext, seed=3, hidden_size=16):
    return generate_ciphertext(plaintext, config=pipeline_config(hidden_size, seed=seed))


class GenerateKeyTests(SimpleTestCase):
    def test_short_program_round_trips(self):
        cipher = cipher_for('x=1')
        key, report = generate_key('x=1', cipher, keygen_config(), max_attempts=3)

        self.assertTrue(report.success)
        self.assertTrue(verify_roundtrip(key, cipher.ciphertext, 'x=1'))
        self.assertLessEqual(report.iterations_used, report.attempts * 2000)
        self.assertGreaterEqual(report.final_loss, 0)
        self.assertGreater(report.wall_time_s, 0)
        self.assertEqual(report.plaintext_sha256, sha256_hex('x=1'))
        self.assertEqual(key.config.max_decode_len, len('x=1') + 1)
        self.assertEqual(key.encoder_vocab.size, len(set(cipher.ciphertext)))

    def test_rerun_gives_bitwise_identical_key(self):
        cipher = cipher_for('print(1)')
        first, _ = generate_key('print(1)', cipher, keygen_config(), max_attempts=3)
        second, _ = generate_key('print(1)', cipher, keygen_config(), max_attempts=3)
        self.assertEqual(first, second)
        self.assertEqual(encode_key(first), encode_key(second))

    def test_digest_mismatch(self):
        cipher = cipher_for('x=1')
        with self.assertRaises(DigestMismatch):
            generate_key('x=2', cipher, keygen_config())

    def test_zero_iterations_fails_with_report(self):
        cipher = cipher_for('while True: pass')
        with self.assertRaises(KeyGenFailed) as ctx:
            generate_key('while True: pass', cipher, keygen_config(max_iterations=0), max_attempts=1)

        report = ctx.exception.report
        self.assertEqual(ctx.exception.attempts, 1)
        self.assertEqual(ctx.exception.exit_code, 2)
        self.assertFalse(report.success)
        self.assertEqual(report.iterations_used, 0)
        self.assertEqual(report.seed, 11)

    def test_retry_seeds_advance(self):
        cipher = cipher_for('while True: pass')
        with self.assertRaises(KeyGenFailed) as ctx:
            generate_key('while True: pass', cipher, keygen_config(max_iterations=0), max_attempts=3)
        self.assertEqual(ctx.exception.report.attempts, 3)
        self.assertEqual(ctx.exception.report.seed, 13)

    def test_empty_ciphertext_is_keyed_from_zero_state(self):
        cipher = CipherRecord(ciphertext='', plaintext_sha256=sha256_hex('ok'), seed=0, config={})
        key, report = generate_key('ok', cipher, keygen_config(), max_attempts=3)
        self.assertTrue(report.success)
        self.assertTrue(key.encoder_vocab.has_markers)
        self.assertTrue(verify_roundtrip(key, '', 'ok'))

    def test_foreign_character_in_ciphertext(self):
        cipher = cipher_for('x=1')
        key, _ = generate_key('x=1', cipher, keygen_config(), max_attempts=3)
        foreign = next(ch for ch in 'abcdefghijklmnopqrstuvwxyz~' if ch not in key.encoder_vocab)
        with self.assertRaises(UnknownCharacter):
            verify_roundtrip(key, cipher.ciphertext + foreign, 'x=1')

    def test_time_keygen_runs_fixed_iterations(self):
        elapsed = time_keygen('abc', 'xyz', keygen_config(), iterations=5)
        self.assertGreater(elapsed, 0)

    @tag('slow')
    def test_single_substitutions_still_decode_the_plaintext(self):
        # One training pair: the decoder memorises the plaintext and largely
        # ignores the encoder state, so nearby ciphertexts decode the same.
        plaintext = 'x = 40 + 2'
        cipher = next(
            candidate for candidate in (cipher_for(plaintext, seed=s, hidden_size=64) for s in range(3, 40))
            if len(candidate.ciphertext) >= 5 and len(set(candidate.ciphertext)) >= 2
        )
        key, _ = generate_key(plaintext, cipher, keygen_config(64), max_attempts=3)

        ciphertext = cipher.ciphertext
        variants = [
            ciphertext[:i] + char + ciphertext[i + 1:]
            for i in range(len(ciphertext))
            for char in key.encoder_vocab.symbols if char != ciphertext[i]
        ]
        still_verify = sum(verify_roundtrip(key, variant, plaintext) for variant in variants)
        self.assertGreaterEqual(still_verify / len(variants), 0.9)

    @tag('slow')
    def test_snippet_corpus_round_trips(self):
        snippets = sorted(SNIPPETS_DIR.glob('*.py'))
        self.assertEqual(len(snippets), 20)
        verified = 0
        for index, path in enumerate(snippets):
            plaintext = path.read_text(encoding='utf-8')
            self.assertTrue(20 <= len(plaintext) <= 300, path.name)
            cipher = generate_ciphertext(plaintext, config=pipeline_config(64, seed=index))
            try:
                key, _ = generate_key(plaintext, cipher, keygen_config(64, seed=index), max_attempts=3)
            except KeyGenFailed:
                continue
            verified += verify_roundtrip(key, cipher.ciphertext, plaintext)
        self.assertGreaterEqual(verified, 19)


class KeygenCommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.source = self.dir / 'hello.py'
        self.source.write_text('print(1)\n', encoding='utf-8')
        call_command('obfuscate', '-i', str(self.source), '-o', str(self.dir / 'hello'),
                     '--seed', '7', '--hidden', '16', stdout=StringIO())

    def tearDown(self):
        self.tmp.cleanup()

    def keygen(self, prefix, *extra):
        out = StringIO()
        call_command(
            'keygen', '-p', str(self.source), '-c', str(self.dir / 'hello.obf'),
            '-o', str(self.dir / prefix), '--seed', '5', '--hidden', '16', *extra,
            stdout=out, stderr=StringIO(),
        )
        return json.loads(out.getvalue())

    def test_writes_verified_key(self):
        report = self.keygen('hello')
        self.assertTrue(report['success'])
        self.assertEqual(report['seed'], 5)

        key = load_key(self.dir / 'hello.dobk')
        ciphertext = (self.dir / 'hello.obf').read_text(encoding='utf-8')
        self.assertTrue(verify_roundtrip(key, ciphertext, 'print(1)\n'))

    def test_same_flags_give_identical_key_files(self):
        self.keygen('a')
        self.keygen('b')
        self.assertEqual((self.dir / 'a.dobk').read_bytes(), (self.dir / 'b.dobk').read_bytes())

    def test_record_saves_report(self):
        self.keygen('hello', '--record')
        report = KeyGenReport.objects.get()
        self.assertTrue(report.success)
        self.assertEqual(report.seed, 5)

    def test_zero_iterations_exits_2(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command(
                'keygen', '-p', str(self.source), '-c', str(self.dir / 'hello.obf'),
                '-o', str(self.dir / 'fail'), '--seed', '5', '--hidden', '16',
                '--max-iterations', '0', '--attempts', '1', stdout=out,
            )
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertFalse(json.loads(out.getvalue())['success'])
        self.assertFalse((self.dir / 'fail.dobk').exists())

    def test_unverified_key_is_not_left_behind(self):
        out = StringIO()
        with mock.patch('keygen.management.commands.keygen.verify_roundtrip', return_value=False):
            with self.assertRaises(CommandError) as ctx:
                call_command(
                    'keygen', '-p', str(self.source), '-c', str(self.dir / 'hello.obf'),
                    '-o', str(self.dir / 'bad'), '--seed', '5', '--hidden', '16', stdout=out,
                )
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertFalse(json.loads(out.getvalue())['success'])
        self.assertEqual(sorted(p.name for p in self.dir.iterdir() if 'bad' in p.name), [])

    def test_edited_plaintext_is_rejected(self):
        self.source.write_text('print(2)\n', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.keygen('hello')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_missing_plaintext_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('keygen', '-p', str(self.dir / 'nope.py'), '-c', str(self.dir / 'hello.obf'),
                         '-o', str(self.dir / 'x'), '--seed', '1')
        self.assertEqual(ctx.exception.returncode, 1)
