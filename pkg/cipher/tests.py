import json
import logging
import random
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag

from evaluation.services import normalized_distance
from obfuscation_backend.fields import UINT64_MAX
from seq2seq_core.config import pipeline_config
from text_codec.exceptions import EmptyText, MarkerCollision
from text_codec.vocab import EOS, SOS

from .exceptions import CharsetTooSmall, CipherMetaError
from .models import CipherRecord
from .services import (
    DEFAULT_CHARSET_ID, charset_id, default_charset, generate_ciphertext, read_cipher_files,
    sha256_hex, write_cipher_files,
)

logger = logging.getLogger(__name__)

SOURCE = 'for i in range(10):\n    print(i * i)\n'


def small_config(seed=1, max_decode_len=100):
    return pipeline_config(16, max_decode_len=max_decode_len, seed=seed)


class DefaultCharsetTests(SimpleTestCase):
    def test_contents(self):
        charset = default_charset()
        self.assertEqual(len(charset), 95)
        self.assertEqual(len(set(charset)), 95)
        for char in 'a0; ':
            self.assertIn(char, charset)
        self.assertNotIn(SOS, charset)
        self.assertNotIn(EOS, charset)

    def test_charset_ids(self):
        self.assertEqual(charset_id(default_charset()), DEFAULT_CHARSET_ID)
        self.assertEqual(charset_id(default_charset()[::-1]), DEFAULT_CHARSET_ID)
        custom = charset_id('01')
        self.assertTrue(custom.startswith('custom-'))
        self.assertEqual(len(custom), len('custom-') + 16)
        self.assertEqual(custom, charset_id('1100'))


class GenerateCiphertextTests(SimpleTestCase):
    def test_deterministic(self):
        first = generate_ciphertext(SOURCE, config=small_config(seed=7))
        second = generate_ciphertext(SOURCE, config=small_config(seed=7))
        self.assertEqual(first.ciphertext, second.ciphertext)
        self.assertEqual(first.config, second.config)

    def test_record_fields(self):
        record = generate_ciphertext(SOURCE, config=small_config(seed=UINT64_MAX))
        self.assertEqual(record.plaintext_sha256, sha256_hex(SOURCE))
        self.assertEqual(record.plaintext_digest, bytes.fromhex(sha256_hex(SOURCE)))
        self.assertEqual(record.seed, UINT64_MAX)
        self.assertEqual(record.randomness_index, 10)
        self.assertEqual(record.charset_id, DEFAULT_CHARSET_ID)
        self.assertEqual(record.config_snapshot.hidden_size, 16)
        self.assertNotIn(SOURCE, json.dumps(record.config))

    def test_randomness_index_changes_output(self):
        outputs = {
            generate_ciphertext(SOURCE, config=small_config(seed=3), randomness_index=n).ciphertext
            for n in (1, 2, 3, 10)
        }
        self.assertGreater(len(outputs), 1)

    def test_alphabet_and_length_bounds(self):
        charset = 'abc'
        for seed in range(20):
            record = generate_ciphertext(SOURCE, charset, small_config(seed=seed, max_decode_len=12))
            self.assertLessEqual(record.ciphertext_len, 12)
            self.assertTrue(set(record.ciphertext) <= set(charset), record.ciphertext)

    def test_non_ascii_plaintext_stays_in_charset(self):
        text = 'print("héllo wörld ✓")'
        for seed in range(10):
            record = generate_ciphertext(text, config=small_config(seed=seed))
            self.assertTrue(set(record.ciphertext) <= set(default_charset()))

    def test_long_plaintext_is_not_reproduced(self):
        text = 'x' * 150
        record = generate_ciphertext(text, config=small_config())
        self.assertNotEqual(record.ciphertext, text)

    def test_seed_sensitivity(self):
        differing = 0
        for trial in range(100):
            a = generate_ciphertext(SOURCE, config=small_config(seed=2 * trial)).ciphertext
            b = generate_ciphertext(SOURCE, config=small_config(seed=2 * trial + 1)).ciphertext
            differing += normalized_distance(a, b) > 0
        self.assertGreaterEqual(differing, 99)

    @tag('slow')
    def test_reference_scale_lengths_stay_capped(self):
        rng = random.Random(2024)
        charset = default_charset()
        config = pipeline_config(256, max_decode_len=100)
        lengths = []
        for trial in range(200):
            plaintext = ''.join(rng.choices(charset, k=rng.randint(1, 4000)))
            ciphertext = generate_ciphertext(plaintext, config=config.replace(seed=trial)).ciphertext
            self.assertLessEqual(len(ciphertext), 100)
            self.assertLessEqual(set(ciphertext), set(charset))
            lengths.append(len(ciphertext))
        logger.info(
            'Ciphertext length over %d plaintexts: mean %.1f, %d at the cap, %d empty',
            len(lengths), sum(lengths) / len(lengths), lengths.count(100), lengths.count(0),
        )

    def test_errors(self):
        with self.assertRaises(EmptyText):
            generate_ciphertext('', config=small_config())
        with self.assertRaises(CharsetTooSmall):
            generate_ciphertext(SOURCE, 'aaaa', small_config())
        with self.assertRaises(MarkerCollision):
            generate_ciphertext(f'x{SOS}', config=small_config())


class CipherFilesTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.record = generate_ciphertext(SOURCE, config=small_config(seed=12))

    def tearDown(self):
        self.tmp.cleanup()

    def test_sidecar_is_single_json_line(self):
        obf, meta = write_cipher_files(self.record, self.dir / 'prog')
        self.assertEqual(obf.name, 'prog.obf')
        self.assertEqual(meta.name, 'prog.obf.meta.json')
        lines = meta.read_text(encoding='utf-8').splitlines()
        self.assertEqual(len(lines), 1)
        self.assertEqual(
            set(json.loads(lines[0])),
            {'version', 'seed', 'n', 'charset_id', 'sha256', 'max_decode_len', 'hidden_size'},
        )

    def test_read_back(self):
        obf, _ = write_cipher_files(self.record, self.dir / 'prog')
        loaded = read_cipher_files(obf)
        self.assertEqual(loaded.ciphertext, self.record.ciphertext)
        self.assertEqual(loaded.plaintext_sha256, self.record.plaintext_sha256)
        self.assertEqual(loaded.seed, 12)
        self.assertEqual(loaded.randomness_index, 10)
        self.assertEqual(loaded.config_snapshot.max_decode_len, 100)

    def test_invalid_sidecar(self):
        obf, meta = write_cipher_files(self.record, self.dir / 'prog')
        data = json.loads(meta.read_text(encoding='utf-8'))
        data['sha256'] = 'not-a-digest'
        meta.write_text(json.dumps(data), encoding='utf-8')
        with self.assertRaises(CipherMetaError):
            read_cipher_files(obf)
        meta.write_text('{', encoding='utf-8')
        with self.assertRaises(CipherMetaError):
            read_cipher_files(obf)

    def test_future_sidecar_version(self):
        obf, meta = write_cipher_files(self.record, self.dir / 'prog')
        data = json.loads(meta.read_text(encoding='utf-8'))
        data['version'] = 2
        meta.write_text(json.dumps(data), encoding='utf-8')
        with self.assertRaises(CipherMetaError):
            read_cipher_files(obf)


class ObfuscateCommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.source = self.dir / 'hello.py'
        self.source.write_text(SOURCE, encoding='utf-8')

    def tearDown(self):
        self.tmp.cleanup()

    def obfuscate(self, prefix, *extra):
        out, err = StringIO(), StringIO()
        call_command('obfuscate', '-i', str(self.source), '-o', str(self.dir / prefix),
                     '--hidden', '16', *extra, stdout=out, stderr=err)
        return json.loads(out.getvalue()), err.getvalue()

    def test_same_seed_gives_identical_files(self):
        summary, _ = self.obfuscate('a', '--seed', '7')
        self.obfuscate('b', '--seed', '7')
        self.assertEqual(summary['seed'], 7)
        self.assertEqual((self.dir / 'a.obf').read_bytes(), (self.dir / 'b.obf').read_bytes())
        self.assertEqual(
            (self.dir / 'a.obf.meta.json').read_bytes(), (self.dir / 'b.obf.meta.json').read_bytes()
        )
        self.assertEqual(summary['ciphertext_len'], len((self.dir / 'a.obf').read_text(encoding='utf-8')))

    def test_drawn_seed_is_echoed(self):
        with self.settings(SEED_ENV_VAR='DOBF_TEST_UNSET_SEED'):
            summary, err = self.obfuscate('a')
        self.assertIn(f"seed: {summary['seed']}", err)

    def test_config_file_supplies_options(self):
        config = self.dir / 'opts.toml'
        config.write_text('seed = 99\nrandomness_index = 3\nmax_decode_len = 8\n', encoding='utf-8')
        summary, _ = self.obfuscate('a', '--config', str(config))
        self.assertEqual(summary['seed'], 99)
        self.assertLessEqual(summary['ciphertext_len'], 8)
        meta = json.loads((self.dir / 'a.obf.meta.json').read_text(encoding='utf-8'))
        self.assertEqual(meta['n'], 3)

    def test_flag_beats_config_file(self):
        config = self.dir / 'opts.toml'
        config.write_text('seed = 99\n', encoding='utf-8')
        summary, _ = self.obfuscate('a', '--config', str(config), '--seed', '5')
        self.assertEqual(summary['seed'], 5)

    def test_record_saves_to_ledger(self):
        self.obfuscate('a', '--seed', str(UINT64_MAX), '--record')
        record = CipherRecord.objects.get()
        self.assertEqual(record.seed, UINT64_MAX)
        self.assertEqual(record.plaintext_sha256, sha256_hex(SOURCE))

    def test_missing_input_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('obfuscate', '-i', str(self.dir / 'missing.py'), '-o', str(self.dir / 'x'),
                         '--seed', '1')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_bad_seed_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            self.obfuscate('a', '--seed', str(UINT64_MAX + 1))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_unknown_flag_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            self.obfuscate('a', '--bogus')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_zero_randomness_index_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            self.obfuscate('a', '--seed', '1', '--n', '0')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('randomness_index', str(ctx.exception))
        self.assertFalse((self.dir / 'a.obf').exists())

    def test_non_utf8_input_exits_1(self):
        self.source.write_bytes(b'print(1)\n\xff\xfe')
        with self.assertRaises(CommandError) as ctx:
            self.obfuscate('a', '--seed', '1')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('not valid UTF-8', str(ctx.exception))
