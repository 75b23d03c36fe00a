import os
import tempfile
from pathlib import Path
from unittest import mock

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from .config import ConfigError, load_config_file, parse_seed, resolve_option, resolve_seed
from .exceptions import DigestMismatch, ObfuscationError, TextEncodingError
from .fields import UINT64_MAX, UInt64Field
from .textio import read_text, write_text


class ConfigFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'opts.toml'

    def tearDown(self):
        self.tmp.cleanup()

    def load(self, content):
        self.path.write_text(content, encoding='utf-8')
        return load_config_file(self.path)

    def test_no_file(self):
        self.assertEqual(load_config_file(None), {})

    def test_values(self):
        values = self.load('hidden_size = 32\nlearning_rate = 0.005\nseed = "18446744073709551615"\n')
        self.assertEqual(values, {'hidden_size': 32, 'learning_rate': 0.005, 'seed': UINT64_MAX})

    def test_rejects_unknown_keys(self):
        with self.assertRaisesMessage(ConfigError, 'hiden_size'):
            self.load('hiden_size = 32\n')

    def test_rejects_wrong_types(self):
        for content in ('hidden_size = 3.5\n', 'trials = "many"\n', 'jobs = true\n', 'seed = -1\n'):
            with self.assertRaises(ConfigError, msg=content):
                self.load(content)

    def test_rejects_invalid_toml(self):
        with self.assertRaises(ConfigError):
            self.load('hidden_size = \n')

    @override_settings(SEQ2SEQ_HIDDEN_SIZE=48)
    def test_precedence(self):
        self.assertEqual(resolve_option('hidden_size', 8, {'hidden_size': 16}), 8)
        self.assertEqual(resolve_option('hidden_size', None, {'hidden_size': 16}), 16)
        self.assertEqual(resolve_option('hidden_size', None, {}), 48)


class SeedTests(SimpleTestCase):
    def test_parse_seed_bounds(self):
        self.assertEqual(parse_seed('0'), 0)
        self.assertEqual(parse_seed(str(UINT64_MAX)), UINT64_MAX)
        for raw in ('-1', str(UINT64_MAX + 1), 'abc', None):
            with self.assertRaises(ConfigError):
                parse_seed(raw)

    def test_seed_precedence(self):
        with mock.patch.dict(os.environ, {'DOBF_SEED': '3'}):
            self.assertEqual(resolve_seed('1', {'seed': 2}), (1, False))
            self.assertEqual(resolve_seed(None, {'seed': 2}), (2, False))
            self.assertEqual(resolve_seed(None, {}), (3, False))

    def test_entropy_fallback(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            seed, drawn = resolve_seed(None, {})
        self.assertTrue(drawn)
        self.assertTrue(0 <= seed <= UINT64_MAX)


class ExceptionTests(SimpleTestCase):
    def test_default_message_and_exit_codes(self):
        self.assertEqual(str(ObfuscationError()), 'error')
        self.assertEqual(ObfuscationError.exit_code, 1)
        error = DigestMismatch('aa', 'bb')
        self.assertEqual(error.exit_code, 3)
        self.assertIn('expected aa', str(error))


class UInt64FieldTests(SimpleTestCase):
    def test_conversions(self):
        field = UInt64Field()
        self.assertEqual(field.get_prep_value(UINT64_MAX), str(UINT64_MAX))
        self.assertEqual(field.to_python(str(UINT64_MAX)), UINT64_MAX)
        self.assertEqual(field.from_db_value('42', None, None), 42)
        self.assertIsNone(field.from_db_value(None, None, None))

    def test_validation(self):
        field = UInt64Field()
        field.clean(UINT64_MAX, None)
        for value in (-1, UINT64_MAX + 1, 'x'):
            with self.assertRaises(ValidationError):
                field.clean(value, None)

    def test_deconstruct_omits_length(self):
        _, path, _, kwargs = UInt64Field().deconstruct()
        self.assertEqual(path, 'obfuscation_backend.fields.UInt64Field')
        self.assertNotIn('max_length', kwargs)


class TextIOTests(SimpleTestCase):
    def test_line_endings_preserved(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'crlf.txt'
            write_text(path, 'a\r\nb\n')
            self.assertEqual(path.read_bytes(), b'a\r\nb\n')
            self.assertEqual(read_text(path), 'a\r\nb\n')

    def test_invalid_utf8_is_a_pipeline_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'latin.py'
            path.write_bytes(b'x = 1\n\xff\xfe')
            with self.assertRaises(TextEncodingError) as ctx:
                read_text(path)
        self.assertEqual(ctx.exception.position, 6)
        self.assertEqual(ctx.exception.exit_code, 1)
        self.assertIsInstance(ctx.exception, ObfuscationError)
