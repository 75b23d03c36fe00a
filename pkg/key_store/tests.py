import hashlib
import json
import struct
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from seq2seq_core.config import Seq2SeqConfig, reference_config
from seq2seq_core.training import RMSprop
from seq2seq_core.weights import init_trainable, zeros
from text_codec.vocab import CharVocab, build_vocab

from .exceptions import CorruptKey, KeyIOError, UnsupportedVersion
from .keyfile import KeyFile
from .storage import PREAMBLE, decode_key, describe_key, encode_key, load_key, save_key


def make_key(hidden_size=4, seed=7):
    encoder_vocab = build_vocab('q#z')
    decoder_vocab = build_vocab('print(1)', with_markers=True)
    config = Seq2SeqConfig(
        hidden_size=hidden_size,
        input_vocab_size=encoder_vocab.size,
        output_vocab_size=decoder_vocab.size,
        max_decode_len=9,
        max_iterations=100,
        check_interval=10,
        seed=seed,
    )
    return KeyFile(
        config=config,
        encoder_vocab=encoder_vocab,
        decoder_vocab=decoder_vocab,
        weights=init_trainable(config),
        optimizer_id=RMSprop().identifier,
    )


def resign(blob, mutate):
    """Rewrite the JSON header of an encoded key and recompute its checksum."""
    magic, version, header_len = PREAMBLE.unpack_from(blob)
    header_end = PREAMBLE.size + header_len
    header = json.loads(blob[PREAMBLE.size:header_end])
    mutate(header)
    raw = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
    body = PREAMBLE.pack(magic, version, len(raw)) + raw + blob[header_end:-32]
    return body + hashlib.sha256(body).digest()


class KeyFileRoundTripTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.key = make_key()

    def tearDown(self):
        self.tmp.cleanup()

    def test_save_load_save_is_byte_identical(self):
        first = self.dir / 'a.dobk'
        second = self.dir / 'b.dobk'
        save_key(self.key, first)
        loaded = load_key(first)
        save_key(loaded, second)

        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertEqual(loaded, self.key)
        self.assertEqual(loaded.checksum, first.read_bytes()[-32:])

    def test_loaded_weights_are_bitwise_equal(self):
        path = self.dir / 'k.dobk'
        save_key(self.key, path)
        loaded = load_key(path)
        for original, restored in zip(self.key.weights.arrays(), loaded.weights.arrays()):
            self.assertEqual(restored.dtype, np.float32)
            self.assertEqual(original.tobytes(), restored.tobytes())

    def test_save_leaves_no_temp_files(self):
        save_key(self.key, self.dir / 'k.dobk')
        self.assertEqual([p.name for p in self.dir.iterdir()], ['k.dobk'])

    def test_missing_directory_is_io_error(self):
        with self.assertRaises(KeyIOError):
            save_key(self.key, self.dir / 'missing' / 'k.dobk')
        with self.assertRaises(KeyIOError):
            load_key(self.dir / 'nothing.dobk')

    def test_inconsistent_key_is_refused_on_save(self):
        broken = KeyFile(
            config=self.key.config.replace(hidden_size=5),
            encoder_vocab=self.key.encoder_vocab,
            decoder_vocab=self.key.decoder_vocab,
            weights=self.key.weights,
            optimizer_id=self.key.optimizer_id,
        )
        with self.assertRaises(CorruptKey) as ctx:
            save_key(broken, self.dir / 'k.dobk')
        self.assertEqual(ctx.exception.reason, 'shape')
        self.assertFalse((self.dir / 'k.dobk').exists())


class CorruptKeyTests(SimpleTestCase):
    def setUp(self):
        self.blob = encode_key(make_key())

    def assertReason(self, blob, reason):
        with self.assertRaises(CorruptKey) as ctx:
            decode_key(blob)
        self.assertEqual(ctx.exception.reason, reason)

    def test_flipped_payload_byte(self):
        blob = bytearray(self.blob)
        blob[-40] ^= 0x01
        self.assertReason(bytes(blob), 'checksum')

    def test_flipped_checksum_byte(self):
        blob = bytearray(self.blob)
        blob[-1] ^= 0xFF
        self.assertReason(bytes(blob), 'checksum')

    def test_truncated_file(self):
        self.assertReason(self.blob[:-1], 'truncated')
        self.assertReason(self.blob[:100], 'truncated')
        self.assertReason(self.blob[:5], 'truncated')
        self.assertReason(b'', 'truncated')

    def test_trailing_bytes(self):
        self.assertReason(self.blob + b'\x00', 'trailing')

    def test_bad_magic(self):
        self.assertReason(b'XXXX' + self.blob[4:], 'magic')

    def test_unsupported_version(self):
        blob = self.blob[:4] + struct.pack('<I', 2) + self.blob[8:]
        with self.assertRaises(UnsupportedVersion) as ctx:
            decode_key(blob)
        self.assertEqual(ctx.exception.version, 2)

    def test_header_that_is_not_json(self):
        blob = bytearray(self.blob)
        blob[PREAMBLE.size] = ord('!')
        self.assertReason(bytes(blob), 'header')

    def test_header_with_invalid_values(self):
        def negative_rate(header):
            header['learning_rate'] = -1.0
        self.assertReason(resign(self.blob, negative_rate), 'header')

    def test_header_version_must_match_preamble(self):
        def other_version(header):
            header['version'] = 3
        self.assertReason(resign(self.blob, other_version), 'header')

    def test_shapes_disagreeing_with_vocabularies(self):
        def drop_encoder_char(header):
            header['enc_vocab'] = header['enc_vocab'][:-1]
        self.assertReason(resign(self.blob, drop_encoder_char), 'shape')

    def test_decoder_vocabulary_without_markers(self):
        def unmark(header):
            header['dec_vocab'] = header['dec_vocab'][:-2] + [0x41, 0x42]
        self.assertReason(resign(self.blob, unmark), 'vocab')

    def test_non_finite_weights(self):
        key = make_key()
        key.weights.proj_bias[0] = np.nan
        self.assertReason(encode_key(key), 'non-finite')


class DescribeKeyTests(SimpleTestCase):
    def test_reference_layout(self):
        config = reference_config()
        key = KeyFile(
            config=config,
            encoder_vocab=CharVocab(tuple(chr(0x100 + i) for i in range(39))),
            decoder_vocab=CharVocab(tuple(chr(0x200 + i) for i in range(70)) + ('\x02', '\x03'),
                                    has_markers=True),
            weights=zeros(config),
            optimizer_id=RMSprop().identifier,
        )
        info = describe_key(key)

        self.assertEqual(info['parameter_count'], 658_504)
        self.assertEqual(info['layout_value_count'], 975_872)
        self.assertEqual(sum(info['leading_dims']), 39 + 256 + 1024 + 72 + 256 + 1024 + 256 + 72)
        self.assertEqual(info['shapes'][0], [39, 1024])
        self.assertEqual(info['shapes'][-1], [72])
        self.assertIsNone(info['checksum'])

    def test_inspectkey_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'k.dobk'
            key = make_key()
            save_key(key, path)
            out = StringIO()
            call_command('inspectkey', str(path), stdout=out)

        info = json.loads(out.getvalue())
        self.assertEqual(info['hidden_size'], 4)
        self.assertEqual(info['input_vocab_size'], 3)
        self.assertEqual(info['output_vocab_size'], key.decoder_vocab.size)
        self.assertEqual(info['optimizer'], 'rmsprop(decay=0.9,eps=1e-07,clip=5.0)')
        self.assertEqual(len(info['checksum']), 64)

    def test_inspectkey_on_garbage_exits_with_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'k.dobk'
            path.write_bytes(b'not a key')
            with self.assertRaises(CommandError) as ctx:
                call_command('inspectkey', str(path))
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('truncated', str(ctx.exception))
