"""Bit-exact .dobk key files.

Layout: magic "DOBK" | u32 version | u32 header_len | UTF-8 JSON header |
little-endian float32 arrays in ARRAY_NAMES order | SHA-256 of all of the
above. Loading only parses JSON and raw floats; nothing stored is executed.
"""
import hashlib
import json
import logging
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from seq2seq_core.config import Seq2SeqConfig
from seq2seq_core.exceptions import InvalidConfig
from seq2seq_core.weights import ARRAY_NAMES, ModelWeights
from text_codec.vocab import CharVocab

from .exceptions import CorruptKey, KeyIOError, UnsupportedVersion
from .keyfile import FORMAT_VERSION, KeyFile
from .serializers import KeyHeaderSerializer

logger = logging.getLogger(__name__)

MAGIC = b'DOBK'
PREAMBLE = struct.Struct('<4sII')
DIGEST_SIZE = hashlib.sha256().digest_size
FLOAT_DTYPE = np.dtype('<f4')
KEY_SUFFIX = '.dobk'


def encode_key(key):
    if not key.is_consistent():
        raise CorruptKey('shape')
    header = json.dumps(
        KeyHeaderSerializer(key).data, sort_keys=True, separators=(',', ':')
    ).encode('utf-8')
    parts = [PREAMBLE.pack(MAGIC, key.format_version, len(header)), header]
    parts.extend(np.ascontiguousarray(arr, dtype=FLOAT_DTYPE).tobytes() for arr in key.weights.arrays())
    body = b''.join(parts)
    return body + hashlib.sha256(body).digest()


def save_key(key, path):
    """Write atomically: temp file in the target directory, fsync, rename."""
    blob = encode_key(key)
    path = Path(path)
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            dir=path.parent, prefix=f'.{path.name}.', delete=False
        ) as fh:
            tmp_name = fh.name
            fh.write(blob)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    except OSError as exc:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise KeyIOError(f'cannot write key {path}: {exc.strerror or exc}') from exc
    logger.info('Saved key %s (%d bytes)', path, len(blob))


def decode_key(data):
    if len(data) < PREAMBLE.size:
        raise CorruptKey('truncated')
    magic, version, header_len = PREAMBLE.unpack_from(data)
    if magic != MAGIC:
        raise CorruptKey('magic')
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(version)
    header_end = PREAMBLE.size + header_len
    if len(data) < header_end + DIGEST_SIZE:
        raise CorruptKey('truncated')

    try:
        raw = json.loads(data[PREAMBLE.size:header_end].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise CorruptKey('header') from None
    serializer = KeyHeaderSerializer(data=raw)
    if not serializer.is_valid() or serializer.validated_data['version'] != version:
        raise CorruptKey('header')
    header = serializer.validated_data

    shapes = [tuple(shape) for shape in header['shapes']]
    payload_size = sum(math.prod(shape) for shape in shapes) * FLOAT_DTYPE.itemsize
    total = header_end + payload_size + DIGEST_SIZE
    if len(data) < total:
        raise CorruptKey('truncated')
    if len(data) > total:
        raise CorruptKey('trailing')
    checksum = data[-DIGEST_SIZE:]
    if hashlib.sha256(data[:-DIGEST_SIZE]).digest() != checksum:
        raise CorruptKey('checksum')

    arrays = {}
    offset = header_end
    for name, shape in zip(ARRAY_NAMES, shapes):
        count = math.prod(shape)
        arrays[name] = np.frombuffer(data, dtype=FLOAT_DTYPE, count=count, offset=offset).reshape(shape)
        offset += count * FLOAT_DTYPE.itemsize

    encoder_vocab = CharVocab.from_code_points(header['enc_vocab'])
    decoder_vocab = CharVocab.from_code_points(header['dec_vocab'])
    try:
        config = Seq2SeqConfig(
            hidden_size=header['hidden_size'],
            input_vocab_size=encoder_vocab.size,
            output_vocab_size=decoder_vocab.size,
            max_decode_len=header['max_decode_len'],
            learning_rate=header['learning_rate'],
            max_iterations=header['max_iterations'],
            check_interval=header['check_interval'],
            seed=header['seed'],
        )
    except InvalidConfig:
        raise CorruptKey('header') from None

    if not decoder_vocab.has_markers:
        raise CorruptKey('vocab')

    key = KeyFile(
        config=config,
        encoder_vocab=encoder_vocab,
        decoder_vocab=decoder_vocab,
        weights=ModelWeights.from_mapping(arrays),
        optimizer_id=header['optimizer'],
        format_version=version,
        checksum=checksum,
    )
    if not key.is_consistent():
        raise CorruptKey('shape')
    if not key.weights.all_finite():
        raise CorruptKey('non-finite')
    return key


def load_key(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise KeyIOError(f'cannot read key {path}: {exc.strerror or exc}') from exc
    key = decode_key(data)
    logger.info('Loaded key %s (H=%d, %d parameters)', path, key.config.hidden_size,
                key.weights.parameter_count())
    return key


def describe_key(key):
    weights = key.weights
    return {
        'format_version': key.format_version,
        'optimizer': key.optimizer_id,
        'hidden_size': key.config.hidden_size,
        'input_vocab_size': key.encoder_vocab.size,
        'output_vocab_size': key.decoder_vocab.size,
        'max_decode_len': key.config.max_decode_len,
        'seed': key.config.seed,
        'shapes': [list(shape) for shape in weights.shapes()],
        'leading_dims': weights.leading_dims(),
        'parameter_count': weights.parameter_count(),
        'layout_value_count': weights.layout_value_count(),
        'weight_bytes': weights.parameter_count() * FLOAT_DTYPE.itemsize,
        'checksum': key.checksum.hex() if key.checksum else None,
    }
