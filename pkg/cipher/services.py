"""Ciphertext generation: plaintext through a randomly weighted encoder-decoder."""
import hashlib
import json
import logging
from pathlib import Path

from django.conf import settings

from obfuscation_backend.textio import read_text, write_text
from seq2seq_core.config import pipeline_config
from seq2seq_core.model import decode_greedy, encode
from seq2seq_core.weights import init_random
from text_codec.exceptions import EmptyText
from text_codec.vocab import build_vocab, encode_text

from .exceptions import CharsetTooSmall, CipherMetaError
from .models import CipherRecord
from .serializers import CipherMetaSerializer

logger = logging.getLogger(__name__)

DEFAULT_CHARSET_ID = 'printable-ascii-95'
CIPHER_SUFFIX = '.obf'
META_SUFFIX = '.obf.meta.json'


def default_charset():
    """Printable ASCII 33-126 plus space: 95 characters."""
    return ''.join(chr(cp) for cp in range(33, 127)) + ' '


def sha256_hex(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def charset_id(charset):
    if sorted(set(charset)) == sorted(default_charset()):
        return DEFAULT_CHARSET_ID
    return 'custom-' + sha256_hex(''.join(sorted(set(charset))))[:16]


def generate_ciphertext(plaintext, charset=None, config=None, randomness_index=None):
    """C(p): decode the plaintext's encoder state under random weights.

    The encoder reads the plaintext vocabulary; the decoder emits over the
    charset joined with the plaintext characters, with plaintext-only
    characters suppressed so every output character is in the charset.
    ``config`` vocabulary sizes are replaced by the derived ones.
    """
    if not plaintext:
        raise EmptyText('cannot obfuscate empty text')
    charset = default_charset() if charset is None else charset
    if len(set(charset)) < 2:
        raise CharsetTooSmall(f'charset needs at least 2 distinct characters, got {len(set(charset))}')
    config = config or pipeline_config(settings.SEQ2SEQ_HIDDEN_SIZE, max_decode_len=settings.MAX_DECODE_LEN)
    if randomness_index is None:
        randomness_index = settings.RANDOMNESS_INDEX

    in_vocab = build_vocab(plaintext)
    out_vocab = build_vocab(''.join(set(charset) | set(plaintext)), with_markers=True)
    config = config.replace(input_vocab_size=in_vocab.size, output_vocab_size=out_vocab.size)

    weights = init_random(config, randomness_index)
    state = encode(weights, encode_text(plaintext, in_vocab))
    ciphertext = decode_greedy(
        weights, state, out_vocab, config.max_decode_len, suppress=set(plaintext) - set(charset)
    )
    logger.debug(
        'Generated %d-char ciphertext for %d-char plaintext (seed=%d, n=%d)',
        len(ciphertext), len(plaintext), config.seed, randomness_index,
    )
    return CipherRecord(
        ciphertext=ciphertext,
        plaintext_sha256=sha256_hex(plaintext),
        seed=config.seed,
        randomness_index=randomness_index,
        charset_id=charset_id(charset),
        config=config.to_dict(),
    )


def cipher_paths(out_prefix):
    return Path(f'{out_prefix}{CIPHER_SUFFIX}'), Path(f'{out_prefix}{META_SUFFIX}')


def write_cipher_files(record, out_prefix):
    """Write <prefix>.obf and its single-line JSON sidecar."""
    obf_path, meta_path = cipher_paths(out_prefix)
    meta = CipherMetaSerializer(record).data
    write_text(obf_path, record.ciphertext)
    write_text(meta_path, json.dumps(meta, sort_keys=True, separators=(',', ':')) + '\n')
    logger.info('Wrote %s and %s', obf_path, meta_path)
    return obf_path, meta_path


def read_cipher_files(obf_path, meta_path=None):
    """Rebuild a CipherRecord from a ciphertext file and its sidecar."""
    meta_path = Path(meta_path) if meta_path else Path(f'{obf_path}.meta.json')
    ciphertext = read_text(obf_path)
    try:
        raw = json.loads(read_text(meta_path))
    except json.JSONDecodeError as exc:
        raise CipherMetaError(f'{meta_path}: not a JSON document ({exc})') from exc

    serializer = CipherMetaSerializer(data=raw)
    if not serializer.is_valid():
        raise CipherMetaError(f'{meta_path}: {dict(serializer.errors)}')
    meta = serializer.validated_data
    config = pipeline_config(
        meta['hidden_size'], max_decode_len=meta['max_decode_len'], seed=meta['seed']
    )
    return CipherRecord(
        ciphertext=ciphertext,
        plaintext_sha256=meta['plaintext_sha256'],
        seed=meta['seed'],
        randomness_index=meta['randomness_index'],
        charset_id=meta['charset_id'],
        config=config.to_dict(),
    )
