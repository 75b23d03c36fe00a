"""Key generation K(p, c): train an encoder-decoder from ciphertext back to plaintext."""
import logging
import time

from django.conf import settings

from cipher.services import sha256_hex
from key_store.keyfile import KeyFile
from obfuscation_backend.exceptions import DigestMismatch
from obfuscation_backend.fields import UINT64_MAX
from runner.services import deobfuscate
from seq2seq_core.config import pipeline_config
from seq2seq_core.exceptions import InvalidConfig
from seq2seq_core.training import RMSprop, train_to_target
from seq2seq_core.weights import init_trainable
from text_codec.vocab import CharVocab, build_vocab, encode_text, frame_text

from .exceptions import KeyGenFailed
from .models import KeyGenReport

logger = logging.getLogger(__name__)


def default_keygen_config(seed=0):
    return pipeline_config(
        settings.SEQ2SEQ_HIDDEN_SIZE,
        learning_rate=settings.LEARNING_RATE,
        max_iterations=settings.MAX_ITERATIONS,
        check_interval=settings.CHECK_INTERVAL,
        seed=seed,
    )


def training_problem(plaintext, ciphertext, config):
    """Vocabularies, index sequences and sized config for one (c -> p) pair.

    The decode cap is len(plaintext) + 1 so a decoder that runs past the
    plaintext fails the exact-match check.
    """
    encoder_vocab = build_vocab(ciphertext) if ciphertext else CharVocab.markers_only()
    decoder_vocab = build_vocab(plaintext, with_markers=True)
    config = config.replace(
        input_vocab_size=encoder_vocab.size,
        output_vocab_size=decoder_vocab.size,
        max_decode_len=len(plaintext) + 1,
    )
    inputs = encode_text(ciphertext, encoder_vocab)
    target = frame_text(plaintext, decoder_vocab)
    return encoder_vocab, decoder_vocab, config, inputs, target


def generate_key(plaintext, cipher, config=None, max_attempts=None):
    """Train until the pair round-trips; returns (KeyFile, KeyGenReport).

    Attempt k starts from fresh weights seeded with ``config.seed + k``.
    Raises KeyGenFailed, carrying the failed report, when no attempt
    reproduces the plaintext.
    """
    actual = sha256_hex(plaintext)
    if actual != cipher.plaintext_sha256:
        raise DigestMismatch(cipher.plaintext_sha256, actual)
    config = config or default_keygen_config()
    max_attempts = settings.MAX_KEYGEN_ATTEMPTS if max_attempts is None else max_attempts
    if max_attempts < 1:
        raise InvalidConfig(f'max_attempts must be >= 1, got {max_attempts}')

    encoder_vocab, decoder_vocab, config, inputs, target = training_problem(
        plaintext, cipher.ciphertext, config
    )

    start = time.perf_counter()
    iterations = 0
    for attempt in range(max_attempts):
        attempt_config = config.replace(seed=(config.seed + attempt) % (UINT64_MAX + 1))
        optimizer = RMSprop()
        result = train_to_target(
            init_trainable(attempt_config), inputs, target, decoder_vocab, attempt_config,
            optimizer=optimizer,
        )
        iterations += result.iterations_used
        logger.info(
            'Attempt %d/%d: %s after %d iterations (loss %.6f)',
            attempt + 1, max_attempts, 'matched' if result.success else 'no match',
            result.iterations_used, result.final_loss,
        )
        if result.success:
            break

    report = KeyGenReport(
        plaintext_sha256=actual,
        seed=attempt_config.seed,
        iterations_used=iterations,
        final_loss=result.final_loss,
        wall_time_s=time.perf_counter() - start,
        attempts=attempt + 1,
        success=result.success,
    )
    if not result.success:
        raise KeyGenFailed(report.attempts, report)

    key = KeyFile(
        config=attempt_config,
        encoder_vocab=encoder_vocab,
        decoder_vocab=decoder_vocab,
        weights=result.weights,
        optimizer_id=optimizer.identifier,
    )
    return key, report


def verify_roundtrip(key, ciphertext, plaintext):
    return deobfuscate(ciphertext, key).encode('utf-8') == plaintext.encode('utf-8')


def time_keygen(plaintext, ciphertext, config, iterations):
    """Wall time of ``iterations`` training steps with no early stop.

    Used by the cost sweep, where time should follow length rather than
    how quickly a pair happens to converge.
    """
    config = config.replace(max_iterations=iterations, check_interval=max(iterations, 1))
    _, decoder_vocab, config, inputs, target = training_problem(plaintext, ciphertext, config)
    start = time.perf_counter()
    train_to_target(init_trainable(config), inputs, target, decoder_vocab, config, early_stop=False)
    return time.perf_counter() - start
