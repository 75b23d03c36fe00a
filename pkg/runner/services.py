"""Live execution: recover the plaintext with a key and hand it to an interpreter.

There is no sandbox. Whoever holds the key and runs these functions is the
execution authority; the child process has the caller's privileges.
"""
import hashlib
import logging
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass

from obfuscation_backend.exceptions import DigestMismatch
from seq2seq_core.model import decode_greedy, encode
from text_codec.vocab import encode_text

from .exceptions import ExecutionConfigError, SpawnError

logger = logging.getLogger(__name__)

FILE_PLACEHOLDER = '{file}'


@dataclass(frozen=True)
class ExecutionResult:
    exit_code: int
    stdout: str
    stderr: str
    duration_s: float


def deobfuscate(ciphertext, key):
    """K(c, k): encode ``ciphertext`` with the key's weights and decode greedily."""
    inputs = encode_text(ciphertext, key.encoder_vocab)
    state = encode(key.weights, inputs)
    return decode_greedy(key.weights, state, key.decoder_vocab, key.config.max_decode_len)


def plaintext_digest(plaintext):
    return hashlib.sha256(plaintext.encode('utf-8')).digest()


def build_command(template, path):
    """Split ``template`` shell-style and put ``path`` wherever {file} appears."""
    if not template or not template.strip():
        raise ExecutionConfigError('an interpreter command template is required')
    try:
        parts = shlex.split(template)
    except ValueError as exc:
        raise ExecutionConfigError(f'cannot parse command template: {exc}') from exc
    if not any(FILE_PLACEHOLDER in part for part in parts):
        raise ExecutionConfigError(f'command template must contain {FILE_PLACEHOLDER}')
    return [part.replace(FILE_PLACEHOLDER, str(path)) for part in parts]


def _launch(args, timeout_s):
    try:
        proc = subprocess.Popen(args, stdout=subprocess.PIPE, stderr=subprocess.PIPE, shell=False)
    except OSError as exc:
        raise SpawnError(f'cannot start {args[0]}: {exc.strerror or exc}') from exc
    try:
        output, errors = proc.communicate(timeout=timeout_s)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.communicate()
        raise SpawnError(f'{args[0]} did not finish within {timeout_s} s') from None
    return proc.returncode, output.decode('utf-8', errors='replace'), errors.decode('utf-8', errors='replace')


def execute(ciphertext, key, interpreter_cmd, verify_digest=None, suffix='', timeout_s=None):
    """Exec(K(c, k)) with optional verify-before-run.

    ``verify_digest`` is the expected SHA-256 of the plaintext (bytes or
    hex); on mismatch nothing is executed. The plaintext lives in a 0600
    temporary file that is removed on every exit path.
    """
    build_command(interpreter_cmd, 'placeholder')
    plaintext = deobfuscate(ciphertext, key)
    if verify_digest is not None:
        expected = bytes.fromhex(verify_digest) if isinstance(verify_digest, str) else verify_digest
        actual = plaintext_digest(plaintext)
        if actual != expected:
            raise DigestMismatch(expected.hex(), actual.hex())

    fd, path = tempfile.mkstemp(prefix='dobf-', suffix=suffix)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(plaintext)
        args = build_command(interpreter_cmd, path)
        logger.info('Executing %s', args[0])
        start = time.perf_counter()
        exit_code, stdout, stderr = _launch(args, timeout_s)
        duration = time.perf_counter() - start
    finally:
        try:
            os.unlink(path)
        except FileNotFoundError:
            pass
    logger.info('%s exited with %d after %.3f s', args[0], exit_code, duration)
    return ExecutionResult(exit_code, stdout, stderr, duration)
