"""UTF-8 file helpers with newline translation disabled.

Plaintext digests are taken over the exact characters on disk, so a
CRLF file must not come back as LF.
"""
from .exceptions import TextEncodingError


def read_text(path):
    try:
        with open(path, encoding='utf-8', newline='') as fh:
            return fh.read()
    except UnicodeDecodeError as exc:
        raise TextEncodingError(path, exc.start) from exc


def write_text(path, text):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(text)
