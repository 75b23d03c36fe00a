"""Character vocabularies and text <-> index conversion.

A vocabulary is the sorted set of distinct characters of a text, optionally
followed by the start and end markers used to frame decoder sequences.
"""
from dataclasses import dataclass, field
from types import MappingProxyType

from .exceptions import EmptyText, IndexOutOfRange, MarkerCollision, UnknownCharacter

SOS = '\x02'
EOS = '\x03'
MARKERS = (SOS, EOS)


@dataclass(frozen=True)
class CharVocab:
    """Bijective character <-> index mapping over 0..V-1."""

    chars: tuple
    has_markers: bool = False
    index_of: MappingProxyType = field(init=False, repr=False, compare=False)
    char_at: MappingProxyType = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        chars = tuple(self.chars)
        if len(set(chars)) != len(chars):
            raise ValueError('vocabulary characters must be distinct')
        if self.has_markers and chars[-2:] != MARKERS:
            raise ValueError('a marked vocabulary must end with the SOS and EOS markers')
        object.__setattr__(self, 'chars', chars)
        object.__setattr__(self, 'index_of', MappingProxyType({c: i for i, c in enumerate(chars)}))
        object.__setattr__(self, 'char_at', MappingProxyType(dict(enumerate(chars))))

    def __len__(self):
        return len(self.chars)

    def __contains__(self, char):
        return char in self.index_of

    @property
    def size(self):
        return len(self.chars)

    @property
    def sos_index(self):
        return self.index_of[SOS] if self.has_markers else None

    @property
    def eos_index(self):
        return self.index_of[EOS] if self.has_markers else None

    @property
    def symbols(self):
        """Characters that may appear in text, i.e. everything but the markers."""
        return self.chars[:-2] if self.has_markers else self.chars

    def code_points(self):
        return [ord(c) for c in self.chars]

    @classmethod
    def from_code_points(cls, points):
        chars = tuple(chr(p) for p in points)
        return cls(chars, has_markers=chars[-2:] == MARKERS)

    @classmethod
    def markers_only(cls):
        return cls(MARKERS, has_markers=True)


@dataclass(frozen=True)
class IndexSequence:
    indices: tuple
    vocab_size: int

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        for position, index in enumerate(indices):
            if not 0 <= index < self.vocab_size:
                raise IndexOutOfRange(position, index, self.vocab_size)
        object.__setattr__(self, 'indices', indices)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def _reject_markers(text):
    for marker in MARKERS:
        if marker in text:
            raise MarkerCollision(marker)


def build_vocab(text, with_markers=False):
    """Sorted distinct characters of ``text``, plus SOS/EOS if requested."""
    if not text:
        raise EmptyText('cannot build a vocabulary from empty text')
    _reject_markers(text)
    chars = tuple(sorted(set(text)))
    if with_markers:
        chars += MARKERS
    return CharVocab(chars, has_markers=with_markers)


def encode_text(text, vocab):
    indices = []
    for position, char in enumerate(text):
        try:
            indices.append(vocab.index_of[char])
        except KeyError:
            raise UnknownCharacter(position, char) from None
    return IndexSequence(tuple(indices), vocab.size)


def decode_text(seq, vocab):
    chars = []
    for position, index in enumerate(seq.indices):
        try:
            chars.append(vocab.char_at[index])
        except KeyError:
            raise IndexOutOfRange(position, index, vocab.size) from None
    return ''.join(chars)


def frame_text(text, vocab):
    """SOS + text + EOS as decoder training target."""
    if not vocab.has_markers:
        raise ValueError('framing requires a vocabulary with markers')
    body = encode_text(text, vocab).indices
    return IndexSequence((vocab.sos_index, *body, vocab.eos_index), vocab.size)
