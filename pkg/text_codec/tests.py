import itertools

from django.test import SimpleTestCase
from hypothesis import given
from hypothesis import strategies as st

from .exceptions import EmptyText, IndexOutOfRange, MarkerCollision, UnknownCharacter
from .vocab import EOS, SOS, CharVocab, IndexSequence, build_vocab, decode_text, encode_text, frame_text

PLAIN_TEXT = st.text(
    alphabet=st.characters(blacklist_categories=('Cs',), blacklist_characters=(SOS, EOS)),
    min_size=1,
)


class BuildVocabTests(SimpleTestCase):
    def test_deduplicates_and_sorts(self):
        vocab = build_vocab('aba')
        self.assertEqual(vocab.chars, ('a', 'b'))
        self.assertEqual(vocab.size, 2)
        self.assertFalse(vocab.has_markers)

    def test_appends_markers(self):
        vocab = build_vocab('ba', with_markers=True)
        self.assertEqual(vocab.chars, ('a', 'b', SOS, EOS))
        self.assertEqual((vocab.sos_index, vocab.eos_index), (2, 3))
        self.assertEqual(vocab.symbols, ('a', 'b'))

    def test_counts_distinct_characters(self):
        charset = ''.join(chr(cp) for cp in range(32, 127))
        self.assertEqual(build_vocab(charset * 2).size, 95)

    def test_empty_text(self):
        with self.assertRaises(EmptyText):
            build_vocab('')

    def test_marker_collision(self):
        for with_markers in (False, True):
            with self.assertRaises(MarkerCollision):
                build_vocab(f'x{SOS}', with_markers)
            with self.assertRaises(MarkerCollision):
                build_vocab(f'{EOS}y', with_markers)

    def test_markers_only(self):
        vocab = CharVocab.markers_only()
        self.assertEqual(vocab.size, 2)
        self.assertEqual(vocab.symbols, ())

    def test_code_point_round_trip(self):
        for vocab in (build_vocab('héllo'), build_vocab('print(1)', with_markers=True)):
            self.assertEqual(CharVocab.from_code_points(vocab.code_points()), vocab)

    def test_rejects_duplicates(self):
        with self.assertRaises(ValueError):
            CharVocab(('a', 'a'))

    @given(PLAIN_TEXT)
    def test_bijection(self, text):
        vocab = build_vocab(text, with_markers=True)
        self.assertEqual(list(vocab.chars), sorted(vocab.chars[:-2]) + [SOS, EOS])
        for index, char in vocab.char_at.items():
            self.assertEqual(vocab.index_of[char], index)
        self.assertEqual(sorted(vocab.char_at), list(range(vocab.size)))
        self.assertEqual(build_vocab(text, with_markers=True), vocab)


class EncodeDecodeTests(SimpleTestCase):
    def setUp(self):
        self.vocab = build_vocab('ab')

    def test_examples(self):
        self.assertEqual(encode_text('ab', self.vocab).indices, (0, 1))
        self.assertEqual(encode_text('', self.vocab).indices, ())
        self.assertEqual(decode_text(IndexSequence((1, 0), 2), self.vocab), 'ba')
        self.assertEqual(decode_text(IndexSequence((), 2), self.vocab), '')

    def test_unknown_character_position(self):
        with self.assertRaises(UnknownCharacter) as ctx:
            encode_text('abca', self.vocab)
        self.assertEqual((ctx.exception.position, ctx.exception.char), (2, 'c'))

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            IndexSequence((0, 2), 2)
        with self.assertRaises(IndexOutOfRange) as ctx:
            decode_text(IndexSequence((0, 1, 2), 3), self.vocab)
        self.assertEqual(ctx.exception.position, 2)

    def test_round_trip_exhaustive_over_short_texts(self):
        vocab = build_vocab('xyz')
        for n in range(5):
            for chars in itertools.product('xyz', repeat=n):
                text = ''.join(chars)
                self.assertEqual(decode_text(encode_text(text, vocab), vocab), text)

    @given(PLAIN_TEXT)
    def test_round_trip(self, text):
        vocab = build_vocab(text)
        encoded = encode_text(text, vocab)
        self.assertEqual(len(encoded), len(text))
        self.assertEqual(decode_text(encoded, vocab), text)

    def test_frame_text(self):
        vocab = build_vocab('ab', with_markers=True)
        self.assertEqual(frame_text('ba', vocab).indices, (2, 1, 0, 3))
        with self.assertRaises(ValueError):
            frame_text('ab', self.vocab)
