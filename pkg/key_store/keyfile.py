from dataclasses import dataclass

from seq2seq_core.config import Seq2SeqConfig
from seq2seq_core.weights import ModelWeights
from text_codec.vocab import CharVocab

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class KeyFile:
    """Trained decoder-side weights plus the vocabularies needed to apply them.

    ``checksum`` is the SHA-256 trailer; it is filled in by load_key and
    ignored when comparing keys.
    """

    config: Seq2SeqConfig
    encoder_vocab: CharVocab
    decoder_vocab: CharVocab
    weights: ModelWeights
    optimizer_id: str
    format_version: int = FORMAT_VERSION
    checksum: bytes = None

    def __eq__(self, other):
        if not isinstance(other, KeyFile):
            return NotImplemented
        return (
            self.format_version == other.format_version
            and self.config == other.config
            and self.encoder_vocab == other.encoder_vocab
            and self.decoder_vocab == other.decoder_vocab
            and self.optimizer_id == other.optimizer_id
            and self.weights.bitwise_equal(other.weights)
        )

    __hash__ = None

    def is_consistent(self):
        return (
            self.decoder_vocab.has_markers
            and self.config.input_vocab_size == self.encoder_vocab.size
            and self.config.output_vocab_size == self.decoder_vocab.size
            and self.weights.matches(self.config)
        )
