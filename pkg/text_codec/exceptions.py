from obfuscation_backend.exceptions import ObfuscationError


class EmptyText(ObfuscationError):
    default_code = 'empty_text'


class MarkerCollision(ObfuscationError):
    default_code = 'marker_collision'

    def __init__(self, char):
        self.char = char
        super().__init__(f'text contains reserved marker character U+{ord(char):04X}')


class UnknownCharacter(ObfuscationError):
    default_code = 'unknown_character'

    def __init__(self, position, char):
        self.position = position
        self.char = char
        super().__init__(f'character {char!r} at position {position} is not in the vocabulary')


class IndexOutOfRange(ObfuscationError):
    default_code = 'index_out_of_range'

    def __init__(self, position, index, vocab_size):
        self.position = position
        self.index = index
        super().__init__(
            f'index {index} at position {position} is outside vocabulary of size {vocab_size}'
        )
