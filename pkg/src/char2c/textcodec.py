"""Character vocabulary and text<->id conversion.

Id 0 is the end-of-sequence marker, id 1 the decoder start marker, and
ids 2+ are the corpus characters in ascending code-point order. The
vocabulary is closed: unknown characters are an error, never dropped or
replaced, so a generated program can only ever contain real corpus
characters.
"""

from dataclasses import dataclass, field

EOS = "<eos>"
SOS = "<sos>"
EOS_ID = 0
SOS_ID = 1
_NUM_SPECIALS = 2


class UnknownCharacterError(ValueError):
    """Raised when text contains characters outside the vocabulary."""


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple[str, ...]  # symbols[id] -> symbol; [0]=<eos>, [1]=<sos>
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbols) < _NUM_SPECIALS or self.symbols[0] != EOS or self.symbols[1] != SOS:
            raise ValueError("vocabulary must start with <eos>, <sos>")
        chars = self.symbols[_NUM_SPECIALS:]
        if len(set(chars)) != len(chars) or any(len(c) != 1 for c in chars):
            raise ValueError("vocabulary characters must be distinct single characters")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def id_of(self, char: str) -> int:
        try:
            return self._index[char]
        except KeyError:
            raise UnknownCharacterError(f"character {char!r} not in vocabulary") from None


def build_vocab(corpus) -> Vocabulary:
    """Vocabulary over every character of every comment and code in the corpus."""
    if not corpus:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    chars = set()
    for sample in corpus:
        chars.update(sample.comment)
        chars.update(sample.code)
    return Vocabulary((EOS, SOS) + tuple(sorted(chars)))


def encode_text(vocab: Vocabulary, text: str) -> list[int]:
    """Map each character to its id; unknown characters are reported with byte offsets."""
    ids = []
    bad = []
    byte_off = 0
    for ch in text:
        i = vocab._index.get(ch)
        if i is None:
            bad.append(f"{ch!r} at byte offset {byte_off}")
        else:
            ids.append(i)
        byte_off += len(ch.encode("utf-8"))
    if bad:
        raise UnknownCharacterError("characters not in vocabulary: " + ", ".join(bad))
    return ids


def decode_ids(vocab: Vocabulary, ids) -> str:
    """Inverse of encode_text; special ids are rejected."""
    out = []
    for i in ids:
        if not 0 <= i < len(vocab.symbols):
            raise ValueError(f"id {i} out of range for vocabulary of size {len(vocab.symbols)}")
        if i < _NUM_SPECIALS:
            raise ValueError(f"id {i} is the special symbol {vocab.symbols[i]}, not a character")
        out.append(vocab.symbols[i])
    return "".join(out)
