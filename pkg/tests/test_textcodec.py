import pytest

from char2c.corpus import SeqSample
from char2c.textcodec import (EOS, SOS, UnknownCharacterError, Vocabulary,
                              build_vocab, decode_ids, encode_text)


def _mini(*texts):
    return [SeqSample("p", "", t) for t in texts]


def test_build_vocab_sorted_table():
    v = build_vocab(_mini("ab", "ba"))
    assert v.symbols == (EOS, SOS, "a", "b")


def test_rebuild_is_identical():
    corpus = _mini("hello", "world")
    assert build_vocab(corpus).symbols == build_vocab(corpus).symbols


def test_comment_characters_get_ids():
    corpus = [SeqSample("p", "zq", "ab")]
    v = build_vocab(corpus)
    assert "z" in v.symbols and "q" in v.symbols


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        build_vocab([])


def test_encode_basic():
    v = build_vocab(_mini("ab", "ba"))
    assert encode_text(v, "ab") == [2, 3]
    assert encode_text(v, "") == []


def test_encode_unknown_char_reports_offset():
    v = build_vocab(_mini("ab"))
    with pytest.raises(UnknownCharacterError, match=r"'x' at byte offset 1"):
        encode_text(v, "ax")


def test_encode_unknown_reports_byte_offsets_for_multibyte_text():
    v = build_vocab(_mini("ab"))
    with pytest.raises(UnknownCharacterError) as exc:
        encode_text(v, "é存x")  # 2-byte char, 3-byte char, then x at byte 5
    msg = str(exc.value)
    assert "byte offset 0" in msg and "byte offset 2" in msg and "byte offset 5" in msg


def test_decode_inverse_and_specials_rejected():
    v = build_vocab(_mini("ab", "ba"))
    assert decode_ids(v, encode_text(v, "abba")) == "abba"
    assert decode_ids(v, []) == ""
    with pytest.raises(ValueError, match="special"):
        decode_ids(v, [0])
    with pytest.raises(ValueError, match="special"):
        decode_ids(v, [1])
    with pytest.raises(ValueError, match="out of range"):
        decode_ids(v, [99])


def test_roundtrip_over_generated_corpus(small_corpus):
    v = build_vocab(small_corpus)
    for sample in small_corpus:
        assert decode_ids(v, encode_text(v, sample.code)) == sample.code
        assert decode_ids(v, encode_text(v, sample.comment)) == sample.comment


def test_vocabulary_validation():
    with pytest.raises(ValueError):
        Vocabulary(("a", "b"))
    with pytest.raises(ValueError):
        Vocabulary((EOS, SOS, "a", "a"))
    with pytest.raises(ValueError):
        Vocabulary((EOS, SOS, "ab"))
