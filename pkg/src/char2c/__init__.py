"""char2c: a character-level LSTM encoder-decoder that turns a short natural
language comment into a small C program, together with the synthetic corpus
generator, the mini-C interpreter used to judge generated code, and the
evaluation toolkit (char-fix distance, memorization and clone analysis)."""

__version__ = "0.1.0"
