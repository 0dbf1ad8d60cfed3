"""Tokenizer/model construction: pretrained checkpoints when obtainable,
a compact randomly initialized encoder for offline toy runs.

Full-scale runs require the named pretrained weights; failures to obtain
them are surfaced verbatim. In toy_scale mode the harness first tries the
pretrained checkpoint and otherwise builds a small encoder of the same
architecture family with a word-level tokenizer fitted on the run's own
training text. Which path was taken is recorded in the run log, so a smoke
result is never mistaken for a pretrained one.
"""

from __future__ import annotations

from collections import Counter

from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    AutoModelForSequenceClassification,
    AutoTokenizer,
    BertConfig,
    BertForSequenceClassification,
    PreTrainedTokenizerFast,
    XLMRobertaConfig,
    XLMRobertaForSequenceClassification,
)

from .config import FinetuneConfig

TOY_HIDDEN = 64
TOY_LAYERS = 2
TOY_HEADS = 2
TOY_INTERMEDIATE = 128
TOY_VOCAB = 2000


def _fit_word_tokenizer(texts: list[str], config: FinetuneConfig):
    """Word-level vocabulary fitted on the given texts, fully deterministic.

    The library's subword trainers count in parallel and break frequency
    ties in thread order, which breaks seeded repeatability; a word-level
    vocab ranked by (count desc, token asc) costs nothing at toy scale and
    is exactly reproducible.
    """
    segmenter = pre_tokenizers.Whitespace()
    counts: Counter = Counter()
    for text in texts:
        counts.update(token for token, _ in segmenter.pre_tokenize_str(text))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3}
    for token, _ in ranked[: TOY_VOCAB - len(vocab)]:
        vocab[token] = len(vocab)

    tokenizer = Tokenizer(models.WordLevel(vocab=vocab, unk_token="[UNK]"))
    tokenizer.pre_tokenizer = segmenter
    tokenizer.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        model_max_length=config.max_sequence_length,
    )


def _compact_model(config: FinetuneConfig, vocab_size: int, pad_token_id: int):
    positions = config.max_sequence_length + 8
    if config.model == "bert-m":
        return BertForSequenceClassification(BertConfig(
            vocab_size=vocab_size,
            hidden_size=TOY_HIDDEN,
            num_hidden_layers=TOY_LAYERS,
            num_attention_heads=TOY_HEADS,
            intermediate_size=TOY_INTERMEDIATE,
            max_position_embeddings=positions,
            num_labels=2,
            pad_token_id=pad_token_id,
        ))
    return XLMRobertaForSequenceClassification(XLMRobertaConfig(
        vocab_size=vocab_size,
        hidden_size=TOY_HIDDEN,
        num_hidden_layers=TOY_LAYERS,
        num_attention_heads=TOY_HEADS,
        intermediate_size=TOY_INTERMEDIATE,
        max_position_embeddings=positions,
        num_labels=2,
        pad_token_id=pad_token_id,
    ))


def _load_pretrained(config: FinetuneConfig):
    tokenizer = AutoTokenizer.from_pretrained(config.checkpoint_name)
    model = AutoModelForSequenceClassification.from_pretrained(
        config.checkpoint_name, num_labels=2
    )
    return tokenizer, model


def build_tokenizer_and_model(config: FinetuneConfig, train_texts: list[str]):
    """Returns (tokenizer, model, source_note)."""
    if config.toy_scale is None:
        tokenizer, model = _load_pretrained(config)   # failures propagate verbatim
        return tokenizer, model, f"pretrained:{config.checkpoint_name}"
    try:
        tokenizer, model = _load_pretrained(config)
        return tokenizer, model, f"pretrained:{config.checkpoint_name}"
    except Exception as exc:   # hub unreachable, cache miss, ...
        note = (
            f"compact-random-init fallback ({type(exc).__name__}: weights for "
            f"{config.checkpoint_name} unobtainable); word-level tokenizer "
            f"fitted on the training rows"
        )
        tokenizer = _fit_word_tokenizer(train_texts, config)
        model = _compact_model(config, len(tokenizer), tokenizer.pad_token_id)
        return tokenizer, model, note
