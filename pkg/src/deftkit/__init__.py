"""Definition extraction toolkit for DEFT-format corpora."""

from deftkit.tags import BioTag, TagSchema, DEFAULT_TYPES
from deftkit.corpus import (
    Token,
    Sentence,
    ClassificationInstance,
    parse_file,
    serialize_file,
    concat_folder,
    to_classification,
    holdout_split,
)
from deftkit.cleaning import CleanReport, clean_sentence, strip_enumeration, strip_links
from deftkit.classifier import NaiveBayesModel, Prediction, tokenize, train_nb, predict_nb
from deftkit.tagger import ChainModel, extract_features, viterbi_decode, train_perceptron, validate_sequence
from deftkit.metrics import EvalReport, score_classification, score_tokens, render_report

__version__ = "0.1.0"
