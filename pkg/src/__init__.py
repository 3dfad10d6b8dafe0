"""
premise-forge: question premises for visual question relevance.

This package extracts the premises (objects, attributes and relations) a
visual question takes for granted, generates simple QA pairs from them,
builds relevant/irrelevant image tuples for question relevance, and trains
small classifiers that detect and explain false premises.

Modules:
- config: Configuration and environment setup
- schemas: Pydantic schemas shared across the pipeline
- errors: Exception hierarchy
- lexicon: Tag lexicon and word lists for the shallow parser
- premise_extraction: Question tagging, scene-graph parsing and premises
- spice_metric: Tuple-matching F1 between premise sets
- premise_qgen: Templated question generation from premises
- annotation_store: Object/attribute annotations and premise truth
- features: Image feature files and word embeddings
- qrpe_builder: (I+, Q, P, I-) tuple construction and dataset analysis
- relevance_nn: Encoders and numpy MLP classifiers
- explanation: Sentences explaining false premises
- augmentation: Augmentation strategies and training-set merging
- reports: Plain-text reports
- cli: Command-line interface
"""

__version__ = "0.1.0"
