"""Speaker-agnostic foreground speech detection for wrist-worn audio."""

__version__ = "0.1.0"

from .audio_io import AudioClip, InstanceWindow, frame_instances, load_wav, write_wav
from .augment import NoiseClip, augment_corpus, mix_at_snr
from .clustering import ClusterAssignment, ClusteringConfig, cluster, kmedoids, kmeans, spectral
from .evaluation import EvalReport, cohens_kappa, logo_splits, pool_groups, run_logo, score
from .features import FeatureMatrix, fft_features, mel_spectrogram
from .labeling import ClusterSummary, LabelingResult, assign_fg_bg, summarize_cluster
from .store import (BinaryLabel, FineLabel, InstanceRecord, Session, Store,
                    cosine_similarity, pairwise_similarity, project_binary,
                    read_store, write_store)
from .synth import SynthConfig, generate_embeddings, generate_tone_corpus

__all__ = [
    "AudioClip", "InstanceWindow", "frame_instances", "load_wav", "write_wav",
    "NoiseClip", "augment_corpus", "mix_at_snr",
    "ClusterAssignment", "ClusteringConfig", "cluster", "kmedoids", "kmeans", "spectral",
    "EvalReport", "cohens_kappa", "logo_splits", "pool_groups", "run_logo", "score",
    "FeatureMatrix", "fft_features", "mel_spectrogram",
    "ClusterSummary", "LabelingResult", "assign_fg_bg", "summarize_cluster",
    "BinaryLabel", "FineLabel", "InstanceRecord", "Session", "Store",
    "cosine_similarity", "pairwise_similarity", "project_binary",
    "read_store", "write_store",
    "SynthConfig", "generate_embeddings", "generate_tone_corpus",
]
