"""Spatial-clustering voting ensemble for toponym disambiguation, with the
evaluation harness around it (corpora, predictions, GeoNames, metrics)."""
from .clustering import Cluster, ClusterParams, WeightedEstimate, dbscan_weighted, largest_cluster
from .corpus import Corpus, Mention, filter_misaligned, parse_annotated_xml, parse_mentions_jsonl
from .gazetteer import PlaceCategory, categorize_entry, categorize_mention, load_geonames_tsv, lookup_candidates, population_resolve
from .geodesy import MAX_ERROR_KM, GeoPoint, haversine_km, spherical_centroid
from .kernels import BACKEND
from .metrics import MetricsReport, accuracy_at, auc_norm_log, error_distance, evaluate, macro_average, mean_error
from .predictions import Prediction, PredictionSet, load_predictions, normalize_invalid
from .voting import EnsembleConfig, Resolution, default_config, resolve_corpus, vote

__version__ = "0.1.0"
