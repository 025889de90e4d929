"""Game-theoretic influence measures for features of binary classifiers,
with a-priori unions over the features."""

from .dataset import (
    Dataset,
    FeatureSpace,
    Schema,
    balanced_subsample,
    dump_dataset,
    load_dataset,
    permute_features,
    read_canonical,
    relabel_states,
    wl_view,
)
from .games import Game, evaluate, game_from_sample, is_simple, sample_from_game, table_game, weighted_majority
from .indices import IndexVector, banzhaf, banzhaf_owen, banzhaf_owen_mc
from .measures import InfluenceReport, axiom_check, chi, normalize, pearson, psi, rank, weighted_psi
from .partition import (
    DependencyModel,
    Partition,
    detach,
    hierarchical_partition,
    jaccard_distance,
    parse_dependency,
    parse_partition,
    restrict_sample,
    restricted_space_count,
    singleton_partition,
)

__version__ = "0.1.0"
