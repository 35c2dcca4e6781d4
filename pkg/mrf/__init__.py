"""
Экспоненциальное семейство марковских полей: пространства состояний,
отображения признаков и точные оракулы полным перебором
"""
from .state_space import BASE_MEASURES, ENUMERATION_CAP, StateSpace, enumerate_states, state_index
from .feature_maps import (
    BUILTIN_IDS,
    FeatureMap,
    builtin_feature_map,
    check_theta,
    default_space,
    get_feature_map,
    ising_feature_map,
    register_feature_map,
)
from .exact import (
    brute_force_log_C,
    brute_force_moments,
    brute_force_probabilities,
    log_density_unnormalized,
)

__all__ = [
    'BASE_MEASURES',
    'ENUMERATION_CAP',
    'StateSpace',
    'enumerate_states',
    'state_index',
    'BUILTIN_IDS',
    'FeatureMap',
    'builtin_feature_map',
    'check_theta',
    'default_space',
    'get_feature_map',
    'ising_feature_map',
    'register_feature_map',
    'brute_force_log_C',
    'brute_force_moments',
    'brute_force_probabilities',
    'log_density_unnormalized',
]
