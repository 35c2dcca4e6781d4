"""
Контроль FDR: зеркальные статистики (одно и несколько разбиений) и e-BH
"""
from .selection import (
    SelectionResult,
    false_discovery_proportion,
    selection_frame,
    true_positive_rate,
)
from .mirror import MirrorConfig, MirrorStatistics, mirror_cutoff, mirror_select, mirror_statistics
from .splitting import half_split, normalized_statistics, split_and_infer
from .multi_split import inclusion_rate_select, multi_split_select
from .ebh import (
    EValueSet,
    compute_evalues,
    ebh_from_evalues,
    ebh_select,
    evalues_from_estimates,
    null_evalue_mean,
    select_from_evalues,
)

__all__ = [
    'SelectionResult',
    'false_discovery_proportion',
    'selection_frame',
    'true_positive_rate',
    'MirrorConfig',
    'MirrorStatistics',
    'mirror_cutoff',
    'mirror_select',
    'mirror_statistics',
    'half_split',
    'normalized_statistics',
    'split_and_infer',
    'inclusion_rate_select',
    'multi_split_select',
    'EValueSet',
    'compute_evalues',
    'ebh_from_evalues',
    'ebh_select',
    'evalues_from_estimates',
    'select_from_evalues',
    'null_evalue_mean',
]
