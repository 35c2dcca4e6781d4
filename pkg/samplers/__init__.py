"""
Генерация опорной цепи и наблюдаемых данных (Метрополис) с воспроизводимыми зернами
"""
from .rng import RngSeed
from .chains import ObservedSample, ReferenceChain, load_draws_csv, samples_to_frame
from .metropolis import metropolis_chain, metropolis_sample
from .reference import sample_reference_gaussian, sample_reference_markov, sample_reference_uniform

__all__ = [
    'RngSeed',
    'ObservedSample',
    'ReferenceChain',
    'load_draws_csv',
    'samples_to_frame',
    'metropolis_chain',
    'metropolis_sample',
    'sample_reference_gaussian',
    'sample_reference_markov',
    'sample_reference_uniform',
]
