"""
Детерминированные генераторы случайных чисел с подпотоками
"""
from dataclasses import dataclass

import numpy as np

_UINT64_MAX = 2 ** 64 - 1


@dataclass(frozen=True)
class RngSeed:
    """
    Зерно и номер подпотока; одинаковая пара (seed, stream) дает побитово одинаковые выборки

    Attributes:
        seed: 64-битное беззнаковое зерно
        stream: 64-битный номер подпотока
    """
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream", self.stream)):
            if not 0 <= int(value) <= _UINT64_MAX:
                raise ValueError(f"{name} должен быть 64-битным беззнаковым целым, получено {value}")

    def generator(self) -> np.random.Generator:
        """Новый генератор PCG64 для этой пары (seed, stream)"""
        sequence = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(sequence))

    def child(self, key: int) -> "RngSeed":
        """
        Производный подпоток с номером key

        Args:
            key: Неотрицательный номер (ячейка, повтор, разбиение...)

        Returns:
            RngSeed с тем же seed и новым stream
        """
        state = np.random.SeedSequence([int(self.seed), int(self.stream), int(key)]).generate_state(1, dtype=np.uint64)
        return RngSeed(self.seed, int(state[0]))
