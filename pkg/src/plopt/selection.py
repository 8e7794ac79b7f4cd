import numpy as np


def tournament_select(fitness: np.ndarray, s: int, rng: np.random.Generator,
                      n: int | None = None) -> np.ndarray:
    """Indices of ``n`` tournament winners (default: population size).

    Each tournament draws ``s`` contestants uniformly with replacement; the
    fittest wins and ties go to the contestant drawn first.
    """
    fitness = np.asarray(fitness)
    if len(fitness) == 0:
        raise ValueError("cannot select from an empty population")
    n = len(fitness) if n is None else n
    draws = rng.integers(0, len(fitness), size=(n, s))
    best = np.argmax(fitness[draws], axis=1)
    return draws[np.arange(n), best]
