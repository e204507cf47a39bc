from approxlis.core import Point


def random_permutation(rng, n):
    values = list(range(n))
    rng.shuffle(values)
    return values


def points_of(values):
    return [Point(i, v) for i, v in enumerate(values)]


def is_increasing_chain(chain):
    return all(a.x < b.x and a.y < b.y for a, b in zip(chain, chain[1:]))
