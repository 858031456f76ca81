import pytest

from bicross.groups import builtin_group
from bicross.matched_pair import exact_factorizations, select_factorization, z6z6_example


@pytest.fixture(scope="session")
def z6z6():
    return z6z6_example()


@pytest.fixture(scope="session")
def s3_pairs():
    x = builtin_group("sym:3")
    return [select_factorization(x, i) for i in range(len(exact_factorizations(x)))]


@pytest.fixture(scope="session")
def s3_z3z2(s3_pairs):
    """S3 with G of order 3 and M of order 2."""
    return next(mp for mp in s3_pairs if mp.nG == 3 and mp.nM == 2)


@pytest.fixture(scope="session")
def s3_z2z3(s3_pairs):
    return next(mp for mp in s3_pairs if mp.nG == 2 and mp.nM == 3)


@pytest.fixture(scope="session")
def klein_pair():
    x = builtin_group("product:cyclic:2,cyclic:2")
    return next(select_factorization(x, i) for i, (g, m) in enumerate(exact_factorizations(x))
                if g.order == 2 and m.order == 2)
