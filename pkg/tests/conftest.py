from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from scatterlab.ordinals import Ordinal, from_int

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@st.composite
def flat_ordinals(draw, max_exp: int = 5, max_coeff: int = 4):
    """Ordinals below w^w: a sparse coefficient vector over natural exponents."""
    exps = draw(st.lists(st.integers(0, max_exp), max_size=4, unique=True))
    exps.sort(reverse=True)
    return Ordinal(
        (from_int(e), draw(st.integers(1, max_coeff))) for e in exps
    )


@st.composite
def deep_ordinals(draw, depth: int = 2):
    """Ordinals whose exponents may themselves be compound, up to `depth`."""
    if depth <= 0:
        return draw(flat_ordinals(max_exp=2, max_coeff=3))
    exps = []
    for _ in range(draw(st.integers(0, 3))):
        e = draw(deep_ordinals(depth=depth - 1))
        if e not in exps:
            exps.append(e)
    exps.sort(reverse=True)
    return Ordinal((e, draw(st.integers(1, 3))) for e in exps)


def limit_ordinals(depth: int = 2):
    return deep_ordinals(depth=depth).filter(lambda a: a.is_limit)
