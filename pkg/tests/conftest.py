from hypothesis import settings, strategies as st

from invsem.setalg import UPSet

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def upsets(draw, max_period=6, max_threshold=6):
    p = draw(st.integers(1, max_period))
    res = draw(st.sets(st.integers(0, p - 1)))
    t = draw(st.integers(0, max_threshold))
    head = draw(st.sets(st.integers(0, t - 1))) if t else set()
    return UPSet(p, res, t, head)


def brute(s, n: int) -> set[int]:
    return {x for x in range(n) if x in s}
