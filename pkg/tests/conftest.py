from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from vstab.graph import Multigraph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def connected_multigraphs(draw, max_v=5, max_e=8, loops=True):
    """A random spanning tree plus extra edges (parallels and optionally loops)."""
    n = draw(st.integers(1, max_v))
    edges = []
    for v in range(1, n):
        edges.append((draw(st.integers(0, v - 1)), v))
    extra = draw(st.integers(0, max(0, max_e - len(edges))))
    for _ in range(extra):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        if u == v and not loops:
            continue
        edges.append((u, v))
    order = draw(st.permutations(range(len(edges)))) if edges else []
    return Multigraph.from_edge_list(n, [edges[i] for i in order])
