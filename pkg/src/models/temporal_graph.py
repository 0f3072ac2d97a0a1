import networkx as nx
import numpy as np

from src.errors import ValidationError
from src.models.event_log import EventLog
from src.models.group_pair import GroupPair


class TemporalGraph:
    """
    Fixed node set with group labels, embeddings, popularity and timestamped edges

    Nodes are numbered 0..n-1 and groups 1..K. The adjacency keeps the first activation
    of every undirected pair, while the interaction sequence keeps every activation.
    """

    def __init__(self, groups, embeddings, popularity, n_groups=None):
        """
        Initialize a graph without edges

        Args:
            groups: Group label of each node (1-based)
            embeddings: (n, d) node embeddings, rows normalized to unit length
            popularity: Acceptance propensity of each node in [0, 1]
            n_groups: Group count K, defaults to the largest label
        """
        self._groups = np.asarray(groups, dtype=np.int64).reshape(-1)
        self._embeddings = np.asarray(embeddings, dtype=float)
        self._popularity = np.asarray(popularity, dtype=float).reshape(-1)
        n = self._groups.size
        self._n_groups = int(n_groups) if n_groups is not None else int(self._groups.max(initial=1))

        if self._embeddings.ndim != 2 or self._embeddings.shape[0] != n:
            raise ValidationError("every node needs an embedding row")
        if self._popularity.shape != (n,):
            raise ValidationError("every node needs a popularity value")
        if n and (self._groups.min() < 1 or self._groups.max() > self._n_groups):
            raise ValidationError(f"group labels must lie in 1..{self._n_groups}")

        self._graph = nx.Graph()
        for node in range(n):
            self._graph.add_node(node, group=int(self._groups[node]))
        self._edges = []

    @property
    def n_nodes(self):
        return self._groups.size

    @property
    def n_groups(self):
        return self._n_groups

    @property
    def groups(self):
        return self._groups

    @property
    def embeddings(self):
        return self._embeddings

    @property
    def popularity(self):
        return self._popularity

    @property
    def graph(self):
        """networkx view of the first-activation adjacency"""
        return self._graph

    @property
    def adjacency(self):
        """Dense 0/1 adjacency in node order"""
        return nx.to_numpy_array(self._graph, nodelist=range(self.n_nodes), weight=None)

    @property
    def edges(self):
        """Recorded interactions as (t, u, v) with u < v"""
        return list(self._edges)

    @property
    def n_edges(self):
        return len(self._edges)

    def group_of(self, node):
        return int(self._groups[node])

    def has_edge(self, u, v):
        return self._graph.has_edge(u, v)

    def neighbors(self, u):
        """Nodes already adjacent to u"""
        return list(self._graph.neighbors(u))

    def add_edge(self, t, u, v):
        """
        Record an interaction between u and v at time t

        Args:
            t: Timestamp, not earlier than the last recorded one
            u: First node
            v: Second node

        Returns:
            bool: True when the pair was not adjacent before
        """
        if u == v:
            raise ValidationError(f"self-loop on node {u}")
        if self._edges and t < self._edges[-1][0]:
            raise ValidationError("interactions must be recorded in time order")
        u, v = (int(u), int(v)) if u < v else (int(v), int(u))
        self._edges.append((float(t), u, v))
        if self._graph.has_edge(u, v):
            return False
        self._graph.add_edge(u, v, t=float(t))
        return True

    def pair_of(self, u, v):
        """Group-pair mark of an interaction"""
        return GroupPair(self._groups[u], self._groups[v])

    def to_event_log(self, horizon, start=0.0):
        """
        Project the interactions onto group-pair marks

        Args:
            horizon: Observation end time of the log
            start: Drop interactions before this time

        Returns:
            EventLog: One event per interaction, in recording order
        """
        events = [(t, self.pair_of(u, v)) for t, u, v in self._edges if t >= start]
        return EventLog.from_events(self._n_groups, events, horizon)

    def edge_table(self):
        """Rows (t, u, v, g_u, g_v) for export"""
        return [(t, u, v, self.group_of(u), self.group_of(v)) for t, u, v in self._edges]

    def within_fraction(self):
        """Share of recorded interactions that join two nodes of the same group"""
        if not self._edges:
            return float("nan")
        same = sum(1 for _, u, v in self._edges if self._groups[u] == self._groups[v])
        return same / len(self._edges)

    def __repr__(self):
        return f"TemporalGraph(nodes={self.n_nodes}, groups={self._n_groups}, edges={self.n_edges})"
