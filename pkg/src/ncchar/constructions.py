"""Generators for characteristic-dependent networks and network transforms.

Two parameterized families are built here:

* ``gen_n1(q, n)`` is rate-1/n solvable exactly when the field
  characteristic divides q.  At (q, n) = (2, 1) it reduces to the Fano
  network.
* ``gen_n2(q, n)`` is rate-1/n solvable exactly when the characteristic
  does NOT divide q.  At (2, 1) it reduces to the non-Fano network.

``union_copies`` glues k disjoint copies of a network along shared
sources and terminals, and ``gadget_transform`` rewrites a network with
repeated demands into a multiple-unicast network with the same
characteristic-dependent solvability.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import (
    ROLE_INTERMEDIATE,
    ROLE_SOURCE,
    ROLE_TERMINAL,
    CodedNetwork,
    NetEdge,
    NetNode,
    is_multiple_unicast,
    validate,
)


def _check_params(q: int, n: int) -> None:
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")


def bmsg(i: int, j: int) -> str:
    """Message name for the j-th symbol of the i-th b-source set."""
    if i <= 9 and j <= 9:
        return f"b{i}{j}"
    return f"b{i}_{j}"


def edge_id(tail: str, head: str) -> str:
    return f"{tail}->{head}"


def _src(msg: str) -> NetNode:
    return NetNode(msg, ROLE_SOURCE, generates=msg)


def _mid(node_id: str) -> NetNode:
    return NetNode(node_id, ROLE_INTERMEDIATE)


def _term(node_id: str, demand: str) -> NetNode:
    return NetNode(node_id, ROLE_TERMINAL, demands=demand)


def _edge(tail: str, head: str) -> NetEdge:
    return NetEdge(edge_id(tail, head), tail, head)


def gen_n1(q: int, n: int) -> CodedNetwork:
    """First family: solvable at rate 1/n iff the characteristic divides q.

    Sources come in q+1 sets of n (a, b_1..b_{q-1}, c); terminals in 2q
    sets of n.  The c messages are each demanded by q terminals, which is
    what the gadget transform later untangles.
    """
    _check_params(q, n)
    a = [f"a{i}" for i in range(1, n + 1)]
    c = [f"c{i}" for i in range(1, n + 1)]
    b = {i: [bmsg(i, j) for j in range(1, n + 1)] for i in range(1, q)}

    messages = list(a) + [m for i in sorted(b) for m in b[i]] + list(c)
    nodes: list[NetNode] = [_src(m) for m in messages]
    nodes += [_mid(f"u{i}") for i in range(1, 15)]
    for i in range(1, q):
        nodes += [_mid(f"e{i}t"), _mid(f"e{i}h"), _mid(f"v{i}"), _mid(f"v{i}p")]
        nodes += [_mid(f"w{i}"), _mid(f"w{i}p")]

    edges: list[NetEdge] = []
    # source fan-outs
    for m in a:
        edges.append(_edge(m, "u1"))
    for i in sorted(b):
        for m in b[i]:
            edges.append(_edge(m, "u1"))
            edges.append(_edge(m, "u2"))
    for m in c:
        edges.append(_edge(m, "u2"))
        edges.append(_edge(m, "u6"))
    for m in a:
        edges.append(_edge(m, "u11"))
    for i in sorted(b):
        for k in range(1, q):
            if k == i:
                continue
            for m in b[i]:
                edges.append(_edge(m, f"e{k}t"))
                edges.append(_edge(m, f"v{k}"))
        for m in b[i]:
            edges.append(_edge(m, f"w{i}"))
    # the u-backbone
    for i in (1, 2, 3, 5, 6, 7):
        edges.append(_edge(f"u{i}", f"u{i + 2}"))
    for i in (4, 8, 9, 11, 13):
        edges.append(_edge(f"u{i}", f"u{i + 1}"))
    edges += [_edge("u3", "u6"), _edge("u7", "u11"), _edge("u8", "u13")]
    # the q-1 parallel branches and their fan-in/fan-out
    for i in range(1, q):
        edges.append(NetEdge(f"e{i}", f"e{i}t", f"e{i}h"))
        edges.append(_edge("u4", f"e{i}t"))
        edges.append(_edge(f"e{i}h", "u13"))
        edges.append(_edge(f"e{i}h", f"w{i}"))
        edges.append(_edge("u10", f"v{i}"))
        edges.append(_edge(f"v{i}", f"v{i}p"))
        edges.append(_edge(f"w{i}", f"w{i}p"))

    # terminal sets
    for i, m in enumerate(c, start=1):
        t = f"Tc:{m}"
        nodes.append(_term(t, m))
        edges.append(_edge("u12", t))
    for i, m in enumerate(a, start=1):
        t = f"Ta:{m}"
        nodes.append(_term(t, m))
        edges.append(_edge("u14", t))
    for i in sorted(b):
        for m in b[i]:
            t = f"Tb{i}:{m}"
            nodes.append(_term(t, m))
            edges.append(_edge(f"v{i}p", t))
        for m in c:
            t = f"Tc{i}:{m}"
            nodes.append(_term(t, m))
            edges.append(_edge(f"w{i}p", t))

    return CodedNetwork(
        f"n1(q={q},n={n})", tuple(messages), tuple(nodes), tuple(edges)
    )


def gen_n2(q: int, n: int) -> CodedNetwork:
    """Second family: solvable at rate 1/n iff the characteristic does
    not divide q (the construction needs an inverse of q)."""
    _check_params(q, n)
    a = [f"a{j}" for j in range(1, n + 1)]
    b = {i: [bmsg(i, j) for j in range(1, n + 1)] for i in range(1, q + 1)}
    messages = list(a) + [m for i in sorted(b) for m in b[i]]

    nodes: list[NetNode] = [_src(m) for m in messages]
    for stem in ("ea", "eb", "eap", "ebp"):
        nodes += [_mid(f"{stem}t"), _mid(f"{stem}h")]
    for i in sorted(b):
        nodes += [_mid(f"e{i}t"), _mid(f"e{i}h"), _mid(f"e{i}pt"), _mid(f"e{i}ph")]

    edges: list[NetEdge] = []
    for stem in ("ea", "eb", "eap", "ebp"):
        edges.append(NetEdge(stem, f"{stem}t", f"{stem}h"))
    for i in sorted(b):
        edges.append(NetEdge(f"e{i}", f"e{i}t", f"e{i}h"))
        edges.append(NetEdge(f"e{i}p", f"e{i}pt", f"e{i}ph"))
    for m in messages:
        edges.append(_edge(m, "eat"))
    for i in sorted(b):
        for m in a:
            edges.append(_edge(m, f"e{i}t"))
        for k in sorted(b):
            if k == i:
                continue
            for m in b[k]:
                edges.append(_edge(m, f"e{i}t"))
        for m in b[i]:
            edges.append(_edge(m, "ebt"))
    edges += [_edge("eah", "eapt"), _edge("ebh", "eapt"), _edge("ebh", "ebpt")]
    for i in sorted(b):
        edges.append(_edge(f"e{i}h", f"e{i}pt"))
        edges.append(_edge("eah", f"e{i}pt"))
        edges.append(_edge(f"e{i}h", "ebpt"))

    for m in a:
        t = f"Ta1:{m}"
        nodes.append(_term(t, m))
        edges.append(_edge("eaph", t))
    for m in a:
        t = f"Ta2:{m}"
        nodes.append(_term(t, m))
        edges.append(_edge("ebph", t))
    for i in sorted(b):
        for m in b[i]:
            t = f"Tb{i}:{m}"
            nodes.append(_term(t, m))
            edges.append(_edge(f"e{i}ph", t))

    return CodedNetwork(
        f"n2(q={q},n={n})", tuple(messages), tuple(nodes), tuple(edges)
    )


def gen_fano() -> CodedNetwork:
    """The Fano network, i.e. the first family at q = 2, n = 1."""
    return gen_n1(2, 1)


def gen_nonfano() -> CodedNetwork:
    """The non-Fano network, i.e. the second family at q = 2, n = 1."""
    return gen_n2(2, 1)


# -- union of copies ----------------------------------------------------------


def union_copies(net: CodedNetwork, copies: int) -> CodedNetwork:
    """Disjoint copies of the network glued along sources and terminals.

    Intermediate nodes and all edges are replicated with a ``#<copy>``
    suffix; each source and each terminal appears once and connects to
    every copy.
    """
    if not isinstance(copies, int) or isinstance(copies, bool) or copies < 1:
        raise ValueError(f"copies must be an integer >= 1, got {copies!r}")
    if copies == 1:
        return net
    keep = {
        n.id for n in net.nodes if n.role in (ROLE_SOURCE, ROLE_TERMINAL)
    }
    nodes: list[NetNode] = [
        n for n in net.nodes if n.role in (ROLE_SOURCE, ROLE_TERMINAL)
    ]
    edges: list[NetEdge] = []
    for c in range(1, copies + 1):
        for n in net.nodes:
            if n.role == ROLE_INTERMEDIATE:
                nodes.append(_mid(f"{n.id}#{c}"))
        for e in net.edges:
            tail = e.tail if e.tail in keep else f"{e.tail}#{c}"
            head = e.head if e.head in keep else f"{e.head}#{c}"
            edges.append(NetEdge(f"{e.id}#{c}", tail, head))
    return CodedNetwork(
        f"union({net.name},k={copies})", net.messages, tuple(nodes), tuple(edges)
    )


# -- demand-splitting gadget --------------------------------------------------


@dataclass(frozen=True)
class GadgetApplication:
    """One rewrite step: two terminals demanding the same message are
    demoted to intermediates and a bottleneck gadget replaces them."""

    index: int
    message: str
    n1: str
    n2: str
    z_message: str
    y_messages: tuple[str, ...]
    x_nodes: tuple[str, str, str, str, str]  # x1..x5
    t_nodes: tuple[str, ...]
    s_nodes: tuple[str, ...]


def _duplicated_demand(net: CodedNetwork) -> tuple[str, list[str]] | None:
    by_msg: dict[str, list[str]] = {}
    for node in net.nodes:
        if node.role == ROLE_TERMINAL and node.demands is not None:
            by_msg.setdefault(node.demands, []).append(node.id)
    for msg in sorted(by_msg):
        if len(by_msg[msg]) >= 2:
            return msg, sorted(by_msg[msg])
    return None


def gadget_transform_traced(
    net: CodedNetwork, n: int
) -> tuple[CodedNetwork, list[GadgetApplication]]:
    """Apply the demand-splitting gadget until no message is demanded twice.

    Each application adds n sources (one extra message z plus n-1 side
    messages y), two intermediates, and n+1 new terminals, and demotes the
    two chosen terminals.  The bottleneck edge carries the block
    [b+z, y_1, ..., y_{n-1}], which is why the rewrite preserves rate-1/n
    solvability in both directions.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    report = validate(net)
    if not report.ok:
        raise ValueError(f"network is invalid: {report.violations[0].detail}")
    gen_count: dict[str, int] = {m: 0 for m in net.messages}
    dem_count: dict[str, int] = {m: 0 for m in net.messages}
    for node in net.nodes:
        if node.role == ROLE_SOURCE and node.generates in gen_count:
            gen_count[node.generates] += 1
        if node.role == ROLE_TERMINAL and node.demands in dem_count:
            dem_count[node.demands] += 1
    for m in net.messages:
        if gen_count[m] != 1:
            raise ValueError(f"message {m!r} generated by {gen_count[m]} sources")
        if dem_count[m] < 1:
            raise ValueError(f"message {m!r} is demanded by no terminal")

    if _duplicated_demand(net) is None:
        return net, []

    messages = list(net.messages)
    nodes = {node.id: node for node in net.nodes}
    edges = list(net.edges)
    applications: list[GadgetApplication] = []
    counter = 0
    current = net
    while True:
        dup = _duplicated_demand(current)
        if dup is None:
            break
        msg, demanders = dup
        n1_id, n2_id = demanders[0], demanders[1]
        counter += 1
        z = f"z#{counter}"
        ys = tuple(f"y#{counter}_{i}" for i in range(1, n))
        x1, x2, x3, x4, x5 = (f"x{i}#{counter}" for i in range(1, 6))
        ts = tuple(f"t{i}#{counter}" for i in range(1, n))
        ss = tuple(f"s{i}#{counter}" for i in range(1, n))
        for fresh in (z, *ys):
            if fresh in messages:
                raise ValueError(f"fresh message name {fresh!r} already in use")
        for fresh in (x1, x2, x3, x4, x5, *ts, *ss):
            if fresh in nodes:
                raise ValueError(f"fresh node name {fresh!r} already in use")

        messages.append(z)
        messages.extend(ys)
        nodes[n1_id] = _mid(n1_id)
        nodes[n2_id] = _mid(n2_id)
        nodes[x1] = NetNode(x1, ROLE_SOURCE, generates=z)
        for sid, ym in zip(ss, ys):
            nodes[sid] = NetNode(sid, ROLE_SOURCE, generates=ym)
        nodes[x2] = _mid(x2)
        nodes[x3] = _mid(x3)
        nodes[x4] = _term(x4, msg)
        nodes[x5] = _term(x5, z)
        for tid, ym in zip(ts, ys):
            nodes[tid] = _term(tid, ym)
        edges.append(_edge(n1_id, x2))
        edges.append(_edge(x1, x2))
        for sid in ss:
            edges.append(_edge(sid, x2))
        edges.append(_edge(x2, x3))
        edges.append(_edge(x3, x4))
        edges.append(_edge(x3, x5))
        for tid in ts:
            edges.append(_edge(x3, tid))
        edges.append(_edge(x1, x4))
        edges.append(_edge(n2_id, x5))

        applications.append(
            GadgetApplication(
                counter, msg, n1_id, n2_id, z, ys, (x1, x2, x3, x4, x5), ts, ss
            )
        )
        current = CodedNetwork(
            net.name, tuple(messages), tuple(nodes.values()), tuple(edges)
        )

    result = CodedNetwork(
        f"gadget({net.name},n={n})",
        tuple(messages),
        tuple(nodes.values()),
        tuple(edges),
    )
    check = is_multiple_unicast(result)
    if not check.ok:
        raise AssertionError(
            f"gadget left a non-unicast network: {check.violations!r}"
        )
    return result, applications


def gadget_transform(net: CodedNetwork, n: int) -> CodedNetwork:
    """Public entry point; see gadget_transform_traced for the mechanics."""
    result, _ = gadget_transform_traced(net, n)
    return result
