"""Hand-built (1, n) codes for the two network families, plus liftings.

``solve_n1`` and ``solve_n2`` write down the explicit rate-1/n codes as
symbolic data.  All entries are 0 or +/-1, except the one place the
second family genuinely needs the field: the last bottleneck combines
its q+1 inputs with coefficients 1/q and -(q-1)/q, so instantiation
requires the characteristic not to divide q.  Conversely, the first
family's code delivers a_i - q*c_i to the a-terminals, which collapses
to a_i exactly when the characteristic divides q.

``lift_union`` turns a (1, n) code on a base network into a (k, n) code
on the k-fold union by routing component i of every source through copy
i with the same local matrices.  ``lift_gadget`` extends a (1, n) code
across the demand-splitting gadget: the bottleneck carries
[b+z, y_1, ..., y_{n-1}] and the new terminals peel their symbols back
out with differences.
"""

from __future__ import annotations

from .constructions import bmsg, gadget_transform_traced
from .lincode import SymInput, SymMatrix, SymbolicCode
from .network import CodedNetwork

Rules = dict[str, tuple[SymInput, ...]]


def _check_params(q: int, n: int) -> None:
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")


def solve_n1(q: int, n: int) -> SymbolicCode:
    """The (1, n) code for the first family; verifies iff char divides q."""
    _check_params(q, n)
    ident = SymMatrix.scaled_identity(n)
    neg = SymMatrix.scaled_identity(n, coeff=-1)
    er: Rules = {}
    dr: Rules = {}

    def src_edge(msg: str, head: str, slot: int) -> None:
        er[f"{msg}->{head}"] = (
            SymInput(f"src:{msg}", SymMatrix.unit_column(n, slot)),
        )

    a = [f"a{i}" for i in range(1, n + 1)]
    c = [f"c{i}" for i in range(1, n + 1)]
    b = {i: [bmsg(i, j) for j in range(1, n + 1)] for i in range(1, q)}

    for j, m in enumerate(a, start=1):
        src_edge(m, "u1", j)
        src_edge(m, "u11", j)
    for j, m in enumerate(c, start=1):
        src_edge(m, "u2", j)
        src_edge(m, "u6", j)
    for i in sorted(b):
        for j, m in enumerate(b[i], start=1):
            src_edge(m, "u1", j)
            src_edge(m, "u2", j)
            src_edge(m, f"w{i}", j)
            for k in sorted(b):
                if k != i:
                    src_edge(m, f"e{k}t", j)
                    src_edge(m, f"v{k}", j)

    # u1 carries sum(a) + sum(b); u2 carries sum(b) + sum(c)
    er["u1->u3"] = tuple(
        SymInput(f"{m}->u1", ident) for m in a + [m for i in sorted(b) for m in b[i]]
    )
    er["u2->u4"] = tuple(
        SymInput(f"{m}->u2", ident) for m in [m for i in sorted(b) for m in b[i]] + c
    )
    er["u3->u5"] = (SymInput("u1->u3", ident),)
    er["u3->u6"] = (SymInput("u1->u3", ident),)
    er["u4->u5"] = (SymInput("u2->u4", ident),)
    # sum(a) - sum(c): the b-block cancels between the two branches
    er["u5->u7"] = (SymInput("u3->u5", ident), SymInput("u4->u5", neg))
    # sum(a) + sum(b) - sum(c)
    er["u6->u8"] = (SymInput("u3->u6", ident),) + tuple(
        SymInput(f"{m}->u6", neg) for m in c
    )
    er["u7->u9"] = (SymInput("u5->u7", ident),)
    er["u7->u11"] = (SymInput("u5->u7", ident),)
    er["u8->u9"] = (SymInput("u6->u8", ident),)
    er["u8->u13"] = (SymInput("u6->u8", ident),)
    # sum(b)
    er["u9->u10"] = (SymInput("u8->u9", ident), SymInput("u7->u9", neg))
    # sum(c): the direct a-taps cancel the a-block of the u7 branch
    er["u11->u12"] = tuple(SymInput(f"{m}->u11", ident) for m in a) + (
        SymInput("u7->u11", neg),
    )
    for i in sorted(b):
        # branch i carries its own b-row plus sum(c)
        er[f"u4->e{i}t"] = (SymInput("u2->u4", ident),)
        er[f"e{i}"] = (SymInput(f"u4->e{i}t", ident),) + tuple(
            SymInput(f"{m}->e{i}t", neg) for k in sorted(b) if k != i for m in b[k]
        )
        er[f"e{i}h->u13"] = (SymInput(f"e{i}", ident),)
        er[f"e{i}h->w{i}"] = (SymInput(f"e{i}", ident),)
        er[f"u10->v{i}"] = (SymInput("u9->u10", ident),)
        er[f"v{i}->v{i}p"] = (SymInput(f"u10->v{i}", ident),) + tuple(
            SymInput(f"{m}->v{i}", neg) for k in sorted(b) if k != i for m in b[k]
        )
        er[f"w{i}->w{i}p"] = (SymInput(f"e{i}h->w{i}", ident),) + tuple(
            SymInput(f"{m}->w{i}", neg) for m in b[i]
        )
    # sum(a) - q*sum(c): equals sum(a) exactly when char divides q
    er["u13->u14"] = (SymInput("u8->u13", ident),) + tuple(
        SymInput(f"e{i}h->u13", neg) for i in sorted(b)
    )

    for j, m in enumerate(c, start=1):
        t = f"Tc:{m}"
        er[f"u12->{t}"] = (SymInput("u11->u12", ident),)
        dr[t] = (SymInput(f"u12->{t}", SymMatrix.unit_row(n, j)),)
    for j, m in enumerate(a, start=1):
        t = f"Ta:{m}"
        er[f"u14->{t}"] = (SymInput("u13->u14", ident),)
        dr[t] = (SymInput(f"u14->{t}", SymMatrix.unit_row(n, j)),)
    for i in sorted(b):
        for j, m in enumerate(b[i], start=1):
            t = f"Tb{i}:{m}"
            er[f"v{i}p->{t}"] = (SymInput(f"v{i}->v{i}p", ident),)
            dr[t] = (SymInput(f"v{i}p->{t}", SymMatrix.unit_row(n, j)),)
        for j, m in enumerate(c, start=1):
            t = f"Tc{i}:{m}"
            er[f"w{i}p->{t}"] = (SymInput(f"w{i}->w{i}p", ident),)
            dr[t] = (SymInput(f"w{i}p->{t}", SymMatrix.unit_row(n, j)),)

    return SymbolicCode(1, n, q, er, dr)


def solve_n2(q: int, n: int) -> SymbolicCode:
    """The (1, n) code for the second family; verifies iff char does not
    divide q (the last bottleneck averages its branches with 1/q)."""
    _check_params(q, n)
    ident = SymMatrix.scaled_identity(n)
    neg = SymMatrix.scaled_identity(n, coeff=-1)
    inv_q = SymMatrix.scaled_identity(n, coeff=1, inv_q=True)
    comp = SymMatrix.scaled_identity(n, coeff=-(q - 1), inv_q=True)
    er: Rules = {}
    dr: Rules = {}

    def src_edge(msg: str, head: str, slot: int) -> None:
        er[f"{msg}->{head}"] = (
            SymInput(f"src:{msg}", SymMatrix.unit_column(n, slot)),
        )

    a = [f"a{j}" for j in range(1, n + 1)]
    b = {i: [bmsg(i, j) for j in range(1, n + 1)] for i in range(1, q + 1)}
    all_b = [m for i in sorted(b) for m in b[i]]

    for j, m in enumerate(a, start=1):
        src_edge(m, "eat", j)
    for i in sorted(b):
        for j, m in enumerate(b[i], start=1):
            src_edge(m, "eat", j)
            src_edge(m, "ebt", j)
        for j, m in enumerate(a, start=1):
            src_edge(m, f"e{i}t", j)
        for k in sorted(b):
            if k != i:
                for j, m in enumerate(b[k], start=1):
                    src_edge(m, f"e{i}t", j)

    # ea: sum(a) + sum(b);  e_i: sum(a) + sum(b without row i);  eb: sum(b)
    er["ea"] = tuple(SymInput(f"{m}->eat", ident) for m in a + all_b)
    for i in sorted(b):
        er[f"e{i}"] = tuple(
            SymInput(f"{m}->e{i}t", ident)
            for m in a + [m for k in sorted(b) if k != i for m in b[k]]
        )
    er["eb"] = tuple(SymInput(f"{m}->ebt", ident) for m in all_b)

    er["eah->eapt"] = (SymInput("ea", ident),)
    er["ebh->eapt"] = (SymInput("eb", ident),)
    er["ebh->ebpt"] = (SymInput("eb", ident),)
    for i in sorted(b):
        er[f"e{i}h->e{i}pt"] = (SymInput(f"e{i}", ident),)
        er[f"eah->e{i}pt"] = (SymInput("ea", ident),)
        er[f"e{i}h->ebpt"] = (SymInput(f"e{i}", ident),)

    # eap: sum(a);  e_ip: row i of b;  ebp: (sum_i e_i - (q-1) eb)/q = sum(a)
    er["eap"] = (SymInput("eah->eapt", ident), SymInput("ebh->eapt", neg))
    for i in sorted(b):
        er[f"e{i}p"] = (
            SymInput(f"eah->e{i}pt", ident),
            SymInput(f"e{i}h->e{i}pt", neg),
        )
    er["ebp"] = tuple(SymInput(f"e{i}h->ebpt", inv_q) for i in sorted(b)) + (
        SymInput("ebh->ebpt", comp),
    )

    for j, m in enumerate(a, start=1):
        t = f"Ta1:{m}"
        er[f"eaph->{t}"] = (SymInput("eap", ident),)
        dr[t] = (SymInput(f"eaph->{t}", SymMatrix.unit_row(n, j)),)
    for j, m in enumerate(a, start=1):
        t = f"Ta2:{m}"
        er[f"ebph->{t}"] = (SymInput("ebp", ident),)
        dr[t] = (SymInput(f"ebph->{t}", SymMatrix.unit_row(n, j)),)
    for i in sorted(b):
        for j, m in enumerate(b[i], start=1):
            t = f"Tb{i}:{m}"
            er[f"e{i}ph->{t}"] = (SymInput(f"e{i}p", ident),)
            dr[t] = (SymInput(f"e{i}ph->{t}", SymMatrix.unit_row(n, j)),)

    return SymbolicCode(1, n, q, er, dr)


# -- lifting to unions ---------------------------------------------------------


def _embed_column(col: SymMatrix, k: int, copy: int) -> SymMatrix:
    """Place an n x 1 source column into column copy-1 of an n x k matrix."""
    flat = [(0, False)] * (col.rows * k)
    for r in range(col.rows):
        flat[r * k + (copy - 1)] = col.entries[r]
    return SymMatrix(col.rows, k, tuple(flat))


def _embed_row(row: SymMatrix, k: int, copy: int) -> SymMatrix:
    """Place a 1 x n decode row into row copy-1 of a k x n matrix."""
    flat = [(0, False)] * (k * row.cols)
    for c in range(row.cols):
        flat[(copy - 1) * row.cols + c] = row.entries[c]
    return SymMatrix(k, row.cols, tuple(flat))


def lift_union(sym: SymbolicCode, copies: int) -> SymbolicCode:
    """(k, n) code on the k-fold union: component i of each source takes
    the base code's route through copy i, with the same local matrices."""
    if sym.k != 1:
        raise ValueError("lift_union needs a (1, n) base code")
    if not isinstance(copies, int) or isinstance(copies, bool) or copies < 1:
        raise ValueError(f"copies must be an integer >= 1, got {copies!r}")
    if copies == 1:
        return sym
    er: Rules = {}
    dr: Rules = {}
    for c in range(1, copies + 1):
        for eid, inputs in sym.edge_rules.items():
            lifted = []
            for inp in inputs:
                if inp.ref.startswith("src:"):
                    lifted.append(
                        SymInput(inp.ref, _embed_column(inp.matrix, copies, c))
                    )
                else:
                    lifted.append(SymInput(f"{inp.ref}#{c}", inp.matrix))
            er[f"{eid}#{c}"] = tuple(lifted)
    for tid, inputs in sym.decode_rules.items():
        rows = []
        for c in range(1, copies + 1):
            for inp in inputs:
                rows.append(
                    SymInput(f"{inp.ref}#{c}", _embed_row(inp.matrix, copies, c))
                )
        dr[tid] = tuple(rows)
    return SymbolicCode(copies, sym.n, sym.q, er, dr)


# -- lifting across the gadget -------------------------------------------------


def _first_row_embed(row_inputs: tuple[SymInput, ...], n: int) -> list[SymInput]:
    """Turn a scalar decode rule into edge inputs writing slot 1 of a block."""
    out = []
    for inp in row_inputs:
        flat = [(0, False)] * (n * n)
        for c in range(n):
            flat[c] = inp.matrix.entries[c]
        out.append(SymInput(inp.ref, SymMatrix(n, n, tuple(flat))))
    return out


def lift_gadget(
    sym: SymbolicCode, base: CodedNetwork, gadgeted: CodedNetwork
) -> SymbolicCode:
    """Extend a (1, n) code over the gadget rewrite of its network.

    The gadget applications are replayed on the base network; the replay
    must reproduce ``gadgeted`` exactly.  Demoted terminals forward their
    decoded symbol in slot 1 of their new out-edge, the bottleneck stacks
    it with the fresh y-messages, and the added terminals decode by
    differences.
    """
    if sym.k != 1:
        raise ValueError("lift_gadget needs a (1, n) base code")
    n = sym.n
    rebuilt, applications = gadget_transform_traced(base, n)
    if rebuilt != gadgeted:
        raise ValueError(
            "gadgeted network does not match the gadget transform of the base"
        )
    ident = SymMatrix.scaled_identity(n)
    er: Rules = dict(sym.edge_rules)
    dr: Rules = dict(sym.decode_rules)
    for app in applications:
        x1, x2, x3, x4, x5 = app.x_nodes
        rule_n1 = dr.pop(app.n1)
        rule_n2 = dr.pop(app.n2)
        # demoted terminals forward the decoded demand in slot 1
        er[f"{app.n1}->{x2}"] = tuple(_first_row_embed(rule_n1, n))
        er[f"{app.n2}->{x5}"] = tuple(_first_row_embed(rule_n2, n))
        er[f"{x1}->{x2}"] = (
            SymInput(f"src:{app.z_message}", SymMatrix.unit_column(n, 1)),
        )
        er[f"{x1}->{x4}"] = (
            SymInput(f"src:{app.z_message}", SymMatrix.unit_column(n, 1)),
        )
        for slot, (sid, ym) in enumerate(zip(app.s_nodes, app.y_messages), start=2):
            er[f"{sid}->{x2}"] = (
                SymInput(f"src:{ym}", SymMatrix.unit_column(n, slot)),
            )
        # bottleneck: [b+z, y_1, ..., y_{n-1}]
        bottleneck_inputs = [SymInput(f"{app.n1}->{x2}", ident), SymInput(f"{x1}->{x2}", ident)]
        bottleneck_inputs += [SymInput(f"{sid}->{x2}", ident) for sid in app.s_nodes]
        er[f"{x2}->{x3}"] = tuple(bottleneck_inputs)
        er[f"{x3}->{x4}"] = (SymInput(f"{x2}->{x3}", ident),)
        er[f"{x3}->{x5}"] = (SymInput(f"{x2}->{x3}", ident),)
        for tid in app.t_nodes:
            er[f"{x3}->{tid}"] = (SymInput(f"{x2}->{x3}", ident),)
        # x4 wants b = (b+z) - z; x5 wants z = (b+z) - b
        dr[x4] = (
            SymInput(f"{x3}->{x4}", SymMatrix.unit_row(n, 1)),
            SymInput(f"{x1}->{x4}", SymMatrix.unit_row(n, 1, coeff=-1)),
        )
        dr[x5] = (
            SymInput(f"{x3}->{x5}", SymMatrix.unit_row(n, 1)),
            SymInput(f"{app.n2}->{x5}", SymMatrix.unit_row(n, 1, coeff=-1)),
        )
        for slot, tid in enumerate(app.t_nodes, start=2):
            dr[tid] = (SymInput(f"{x3}->{tid}", SymMatrix.unit_row(n, slot)),)
    return SymbolicCode(1, n, sym.q, er, dr)
