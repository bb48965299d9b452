"""Command-line interface: exit codes, file outputs, JSON mode."""

import json
import subprocess
import sys

from ncchar import (
    gen_n1,
    instantiate,
    load,
    load_code,
    save,
    save_code,
    solve_n1,
    union_copies,
    verify,
)
from ncchar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def test_gen_writes_canonical_network(tmp_path, capsys):
    out = tmp_path / "net.json"
    code, _, _ = run(capsys, "gen", "--family", "n1", "--q", "2", "--n", "1", "--out", str(out))
    assert code == 0
    assert load(out.read_bytes()) == gen_n1(2, 1)
    first = out.read_bytes()
    code, _, _ = run(capsys, "gen", "--family", "n1", "--q", "2", "--n", "1", "--out", str(out))
    assert code == 0
    assert out.read_bytes() == first


def test_gen_fano_is_n1_alias(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, "gen", "--family", "fano", "--out", str(a))
    run(capsys, "gen", "--family", "n1", "--q", "2", "--n", "1", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_gen_stdout_when_no_out_path(capsys):
    code, out, _ = run(capsys, "gen", "--family", "nonfano")
    assert code == 0
    assert load(out.encode()) == load(save(load(out.encode())) )


def test_gen_copies_applies_union(tmp_path, capsys):
    out = tmp_path / "u.json"
    code, _, _ = run(
        capsys, "gen", "--family", "n1", "--q", "2", "--n", "2", "--copies", "2",
        "--out", str(out),
    )
    assert code == 0
    assert load(out.read_bytes()) == union_copies(gen_n1(2, 2), 2)


def test_gen_rejects_alias_with_parameters(capsys):
    code, _, err = run(capsys, "gen", "--family", "fano", "--q", "2")
    assert code == 64
    assert err


def test_gen_rejects_unknown_family(capsys):
    code, _, _ = run(capsys, "gen", "--family", "n3")
    assert code == 64


def test_gen_rejects_bad_parameters(capsys):
    code, _, _ = run(capsys, "gen", "--family", "n1", "--q", "1", "--n", "1")
    assert code == 64


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def write_net(tmp_path, net, name="net.json"):
    path = tmp_path / name
    path.write_bytes(save(net))
    return path


def test_solve_writes_verifying_code(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 2))
    out = tmp_path / "code.json"
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "2", "--out", str(out))
    assert code == 0
    loaded = load_code(out.read_bytes())
    assert verify(gen_n1(2, 2), loaded).passed


def test_solve_union_and_gadget_names(tmp_path, capsys):
    net_path = write_net(tmp_path, union_copies(gen_n1(2, 1), 2))
    out = tmp_path / "code.json"
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "2", "--out", str(out))
    assert code == 0
    loaded = load_code(out.read_bytes())
    assert loaded.k == 2
    assert verify(union_copies(gen_n1(2, 1), 2), loaded).passed


def test_solve_inadmissible_characteristic_n1(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, _, err = run(capsys, "solve", str(net_path), "--p", "3")
    assert code == 2
    assert "characteristic divides q" in err


def test_solve_inadmissible_characteristic_n2(tmp_path, capsys):
    from ncchar import gen_n2

    net_path = write_net(tmp_path, gen_n2(2, 1))
    code, _, err = run(capsys, "solve", str(net_path), "--p", "2")
    assert code == 2
    assert "does not divide" in err


def test_solve_composite_q_picks_any_dividing_prime(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(6, 1))
    out = tmp_path / "c.json"
    for p in ("2", "3"):
        code, _, _ = run(capsys, "solve", str(net_path), "--p", p, "--out", str(out))
        assert code == 0
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "5")
    assert code == 2


def test_solve_unknown_family_name(tmp_path, capsys):
    net = gen_n1(2, 1)
    renamed = type(net)("mystery", net.messages, net.nodes, net.edges)
    net_path = write_net(tmp_path, renamed)
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "2")
    assert code == 64


def test_solve_tampered_network_rejected(tmp_path, capsys):
    # name says n1(q=2,n=1) but an edge was removed
    net = gen_n1(2, 1)
    tampered = type(net)(net.name, net.messages, net.nodes, net.edges[:-1])
    net_path = write_net(tmp_path, tampered)
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "2")
    assert code == 64


def test_solve_non_prime_p(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, _, _ = run(capsys, "solve", str(net_path), "--p", "4")
    assert code == 64


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_pass_and_fail(tmp_path, capsys):
    net = gen_n1(2, 2)
    net_path = write_net(tmp_path, net)
    good = tmp_path / "good.json"
    good.write_bytes(save_code(instantiate(solve_n1(2, 2), 2)))
    bad = tmp_path / "bad.json"
    bad.write_bytes(save_code(instantiate(solve_n1(2, 2), 3)))

    code, out, _ = run(capsys, "verify", str(net_path), str(good))
    assert code == 0
    assert "8/8 terminals decode" in out

    code, out, _ = run(capsys, "verify", str(net_path), str(bad))
    assert code == 1
    assert "FAIL" in out
    assert "interference: c1" in out
    assert "Ta:a1" in out and "Ta:a2" in out
    assert "6/8 terminals decode" in out


def test_verify_json_report(tmp_path, capsys):
    net = gen_n1(2, 1)
    net_path = write_net(tmp_path, net)
    bad = tmp_path / "bad.json"
    bad.write_bytes(save_code(instantiate(solve_n1(2, 1), 3)))
    code, out, _ = run(capsys, "verify", "--json", str(net_path), str(bad))
    assert code == 1
    doc = json.loads(out)
    assert doc["passed"] is False
    failing = [t["terminal"] for t in doc["terminals"] if not t["passed"]]
    assert failing == ["Ta:a1"]


def test_verify_truncated_code_file(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    truncated = tmp_path / "trunc.json"
    data = save_code(instantiate(solve_n1(2, 1), 2))
    truncated.write_bytes(data[: len(data) // 2])
    code, _, err = run(capsys, "verify", str(net_path), str(truncated))
    assert code == 64
    assert err


def test_verify_symbolic_code_rejected(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    sym_path = tmp_path / "sym.json"
    sym_path.write_bytes(save_code(solve_n1(2, 1)))
    code, _, _ = run(capsys, "verify", str(net_path), str(sym_path))
    assert code == 64


def test_verify_missing_file(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, _, _ = run(capsys, "verify", str(net_path), str(tmp_path / "nope.json"))
    assert code == 64


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def test_search_solvable_writes_witness(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    out = tmp_path / "witness.json"
    code, _, _ = run(capsys, "search", str(net_path), "--p", "2", "--out", str(out))
    assert code == 0
    witness = load_code(out.read_bytes())
    assert verify(gen_n1(2, 1), witness).passed


def test_search_unsolvable_exit_code(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, out, _ = run(capsys, "search", "--json", str(net_path), "--p", "3")
    assert code == 2
    doc = json.loads(out)
    assert doc["outcome"] == "unsolvable"
    assert doc["states"] > 0


def test_search_budget_inconclusive(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, out, _ = run(
        capsys, "search", "--json", str(net_path), "--p", "3", "--budget", "10"
    )
    assert code == 3
    assert json.loads(out)["outcome"] == "inconclusive"


def test_search_budget_env_fallback(tmp_path, capsys, monkeypatch):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    monkeypatch.setenv("NCCHAR_BUDGET", "10")
    code, out, _ = run(capsys, "search", "--json", str(net_path), "--p", "3")
    assert code == 3
    # explicit flag wins over the environment
    code, _, _ = run(capsys, "search", str(net_path), "--p", "3", "--budget", "100000")
    assert code == 2


def test_search_fractional_flags(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 2))
    out = tmp_path / "w.json"
    code, _, _ = run(
        capsys, "search", str(net_path), "--p", "2", "--k", "1", "--n", "2",
        "--out", str(out),
    )
    assert code == 0
    witness = load_code(out.read_bytes())
    assert (witness.k, witness.n) == (1, 2)
    assert verify(gen_n1(2, 2), witness).passed


def test_search_bad_workers(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, _, _ = run(capsys, "search", str(net_path), "--p", "2", "--workers", "0")
    assert code == 64


# ---------------------------------------------------------------------------
# gadget / union / info
# ---------------------------------------------------------------------------

def test_gadget_command(tmp_path, capsys):
    from ncchar import gadget_transform, is_multiple_unicast

    net_path = write_net(tmp_path, gen_n1(2, 1))
    out = tmp_path / "g.json"
    code, stdout, _ = run(capsys, "gadget", str(net_path), "--n", "1", "--out", str(out))
    assert code == 0
    result = load(out.read_bytes())
    assert is_multiple_unicast(result).ok
    assert result == gadget_transform(gen_n1(2, 1), 1)
    assert "applications=1" in stdout


def test_gadget_on_unicast_net_is_unchanged(tmp_path, capsys):
    from ncchar import gadget_transform

    uni = gadget_transform(gen_n1(2, 1), 1)
    net_path = write_net(tmp_path, uni)
    out = tmp_path / "g2.json"
    code, stdout, _ = run(capsys, "gadget", str(net_path), "--n", "1", "--out", str(out))
    assert code == 0
    assert load(out.read_bytes()) == uni
    assert "applications=0" in stdout


def test_gadget_application_count_scales(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(3, 1))
    out_path = tmp_path / "g3.json"
    code, out, _ = run(
        capsys, "gadget", "--json", str(net_path), "--n", "1", "--out", str(out_path)
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["applications"] == 2
    # without --out the file goes to stdout and the count to stderr
    code, out, err = run(capsys, "gadget", str(net_path), "--n", "1")
    assert code == 0
    assert "applications: 2" in err
    assert load(out.encode()) == load(out_path.read_bytes())


def test_union_command(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    out = tmp_path / "u.json"
    code, _, _ = run(capsys, "union", str(net_path), "--copies", "2", "--out", str(out))
    assert code == 0
    assert load(out.read_bytes()) == union_copies(gen_n1(2, 1), 2)


def test_info_command(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, out, _ = run(capsys, "info", "--json", str(net_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["sources"] == 3
    assert doc["terminals"] == 4
    assert doc["edges"] == 32
    assert doc["multiple_unicast"] is False


def test_info_human_output(tmp_path, capsys):
    net_path = write_net(tmp_path, gen_n1(2, 1))
    code, out, _ = run(capsys, "info", str(net_path))
    assert code == 0
    assert "n1(q=2,n=1)" in out


# ---------------------------------------------------------------------------
# usage errors and the installed entry point
# ---------------------------------------------------------------------------

def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == 64


def test_missing_required_argument(capsys):
    assert run(capsys, "solve")[0] == 64


def test_broken_network_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "info", str(bad))[0] == 64


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "ncchar.cli", "gen", "--family", "fano"],
        capture_output=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert load(proc.stdout) == gen_n1(2, 1)
