from pathlib import Path

import pytest

from failprop.config import (
    ConfigError,
    build_horizontal_scenario,
    build_network,
    build_vertical_scenario,
    find_config,
    load_config,
    parse_config,
    read_sections,
    render_resolved,
    resolve_node,
    resolve_seeds,
)
from failprop.epidemic import EpidemicError
from failprop.topology import TopologyError

EPIDEMIC_CFG = """
[topology]
generate=ring:6

[model]
model=SIS
beta=0.3
delta1=0.2
seeds=0,3

[run]
max_ticks=50
n_runs=4
rng_seed=11
stop=fixed_ticks
"""

VERTICAL_CFG = """
[topology]
file=net.edges

[scenario]
kind=vertical

[capacity]
c1=100

[rate]
s1=10
s2=10

[attack]
s1=150
"""

VERTICAL_EDGES = """
s1 c1
s2 c1
s1 s2
[roles]
s1=edge_switch
s2=edge_switch
c1=controller
[controllers]
s1:c1
s2:c1
"""


def test_read_sections_basic():
    sections = read_sections("[run]\nmax_ticks=5 # comment\n\n[sweep]\ngrid=1\n")
    assert list(sections) == ["run", "sweep"]
    assert sections["run"] == [(2, "max_ticks=5")]


def test_read_sections_errors():
    with pytest.raises(ConfigError, match="unknown section"):
        read_sections("[plotting]\n")
    with pytest.raises(ConfigError, match="duplicate section"):
        read_sections("[run]\n[run]\n")
    with pytest.raises(ConfigError, match="before any"):
        read_sections("max_ticks=5\n")


def test_parse_defaults():
    cfg = parse_config("[topology]\ngenerate=ring:4\n")
    assert cfg.max_ticks == 100
    assert cfg.n_runs == 1
    assert cfg.rng_seed == 0
    assert cfg.stop == "absorb"
    assert cfg.epsilon == 0.05
    assert cfg.n_jobs == 1
    assert cfg.model is None and cfg.scenario_kind is None


def test_parse_epidemic_config():
    cfg = parse_config(EPIDEMIC_CFG)
    assert cfg.model.model == "SIS"
    assert cfg.model.beta == 0.3
    assert cfg.seed_tokens == ("0", "3")
    assert cfg.max_ticks == 50 and cfg.n_runs == 4 and cfg.rng_seed == 11
    assert cfg.stop == "fixed_ticks"


def test_parse_rejects_model_and_scenario_together():
    text = "[model]\nmodel=SI\nbeta=1\nseeds=0\n[scenario]\nkind=vertical\n"
    with pytest.raises(ConfigError, match="not both"):
        parse_config(text)


def test_parse_invalid_beta_names_field():
    text = "[model]\nmodel=SI\nbeta=1.5\nseeds=0\n"
    with pytest.raises(EpidemicError, match="beta"):
        parse_config(text)


def test_parse_validates_run_values():
    with pytest.raises(ConfigError, match="max_ticks"):
        parse_config("[run]\nmax_ticks=0\n")
    with pytest.raises(ConfigError, match="stop"):
        parse_config("[run]\nstop=sometimes\n")
    with pytest.raises(ConfigError, match="epsilon"):
        parse_config("[run]\nepsilon=2\n")
    with pytest.raises(ConfigError, match="must be an integer"):
        parse_config("[run]\nn_runs=many\n")


def test_parse_scenario_section_constraints():
    with pytest.raises(ConfigError, match="kind"):
        parse_config("[scenario]\nkind=diagonal\n")
    with pytest.raises(ConfigError, match="misroute"):
        parse_config("[scenario]\nkind=vertical\nmisroute=true\n")
    with pytest.raises(ConfigError, match="requires a \\[scenario\\]"):
        parse_config("[capacity]\n0=5\n")
    with pytest.raises(ConfigError, match="does not belong"):
        parse_config("[scenario]\nkind=vertical\n[injection]\n0,1,5\n")
    with pytest.raises(ConfigError, match="does not belong"):
        parse_config("[scenario]\nkind=horizontal\n[rate]\n0=5\n")


def test_parse_attack_and_injection_shape():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config("[scenario]\nkind=vertical\n[attack]\n0=5\n1=5\n")
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config("[scenario]\nkind=horizontal\n[injection]\n0,1,5\n2,3,5\n")
    with pytest.raises(ConfigError, match="entry,exit,volume"):
        parse_config("[scenario]\nkind=horizontal\n[injection]\n0,1\n")
    with pytest.raises(ConfigError, match="src,dst,volume"):
        parse_config("[scenario]\nkind=horizontal\n[demand]\n0,1,2,3\n")


def test_parse_sweep_grid():
    cfg = parse_config("[sweep]\ngrid=0.1, 0.3 ,0.5\n")
    assert cfg.grid == (0.1, 0.3, 0.5)
    with pytest.raises(ConfigError, match="nonempty grid"):
        parse_config("[sweep]\ngrid=\n")
    with pytest.raises(ConfigError, match="must be a number"):
        parse_config("[sweep]\ngrid=a,b\n")


def test_parse_output_section():
    cfg = parse_config("[output]\ndir=results\n")
    assert cfg.out_dir == "results"
    with pytest.raises(ConfigError, match="formats"):
        parse_config("[output]\nformats=parquet\n")


def test_find_config_prefers_real_files(tmp_path):
    mine = tmp_path / "fig3-sid.cfg"
    mine.write_text("[topology]\ngenerate=ring:3\n")
    assert find_config(str(mine)) == mine
    # preset names resolve with or without the extension
    assert find_config("fig3-sid").name == "fig3-sid.cfg"
    assert find_config("fig5a-vertical.cfg").name == "fig5a-vertical.cfg"
    with pytest.raises(ConfigError, match="no preset"):
        find_config("fig9-imaginary")


def test_shipped_presets_parse():
    for name in ("fig3-sid", "fig5a-vertical", "fig5b-horizontal"):
        cfg = load_config(name)
        net = build_network(cfg)
        assert net.node_count > 0


def test_build_network_from_generate():
    cfg = parse_config("[topology]\ngenerate=er:12:0.5\ngen_seed=3\n")
    net = build_network(cfg)
    assert net.node_count == 12
    # same generate string and seed, same graph
    assert build_network(cfg).edges == net.edges


def test_build_network_errors():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config("[topology]\nfile=x\ngenerate=ring:3\n")
    with pytest.raises(ConfigError, match="no \\[topology\\]"):
        build_network(parse_config("[run]\nmax_ticks=5\n"))
    cfg = parse_config("[topology]\nfile=missing.edges\n", base_dir="/nonexistent")
    with pytest.raises(TopologyError, match="cannot read"):
        build_network(cfg)
    with pytest.raises(TopologyError, match="unknown generator"):
        build_network(parse_config("[topology]\ngenerate=moebius:4\n"))
    with pytest.raises(ConfigError, match="generate"):
        build_network(parse_config("[topology]\ngenerate=ring:wide\n"))


def test_topology_file_relative_to_config(tmp_path):
    (tmp_path / "g.edges").write_text("0 1\n1 2\n")
    cfg = parse_config("[topology]\nfile=g.edges\n", base_dir=tmp_path)
    assert build_network(cfg).node_count == 3


def test_resolve_node_and_seeds(tmp_path):
    (tmp_path / "net.edges").write_text(VERTICAL_EDGES)
    cfg = parse_config("[topology]\nfile=net.edges\n[model]\nmodel=SI\nbeta=1\nseeds=s2,0\n",
                       base_dir=tmp_path)
    net = build_network(cfg)
    # first-appearance alias order in the file: s1, c1, s2
    assert resolve_node(net, "s1", "x") == 0
    assert resolve_node(net, "2", "x") == 2
    assert resolve_seeds(cfg, net) == (2, 0)
    with pytest.raises(ConfigError, match="unknown node"):
        resolve_node(net, "s9", "x")
    with pytest.raises(ConfigError, match="out of range"):
        resolve_node(net, "77", "x")


def test_build_vertical_scenario_with_aliases(tmp_path):
    (tmp_path / "net.edges").write_text(VERTICAL_EDGES)
    cfg = parse_config(VERTICAL_CFG, base_dir=tmp_path)
    net = build_network(cfg)
    sc = build_vertical_scenario(cfg, net)
    assert sc.controller_capacity == {1: 100.0}
    assert sc.base_rate == {0: 10.0, 2: 10.0}
    assert sc.attack == (0, 150.0)


def test_build_horizontal_scenario():
    text = """
[topology]
generate=ring:6

[scenario]
kind=horizontal
misroute=true

[capacity]
1=5

[demand]
0,3,2
1,4,1.5

[injection]
0,3,9
"""
    cfg = parse_config(text)
    net = build_network(cfg)
    sc = build_horizontal_scenario(cfg, net)
    assert sc.node_capacity == {1: 5.0}
    assert sc.demands == ((0, 3, 2.0), (1, 4, 1.5))
    assert sc.injection == (0, 3, 9.0)
    assert sc.misroute


def test_render_resolved_is_a_fixed_point(tmp_path):
    (tmp_path / "net.edges").write_text(VERTICAL_EDGES)
    cfg = parse_config(VERTICAL_CFG, base_dir=tmp_path)
    net = build_network(cfg)
    once = render_resolved(cfg, net)
    cfg2 = parse_config(once, base_dir=tmp_path)
    net2 = build_network(cfg2)
    assert net2.edges == net.edges
    assert render_resolved(cfg2, net2) == once
    # aliases are resolved away and the seed is explicit
    assert "s1" not in once.replace("net.edges", "")
    assert "rng_seed=0" in once


def test_render_resolved_epidemic_round_trip():
    cfg = parse_config(EPIDEMIC_CFG)
    net = build_network(cfg)
    once = render_resolved(cfg, net)
    assert "rng_seed=11" in once
    assert "seeds=0,3" in once
    cfg2 = parse_config(once)
    assert cfg2.model == cfg.model
    assert cfg2.max_ticks == cfg.max_ticks
    assert render_resolved(cfg2, build_network(cfg2)) == once
