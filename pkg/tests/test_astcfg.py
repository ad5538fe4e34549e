"""Control-flow graph lowering, checked against small hand-drawn graphs."""

from dartomp.astcfg import (CfgNodeKind, EdgeLabel, build_astcfg, dump_cfg,
                            mark_offloaded)
from dartomp.nodes import NodeKind, defined_functions
from dartomp.parser import parse
from dartomp.source import SourceFile


def cfg_of(text, fn=None):
    src = SourceFile.from_text(text, path="t.c")
    tu, _ = parse(src)
    fns = defined_functions(tu)
    node = fns[fn] if fn else next(iter(fns.values()))
    return src, build_astcfg(src, node)


def shape(cfg):
    return [n.kind for n in cfg.nodes]


def edge_set(cfg):
    return {(e.src, e.dst, e.label) for e in cfg.edges}


def succ_kinds(cfg, node_id):
    return sorted((n.kind.value, e.label.value)
                  for n, e in cfg.successors(node_id))


def test_straight_line_function():
    _, cfg = cfg_of("int main(void) { int x = 1; x = 2; return x; }")
    # Entry, Exit, Decl, Stmt; the trailing return collapses into Exit
    assert shape(cfg) == [CfgNodeKind.ENTRY, CfgNodeKind.EXIT,
                          CfgNodeKind.DECL, CfgNodeKind.STMT]
    assert cfg.exit.ast is not None
    assert cfg.exit.ast.kind is NodeKind.RETURN_STMT
    assert edge_set(cfg) == {(0, 2, EdgeLabel.EPSILON),
                             (2, 3, EdgeLabel.EPSILON),
                             (3, 1, EdgeLabel.EPSILON)}


def test_branch_graph_with_guarded_store():
    """A call feeding a guarded array store: one Decl, one Pred that either
    runs the store or falls straight through to Exit."""
    text = """
    int bar(int a[]);
    int foo(int a[]) {
      int x = bar(a);
      if (x > 0) {
        a[x] = 0;
      }
      return x;
    }
    """
    _, cfg = cfg_of(text, fn="foo")
    assert shape(cfg) == [CfgNodeKind.ENTRY, CfgNodeKind.EXIT,
                          CfgNodeKind.DECL, CfgNodeKind.PRED,
                          CfgNodeKind.STMT]
    assert edge_set(cfg) == {(0, 2, EdgeLabel.EPSILON),
                             (2, 3, EdgeLabel.EPSILON),
                             (3, 4, EdgeLabel.TRUE),
                             (3, 1, EdgeLabel.FALSE),
                             (4, 1, EdgeLabel.EPSILON)}
    assert cfg.exit.ast.kind is NodeKind.RETURN_STMT
    assert [c.callee for c in cfg.call_sites] == ["bar"]


def test_if_else_diamond():
    _, cfg = cfg_of("""
    int main(void) {
      int x = 1;
      if (x > 0) { x = 2; } else { x = 3; }
      return x;
    }
    """)
    pred = [n for n in cfg.nodes if n.kind is CfgNodeKind.PRED][0]
    assert succ_kinds(cfg, pred.id) == [("Stmt", "false_branch"),
                                        ("Stmt", "true_branch")]


def test_for_loop_has_backedge_through_loopback():
    _, cfg = cfg_of("""
    int main(void) {
      int s = 0;
      for (int i = 0; i < 4; ++i) { s += i; }
      return s;
    }
    """)
    kinds = shape(cfg)
    assert CfgNodeKind.LOOP_BACK in kinds
    assert cfg.back_edge_count() == 1
    back = [e for e in cfg.edges if e.is_back_edge][0]
    assert cfg.node(back.src).kind is CfgNodeKind.LOOP_BACK
    assert cfg.node(back.dst).kind is CfgNodeKind.PRED


def test_while_and_do_loops_backedge():
    _, cfg = cfg_of("""
    int main(void) {
      int i = 4;
      while (i > 0) { i -= 1; }
      do { i += 1; } while (i < 2);
      return i;
    }
    """)
    assert cfg.back_edge_count() == 2


def test_break_exits_loop():
    _, cfg = cfg_of("""
    int main(void) {
      int i = 0;
      for (;;) {
        if (i > 3) { break; }
        ++i;
      }
      return i;
    }
    """)
    # the break edge must leave the loop: some node reaches the return's
    # predecessor without passing the loop-back node
    assert cfg.back_edge_count() == 1


def test_kernel_becomes_sub_cfg():
    src, cfg = cfg_of("""
    int a[8];
    int main(void) {
      #pragma omp target teams distribute parallel for
      for (int i = 0; i < 8; ++i) { a[i] = i; }
      return a[0];
    }
    """)
    mark_offloaded(cfg)
    kernels = cfg.kernel_nodes()
    assert len(kernels) == 1
    k = kernels[0]
    assert k.offloaded
    assert k.ast.kind is NodeKind.OMP_DIRECTIVE
    assert all(n.offloaded for n in k.sub_cfg.nodes)
    # host-side nodes stay unflagged
    assert not cfg.entry.offloaded


def test_call_sites_inside_kernel_marked_on_device():
    _, cfg = cfg_of("""
    double exp(double x);
    double a[8];
    int main(void) {
      #pragma omp target teams distribute parallel for
      for (int i = 0; i < 8; ++i) { a[i] = exp(a[i]); }
      return 0;
    }
    """)
    k = cfg.kernel_nodes()[0]
    sites = k.sub_cfg.call_sites
    assert [c.callee for c in sites] == ["exp"]
    assert sites[0].on_device


def test_dead_code_after_return_warns():
    _, cfg = cfg_of("int main(void) { return 1; int x = 2; }")
    assert any("unreachable" in w.message for w in cfg.warnings)


def test_enclosing_loops_recorded():
    _, cfg = cfg_of("""
    int a[4];
    int main(void) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          a[j] = i;
        }
      }
      return 0;
    }
    """)
    store = [n for n in cfg.nodes
             if n.kind is CfgNodeKind.STMT and n.ast is not None
             and n.ast.kind not in (NodeKind.FOR_STMT,)]
    deepest = max(cfg.nodes, key=lambda n: len(n.enclosing_loops))
    assert len(deepest.enclosing_loops) == 2


def test_dump_cfg_format():
    src, cfg = cfg_of("int main(void) { return 0; }")
    out = dump_cfg(src, cfg)
    assert "Entry" in out and "Exit" in out
    assert "edge 0 ->" in out
