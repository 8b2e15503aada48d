//! Text formats for graphs, terminal sets and trees. Vertices are 1-based
//! in files and 0-based in memory.
//!
//! Graph: `p ghcut <n> <m>`, then `m` lines `e <u> <v> <w>`; optional
//! `t <v1> <v2> ...` lines; `c` starts a comment.
//!
//! Tree: `n <node>`, `e <a> <b> <w>` and `f <vertex> <node>` lines. A forest
//! over several components starts with `disconnected <k>`; vertices of a
//! component without terminals have no `f` line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ghtree::ComponentTree;
use crate::graph::{Graph, TerminalSet, Vertex, DEFAULT_WEIGHT_CEILING};
use crate::tree::{SteinerGHTree, TreeEdge};

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Non-comment, non-blank lines with their 1-based numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn number(line: usize, tok: &str, what: &str) -> Result<u64> {
    tok.parse::<u64>().or_else(|_| err(line, format!("bad {what} '{tok}'")))
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<Vertex> {
    let v = number(line, tok, "vertex")?;
    if v == 0 || v > n as u64 {
        return err(line, format!("vertex {v} outside 1..={n}"));
    }
    Ok(v as usize - 1)
}

fn terminal_line(line: usize, toks: &[&str], n: usize, out: &mut BTreeSet<Vertex>) -> Result<()> {
    for t in toks {
        if !out.insert(vertex(line, t, n)?) {
            return err(line, format!("terminal {t} listed twice"));
        }
    }
    Ok(())
}

/// A graph file and its terminal lines, `None` when there are none.
pub fn parse_graph(text: &str) -> Result<(Graph, Option<TerminalSet>)> {
    let mut recs = records(text);
    let Some((hl, header)) = recs.next() else {
        return err(1, "missing header 'p ghcut <n> <m>'");
    };
    if header.len() != 4 || header[0] != "p" || header[1] != "ghcut" {
        return err(hl, "expected header 'p ghcut <n> <m>'");
    }
    let n = number(hl, header[2], "vertex count")? as usize;
    let m = number(hl, header[3], "edge count")? as usize;
    let mut edges = Vec::with_capacity(m);
    let mut terms = BTreeSet::new();
    let mut saw_terms = false;
    for (line, toks) in recs {
        match toks[0] {
            "e" => {
                if toks.len() != 4 {
                    return err(line, "expected 'e <u> <v> <w>'");
                }
                if edges.len() == m {
                    return err(line, format!("more than {m} edges"));
                }
                let u = vertex(line, toks[1], n)?;
                let v = vertex(line, toks[2], n)?;
                let w = number(line, toks[3], "weight")?;
                if w == 0 || w > DEFAULT_WEIGHT_CEILING {
                    return err(line, format!("weight {w} outside 1..={DEFAULT_WEIGHT_CEILING}"));
                }
                edges.push((u, v, w));
            }
            "t" => {
                saw_terms = true;
                terminal_line(line, &toks[1..], n, &mut terms)?;
            }
            "p" => return err(line, "duplicate header"),
            other => return err(line, format!("unknown record '{other}'")),
        }
    }
    if edges.len() != m {
        return err(hl, format!("header declares {m} edges, found {}", edges.len()));
    }
    let g = Graph::new(n, edges).or_else(|e| err(hl, e.to_string()))?;
    Ok((g, saw_terms.then(|| TerminalSet::new(terms.into_iter().collect()))))
}

/// A terminal file: `t` lines only.
pub fn parse_terminals(text: &str, n: usize) -> Result<TerminalSet> {
    let mut terms = BTreeSet::new();
    for (line, toks) in records(text) {
        if toks[0] != "t" {
            return err(line, format!("expected 't <v> ...', found '{}'", toks[0]));
        }
        terminal_line(line, &toks[1..], n, &mut terms)?;
    }
    Ok(TerminalSet::new(terms.into_iter().collect()))
}

pub fn write_graph(g: &Graph, u: Option<&TerminalSet>) -> String {
    let mut s = format!("p ghcut {} {}\n", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(s, "e {} {} {}", e.u + 1, e.v + 1, e.w);
    }
    if let Some(u) = u {
        s.push('t');
        for &v in u.members() {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    s
}

fn write_parts(s: &mut String, nodes: &[usize], edges: &[TreeEdge]) {
    for &x in nodes {
        let _ = writeln!(s, "n {}", x + 1);
    }
    for e in edges {
        let _ = writeln!(s, "e {} {} {}", e.a + 1, e.b + 1, e.w);
    }
}

/// One tree over all vertices.
pub fn write_tree(t: &SteinerGHTree) -> String {
    let mut s = String::new();
    write_parts(&mut s, t.nodes(), &t.sorted_edges());
    for (v, &x) in t.assignment().iter().enumerate() {
        let _ = writeln!(s, "f {} {}", v + 1, x + 1);
    }
    s
}

/// A forest from [`crate::ghtree::gh_forest`]; a single component is
/// written exactly as [`write_tree`] would.
pub fn write_forest(forest: &[ComponentTree], n: usize) -> String {
    let mut s = String::new();
    if forest.len() > 1 {
        let _ = writeln!(s, "disconnected {}", forest.len());
    }
    let mut f: Vec<Option<usize>> = vec![None; n];
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for c in forest {
        if let Some(t) = &c.tree {
            nodes.extend_from_slice(t.nodes());
            edges.extend(t.sorted_edges());
            for (i, &v) in c.vertices.iter().enumerate() {
                f[v] = Some(t.assignment()[i]);
            }
        }
    }
    nodes.sort_unstable();
    edges.sort_unstable();
    write_parts(&mut s, &nodes, &edges);
    for (v, x) in f.iter().enumerate() {
        if let Some(x) = x {
            let _ = writeln!(s, "f {} {}", v + 1, x + 1);
        }
    }
    s
}

/// A parsed tree file, ids 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFile {
    pub components: Option<usize>,
    pub nodes: Vec<usize>,
    pub edges: Vec<TreeEdge>,
    pub assignment: Vec<Option<usize>>,
}

/// Parses a tree file for a graph on `n` vertices.
pub fn parse_tree(text: &str, n: usize) -> Result<TreeFile> {
    let mut out = TreeFile { components: None, nodes: Vec::new(), edges: Vec::new(), assignment: vec![None; n] };
    for (k, (line, toks)) in records(text).enumerate() {
        match (toks[0], toks.len()) {
            ("disconnected", 2) if k == 0 => out.components = Some(number(line, toks[1], "component count")? as usize),
            ("n", 2) => out.nodes.push(vertex(line, toks[1], n)?),
            ("e", 4) => out.edges.push(TreeEdge {
                a: vertex(line, toks[1], n)?,
                b: vertex(line, toks[2], n)?,
                w: number(line, toks[3], "weight")?,
            }),
            ("f", 3) => {
                let v = vertex(line, toks[1], n)?;
                if out.assignment[v].replace(vertex(line, toks[2], n)?).is_some() {
                    return err(line, format!("vertex {} assigned twice", v + 1));
                }
            }
            (other, _) => return err(line, format!("malformed tree record '{other}'")),
        }
    }
    Ok(out)
}

impl TreeFile {
    /// Splits the file along the components of `g`. Fails when an edge or
    /// an assignment crosses components.
    pub fn split(&self, g: &Graph) -> Result<Vec<ComponentTree>> {
        let comps = g.components();
        let mut comp_of = vec![0; g.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let cross = |msg: String| Err(Error::InvalidArgument(msg));
        let mut nodes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in &self.nodes {
            nodes.entry(comp_of[x]).or_default().push(x);
        }
        let mut edges: BTreeMap<usize, Vec<TreeEdge>> = BTreeMap::new();
        for e in &self.edges {
            if comp_of[e.a] != comp_of[e.b] {
                return cross(format!("tree edge ({}, {}) joins two components", e.a + 1, e.b + 1));
            }
            edges.entry(comp_of[e.a]).or_default().push(*e);
        }
        let mut out = Vec::with_capacity(comps.len());
        for (i, verts) in comps.into_iter().enumerate() {
            let Some(ns) = nodes.remove(&i) else {
                if verts.iter().any(|&v| self.assignment[v].is_some()) {
                    return cross(format!("component of vertex {} has no tree node", verts[0] + 1));
                }
                out.push(ComponentTree { vertices: verts, tree: None });
                continue;
            };
            let mut f = Vec::with_capacity(verts.len());
            for &v in &verts {
                match self.assignment[v] {
                    Some(x) if comp_of[x] == i => f.push(x),
                    Some(x) => return cross(format!("vertex {} assigned across components to {}", v + 1, x + 1)),
                    None => return cross(format!("vertex {} has no assignment", v + 1)),
                }
            }
            let tree = SteinerGHTree::new(ns, edges.remove(&i).unwrap_or_default(), f)?;
            out.push(ComponentTree { vertices: verts, tree: Some(tree) });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = "c path\np ghcut 3 2\ne 1 2 1\ne 2 3 4\nt 1 3\n";
        let (g, u) = parse_graph(text).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(u.as_ref().unwrap().members(), &[0, 2]);
        assert_eq!(write_graph(&g, u.as_ref()), "p ghcut 3 2\ne 1 2 1\ne 2 3 4\nt 1 3\n");
    }

    #[test]
    fn graph_errors_carry_lines() {
        let line = |t: &str| match parse_graph(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("q ghcut 2 1\n"), 1);
        assert_eq!(line(""), 1);
        assert_eq!(line("p ghcut 2 1\n\ne 1 3 1\n"), 3);
        assert_eq!(line("p ghcut 2 1\ne 1 2 0\n"), 2);
        assert_eq!(line("p ghcut 2 2\ne 1 2 1\n"), 1);
        assert_eq!(line("p ghcut 2 1\ne 1 2 1\nt 1 1\n"), 3);
        assert_eq!(line("p ghcut 2 1\ne 1 2 x\n"), 2);
        assert!(matches!(parse_terminals("t 1\nx\n", 2), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn tree_round_trip() {
        let t = SteinerGHTree::new(
            vec![0, 2],
            vec![TreeEdge { a: 2, b: 0, w: 1 }],
            vec![0, 0, 2],
        )
        .unwrap();
        let s = write_tree(&t);
        assert_eq!(s, "n 1\nn 3\ne 1 3 1\nf 1 1\nf 2 1\nf 3 3\n");
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let parsed = parse_tree(&s, 3).unwrap();
        let split = parsed.split(&g).unwrap();
        assert_eq!(split.len(), 1);
        assert_eq!(split[0].tree.as_ref().unwrap().sorted_edges(), t.sorted_edges());
    }

    #[test]
    fn forest_marker() {
        let g = Graph::new(4, [(0, 1, 2)]).unwrap();
        let forest = vec![
            ComponentTree {
                vertices: vec![0, 1],
                tree: Some(SteinerGHTree::new(vec![0, 1], vec![TreeEdge { a: 0, b: 1, w: 2 }], vec![0, 1]).unwrap()),
            },
            ComponentTree { vertices: vec![2], tree: Some(SteinerGHTree::singleton(2, 1)) },
            ComponentTree { vertices: vec![3], tree: None },
        ];
        let s = write_forest(&forest, 4);
        assert_eq!(s, "disconnected 3\nn 1\nn 2\nn 3\ne 1 2 2\nf 1 1\nf 2 2\nf 3 3\n");
        let back = parse_tree(&s, 4).unwrap().split(&g).unwrap();
        assert_eq!(back.len(), 3);
        assert!(back[2].tree.is_none());
        assert!(parse_tree("n 1\ndisconnected 2\n", 2).is_err());
    }
}
