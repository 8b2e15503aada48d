//! The exact Gomory-Hu Steiner tree recursion and its two combine steps.

use num_bigint::BigUint;

use crate::error::{internal, invalid, Result};
use crate::graph::{Graph, TerminalSet, Vertex};
use crate::metrics::Metrics;
use crate::params::Params;
use crate::steps::{decomp, find_tau_star, CutCache};
use crate::tree::{SteinerGHTree, TreeEdge};

pub use crate::tree::{verify_gh_tree, VerifyReport, Violation};

/// Where a parent vertex takes its assignment from: the large instance or
/// one of the attached instances, with the vertex id inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Large(Vertex),
    Piece(usize, Vertex),
}

/// A subtree attached by [`combine_type_i`]: the tree of `G_v`, the vertex
/// `x_v` of `G_v`, the vertex `y_v` of `G_large` and the edge weight.
#[derive(Clone, Debug)]
pub struct Attachment {
    pub tree: SteinerGHTree,
    pub x: Vertex,
    pub y: Vertex,
    pub weight: u64,
}

fn piece_assignment(large: &SteinerGHTree, trees: &[&SteinerGHTree], sources: &[Source]) -> Result<Vec<usize>> {
    let mut f = Vec::with_capacity(sources.len());
    for s in sources {
        let label = match *s {
            Source::Large(x) => *large.assignment().get(x).ok_or_else(bad_source)?,
            Source::Piece(i, x) => {
                let t = trees.get(i).ok_or_else(bad_source)?;
                *t.assignment().get(x).ok_or_else(bad_source)?
            }
        };
        f.push(label);
    }
    Ok(f)
}

fn bad_source() -> crate::error::Error {
    crate::error::Error::Internal("assignment source out of range".into())
}

/// `CombineTypeI`: the disjoint union of `large` and every attached tree,
/// plus an edge `(f_v(x_v), f_large(y_v))` per attachment.
pub fn combine_type_i(large: &SteinerGHTree, pieces: &[Attachment], sources: &[Source]) -> Result<SteinerGHTree> {
    let mut nodes = large.nodes().to_vec();
    let mut edges = large.edges().to_vec();
    for p in pieces {
        nodes.extend_from_slice(p.tree.nodes());
        edges.extend_from_slice(p.tree.edges());
        let a = *p.tree.assignment().get(p.x).ok_or_else(bad_source)?;
        let b = *large.assignment().get(p.y).ok_or_else(bad_source)?;
        edges.push(TreeEdge { a, b, w: p.weight });
    }
    let trees: Vec<&SteinerGHTree> = pieces.iter().map(|p| &p.tree).collect();
    let f = piece_assignment(large, &trees, sources)?;
    SteinerGHTree::new(nodes, edges, f)
}

/// Children of `c` in `small` rooted at `c`, with the connecting weights.
pub fn children(small: &SteinerGHTree, c: usize) -> Result<Vec<(usize, u64)>> {
    if !small.contains(c) {
        return invalid(format!("node {c} is not in the tree"));
    }
    let mut out = small.neighbors(c);
    out.sort_unstable();
    Ok(out)
}

/// Labels of the subtree below `child` when `small` is rooted at `c`.
pub fn subtree_below(small: &SteinerGHTree, c: usize, child: usize) -> Result<Vec<usize>> {
    let path = small.path(child, c)?;
    if path.len() != 1 {
        return invalid(format!("{child} is not a child of {c}"));
    }
    Ok(small.side(path[0], child))
}

/// `CombineTypeII`: `large` plus `small` without `c`; every child `v` of
/// `c` is attached to `f_large(y_v)` with weight `w(v, c)`. `ys` lists
/// `(v, y_v)` for every child. `Source::Piece(0, x)` refers to `small`.
pub fn combine_type_ii(
    large: &SteinerGHTree,
    small: &SteinerGHTree,
    c: usize,
    ys: &[(usize, Vertex)],
    sources: &[Source],
) -> Result<SteinerGHTree> {
    let kids = children(small, c)?;
    if kids.len() != ys.len() {
        return invalid("every child of the contracted node needs an attachment");
    }
    let mut nodes = large.nodes().to_vec();
    nodes.extend(small.nodes().iter().copied().filter(|&x| x != c));
    let mut edges = large.edges().to_vec();
    edges.extend(small.edges().iter().copied().filter(|e| e.a != c && e.b != c));
    for &(v, w) in &kids {
        let Some(&(_, y)) = ys.iter().find(|p| p.0 == v) else {
            return invalid(format!("child {v} has no attachment"));
        };
        let b = *large.assignment().get(y).ok_or_else(bad_source)?;
        edges.push(TreeEdge { a: v, b, w });
    }
    let f = piece_assignment(large, &[small], sources)?;
    if f.contains(&c) {
        return internal("contracted node survives in the assignment");
    }
    SteinerGHTree::new(nodes, edges, f)
}

/// `ceil(log_{16/15} k)` for `k >= 1`.
pub fn log_16_15(k: usize) -> usize {
    let target = BigUint::from(k);
    let (mut num, mut den) = (BigUint::from(1u32), BigUint::from(1u32));
    let mut e = 0;
    while num < &target * &den {
        num *= 16u32;
        den *= 15u32;
        e += 1;
    }
    e
}

/// Depth cap `ceil(log_{16/15} |U|) + 2`.
pub fn depth_cap(terminals: usize) -> usize {
    log_16_15(terminals) + 2
}

/// Shared state of one recursion.
pub(crate) struct Ctx<'a> {
    pub metrics: &'a mut Metrics,
    pub params: &'a Params,
    pub next_label: usize,
    pub depth_cap: usize,
}

impl Ctx<'_> {
    pub fn fresh_label(&mut self) -> usize {
        let l = self.next_label;
        self.next_label += 1;
        l
    }
}

/// One instance: terminal vertices of `g` paired with their tree labels.
pub(crate) type Terminals = Vec<(Vertex, usize)>;

pub(crate) fn terminal_set(terms: &Terminals) -> TerminalSet {
    TerminalSet::new(terms.iter().map(|t| t.0).collect())
}

pub(crate) fn check_shrink(child: usize, parent: usize, num: usize, den: usize, what: &str) -> Result<()> {
    if child >= parent || child * den > parent * num {
        return internal(format!("{what} has {child} of {parent} terminals, above {num}/{den}"));
    }
    Ok(())
}

/// Contracts `V \ S` and returns `(G_v, x_v, U_v, vertex map)`.
pub(crate) fn outside_contracted(
    g: &Graph,
    side: &[Vertex],
    terms: &Terminals,
) -> Result<(Graph, Vertex, Terminals, Vec<Vertex>)> {
    let inside = g.mask(side);
    let rest: Vec<Vertex> = (0..g.n()).filter(|&v| !inside[v]).collect();
    let con = g.contract(&[rest])?;
    let t: Terminals = terms.iter().filter(|t| inside[t.0]).map(|&(v, l)| (con.map[v], l)).collect();
    Ok((con.graph, con.block_vertex[0], t, con.map))
}

/// Attaches the subtrees `S_v` through [`combine_type_i`] after recursing on
/// every `G/(V \ S_v)` and on `G/{S_v}`.
pub(crate) fn recurse_type_i(
    ctx: &mut Ctx,
    g: &Graph,
    terms: &Terminals,
    sides: &[(Vec<Vertex>, u64)],
    depth: usize,
    large_limit: (usize, usize),
    rec: &mut dyn FnMut(&mut Ctx, &Graph, &Terminals, usize) -> Result<SteinerGHTree>,
) -> Result<SteinerGHTree> {
    let k = terms.len();
    let mut owner = vec![usize::MAX; g.n()];
    for (i, (side, _)) in sides.iter().enumerate() {
        for &v in side {
            if owner[v] != usize::MAX {
                return internal("contracted sets overlap");
            }
            owner[v] = i;
        }
    }
    let blocks: Vec<Vec<Vertex>> = sides.iter().map(|s| s.0.clone()).collect();
    let con = g.contract(&blocks)?;
    let large_terms: Terminals =
        terms.iter().filter(|t| owner[t.0] == usize::MAX).map(|&(v, l)| (con.map[v], l)).collect();
    check_shrink(large_terms.len(), k, large_limit.0, large_limit.1, "large instance")?;
    if large_terms.is_empty() {
        return internal("large instance lost every terminal");
    }
    let mut pieces = Vec::with_capacity(sides.len());
    let mut local_maps = Vec::with_capacity(sides.len());
    for (i, (side, weight)) in sides.iter().enumerate() {
        let (gv, x, tv, map) = outside_contracted(g, side, terms)?;
        check_shrink(tv.len(), k, 15, 16, "cut instance")?;
        if tv.is_empty() {
            return internal("cut instance has no terminal");
        }
        let tree = rec(ctx, &gv, &tv, depth + 1)?;
        local_maps.push(map);
        pieces.push(Attachment { tree, x, y: con.block_vertex[i], weight: *weight });
    }
    let large = rec(ctx, &con.graph, &large_terms, depth + 1)?;
    let sources: Vec<Source> = (0..g.n())
        .map(|v| match owner[v] {
            usize::MAX => Source::Large(con.map[v]),
            i => Source::Piece(i, local_maps[i][v]),
        })
        .collect();
    combine_type_i(&large, &pieces, &sources)
}

fn exact_rec(ctx: &mut Ctx, g: &Graph, terms: &Terminals, depth: usize) -> Result<SteinerGHTree> {
    ctx.metrics.enter_recursion(depth);
    if depth > ctx.depth_cap {
        return internal(format!("recursion depth {depth} exceeds cap {}", ctx.depth_cap));
    }
    if terms.len() == 1 {
        return Ok(SteinerGHTree::singleton(terms[0].1, g.n()));
    }
    if !g.is_connected() {
        return internal("recursive instance is disconnected");
    }
    let u = terminal_set(terms);
    let k = terms.len();
    let mut cache = CutCache::new(ctx.params);
    let star = find_tau_star(ctx.metrics, &mut cache, ctx.params, g, &u)?;
    if 16 * star.terminals.len() >= 15 * k {
        let r = star.terminals[0];
        let cuts = decomp(ctx.metrics, &mut cache, ctx.params, g, &u, &star.terminals, r, star.tau)?;
        drop(cache);
        let sides: Vec<(Vec<Vertex>, u64)> = cuts.into_iter().map(|c| (c.side, c.weight)).collect();
        recurse_type_i(ctx, g, terms, &sides, depth, (7, 8), &mut exact_rec)
    } else {
        drop(cache);
        recurse_type_ii(ctx, g, terms, &star.vertices, &star.terminals, depth)
    }
}

fn recurse_type_ii(
    ctx: &mut Ctx,
    g: &Graph,
    terms: &Terminals,
    c_vertices: &[Vertex],
    c_terminals: &[Vertex],
    depth: usize,
) -> Result<SteinerGHTree> {
    let k = terms.len();
    let in_c = g.mask(c_vertices);
    let con_s = g.contract(&[c_vertices.to_vec()])?;
    let c = con_s.block_vertex[0];
    let c_label = ctx.fresh_label();
    let mut small_terms: Terminals =
        terms.iter().filter(|t| !in_c[t.0]).map(|&(v, l)| (con_s.map[v], l)).collect();
    small_terms.push((c, c_label));
    check_shrink(small_terms.len(), k, 15, 16, "small instance")?;
    let small = exact_rec(ctx, &con_s.graph, &small_terms, depth + 1)?;
    let kids = children(&small, c_label)?;
    let mut owner = vec![usize::MAX; g.n()];
    let mut sides = Vec::with_capacity(kids.len());
    for (i, &(v, _)) in kids.iter().enumerate() {
        let below: std::collections::BTreeSet<usize> = subtree_below(&small, c_label, v)?.into_iter().collect();
        let side: Vec<Vertex> =
            (0..g.n()).filter(|&x| !in_c[x] && below.contains(&small.f(con_s.map[x]))).collect();
        for &x in &side {
            owner[x] = i;
        }
        sides.push(side);
    }
    let con_l = g.contract(&sides)?;
    let label_of: std::collections::BTreeMap<Vertex, usize> = terms.iter().copied().collect();
    let large_terms: Terminals = c_terminals.iter().map(|&v| (con_l.map[v], label_of[&v])).collect();
    check_shrink(large_terms.len(), k, 15, 16, "large instance")?;
    let large = exact_rec(ctx, &con_l.graph, &large_terms, depth + 1)?;
    let ys: Vec<(usize, Vertex)> = kids.iter().enumerate().map(|(i, &(v, _))| (v, con_l.block_vertex[i])).collect();
    let sources: Vec<Source> = (0..g.n())
        .map(|x| match owner[x] {
            usize::MAX => Source::Large(con_l.map[x]),
            _ => Source::Piece(0, con_s.map[x]),
        })
        .collect();
    combine_type_ii(&large, &small, c_label, &ys, &sources)
}

/// `GHTree(G, U)` for connected `G`.
pub fn gh_tree(metrics: &mut Metrics, params: &Params, g: &Graph, u: &TerminalSet) -> Result<SteinerGHTree> {
    u.validate(g)?;
    if u.is_empty() {
        return invalid("empty terminal set");
    }
    if !g.is_connected() {
        return invalid("graph is disconnected; use gh_forest");
    }
    let cap = depth_cap(u.len());
    let mut ctx = Ctx { metrics, params, next_label: g.n(), depth_cap: cap };
    let terms: Terminals = u.members().iter().map(|&v| (v, v)).collect();
    exact_rec(&mut ctx, g, &terms, 0)
}

/// One connected component with the tree on its terminals; `tree` is
/// `None` when the component holds no terminal. Tree labels and the
/// assignment use original vertex ids; `vertices` is sorted and the
/// assignment is indexed by position in it.
#[derive(Clone, Debug)]
pub struct ComponentTree {
    pub vertices: Vec<Vertex>,
    pub tree: Option<SteinerGHTree>,
}

/// One connected component as its own instance: original ids, the
/// induced graph and the terminals in local ids (possibly empty).
#[derive(Clone, Debug)]
pub struct ComponentJob {
    pub vertices: Vec<Vertex>,
    pub graph: Graph,
    pub terminals: TerminalSet,
}

/// Splits `g` into its connected components, in `Graph::components` order.
pub fn component_jobs(g: &Graph, u: &TerminalSet) -> Result<Vec<ComponentJob>> {
    u.validate(g)?;
    Ok(g.components()
        .into_iter()
        .map(|comp| {
            let graph = g.induced(&comp).graph;
            let terminals = TerminalSet::new((0..comp.len()).filter(|&i| u.contains(comp[i])).collect());
            ComponentJob { vertices: comp, graph, terminals }
        })
        .collect())
}

impl ComponentJob {
    /// Relabels a tree built on [`ComponentJob::graph`] to original ids.
    pub fn lift(self, t: Option<SteinerGHTree>) -> Result<ComponentTree> {
        let Some(t) = t else {
            return Ok(ComponentTree { vertices: self.vertices, tree: None });
        };
        let comp = &self.vertices;
        let nodes: Vec<usize> = t.nodes().iter().map(|&x| comp[x]).collect();
        let edges: Vec<TreeEdge> = t.edges().iter().map(|e| TreeEdge { a: comp[e.a], b: comp[e.b], w: e.w }).collect();
        let f: Vec<usize> = t.assignment().iter().map(|&x| comp[x]).collect();
        let tree = SteinerGHTree::new(nodes, edges, f)?;
        Ok(ComponentTree { vertices: self.vertices, tree: Some(tree) })
    }
}

/// Applies `build` to every connected component of `g` holding a terminal.
pub fn per_component(
    g: &Graph,
    u: &TerminalSet,
    build: &mut dyn FnMut(&Graph, &TerminalSet) -> Result<SteinerGHTree>,
) -> Result<Vec<ComponentTree>> {
    let mut out = Vec::new();
    for job in component_jobs(g, u)? {
        let t = if job.terminals.is_empty() { None } else { Some(build(&job.graph, &job.terminals)?) };
        out.push(job.lift(t)?);
    }
    Ok(out)
}

/// [`gh_tree`] on every component.
pub fn gh_forest(metrics: &mut Metrics, params: &Params, g: &Graph, u: &TerminalSet) -> Result<Vec<ComponentTree>> {
    per_component(g, u, &mut |sg, su| gh_tree(metrics, params, sg, su))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::Ratio;

    fn check(g: &Graph, u: &TerminalSet) -> SteinerGHTree {
        let mut m = Metrics::new();
        let t = gh_tree(&mut m, &Params::default(), g, u).unwrap();
        let mut scratch = Metrics::new();
        let mut lam = |s, t| crate::graph::connectivity_oracle(&mut scratch, g, s, t);
        let rep = verify_gh_tree(g, u, &t, Ratio::zero(), &mut lam, None).unwrap();
        assert!(rep.passed(), "{rep:?}");
        t
    }

    #[test]
    fn small_examples() {
        let p = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = check(&p, &TerminalSet::all(3));
        assert_eq!(t.sorted_edges().iter().map(|e| e.w).collect::<Vec<_>>(), vec![1, 1]);
        let k4 = Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert!(check(&k4, &TerminalSet::all(4)).edges().iter().all(|e| e.w == 3));
        let b = Graph::new(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)]).unwrap();
        let t = check(&b, &TerminalSet::all(6));
        assert_eq!(t.path_min(0, 1).unwrap(), 2);
        assert_eq!(t.path_min(0, 4).unwrap(), 1);
        check(&b, &TerminalSet::new(vec![1, 4]));
        check(&b, &TerminalSet::new(vec![5]));
    }

    #[test]
    fn combine_examples() {
        let single = |x: usize, n: usize| SteinerGHTree::singleton(x, n);
        let t = combine_type_i(&single(0, 2), &[Attachment { tree: single(1, 2), x: 1, y: 1, weight: 5 }], &[
            Source::Large(0),
            Source::Piece(0, 0),
        ])
        .unwrap();
        assert_eq!(t.edges(), &[TreeEdge { a: 1, b: 0, w: 5 }]);
        let large = single(0, 3);
        assert_eq!(combine_type_i(&large, &[], &[Source::Large(0), Source::Large(1), Source::Large(2)]).unwrap(), large);
        let two = SteinerGHTree::new(vec![0, 1], vec![TreeEdge { a: 0, b: 1, w: 2 }], vec![0, 1, 0, 1]).unwrap();
        let t = combine_type_i(
            &two,
            &[
                Attachment { tree: single(5, 2), x: 1, y: 2, weight: 1 },
                Attachment { tree: single(6, 2), x: 1, y: 3, weight: 1 },
            ],
            &[Source::Large(0), Source::Large(1), Source::Piece(0, 0), Source::Piece(1, 0)],
        )
        .unwrap();
        assert_eq!(t.nodes(), &[0, 1, 5, 6]);
        assert_eq!(t.edges().len(), 3);
        assert!(combine_type_i(&two, &[Attachment { tree: single(1, 2), x: 1, y: 0, weight: 1 }], &[Source::Large(0)]).is_err());
    }

    #[test]
    fn combine_type_ii_examples() {
        let small = SteinerGHTree::new(vec![9, 1], vec![TreeEdge { a: 9, b: 1, w: 4 }], vec![1, 9]).unwrap();
        let large = SteinerGHTree::singleton(0, 2);
        let t = combine_type_ii(&large, &small, 9, &[(1, 1)], &[Source::Large(0), Source::Piece(0, 0)]).unwrap();
        assert_eq!(t.edges(), &[TreeEdge { a: 1, b: 0, w: 4 }]);
        assert_eq!(t.assignment(), &[0, 1]);
        assert!(combine_type_ii(&large, &small, 7, &[], &[]).is_err());
        let small = SteinerGHTree::new(
            vec![9, 1, 2],
            vec![TreeEdge { a: 9, b: 1, w: 4 }, TreeEdge { a: 9, b: 2, w: 6 }],
            vec![1, 2, 9],
        )
        .unwrap();
        let large = SteinerGHTree::new(vec![3, 4], vec![TreeEdge { a: 3, b: 4, w: 8 }], vec![3, 4, 3, 4]).unwrap();
        let t = combine_type_ii(
            &large,
            &small,
            9,
            &[(1, 2), (2, 3)],
            &[Source::Piece(0, 0), Source::Piece(0, 1), Source::Large(0), Source::Large(1)],
        )
        .unwrap();
        assert_eq!(t.nodes(), &[1, 2, 3, 4]);
        let w: Vec<u64> = t.sorted_edges().iter().map(|e| e.w).collect();
        assert_eq!(w, vec![4, 6, 8]);
    }

    #[test]
    fn depth_caps() {
        assert_eq!(log_16_15(1), 0);
        assert_eq!(log_16_15(2), 11);
        assert_eq!(depth_cap(16), 45);
    }
}
