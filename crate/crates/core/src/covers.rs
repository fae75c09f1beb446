//! Deterministic instances from finite graphs.
//!
//! Label the vertices of a finite connected graph `H` so that two vertices
//! share a label iff `H` rooted at either is the same rooted graph. The
//! universal cover of `H`, rooted at a uniformly chosen vertex biased by
//! degree, is then a reversible measure whose descendant subtrees are
//! Galton–Watson trees with point-mass offspring laws.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::dist::Distribution;
use crate::error::Error;
use crate::model::{GWSpec, RootMeasure};
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector};

pub const DEFAULT_VERTEX_BOUND: usize = 10;

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl FiniteGraph {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut adj = vec![BTreeSet::new(); vertices];
        for (a, b) in edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidGraph(format!("edge {a}-{b} outside 0..{vertices}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(FiniteGraph { adj })
    }

    /// Parses lines `v: u1 u2 ...` (0-based). Edges may be listed from one
    /// or both ends; `#` starts a comment.
    pub fn parse_adjacency(text: &str) -> Result<Self, Error> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidGraph(format!("line {}: expected `v: u1 u2 ...`", lineno + 1));
            let (head, tail) = line.split_once(':').ok_or_else(bad)?;
            let v: usize = head.trim().parse().map_err(|_| bad())?;
            let nbrs = tail
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((v, nbrs));
        }
        let vertices = rows
            .iter()
            .flat_map(|(v, nbrs)| std::iter::once(*v).chain(nbrs.iter().copied()))
            .max()
            .map_or(0, |m| m + 1);
        let edges: Vec<_> = rows
            .iter()
            .flat_map(|(v, nbrs)| nbrs.iter().map(move |&u| (*v, u)))
            .collect();
        FiniteGraph::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.adj.len())
            .flat_map(|a| self.adj[a].range(a + 1..).map(move |&b| (a, b)))
            .collect()
    }

    fn distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.adj.is_empty() || self.distances(0).iter().all(Option::is_some)
    }

    /// The same graph with vertex `v` renamed `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FiniteGraph::new(self.adj.len(), self.edges().into_iter().map(|(a, b)| (perm[a], perm[b])))
            .expect("permutation of a valid graph")
    }

    pub fn complete(k: usize) -> Self {
        FiniteGraph::new(k, (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b)))).expect("valid")
    }

    pub fn path(k: usize) -> Self {
        FiniteGraph::new(k, (1..k).map(|b| (b - 1, b))).expect("valid")
    }

    pub fn cycle(k: usize) -> Self {
        FiniteGraph::new(k, (0..k).map(|a| (a, (a + 1) % k))).expect("valid")
    }

    /// `K_{a,b}` with the `a` side first.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        FiniteGraph::new(a + b, (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y)))).expect("valid")
    }
}

/// Colour refinement of `g` rooted at each of `roots`, run jointly so that
/// colours are comparable across roots. Starts from (distance, degree).
fn refine(g: &FiniteGraph, roots: &[usize]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut colors: Vec<Vec<usize>> = roots
        .iter()
        .map(|&r| {
            let dist = g.distances(r);
            (0..n).map(|v| dist[v].unwrap_or(usize::MAX) * (n + 1) + g.degree(v)).collect()
        })
        .collect();
    loop {
        let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let signatures: Vec<Vec<(usize, Vec<usize>)>> = colors
            .iter()
            .map(|col| {
                (0..n)
                    .map(|v| {
                        let mut nbr: Vec<usize> = g.neighbors(v).iter().map(|&u| col[u]).collect();
                        nbr.sort_unstable();
                        (col[v], nbr)
                    })
                    .collect()
            })
            .collect();
        for sig in signatures.iter().flatten() {
            let next = palette.len();
            palette.entry(sig.clone()).or_insert(next);
        }
        let refined: Vec<Vec<usize>> = signatures
            .iter()
            .map(|sigs| sigs.iter().map(|s| palette[s]).collect())
            .collect();
        let classes = |c: &Vec<Vec<usize>>| c.iter().flatten().collect::<BTreeSet<_>>().len();
        if classes(&refined) == classes(&colors) {
            return refined;
        }
        colors = refined;
    }
}

/// Whether some automorphism of `g` maps `r` to `s`. Backtracking search
/// over colour-preserving bijections.
fn rooted_isomorphic(g: &FiniteGraph, r: usize, s: usize) -> bool {
    let colors = refine(g, &[r, s]);
    let (cr, cs) = (&colors[0], &colors[1]);
    let mut hist_r = cr.clone();
    let mut hist_s = cs.clone();
    hist_r.sort_unstable();
    hist_s.sort_unstable();
    if hist_r != hist_s {
        return false;
    }
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    let dist = g.distances(r);
    order.sort_by_key(|&v| (dist[v], v));

    fn extend(
        g: &FiniteGraph,
        order: &[usize],
        pos: usize,
        cr: &[usize],
        cs: &[usize],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let Some(&v) = order.get(pos) else { return true };
        for w in 0..g.vertex_count() {
            if used[w] || cs[w] != cr[v] {
                continue;
            }
            let consistent = order[..pos]
                .iter()
                .all(|&u| g.has_edge(u, v) == g.has_edge(map[u].unwrap(), w));
            if !consistent {
                continue;
            }
            map[v] = Some(w);
            used[w] = true;
            if extend(g, order, pos + 1, cr, cs, map, used) {
                return true;
            }
            map[v] = None;
            used[w] = false;
        }
        false
    }

    let mut map = vec![None; n];
    let mut used = vec![false; n];
    extend(g, &order, 0, cr, cs, &mut map, &mut used)
}

/// Vertex labels `1..=n`, numbered in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLabeling {
    labels: Vec<Label>,
    n: usize,
}

impl VertexLabeling {
    pub fn new(labels: Vec<Label>) -> Result<Self, Error> {
        let n = labels.iter().copied().max().unwrap_or(0);
        let used: BTreeSet<Label> = labels.iter().copied().collect();
        if used != (1..=n).collect() {
            return Err(Error::InvalidGraph("labels must use exactly 1..=n".into()));
        }
        Ok(VertexLabeling { labels, n })
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Number of distinct labels.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertex partition induced by the labels.
    pub fn classes(&self) -> BTreeSet<BTreeSet<usize>> {
        let mut by_label: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
        for (v, &l) in self.labels.iter().enumerate() {
            by_label.entry(l).or_default().insert(v);
        }
        by_label.into_values().collect()
    }
}

pub fn label_vertices(g: &FiniteGraph) -> Result<VertexLabeling, Error> {
    label_vertices_bounded(g, DEFAULT_VERTEX_BOUND)
}

/// Labels vertices by rooted-isomorphism class of `(g, v)`.
pub fn label_vertices_bounded(g: &FiniteGraph, bound: usize) -> Result<VertexLabeling, Error> {
    let vertices = g.vertex_count();
    if vertices > bound {
        return Err(Error::GraphTooLarge { vertices, bound });
    }
    if vertices < 2 || !g.is_connected() {
        return Err(Error::InvalidGraph("graph must be connected with at least one edge".into()));
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(vertices);
    for v in 0..vertices {
        let found = reps.iter().position(|&r| rooted_isomorphic(g, r, v));
        let label = match found {
            Some(k) => k + 1,
            None => {
                reps.push(v);
                reps.len()
            }
        };
        labels.push(label);
    }
    VertexLabeling::new(labels)
}

fn neighbor_vector(g: &FiniteGraph, labels: &VertexLabeling, v: usize) -> OffspringVector {
    OffspringVector::from_labels(labels.n(), g.neighbors(v).iter().map(|&u| labels.label(u)))
}

/// For each realized pair `(j, i)`: the label counts of the neighbors of an
/// `i`-vertex other than one `j`-neighbor, checked to agree across all such
/// vertices.
fn other_neighbor_vectors(
    g: &FiniteGraph,
    labels: &VertexLabeling,
) -> Result<BTreeMap<(Label, Label), OffspringVector>, Error> {
    let mut out = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let i = labels.label(v);
        let counts = neighbor_vector(g, labels, v);
        for j in counts.support() {
            let other = counts.decrement(j).expect("j is a neighbor label");
            match out.insert((j, i), other.clone()) {
                Some(prev) if prev != other => {
                    return Err(Error::IllDefinedLabeling { parent: j, child: i })
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

pub type LabelPair = (Label, Label);

/// Directed multigraph on realized ordered label pairs: `(j, i)` has `m`
/// edges to `(i, k)` when an `i`-vertex has `m` neighbors labeled `k`
/// besides one labeled `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDigraph {
    pub vertices: BTreeSet<LabelPair>,
    pub edges: BTreeMap<(LabelPair, LabelPair), u32>,
}

impl PairDigraph {
    pub fn multiplicity(&self, from: LabelPair, to: LabelPair) -> u32 {
        self.edges.get(&(from, to)).copied().unwrap_or(0)
    }

    pub fn out_degree(&self, from: LabelPair) -> u32 {
        self.edges.iter().filter(|((f, _), _)| *f == from).map(|(_, m)| m).sum()
    }

    /// Graphviz rendering; pair `(j, i)` is drawn as `"j,i"`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pairs {\n");
        for (j, i) in &self.vertices {
            let _ = writeln!(out, "  \"{j},{i}\";");
        }
        for (((j, i), (_, k)), m) in &self.edges {
            let _ = writeln!(out, "  \"{j},{i}\" -> \"{i},{k}\" [label=\"{m}\"];");
        }
        out.push_str("}\n");
        out
    }
}

pub fn pair_digraph(g: &FiniteGraph, labels: &VertexLabeling) -> Result<PairDigraph, Error> {
    let others = other_neighbor_vectors(g, labels)?;
    let vertices: BTreeSet<_> = others.keys().copied().collect();
    let mut edges = BTreeMap::new();
    for (&(j, i), other) in &others {
        for k in other.support() {
            edges.insert(((j, i), (i, k)), other.get(k));
        }
    }
    Ok(PairDigraph { vertices, edges })
}

/// The reversible measure of the universal cover rooted at a
/// degree-biased uniform vertex of `g`.
pub fn lift_measure(g: &FiniteGraph, labels: &VertexLabeling) -> Result<RootMeasure, Error> {
    if labels.labels().len() != g.vertex_count() {
        return Err(Error::InvalidGraph("labeling does not match the graph".into()));
    }
    let n = labels.n();
    let others = other_neighbor_vectors(g, labels)?;

    let mut degree_mass = vec![0u64; n];
    let mut neighbors: Vec<Option<OffspringVector>> = vec![None; n];
    for v in 0..g.vertex_count() {
        let i = labels.label(v);
        degree_mass[i - 1] += g.degree(v) as u64;
        let counts = neighbor_vector(g, labels, v);
        match &neighbors[i - 1] {
            Some(prev) if *prev != counts => {
                let j = counts.support().next().unwrap_or(i);
                return Err(Error::IllDefinedLabeling { parent: j, child: i });
            }
            Some(_) => {}
            None => neighbors[i - 1] = Some(counts),
        }
    }
    let total: u64 = degree_mass.iter().sum();
    let root = degree_mass
        .iter()
        .map(|&m| Rational::new(m as i64, total as i64))
        .collect();
    let neighbors = neighbors
        .into_iter()
        .map(|c| Distribution::point_mass(c.expect("every label is used")))
        .collect();
    let nu = GWSpec::pair(
        n,
        others.into_iter().map(|(key, other)| (key, Distribution::point_mass(other))),
    )?;
    RootMeasure::new(root, neighbors, nu)
}

/// Labels `g` and lifts it in one go.
pub fn cover_measure(g: &FiniteGraph) -> Result<RootMeasure, Error> {
    lift_measure(g, &label_vertices(g)?)
}
