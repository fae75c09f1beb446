//! Consistent node potentials for graphs whose edges carry ratios.
//!
//! An edge `(a, b, r)` asks for `pot(a) / pot(b) = r`. Such potentials
//! exist iff the product of ratios around every cycle is one. We fix one
//! root per component at potential one, propagate along a BFS spanning
//! forest and then test every non-tree edge.

use std::collections::VecDeque;

use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct RatioEdge {
    pub a: usize,
    pub b: usize,
    /// Required value of `pot(a) / pot(b)`.
    pub ratio: Rational,
}

#[derive(Clone, Debug)]
pub struct Potentials {
    pub values: Vec<Rational>,
    /// Component index of each node, numbered in order of first node.
    #[allow(dead_code)]
    pub component: Vec<usize>,
    pub components: usize,
}

impl Potentials {
    pub fn is_connected(&self) -> bool {
        self.components <= 1
    }
}

/// A closed walk `nodes[0], ..., nodes[k] = nodes[0]` whose ratio product
/// is not one. The last step uses the offending non-tree edge.
#[derive(Clone, Debug)]
pub struct CycleViolation {
    pub nodes: Vec<usize>,
    pub product: Rational,
}

fn oriented(edge: &RatioEdge, from: usize) -> Rational {
    if edge.a == from {
        edge.ratio.clone()
    } else {
        edge.ratio.recip()
    }
}

pub fn solve(nodes: usize, edges: &[RatioEdge]) -> Result<Potentials, CycleViolation> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    for (idx, e) in edges.iter().enumerate() {
        adj[e.a].push((e.b, idx));
        if e.a != e.b {
            adj[e.b].push((e.a, idx));
        }
    }

    let mut values = vec![Rational::zero(); nodes];
    let mut component = vec![usize::MAX; nodes];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes];
    let mut depth = vec![0usize; nodes];
    let mut components = 0;

    for start in 0..nodes {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = components;
        values[start] = Rational::one();
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(w, idx) in &adj[u] {
                if component[w] != usize::MAX {
                    continue;
                }
                component[w] = components;
                values[w] = &values[u] / oriented(&edges[idx], u);
                parent[w] = Some((u, idx));
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
        components += 1;
    }

    for (idx, e) in edges.iter().enumerate() {
        let is_tree = parent[e.b] == Some((e.a, idx)) || parent[e.a] == Some((e.b, idx));
        if is_tree {
            continue;
        }
        if &values[e.a] / &values[e.b] == e.ratio {
            continue;
        }
        // tree path a -> lca -> b, then close with the edge b -> a
        let (mut x, mut y) = (e.a, e.b);
        let mut up = vec![x];
        let mut down = vec![y];
        while x != y {
            if depth[x] >= depth[y] {
                x = parent[x].expect("non-root").0;
                up.push(x);
            } else {
                y = parent[y].expect("non-root").0;
                down.push(y);
            }
        }
        down.pop();
        let mut cycle = up;
        cycle.extend(down.into_iter().rev());
        cycle.push(e.a);
        let product = &values[e.a] / (&values[e.b] * &e.ratio);
        return Err(CycleViolation { nodes: cycle, product });
    }

    Ok(Potentials { values, component, components })
}
