//! Gaifman graphs, distances, balls, neighborhoods and tree-depth.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::structures::{expand, Structure};

/// A finite simple graph with labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph; self-loops are rejected and duplicate edges merged.
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::DanglingElement(format!("#{}", u.max(v))));
            }
            if u == v {
                return Err(Error::Malformed(format!("self-loop on {:?}", labels[u])));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Graph { labels, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            out.extend(row.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Induced subgraph on `keep`, relabelled in the order given.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&w| pos[w] != usize::MAX).map(|&w| pos[w]).collect())
            .collect();
        Graph { labels: keep.iter().map(|&v| self.labels[v].clone()).collect(), adj }
    }

    /// Breadth-first distances from a set of sources; `None` means unreachable.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have a distance");
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Elements are adjacent iff they are distinct and co-occur in some tuple.
pub fn gaifman_graph(a: &Structure) -> Graph {
    let mut edges = Vec::new();
    for r in a.relations() {
        for t in r.tuples() {
            for (i, &x) in t.iter().enumerate() {
                for &y in &t[i + 1..] {
                    if x != y {
                        edges.push((x, y));
                    }
                }
            }
        }
    }
    Graph::new(a.elements().to_vec(), &edges).expect("gaifman edges are loop-free")
}

fn check_elements(a: &Structure, xs: &[usize]) -> Result<()> {
    match xs.iter().find(|&&x| x >= a.size()) {
        Some(&bad) => Err(Error::DanglingElement(format!("#{bad}"))),
        None => Ok(()),
    }
}

/// Gaifman distance; `None` when the elements lie in different components.
pub fn distance(a: &Structure, x: usize, y: usize) -> Result<Option<usize>> {
    tuple_distance(a, &[x], y)
}

/// `min_i d(a_i, y)`.
pub fn tuple_distance(a: &Structure, tuple: &[usize], y: usize) -> Result<Option<usize>> {
    check_elements(a, tuple)?;
    check_elements(a, &[y])?;
    Ok(gaifman_graph(a).distances_from(tuple)[y])
}

/// Elements within distance `radius` of the tuple, sorted.
pub fn ball(a: &Structure, tuple: &[usize], radius: usize) -> Result<Vec<usize>> {
    check_elements(a, tuple)?;
    let dist = gaifman_graph(a).distances_from(tuple);
    Ok((0..a.size()).filter(|&x| matches!(dist[x], Some(d) if d <= radius)).collect())
}

/// The induced substructure on the ball, expanded with fresh constants
/// interpreted as the tuple.
pub fn neighborhood(a: &Structure, tuple: &[usize], radius: usize) -> Result<Structure> {
    let keep = ball(a, tuple, radius)?;
    for (name, c) in a.vocab().constants().iter().zip(a.constants()) {
        if keep.binary_search(c).is_err() {
            return Err(Error::ConstantOutsideBall(name.clone()));
        }
    }
    let sub = a.induced(&keep)?;
    let pinned: Vec<usize> = tuple
        .iter()
        .map(|&x| sub.index_of(a.name(x)).expect("tuple lies in its ball"))
        .collect();
    expand(&sub, &pinned)
}

/// Default vertex budget for exact tree-depth.
pub const TREE_DEPTH_BUDGET: usize = 20;

struct TreeDepth {
    adj: Vec<u32>,
    memo: HashMap<u32, u32>,
}

impl TreeDepth {
    fn new(g: &Graph) -> Self {
        let adj = (0..g.vertex_count())
            .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
            .collect();
        TreeDepth { adj, memo: HashMap::new() }
    }

    fn components(&self, set: u32) -> Vec<u32> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    fn depth(&mut self, set: u32) -> u32 {
        if set == 0 {
            return 0;
        }
        if set.count_ones() == 1 {
            return 1;
        }
        if let Some(&d) = self.memo.get(&set) {
            return d;
        }
        let comps = self.components(set);
        let d = if comps.len() > 1 {
            comps.into_iter().map(|c| self.depth(c)).max().unwrap_or(0)
        } else {
            let n = set.count_ones();
            // A connected graph with an edge has depth at least 2.
            let lower = 2;
            let mut best = n;
            let mut rest = set;
            while rest != 0 && best > lower {
                let v = rest.trailing_zeros();
                rest &= rest - 1;
                best = best.min(1 + self.depth(set & !(1 << v)));
            }
            best
        };
        self.memo.insert(set, d);
        d
    }

    /// Root of an optimal elimination tree of the connected set: the
    /// lowest-indexed vertex attaining the optimum.
    fn best_root(&mut self, set: u32) -> usize {
        let target = self.depth(set);
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            if 1 + self.depth(set & !(1 << v)) == target {
                return v as usize;
            }
        }
        unreachable!("some vertex attains the tree-depth")
    }

    fn forest(&mut self, set: u32, parent: Option<usize>, out: &mut [Option<usize>]) {
        for comp in self.components(set) {
            let root = self.best_root(comp);
            out[root] = parent;
            self.forest(comp & !(1 << root), Some(root), out);
        }
    }
}

fn check_budget(g: &Graph, budget: usize) -> Result<()> {
    let limit = budget.min(32);
    if g.vertex_count() > limit {
        return Err(Error::CapExceeded(format!(
            "tree-depth of a {}-vertex graph exceeds the vertex budget {limit}",
            g.vertex_count()
        )));
    }
    Ok(())
}

fn full_set(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn tree_depth(g: &Graph) -> Result<usize> {
    tree_depth_with_budget(g, TREE_DEPTH_BUDGET)
}

pub fn tree_depth_with_budget(g: &Graph, budget: usize) -> Result<usize> {
    check_budget(g, budget)?;
    Ok(TreeDepth::new(g).depth(full_set(g.vertex_count())) as usize)
}

/// Tree-depth of the Gaifman graph with the elements of `over` deleted.
pub fn tree_depth_over(a: &Structure, over: &[usize]) -> Result<usize> {
    check_elements(a, over)?;
    let keep: Vec<usize> = (0..a.size()).filter(|x| !over.contains(x)).collect();
    tree_depth(&gaifman_graph(a).induced(&keep))
}

/// A rooted elimination forest of minimum depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationForest {
    /// Parent of every vertex; `None` for roots.
    pub parent: Vec<Option<usize>>,
    pub depth: usize,
}

impl EliminationForest {
    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&w| self.parent[w] == Some(v)).collect()
    }

    /// Number of vertices on the path from `v` up to its root.
    pub fn level(&self, v: usize) -> usize {
        let mut d = 1;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }
}

pub fn elimination_forest(g: &Graph) -> Result<EliminationForest> {
    check_budget(g, TREE_DEPTH_BUDGET)?;
    let mut solver = TreeDepth::new(g);
    let all = full_set(g.vertex_count());
    let depth = solver.depth(all) as usize;
    let mut parent = vec![None; g.vertex_count()];
    solver.forest(all, None, &mut parent);
    Ok(EliminationForest { parent, depth })
}
