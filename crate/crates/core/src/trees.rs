//! Oriented weighted leaf-labeled trees and their combinatorics: exhaustive
//! enumeration, the admissibility order rules, canonical edge pairings, tree
//! weights, and the recursive family-to-tree construction.
//!
//! Edges are stored as `(tail, head, mult)` with the orientation pointing in
//! the flow direction, toward the positive leaves. Positive leaves carry
//! labels `1..N₊`, negative leaves `-1..-N₋`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num::{BigInt, BigUint, One};

use crate::theta_core::{EndData, Theta};
use crate::{Error, Result};

/// Enumeration refuses inputs with more than this many leaves unless the
/// caller raises the cap explicitly.
pub const DEFAULT_LEAF_CAP: usize = 8;

/// One oriented weighted edge. `tail → head` is the flow direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub mult: u64,
}

/// A finite oriented weighted tree with signed leaf labels.
///
/// Vertices are dense indices `0..vertex_count()`. Trees built by [`phi`]
/// additionally carry role annotations: the construction stage of each
/// splitting vertex and, for each joining vertex, the negative leaf it was
/// created to absorb. Generic trees carry no annotations.
#[derive(Debug, Clone, Default)]
pub struct OrientedWeightedTree {
    labels: Vec<Option<i64>>,
    edges: Vec<Edge>,
    split_stage: BTreeMap<usize, usize>,
    join_label: BTreeMap<usize, i64>,
}

impl OrientedWeightedTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, label: i64) -> usize {
        self.labels.push(Some(label));
        self.labels.len() - 1
    }

    pub fn add_internal(&mut self) -> usize {
        self.labels.push(None);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, tail: usize, head: usize, mult: u64) {
        self.edges.push(Edge { tail, head, mult });
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn leaf_label(&self, v: usize) -> Option<i64> {
        self.labels.get(v).copied().flatten()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.leaf_label(v).is_some()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|lab| (v, lab)))
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.is_none().then_some(v))
    }

    pub fn leaf_vertex(&self, label: i64) -> Option<usize> {
        self.leaves().find(|&(_, l)| l == label).map(|(v, _)| v)
    }

    pub fn incident(&self, v: usize) -> Vec<Edge> {
        self.edges
            .iter()
            .copied()
            .filter(|e| e.tail == v || e.head == v)
            .collect()
    }

    pub fn outgoing(&self, v: usize) -> Vec<Edge> {
        self.edges.iter().copied().filter(|e| e.tail == v).collect()
    }

    pub fn incoming(&self, v: usize) -> Vec<Edge> {
        self.edges.iter().copied().filter(|e| e.head == v).collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.tail == v {
                    Some(e.head)
                } else if e.head == v {
                    Some(e.tail)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Internal vertices with at least two outgoing edges.
    pub fn is_splitting(&self, v: usize) -> bool {
        self.outgoing(v).len() >= 2
    }

    /// Internal vertices with at least two incoming edges.
    pub fn is_joining(&self, v: usize) -> bool {
        self.incoming(v).len() >= 2
    }

    /// Construction stage of a splitting vertex, when built by [`phi`].
    pub fn split_stage(&self, v: usize) -> Option<usize> {
        self.split_stage.get(&v).copied()
    }

    /// The splitting vertex created at the given stage, when built by [`phi`].
    pub fn splitting_vertex_of_stage(&self, stage: usize) -> Option<usize> {
        self.split_stage
            .iter()
            .find(|&(_, &s)| s == stage)
            .map(|(&v, _)| v)
    }

    /// The negative leaf a joining vertex absorbs, when built by [`phi`].
    pub fn join_label(&self, v: usize) -> Option<i64> {
        self.join_label.get(&v).copied()
    }

    /// The joining vertex that absorbs the given negative leaf, when built
    /// by [`phi`].
    pub fn joining_vertex_for(&self, label: i64) -> Option<usize> {
        self.join_label
            .iter()
            .find(|&(_, &l)| l == label)
            .map(|(&v, _)| v)
    }

    /// Vertices on the unique path from `u` to `w`, endpoints included.
    pub fn path_vertices(&self, u: usize, w: usize) -> Vec<usize> {
        let n = self.vertex_count();
        let mut parent = vec![usize::MAX; n];
        parent[u] = u;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if x == w {
                break;
            }
            for y in self.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut path = vec![w];
        let mut cur = w;
        while cur != u {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// The edge joining two adjacent vertices, in either orientation.
    pub fn edge_between(&self, x: usize, y: usize) -> Option<Edge> {
        self.edges
            .iter()
            .copied()
            .find(|e| (e.tail == x && e.head == y) || (e.tail == y && e.head == x))
    }

    /// Same tree with every orientation reversed and every leaf label
    /// negated; swaps the roles of the two sides.
    pub fn reversed(&self) -> OrientedWeightedTree {
        OrientedWeightedTree {
            labels: self.labels.iter().map(|l| l.map(|x| -x)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    tail: e.head,
                    head: e.tail,
                    mult: e.mult,
                })
                .collect(),
            split_stage: BTreeMap::new(),
            join_label: BTreeMap::new(),
        }
    }

    /// Injective encoding, equal exactly for trees that differ only by a
    /// relabeling of internal vertices. Rooted at the lowest-labeled leaf;
    /// leaf-fixing automorphisms are trivial, so sorting child encodings
    /// canonicalizes.
    pub fn canonical_key(&self) -> String {
        let root_label = self.leaves().map(|(_, l)| l).min().expect("tree has leaves");
        let root = self.leaf_vertex(root_label).unwrap();
        let e = self.incident(root)[0];
        let (other, dir) = if e.tail == root {
            (e.head, '>')
        } else {
            (e.tail, '<')
        };
        format!(
            "{root_label}{dir}{}|{}",
            e.mult,
            self.encode_subtree(other, root)
        )
    }

    fn encode_subtree(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = Vec::new();
        for e in self.incident(v) {
            if e.tail == v && e.head != parent {
                kids.push(format!(">{}:{}", e.mult, self.encode_subtree(e.head, v)));
            } else if e.head == v && e.tail != parent {
                kids.push(format!("<{}:{}", e.mult, self.encode_subtree(e.tail, v)));
            }
        }
        kids.sort();
        match self.leaf_label(v) {
            Some(l) => format!("L{l}"),
            None => format!("({})", kids.join(",")),
        }
    }

    /// Stable text form: leaves print as `(leaf:±i:m)` with their edge
    /// multiplicity, internal vertices as `(node child child ...)`. Rooted
    /// at the internal vertex next to the lowest-labeled leaf; internal edge
    /// multiplicities are forced by flow conservation and omitted.
    pub fn to_text(&self) -> String {
        let root_label = self.leaves().map(|(_, l)| l).min().expect("tree has leaves");
        let root_leaf = self.leaf_vertex(root_label).unwrap();
        let e = self.incident(root_leaf)[0];
        let anchor = if e.tail == root_leaf { e.head } else { e.tail };
        if self.is_leaf(anchor) {
            // degenerate single-edge tree: print both leaves under a bare junction
            return format!(
                "(node {} {})",
                self.render_leaf(root_leaf),
                self.render_leaf(anchor)
            );
        }
        self.render_node(anchor, usize::MAX)
    }

    fn render_leaf(&self, v: usize) -> String {
        let label = self.leaf_label(v).unwrap();
        let mult = self.incident(v)[0].mult;
        let sign = if label > 0 { "+" } else { "" };
        format!("(leaf:{sign}{label}:{mult})")
    }

    fn render_node(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = Vec::new();
        for e in self.incident(v) {
            let other = if e.tail == v { e.head } else { e.tail };
            if other == parent {
                continue;
            }
            if self.is_leaf(other) {
                kids.push(self.render_leaf(other));
            } else {
                kids.push(self.render_node(other, v));
            }
        }
        kids.sort();
        format!("(node {})", kids.join(" "))
    }
}

/// Leaf labels implied by end data: positive entries (unprimed then primed)
/// get labels `1..`, negative entries `-1..`.
pub fn side_lists(s: &EndData) -> (Vec<u64>, Vec<u64>) {
    (s.plus_side().collect(), s.minus_side().collect())
}

/// Checks the full tree contract against `s`: positive multiplicities,
/// degree-1 leaves, internal degree ≥ 3, flow conservation, and leaf
/// multiplicities/orientations matching the end data (primed entries count
/// as additional leaves after the unprimed ones).
pub fn validate_tree(t: &OrientedWeightedTree, s: &EndData) -> bool {
    let (pos, neg) = side_lists(s);
    if t.edges().iter().any(|e| e.mult == 0) {
        return false;
    }
    for v in 0..t.vertex_count() {
        let deg = t.incident(v).len();
        if t.is_leaf(v) {
            if deg != 1 {
                return false;
            }
        } else {
            if deg < 3 {
                return false;
            }
            let inflow: u64 = t.incoming(v).iter().map(|e| e.mult).sum();
            let outflow: u64 = t.outgoing(v).iter().map(|e| e.mult).sum();
            if inflow != outflow {
                return false;
            }
        }
    }
    let mut seen = HashSet::new();
    for (v, label) in t.leaves() {
        if !seen.insert(label) {
            return false;
        }
        let e = t.incident(v)[0];
        let want = if label > 0 {
            pos.get(label as usize - 1).copied()
        } else {
            neg.get((-label) as usize - 1).copied()
        };
        if want != Some(e.mult) {
            return false;
        }
        // positive leaves sit at edge heads, negative leaves at tails
        if label > 0 && e.head != v {
            return false;
        }
        if label < 0 && e.tail != v {
            return false;
        }
    }
    seen.len() == pos.len() + neg.len()
}

/// All trees for the end data, up to leaf-label-fixing isomorphism.
///
/// `trivalent_only` restricts internal vertices to degree 3; otherwise every
/// tree arises from a trivalent one by contracting internal edges. Edge
/// multiplicities are forced by conservation from the leaf data; shapes that
/// would force a zero flow are discarded.
pub fn enumerate_trees(s: &EndData, trivalent_only: bool) -> Result<Vec<OrientedWeightedTree>> {
    enumerate_trees_with_cap(s, trivalent_only, DEFAULT_LEAF_CAP)
}

pub fn enumerate_trees_with_cap(
    s: &EndData,
    trivalent_only: bool,
    cap: usize,
) -> Result<Vec<OrientedWeightedTree>> {
    let (pos, neg) = side_lists(s);
    let n = pos.len() + neg.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "tree leaves",
            cap,
        });
    }
    let trivalent = enumerate_trivalent(&pos, &neg);
    if trivalent_only {
        return Ok(trivalent);
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in &trivalent {
        let internal_edges: Vec<Edge> = t
            .edges()
            .iter()
            .copied()
            .filter(|e| !t.is_leaf(e.tail) && !t.is_leaf(e.head))
            .collect();
        for mask in 0u64..(1 << internal_edges.len()) {
            let subset: Vec<Edge> = internal_edges
                .iter()
                .copied()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e)
                .collect();
            let contracted = contract_edges(t, &subset);
            if seen.insert(contracted.canonical_key()) {
                out.push(contracted);
            }
        }
    }
    Ok(out)
}

fn enumerate_trivalent(pos: &[u64], neg: &[u64]) -> Vec<OrientedWeightedTree> {
    let np = pos.len();
    let nm = neg.len();
    let n = np + nm;
    let labels: Vec<i64> = (1..=np as i64)
        .chain((1..=nm as i64).map(|j| -j))
        .collect();
    if n < 3 {
        return Vec::new();
    }
    // unlabeled topologies by leaf insertion; leaf ids 0..n-1, internal from n
    let mut topos: Vec<Vec<(usize, usize)>> = vec![vec![(0, n), (1, n), (2, n)]];
    for leaf in 3..n {
        let mut next = Vec::new();
        for topo in &topos {
            let fresh = topo.iter().flat_map(|&(a, b)| [a, b]).max().unwrap() + 1;
            for ei in 0..topo.len() {
                let (u, v) = topo[ei];
                let mut t2: Vec<(usize, usize)> = topo
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != ei)
                    .map(|(_, &e)| e)
                    .collect();
                t2.push((u, fresh));
                t2.push((v, fresh));
                t2.push((leaf, fresh));
                next.push(t2);
            }
        }
        topos = next;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    'topo: for topo in &topos {
        let max_id = topo.iter().flat_map(|&(a, b)| [a, b]).max().unwrap();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); max_id + 1];
        for &(u, v) in topo {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut t = OrientedWeightedTree::new();
        let mut map = vec![usize::MAX; max_id + 1];
        for (i, &lab) in labels.iter().enumerate() {
            map[i] = t.add_leaf(lab);
        }
        for &(u, v) in topo {
            for x in [u, v] {
                if map[x] == usize::MAX {
                    map[x] = t.add_internal();
                }
            }
        }
        for &(u, v) in topo {
            // net flow through the edge = supply minus demand on u's side
            let mut side_labels = Vec::new();
            let mut visited = vec![false; max_id + 1];
            visited[u] = true;
            visited[v] = true;
            let mut stack = vec![u];
            while let Some(x) = stack.pop() {
                if x < n {
                    side_labels.push(labels[x]);
                }
                for &y in &adj[x] {
                    if !visited[y] {
                        visited[y] = true;
                        stack.push(y);
                    }
                }
            }
            let supply: i64 = side_labels
                .iter()
                .filter(|&&l| l < 0)
                .map(|&l| neg[(-l) as usize - 1] as i64)
                .sum();
            let demand: i64 = side_labels
                .iter()
                .filter(|&&l| l > 0)
                .map(|&l| pos[l as usize - 1] as i64)
                .sum();
            match supply - demand {
                flow if flow > 0 => t.add_edge(map[u], map[v], flow as u64),
                flow if flow < 0 => t.add_edge(map[v], map[u], (-flow) as u64),
                _ => continue 'topo,
            }
        }
        if seen.insert(t.canonical_key()) {
            out.push(t);
        }
    }
    out
}

/// Merges the endpoints of each listed edge. Only internal-internal edges
/// may be contracted, so leaves survive untouched.
fn contract_edges(t: &OrientedWeightedTree, subset: &[Edge]) -> OrientedWeightedTree {
    let n = t.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in subset {
        let (rt, rh) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        parent[rt] = rh;
    }
    let mut out = OrientedWeightedTree::new();
    let mut remap = vec![usize::MAX; n];
    for v in 0..n {
        if find(&mut parent, v) == v {
            remap[v] = match t.leaf_label(v) {
                Some(l) => out.add_leaf(l),
                None => out.add_internal(),
            };
        }
    }
    let removed: HashSet<Edge> = subset.iter().copied().collect();
    for e in t.edges() {
        if removed.contains(e) {
            continue;
        }
        let rt = find(&mut parent, e.tail);
        let rh = find(&mut parent, e.head);
        out.add_edge(remap[rt], remap[rh], e.mult);
    }
    out
}

/// Positive leaves reachable from the edge's head by upward paths.
fn up_leaves(t: &OrientedWeightedTree, e: Edge) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let mut stack = vec![e.head];
    while let Some(v) = stack.pop() {
        if let Some(l) = t.leaf_label(v) {
            out.insert(l);
            continue;
        }
        for e2 in t.outgoing(v) {
            stack.push(e2.head);
        }
    }
    out
}

/// Negative leaves reachable from the edge's tail by downward paths.
fn down_leaves(t: &OrientedWeightedTree, e: Edge) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let mut stack = vec![e.tail];
    while let Some(v) = stack.pop() {
        if let Some(l) = t.leaf_label(v) {
            out.insert(l);
            continue;
        }
        for e2 in t.incoming(v) {
            stack.push(e2.tail);
        }
    }
    out
}

/// The single positive leaf above, when the upward path never branches.
fn unique_up(t: &OrientedWeightedTree, e: Edge) -> Option<i64> {
    let mut v = e.head;
    loop {
        if let Some(l) = t.leaf_label(v) {
            return Some(l);
        }
        let outs = t.outgoing(v);
        if outs.len() != 1 {
            return None;
        }
        v = outs[0].head;
    }
}

/// The single negative leaf below, when the downward path never branches.
fn unique_down(t: &OrientedWeightedTree, e: Edge) -> Option<i64> {
    let mut v = e.tail;
    loop {
        if let Some(l) = t.leaf_label(v) {
            return Some(l);
        }
        let ins = t.incoming(v);
        if ins.len() != 1 {
            return None;
        }
        v = ins[0].tail;
    }
}

/// The four order rules a trivalent tree must satisfy for a canonical
/// pairing to exist:
///
/// (a) no edge runs from a joining vertex into a splitting vertex;
/// (b) at a splitting vertex, every positive leaf above one outgoing edge
///     precedes every positive leaf above an adjacent splitting vertex
///     reached by the other;
/// (c) mirror of (b) below joining vertices, with the order reversed;
/// (d) across a splitting→joining edge, `i₁ > i₂` or `j₁ < j₂` for the
///     leaves reached around it.
pub fn is_admissible(t: &OrientedWeightedTree) -> bool {
    for v in t.internal_vertices() {
        if t.is_splitting(v) {
            let outs = t.outgoing(v);
            for &e1 in &outs {
                for &e2 in &outs {
                    if e1 == e2 {
                        continue;
                    }
                    let w = e2.head;
                    if t.is_leaf(w) || !t.is_splitting(w) {
                        continue;
                    }
                    let mut i2s = BTreeSet::new();
                    for e in t.outgoing(w) {
                        i2s.extend(up_leaves(t, e));
                    }
                    for i1 in up_leaves(t, e1) {
                        if i2s.iter().any(|&i2| i1 >= i2) {
                            return false;
                        }
                    }
                }
            }
        }
        if t.is_joining(v) {
            let ins = t.incoming(v);
            for &e1 in &ins {
                for &e2 in &ins {
                    if e1 == e2 {
                        continue;
                    }
                    let w = e2.tail;
                    if t.is_leaf(w) || !t.is_joining(w) {
                        continue;
                    }
                    let mut j2s = BTreeSet::new();
                    for e in t.incoming(w) {
                        j2s.extend(down_leaves(t, e));
                    }
                    for j1 in down_leaves(t, e1) {
                        if j2s.iter().any(|&j2| j1 <= j2) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    for &e in t.edges() {
        let (w, v) = (e.tail, e.head);
        if t.is_leaf(w) || t.is_leaf(v) {
            continue;
        }
        if t.is_joining(w) && t.is_splitting(v) {
            return false;
        }
        if t.is_splitting(w) && t.is_joining(v) {
            let mut i1s = BTreeSet::new();
            for e2 in t.outgoing(v) {
                i1s.extend(up_leaves(t, e2));
            }
            let j1s = down_leaves(t, t.incoming(w)[0]);
            let mut i2s = BTreeSet::new();
            for e2 in t.outgoing(w) {
                if e2 != e {
                    i2s.extend(up_leaves(t, e2));
                }
            }
            let mut j2s = BTreeSet::new();
            for e2 in t.incoming(v) {
                if e2 != e {
                    j2s.extend(down_leaves(t, e2));
                }
            }
            for &i1 in &i1s {
                for &j1 in &j1s {
                    for &i2 in &i2s {
                        for &j2 in &j2s {
                            if !(i1 > i2 || j1 < j2) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

/// A choice of ordered edge pair `(e_v⁺, e_v⁻)` at each internal vertex,
/// with all pairs disjoint and exactly one tree edge left unpaired.
#[derive(Debug, Clone)]
pub struct EdgePairing {
    pairs: BTreeMap<usize, (Edge, Edge)>,
    e0: Edge,
}

impl EdgePairing {
    pub fn pairs(&self) -> &BTreeMap<usize, (Edge, Edge)> {
        &self.pairs
    }

    pub fn e_plus(&self, v: usize) -> Option<Edge> {
        self.pairs.get(&v).map(|&(p, _)| p)
    }

    pub fn e_minus(&self, v: usize) -> Option<Edge> {
        self.pairs.get(&v).map(|&(_, m)| m)
    }

    /// The distinguished unpaired edge `e₀`.
    pub fn unpaired(&self) -> Edge {
        self.e0
    }

    /// Disjointness across vertices plus the one-unpaired-edge count.
    pub fn is_valid_on(&self, t: &OrientedWeightedTree) -> bool {
        let mut used = HashSet::new();
        for (&v, &(ep, em)) in &self.pairs {
            if ep == em {
                return false;
            }
            let incident = t.incident(v);
            if !incident.contains(&ep) || !incident.contains(&em) {
                return false;
            }
            if !used.insert(ep) || !used.insert(em) {
                return false;
            }
        }
        if used.contains(&self.e0) {
            return false;
        }
        let paired: Vec<usize> = self.pairs.keys().copied().collect();
        let internal: Vec<usize> = t.internal_vertices().collect();
        paired == internal && used.len() + 1 == t.edges().len()
    }
}

/// The unique pairing on an admissible trivalent tree: at a splitting vertex
/// `e_v⁻` is the incoming edge and `e_v⁺` the outgoing edge whose unique
/// upward leaf precedes everything above the other branch; mirrored at
/// joining vertices.
pub fn canonical_pairing(t: &OrientedWeightedTree) -> Result<EdgePairing> {
    let mut pairs = BTreeMap::new();
    let mut used: HashSet<Edge> = HashSet::new();
    for v in t.internal_vertices() {
        if t.incident(v).len() != 3 {
            return Err(Error::NotAdmissible("tree is not trivalent"));
        }
        let (e_plus, e_minus) = if t.is_splitting(v) {
            let e_minus = t.incoming(v)[0];
            let outs = t.outgoing(v);
            let mut candidate = None;
            for &e in &outs {
                let Some(i1) = unique_up(t, e) else { continue };
                let mut others = BTreeSet::new();
                for &e2 in &outs {
                    if e2 != e {
                        others.extend(up_leaves(t, e2));
                    }
                }
                if others.iter().all(|&i2| i1 < i2) {
                    if candidate.is_some() {
                        return Err(Error::NotAdmissible(
                            "order rules select two outgoing edges at a splitting vertex",
                        ));
                    }
                    candidate = Some(e);
                }
            }
            let Some(e_plus) = candidate else {
                return Err(Error::NotAdmissible(
                    "no outgoing edge satisfies the order rules at a splitting vertex",
                ));
            };
            (e_plus, e_minus)
        } else {
            let e_plus = t.outgoing(v)[0];
            let ins = t.incoming(v);
            let mut candidate = None;
            for &e in &ins {
                let Some(j1) = unique_down(t, e) else { continue };
                let mut others = BTreeSet::new();
                for &e2 in &ins {
                    if e2 != e {
                        others.extend(down_leaves(t, e2));
                    }
                }
                if others.iter().all(|&j2| j1 > j2) {
                    if candidate.is_some() {
                        return Err(Error::NotAdmissible(
                            "order rules select two incoming edges at a joining vertex",
                        ));
                    }
                    candidate = Some(e);
                }
            }
            let Some(e_minus) = candidate else {
                return Err(Error::NotAdmissible(
                    "no incoming edge satisfies the order rules at a joining vertex",
                ));
            };
            (e_plus, e_minus)
        };
        pairs.insert(v, (e_plus, e_minus));
        used.insert(e_plus);
        used.insert(e_minus);
    }
    let free: Vec<Edge> = t
        .edges()
        .iter()
        .copied()
        .filter(|e| !used.contains(e))
        .collect();
    if free.len() != 1 {
        return Err(Error::NotAdmissible("pairs overlap between vertices"));
    }
    Ok(EdgePairing {
        pairs,
        e0: free[0],
    })
}

/// `W_θ(T,P) = m(e₀) · ∏_v (m_v⁻⌈m_v⁺θ⌉ − m_v⁺⌊m_v⁻θ⌋)` with signed flows:
/// `m_v⁺` is the outward flow along `e_v⁺` and `m_v⁻` the inward flow along
/// `e_v⁻`, both negative when the orientation disagrees.
pub fn weight(theta: Theta, t: &OrientedWeightedTree, p: &EdgePairing) -> Result<BigInt> {
    debug_assert!(p.is_valid_on(t));
    let mut w = BigInt::from(p.unpaired().mult);
    for (&v, &(ep, em)) in p.pairs() {
        let mp: i64 = if ep.tail == v {
            ep.mult as i64
        } else {
            -(ep.mult as i64)
        };
        let mm: i64 = if em.head == v {
            em.mult as i64
        } else {
            -(em.mult as i64)
        };
        let factor = mm as i128 * theta.ceil_mult_signed(mp)? as i128
            - mp as i128 * theta.floor_mult_signed(mm)? as i128;
        w *= BigInt::from(factor);
    }
    Ok(w)
}

/// Product of all edge multiplicities; the degree of the branched cover the
/// tree records.
pub fn covering_degree(t: &OrientedWeightedTree) -> BigUint {
    let mut d = BigUint::one();
    for e in t.edges() {
        d *= BigUint::from(e.mult);
    }
    d
}

/// The central vertex of a leaf triple: the unique common vertex of the
/// three pairwise leaf-to-leaf paths. Panics if the labels are not three
/// distinct leaves of the tree.
pub fn central_vertex(t: &OrientedWeightedTree, i: i64, j: i64, k: i64) -> usize {
    let vi = t.leaf_vertex(i).expect("leaf i");
    let vj = t.leaf_vertex(j).expect("leaf j");
    let vk = t.leaf_vertex(k).expect("leaf k");
    let pij: HashSet<usize> = t.path_vertices(vi, vj).into_iter().collect();
    let pik: HashSet<usize> = t.path_vertices(vi, vk).into_iter().collect();
    let pjk: HashSet<usize> = t.path_vertices(vj, vk).into_iter().collect();
    let mut common = pij
        .iter()
        .filter(|v| pik.contains(v) && pjk.contains(v))
        .copied();
    let v = common.next().expect("paths of a leaf triple meet");
    debug_assert!(common.next().is_none());
    v
}

/// A family `(E₁, …, E_{N₊})` of nonempty sets of negative leaf indices,
/// one per positive leaf, satisfying the recursive membership conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndSetFamily {
    sets: Vec<BTreeSet<i64>>,
}

impl EndSetFamily {
    pub fn new(sets: Vec<BTreeSet<i64>>) -> Self {
        EndSetFamily { sets }
    }

    pub fn sets(&self) -> &[BTreeSet<i64>] {
        &self.sets
    }
}

/// All end-set families for the end data, by the defining recursion: `E₁`
/// ranges over subsets with `Σ_{E₁∖min} b < a₁ < Σ_{E₁} b`, the overflow
/// `Σ_{E₁} b − a₁` replaces the minimum in a relabeled remainder, and the
/// tail families come from the reduced data.
pub fn enumerate_end_set_families(s: &EndData) -> Result<Vec<EndSetFamily>> {
    enumerate_end_set_families_with_cap(s, DEFAULT_LEAF_CAP)
}

pub fn enumerate_end_set_families_with_cap(s: &EndData, cap: usize) -> Result<Vec<EndSetFamily>> {
    let (pos, neg) = side_lists(s);
    if pos.len() + neg.len() > cap {
        return Err(Error::CapExceeded {
            what: "end-set family leaves",
            cap,
        });
    }
    Ok(families(&pos, &neg)
        .into_iter()
        .map(EndSetFamily::new)
        .collect())
}

fn families(pos: &[u64], neg: &[u64]) -> Vec<Vec<BTreeSet<i64>>> {
    let nm = neg.len();
    let negset: Vec<i64> = (1..=nm as i64).map(|j| -j).collect();
    if pos.len() == 1 {
        return vec![vec![negset.into_iter().collect()]];
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << nm) {
        let e1: BTreeSet<i64> = negset
            .iter()
            .copied()
            .filter(|j| mask & (1 << ((-j) as usize - 1)) != 0)
            .collect();
        let mn = *e1.iter().next().unwrap();
        let sum_all: u64 = e1.iter().map(|&j| neg[(-j) as usize - 1]).sum();
        let sum_strict = sum_all - neg[(-mn) as usize - 1];
        if !(sum_strict < pos[0] && pos[0] < sum_all) {
            continue;
        }
        // relabel the untouched indices plus the overflow slot at mn
        let domain: Vec<i64> = negset
            .iter()
            .copied()
            .filter(|&j| j == mn || !e1.contains(&j))
            .collect();
        let inv: Vec<i64> = domain.clone();
        let neg_bar: Vec<u64> = domain
            .iter()
            .map(|&j| {
                if j == mn {
                    sum_all - pos[0]
                } else {
                    neg[(-j) as usize - 1]
                }
            })
            .collect();
        for tail in families(&pos[1..], &neg_bar) {
            let mut fam = vec![e1.clone()];
            for set in tail {
                fam.push(set.iter().map(|&x| inv[(-x) as usize - 1]).collect());
            }
            out.push(fam);
        }
    }
    out
}

/// Builds the admissible tree of a family: a caterpillar absorbing the whole
/// negative side when there is one positive leaf; otherwise the tree of the
/// reduced data spliced under a chain of joining vertices for `E₁∖min` and a
/// fresh splitting vertex above `min E₁`.
///
/// Splitting vertices are annotated with their construction stage and every
/// joining vertex with the negative leaf it absorbs; the matrix of the
/// cokernel module keys its columns on those annotations.
pub fn phi(family: &EndSetFamily, s: &EndData) -> Result<OrientedWeightedTree> {
    let (pos, neg) = side_lists(s);
    if family.sets().len() != pos.len() {
        return Err(Error::InvalidFamily(
            "family must have one set per positive leaf",
        ));
    }
    phi_rec(&pos, &neg, family.sets(), 1)
}

fn phi_rec(
    pos: &[u64],
    neg: &[u64],
    sets: &[BTreeSet<i64>],
    stage: usize,
) -> Result<OrientedWeightedTree> {
    let nm = neg.len();
    let mut t = OrientedWeightedTree::new();
    if pos.len() == 1 {
        let full: BTreeSet<i64> = (1..=nm as i64).map(|j| -j).collect();
        if sets[0] != full {
            return Err(Error::InvalidFamily(
                "single-positive family must absorb every negative leaf",
            ));
        }
        let top = t.add_leaf(1);
        if nm == 1 {
            let bot = t.add_leaf(-1);
            t.add_edge(bot, top, pos[0]);
            return Ok(t);
        }
        let mut cur = t.add_leaf(-(nm as i64));
        let mut cur_m = neg[nm - 1];
        for j in (1..nm).rev() {
            let w = t.add_internal();
            let leaf = t.add_leaf(-(j as i64));
            t.add_edge(cur, w, cur_m);
            t.add_edge(leaf, w, neg[j - 1]);
            t.join_label.insert(w, -(j as i64));
            cur_m += neg[j - 1];
            cur = w;
        }
        t.add_edge(cur, top, cur_m);
        if cur_m != pos[0] {
            return Err(Error::InvalidFamily("caterpillar flow mismatch"));
        }
        return Ok(t);
    }

    let e1 = &sets[0];
    let mn = *e1.iter().next().ok_or(Error::InvalidFamily("empty set"))?;
    let mut e1p: Vec<i64> = e1.iter().copied().filter(|&j| j != mn).collect();
    e1p.sort_unstable_by(|a, b| b.cmp(a));
    let sum_all: u64 = e1.iter().map(|&j| neg[(-j) as usize - 1]).sum();
    let sum_strict = sum_all - neg[(-mn) as usize - 1];
    if !(sum_strict < pos[0] && pos[0] < sum_all) {
        return Err(Error::InvalidFamily(
            "first set violates the strict overflow inequalities",
        ));
    }
    let extra = sum_all - pos[0];

    let negset: Vec<i64> = (1..=nm as i64).map(|j| -j).collect();
    let domain: Vec<i64> = negset
        .iter()
        .copied()
        .filter(|&j| j == mn || !e1.contains(&j))
        .collect();
    // xi relabels domain entries to -1.. in order; inv undoes it
    let mut xi = BTreeMap::new();
    for (idx, &j) in domain.iter().enumerate() {
        xi.insert(j, -(idx as i64) - 1);
    }
    let inv = domain.clone();
    let neg_bar: Vec<u64> = domain
        .iter()
        .map(|&j| {
            if j == mn {
                extra
            } else {
                neg[(-j) as usize - 1]
            }
        })
        .collect();
    let sets_bar: Vec<BTreeSet<i64>> = sets[1..]
        .iter()
        .map(|set| set.iter().map(|x| xi[x]).collect())
        .collect();
    let tbar = phi_rec(&pos[1..], &neg_bar, &sets_bar, stage + 1)?;

    // the glue leaf of the reduced tree vanishes: its edge merges with the
    // fresh splitting vertex's second outgoing edge
    let glue_label = xi[&mn];
    let mut remap = vec![usize::MAX; tbar.vertex_count()];
    let mut glue_old = usize::MAX;
    for v in 0..tbar.vertex_count() {
        match tbar.leaf_label(v) {
            None => remap[v] = t.add_internal(),
            Some(l) if l > 0 => remap[v] = t.add_leaf(l + 1),
            Some(l) if l == glue_label => glue_old = v,
            Some(l) => remap[v] = t.add_leaf(inv[(-l) as usize - 1]),
        }
    }
    for (&v, &st) in &tbar.split_stage {
        t.split_stage.insert(remap[v], st);
    }
    for (&v, &l) in &tbar.join_label {
        t.join_label.insert(remap[v], inv[(-l) as usize - 1]);
    }
    let mut glue_target = usize::MAX;
    for e in tbar.edges() {
        if e.tail == glue_old {
            if e.mult != extra {
                return Err(Error::InvalidFamily("glue edge multiplicity mismatch"));
            }
            glue_target = remap[e.head];
        } else {
            t.add_edge(remap[e.tail], remap[e.head], e.mult);
        }
    }
    if glue_target == usize::MAX {
        return Err(Error::InvalidFamily("reduced tree lacks the glue leaf"));
    }

    let top = t.add_leaf(1);
    let mut cur = top;
    let mut remaining = pos[0];
    for &j in &e1p {
        let w = t.add_internal();
        let leaf = t.add_leaf(j);
        t.add_edge(w, cur, remaining);
        t.add_edge(leaf, w, neg[(-j) as usize - 1]);
        t.join_label.insert(w, j);
        remaining -= neg[(-j) as usize - 1];
        cur = w;
    }
    let v1 = t.add_internal();
    t.split_stage.insert(v1, stage);
    t.add_edge(v1, cur, remaining);
    let leaf = t.add_leaf(mn);
    t.add_edge(leaf, v1, neg[(-mn) as usize - 1]);
    t.add_edge(v1, glue_target, extra);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: &[u64], b: &[u64]) -> EndData {
        EndData::unprimed(a.to_vec(), b.to_vec()).unwrap()
    }

    fn th(p: i64, q: i64, g: u64) -> Theta {
        Theta::new(p, q, g).unwrap()
    }

    /// The one-vertex tree for (2 | 1,1).
    fn fork() -> OrientedWeightedTree {
        let mut t = OrientedWeightedTree::new();
        let plus = t.add_leaf(1);
        let m1 = t.add_leaf(-1);
        let m2 = t.add_leaf(-2);
        let v = t.add_internal();
        t.add_edge(v, plus, 2);
        t.add_edge(m1, v, 1);
        t.add_edge(m2, v, 1);
        t
    }

    #[test]
    fn validation_accepts_the_fork_and_rejects_mutations() {
        let data = s(&[2], &[1, 1]);
        assert!(validate_tree(&fork(), &data));

        let mut zeroed = fork();
        zeroed.edges[1].mult = 0;
        assert!(!validate_tree(&zeroed, &data));

        // leaf multiplicities swapped against the end data
        assert!(!validate_tree(&fork(), &s(&[1, 1], &[2])));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(&s(&[2], &[1, 1]), true).unwrap().len(), 1);
        assert_eq!(
            enumerate_trees(&s(&[1, 1], &[1, 1]), true).unwrap().len(),
            1
        );
        assert_eq!(enumerate_trees(&s(&[1], &[1]), true).unwrap().len(), 0);
        assert_eq!(
            enumerate_trees(&s(&[3], &[1, 1, 1]), true).unwrap().len(),
            3
        );
        assert_eq!(
            enumerate_trees(&s(&[2, 1], &[1, 1, 1]), true).unwrap().len(),
            6
        );
        assert_eq!(enumerate_trees(&s(&[3, 1], &[2, 2]), true).unwrap().len(), 3);
        assert_eq!(
            enumerate_trees(&s(&[2, 2], &[1, 1, 1, 1]), true)
                .unwrap()
                .len(),
            51
        );
        // counts with higher-valence vertices included
        assert_eq!(enumerate_trees(&s(&[2], &[1, 1]), false).unwrap().len(), 1);
        assert_eq!(
            enumerate_trees(&s(&[1, 1], &[1, 1]), false).unwrap().len(),
            2
        );
        assert_eq!(
            enumerate_trees(&s(&[3], &[1, 1, 1]), false).unwrap().len(),
            4
        );
        assert_eq!(
            enumerate_trees(&s(&[2, 1], &[1, 1, 1]), false)
                .unwrap()
                .len(),
            14
        );
        assert_eq!(
            enumerate_trees(&s(&[3, 1], &[2, 2]), false).unwrap().len(),
            4
        );
        let loose = enumerate_trees(&s(&[4, 2], &[3, 2, 1]), false).unwrap();
        assert_eq!(loose.len(), 22);
        for t in &loose {
            assert!(validate_tree(t, &s(&[4, 2], &[3, 2, 1])));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let data = s(&[1; 5], &[1; 5]);
        assert!(matches!(
            enumerate_trees_with_cap(&data, true, 8),
            Err(Error::CapExceeded { .. })
        ));
        assert!(enumerate_trees_with_cap(&data, true, 10).is_ok());
    }

    #[test]
    fn fork_is_admissible_and_pairs_canonically() {
        let t = fork();
        assert!(is_admissible(&t));
        let p = canonical_pairing(&t).unwrap();
        assert!(p.is_valid_on(&t));
        let v = t.internal_vertices().next().unwrap();
        // e_v⁻ reaches −1, e₀ reaches −2: the larger label wins the pair
        assert_eq!(p.e_minus(v).unwrap().tail, t.leaf_vertex(-1).unwrap());
        assert_eq!(p.e_plus(v).unwrap().head, t.leaf_vertex(1).unwrap());
        assert_eq!(p.unpaired().tail, t.leaf_vertex(-2).unwrap());
    }

    #[test]
    fn joining_before_splitting_is_rejected() {
        // two mult-1 negatives join to a mult-2 edge that splits again,
        // so the tree has a joining→splitting edge
        let data = s(&[1, 1], &[1, 1]);
        let trees = enumerate_trees(&data, true).unwrap();
        assert_eq!(trees.len(), 1);
        // the unique (1,1|1,1) tree has a joining→splitting edge
        assert!(!is_admissible(&trees[0]));
        assert!(canonical_pairing(&trees[0]).is_err());
    }

    #[test]
    fn fork_weight_at_two_fifths() {
        let t = fork();
        let p = canonical_pairing(&t).unwrap();
        let w = weight(th(2, 5, 4), &t, &p).unwrap();
        assert_eq!(w, BigInt::from(1));
    }

    #[test]
    fn weights_of_canonical_pairings_are_positive() {
        let theta = th(5, 13, 9);
        for (a, b) in [
            (vec![3u64], vec![1u64, 1, 1]),
            (vec![3, 1], vec![2, 2]),
            (vec![4, 2], vec![3, 2, 1]),
        ] {
            let data = s(&a, &b);
            for t in enumerate_trees(&data, true).unwrap() {
                if !is_admissible(&t) {
                    continue;
                }
                let p = canonical_pairing(&t).unwrap();
                assert!(p.is_valid_on(&t));
                assert!(weight(theta, &t, &p).unwrap() > BigInt::from(0));
            }
        }
    }

    #[test]
    fn weight_symmetry_under_reversal() {
        // reversing orientations and labels swaps the sides and the angle
        let theta = th(5, 13, 9);
        let data = s(&[4, 2], &[3, 2, 1]);
        for t in enumerate_trees(&data, true).unwrap() {
            if !is_admissible(&t) {
                continue;
            }
            let p = canonical_pairing(&t).unwrap();
            let r = t.reversed();
            assert!(is_admissible(&r));
            let pr = canonical_pairing(&r).unwrap();
            assert_eq!(
                weight(theta, &t, &p).unwrap(),
                weight(theta.negate(), &r, &pr).unwrap()
            );
        }
    }

    #[test]
    fn covering_degree_products() {
        assert_eq!(covering_degree(&fork()), BigUint::from(2u32));
        let ones = s(&[1, 1], &[1, 1]);
        for t in enumerate_trees(&ones, true).unwrap() {
            assert_eq!(covering_degree(&t), BigUint::from(2u32));
        }
    }

    #[test]
    fn central_vertex_of_the_fork() {
        let t = fork();
        let v = t.internal_vertices().next().unwrap();
        assert_eq!(central_vertex(&t, 1, -1, -2), v);
        assert_eq!(central_vertex(&t, -2, 1, -1), v);
    }

    #[test]
    fn single_positive_family_is_unique() {
        let fams = enumerate_end_set_families(&s(&[2], &[1, 1])).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(
            fams[0].sets()[0],
            BTreeSet::from([-1, -2])
        );
    }

    #[test]
    fn family_counts_match_admissible_tree_counts() {
        for (a, b) in [
            (vec![2u64], vec![1u64, 1]),
            (vec![1, 1], vec![1, 1]),
            (vec![3], vec![1, 1, 1]),
            (vec![2, 1], vec![1, 1, 1]),
            (vec![3, 1], vec![2, 2]),
            (vec![4, 2], vec![3, 2, 1]),
            (vec![3, 2, 1], vec![4, 2]),
        ] {
            let data = s(&a, &b);
            let fams = enumerate_end_set_families(&data).unwrap();
            let adm: Vec<String> = enumerate_trees(&data, true)
                .unwrap()
                .into_iter()
                .filter(is_admissible)
                .map(|t| t.canonical_key())
                .collect();
            let imgs: BTreeSet<String> = fams
                .iter()
                .map(|f| phi(f, &data).unwrap().canonical_key())
                .collect();
            assert_eq!(imgs.len(), fams.len(), "phi injective on ({a:?}|{b:?})");
            assert_eq!(
                imgs,
                adm.into_iter().collect::<BTreeSet<_>>(),
                "phi image is the admissible set on ({a:?}|{b:?})"
            );
        }
    }

    #[test]
    fn phi_output_is_annotated_and_valid() {
        let data = s(&[4, 2], &[3, 2, 1]);
        for f in enumerate_end_set_families(&data).unwrap() {
            let t = phi(&f, &data).unwrap();
            assert!(validate_tree(&t, &data));
            assert!(is_admissible(&t));
            assert!(t.splitting_vertex_of_stage(1).is_some());
            // every negative leaf except the last is absorbed at a join
            for j in 1..=2i64 {
                let v = t.joining_vertex_for(-j).expect("annotated join");
                assert!(t.is_joining(v));
            }
        }
    }

    #[test]
    fn rejects_foreign_families() {
        let data = s(&[2, 1], &[1, 1, 1]);
        // (2|1,1,1) has no strict-overflow subset for a₁ = 2: every family fails
        let fams = enumerate_end_set_families(&data).unwrap();
        assert!(fams.is_empty());
        let bad = EndSetFamily::new(vec![
            BTreeSet::from([-1, -2]),
            BTreeSet::from([-3]),
        ]);
        assert!(phi(&bad, &data).is_err());
    }

    #[test]
    fn text_form_is_stable() {
        assert_eq!(
            fork().to_text(),
            "(node (leaf:+1:2) (leaf:-1:1) (leaf:-2:1))"
        );
        let data = s(&[2], &[1, 1]);
        let t = &enumerate_trees(&data, true).unwrap()[0];
        assert_eq!(t.to_text(), fork().to_text());
    }

    #[test]
    fn canonical_key_separates_and_identifies() {
        let data = s(&[3], &[1, 1, 1]);
        let trees = enumerate_trees(&data, true).unwrap();
        let keys: BTreeSet<String> = trees.iter().map(|t| t.canonical_key()).collect();
        assert_eq!(keys.len(), trees.len());
        // same tree rebuilt with permuted vertex ids keys identically
        let mut t = OrientedWeightedTree::new();
        let v = t.add_internal();
        let m2 = t.add_leaf(-2);
        let plus = t.add_leaf(1);
        let m1 = t.add_leaf(-1);
        t.add_edge(m1, v, 1);
        t.add_edge(m2, v, 1);
        t.add_edge(v, plus, 2);
        assert_eq!(t.canonical_key(), fork().canonical_key());
    }
}
