//! Partition calculus: the extremal incoming/outgoing partitions, the
//! partial order `≥_θ`, decompositions of end data into balanced
//! components, factorial products, and the prefix reduction step.
//!
//! Two independent constructions of the incoming partition are kept side
//! by side: the greedy one (repeatedly take the largest ratio-minimal
//! multiplicity) and the lattice one (horizontal displacements along the
//! lower convex hull of `(x, ⌈xθ⌉)`). They must agree everywhere; tests
//! and the CLI `verify` suites hold them to that.

use crate::theta_core::{delta, kappa, EndData, Theta};
use crate::{Error, Result};
use num::BigUint;
use std::collections::{HashSet, VecDeque};

/// A finite multiset of positive integers, stored nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Result<Partition> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidInput("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|x, y| y.cmp(x));
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition { parts: vec![] }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Orbit classification. Hyperbolic orbits carry the integer rotation of
/// their linearized return map; its parity decides the sign class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    PositiveHyperbolic { rotation: i64 },
    NegativeHyperbolic { rotation: i64 },
    Elliptic(Theta),
}

impl OrbitKind {
    pub fn positive_hyperbolic(rotation: i64) -> Result<OrbitKind> {
        if rotation % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "positive hyperbolic rotation must be even, got {rotation}"
            )));
        }
        Ok(OrbitKind::PositiveHyperbolic { rotation })
    }

    pub fn negative_hyperbolic(rotation: i64) -> Result<OrbitKind> {
        if rotation % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "negative hyperbolic rotation must be odd, got {rotation}"
            )));
        }
        Ok(OrbitKind::NegativeHyperbolic { rotation })
    }
}

// Compares ⌈xθ⌉/x against ⌈yθ⌉/y by cross multiplication.
fn ratio_lt(theta: Theta, x: u64, y: u64) -> Result<bool> {
    let cx = theta.ceil_mult(x)? as i128;
    let cy = theta.ceil_mult(y)? as i128;
    Ok(cx * (y as i128) < cy * (x as i128))
}

// x belongs to the greedy generator set: its ceil-ratio strictly undercuts
// every smaller multiplicity.
fn is_generator(theta: Theta, x: u64) -> Result<bool> {
    for y in 1..x {
        if !ratio_lt(theta, x, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The incoming partition of `M`, built greedily: take the largest
/// generator `a ≤ M`, recurse on `M − a`.
pub fn incoming_partition(theta: Theta, m_total: u64) -> Result<Partition> {
    let mut parts = Vec::new();
    let mut rem = m_total;
    while rem > 0 {
        let mut best = 1;
        for x in 1..=rem {
            if is_generator(theta, x)? {
                best = x;
            }
        }
        parts.push(best);
        rem -= best;
    }
    // the greedy choices come out nonincreasing; Partition::new re-sorts
    // defensively but does not change the multiset
    Partition::new(parts)
}

// All lattice points along the lower convex hull of {(x, ⌈xθ⌉) : 0 ≤ x ≤ M},
// in order of increasing x, with hull edges subdivided at their interior
// lattice points.
fn hull_lattice_points(theta: Theta, m_total: u64) -> Result<Vec<(i64, i64)>> {
    if m_total == 0 {
        return Ok(vec![(0, 0)]);
    }
    let mut corners: Vec<(i64, i64)> = Vec::new();
    for x in 0..=m_total {
        let y = if x == 0 { 0 } else { theta.ceil_mult(x)? };
        let p = (x as i64, y);
        while corners.len() >= 2 {
            let a = corners[corners.len() - 2];
            let b = corners[corners.len() - 1];
            // pop b when it lies on or above segment a–p
            let cross = (b.1 - a.1) as i128 * (p.0 - a.0) as i128
                - (p.1 - a.1) as i128 * (b.0 - a.0) as i128;
            if cross >= 0 {
                corners.pop();
            } else {
                break;
            }
        }
        corners.push(p);
    }
    let mut points = Vec::new();
    for w in corners.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let g = num::integer::gcd(dx, dy.abs()).max(1);
        let (sx, sy) = (dx / g, dy / g);
        for t in 0..g {
            points.push((a.0 + t * sx, a.1 + t * sy));
        }
    }
    points.push(*corners.last().unwrap());
    Ok(points)
}

/// Independent construction of the incoming partition: horizontal
/// displacements between consecutive lattice points on the hull path.
pub fn incoming_partition_lattice(theta: Theta, m_total: u64) -> Result<Partition> {
    let points = hull_lattice_points(theta, m_total)?;
    let parts = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) as u64)
        .collect();
    Partition::new(parts)
}

/// The outgoing partition: the incoming partition of `−θ`.
pub fn outgoing_partition(theta: Theta, m_total: u64) -> Result<Partition> {
    incoming_partition(theta.negate(), m_total)
}

/// Lattice-path form of the outgoing partition.
pub fn outgoing_partition_lattice(theta: Theta, m_total: u64) -> Result<Partition> {
    incoming_partition_lattice(theta.negate(), m_total)
}

/// Incoming/outgoing end partitions by orbit kind: positive hyperbolic
/// covers split fully, negative hyperbolic ones into twos (plus a one when
/// `M` is odd), elliptic ones follow the angle.
pub fn orbit_partitions(kind: OrbitKind, m_total: u64) -> Result<(Partition, Partition)> {
    match kind {
        OrbitKind::PositiveHyperbolic { .. } => {
            let p = Partition::new(vec![1; m_total as usize])?;
            Ok((p.clone(), p))
        }
        OrbitKind::NegativeHyperbolic { .. } => {
            let mut parts = vec![2; (m_total / 2) as usize];
            if m_total % 2 == 1 {
                parts.push(1);
            }
            let p = Partition::new(parts)?;
            Ok((p.clone(), p))
        }
        OrbitKind::Elliptic(theta) => Ok((
            incoming_partition(theta, m_total)?,
            outgoing_partition(theta, m_total)?,
        )),
    }
}

/// `P! = ∏_n n^{r(n)} · r(n)!` where `r(n)` counts occurrences of `n`.
pub fn partition_factorial(p: &Partition) -> BigUint {
    let mut out = BigUint::from(1u32);
    let mut i = 0;
    let parts = p.parts();
    while i < parts.len() {
        let n = parts[i];
        let mut r = 0u64;
        while i < parts.len() && parts[i] == n {
            r += 1;
            i += 1;
        }
        out *= BigUint::from(n).pow(r as u32);
        for f in 1..=r {
            out *= BigUint::from(f);
        }
    }
    out
}

/// One component of a decomposition: which indices of each of the four
/// lists of `S` it takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentIndices {
    pub a: Vec<usize>,
    pub a_prime: Vec<usize>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
}

/// A split of `S` into `κ_θ(S)` balanced nonempty components, one canonical
/// representative per relabeling class. Components are ordered by their
/// smallest contained index (in the fixed a, a', b, b' concatenation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaDecomposition {
    pub components: Vec<ComponentIndices>,
}

impl ThetaDecomposition {
    /// Materializes the end data of each component.
    pub fn component_data(&self, s: &EndData) -> Result<Vec<EndData>> {
        self.components
            .iter()
            .map(|c| {
                EndData::new(
                    c.a.iter().map(|&i| s.a()[i]).collect(),
                    c.a_prime.iter().map(|&i| s.a_prime()[i]).collect(),
                    c.b.iter().map(|&i| s.b()[i]).collect(),
                    c.b_prime.iter().map(|&i| s.b_prime()[i]).collect(),
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum ItemKind {
    A,
    APrime,
    B,
    BPrime,
}

struct DecompSearch {
    pos_items: Vec<(ItemKind, usize, u64)>,
    neg_items: Vec<(ItemKind, usize, u64)>,
    k: usize,
    cap: usize,
    nodes: usize,
    limit: Option<usize>,
    found: Vec<Vec<Vec<(ItemKind, usize)>>>,
}

impl DecompSearch {
    // Positive items go first; a block is named by its first item, so each
    // unordered class is produced exactly once. Negative items never open
    // blocks (their balance could not recover) and must keep every block
    // balance nonnegative.
    fn place_pos(&mut self, idx: usize, blocks: &mut Vec<(Vec<(ItemKind, usize)>, u64)>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded {
                what: "enumerating decompositions",
                cap: self.cap,
            });
        }
        if let Some(limit) = self.limit {
            if self.found.len() >= limit {
                return Ok(());
            }
        }
        if idx == self.pos_items.len() {
            if blocks.len() == self.k {
                self.place_neg(0, blocks)?;
            }
            return Ok(());
        }
        // not enough future items to open the blocks still missing
        if blocks.len() + (self.pos_items.len() - idx) < self.k {
            return Ok(());
        }
        let (kind, orig, val) = self.pos_items[idx];
        for bi in 0..blocks.len() {
            blocks[bi].0.push((kind, orig));
            blocks[bi].1 += val;
            self.place_pos(idx + 1, blocks)?;
            blocks[bi].0.pop();
            blocks[bi].1 -= val;
        }
        if blocks.len() < self.k {
            blocks.push((vec![(kind, orig)], val));
            self.place_pos(idx + 1, blocks)?;
            blocks.pop();
        }
        Ok(())
    }

    fn place_neg(&mut self, idx: usize, blocks: &mut Vec<(Vec<(ItemKind, usize)>, u64)>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded {
                what: "enumerating decompositions",
                cap: self.cap,
            });
        }
        if let Some(limit) = self.limit {
            if self.found.len() >= limit {
                return Ok(());
            }
        }
        if idx == self.neg_items.len() {
            if blocks.iter().all(|b| b.1 == 0) {
                self.found
                    .push(blocks.iter().map(|b| b.0.clone()).collect());
            }
            return Ok(());
        }
        let (kind, orig, val) = self.neg_items[idx];
        for bi in 0..blocks.len() {
            if blocks[bi].1 < val {
                continue;
            }
            blocks[bi].0.push((kind, orig));
            blocks[bi].1 -= val;
            self.place_neg(idx + 1, blocks)?;
            blocks[bi].0.pop();
            blocks[bi].1 += val;
        }
        Ok(())
    }
}

fn decompositions_inner(
    theta: Theta,
    s: &EndData,
    cap: usize,
    limit: Option<usize>,
) -> Result<Vec<ThetaDecomposition>> {
    if s.is_empty() {
        // the empty split is the unique decomposition of empty data
        return Ok(vec![ThetaDecomposition { components: vec![] }]);
    }
    let k = kappa(theta, s)? as usize;
    let mut pos_items = Vec::new();
    for (i, &v) in s.a().iter().enumerate() {
        pos_items.push((ItemKind::A, i, v));
    }
    for (i, &v) in s.a_prime().iter().enumerate() {
        pos_items.push((ItemKind::APrime, i, v));
    }
    let mut neg_items = Vec::new();
    for (j, &v) in s.b().iter().enumerate() {
        neg_items.push((ItemKind::B, j, v));
    }
    for (j, &v) in s.b_prime().iter().enumerate() {
        neg_items.push((ItemKind::BPrime, j, v));
    }
    let mut search = DecompSearch {
        pos_items,
        neg_items,
        k,
        cap,
        nodes: 0,
        limit,
        found: Vec::new(),
    };
    search.place_pos(0, &mut Vec::new())?;
    Ok(search
        .found
        .into_iter()
        .map(|blocks| ThetaDecomposition {
            components: blocks
                .into_iter()
                .map(|members| {
                    let mut c = ComponentIndices {
                        a: vec![],
                        a_prime: vec![],
                        b: vec![],
                        b_prime: vec![],
                    };
                    for (kind, i) in members {
                        match kind {
                            ItemKind::A => c.a.push(i),
                            ItemKind::APrime => c.a_prime.push(i),
                            ItemKind::B => c.b.push(i),
                            ItemKind::BPrime => c.b_prime.push(i),
                        }
                    }
                    c
                })
                .collect(),
        })
        .collect())
}

pub const DEFAULT_DECOMP_CAP: usize = 50_000_000;

/// All decompositions of `s` into `κ_θ(s)` balanced components, one
/// representative per relabeling class; empty when none exists.
pub fn enumerate_theta_decompositions(
    theta: Theta,
    s: &EndData,
    cap: usize,
) -> Result<Vec<ThetaDecomposition>> {
    decompositions_inner(theta, s, cap, None)
}

/// `(p) ≥_θ (q)`: some decomposition of `(p | q)` exists. Requires equal
/// totals.
pub fn ge_theta(theta: Theta, p: &Partition, q: &Partition, cap: usize) -> Result<bool> {
    let s = EndData::unprimed(p.parts().to_vec(), q.parts().to_vec())?;
    Ok(!decompositions_inner(theta, &s, cap, Some(1))?.is_empty())
}

/// Independent characterization of `≥_θ` by closure under two moves:
/// merge two entries when `⌈·⌉` is additive on them, split one entry when
/// `⌈·⌉` is additive up to a defect of one. `p ≥_θ q` iff `q` is reachable
/// from `p`.
pub fn ge_theta_ops(theta: Theta, p: &Partition, q: &Partition, cap: usize) -> Result<bool> {
    if p.total() != q.total() {
        return Err(Error::SumMismatch {
            plus: p.total(),
            minus: q.total(),
        });
    }
    let start: Vec<u64> = p.parts().to_vec();
    let goal: Vec<u64> = q.parts().to_vec();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            return Ok(true);
        }
        if seen.len() > cap {
            return Err(Error::CapExceeded {
                what: "move-closure search",
                cap,
            });
        }
        let n = cur.len();
        let push = |next: Vec<u64>, seen: &mut HashSet<Vec<u64>>, queue: &mut VecDeque<Vec<u64>>| {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = (cur[i], cur[j]);
                if theta.ceil_mult(x)? + theta.ceil_mult(y)? == theta.ceil_mult(x + y)? {
                    let mut next: Vec<u64> = cur
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i && t != j)
                        .map(|(_, &v)| v)
                        .collect();
                    next.push(x + y);
                    next.sort_unstable_by(|a, b| b.cmp(a));
                    push(next, &mut seen, &mut queue);
                }
            }
        }
        for i in 0..n {
            let s = cur[i];
            for x in 1..=s / 2 {
                let y = s - x;
                if theta.ceil_mult(s)? == theta.ceil_mult(x)? + theta.ceil_mult(y)? - 1 {
                    let mut next: Vec<u64> = cur
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i)
                        .map(|(_, &v)| v)
                        .collect();
                    next.push(x);
                    next.push(y);
                    next.sort_unstable_by(|a, b| b.cmp(a));
                    push(next, &mut seen, &mut queue);
                }
            }
        }
    }
    Ok(false)
}

/// True iff the nonincreasing list `p` is a prefix of the nonincreasing
/// list `q`.
pub fn is_initial_segment(p: &Partition, q: &Partition) -> bool {
    p.len() <= q.len() && p.parts() == &q.parts()[..p.len()]
}

/// The four equivalent prefix conditions, each evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TfaeRecord {
    /// incoming(M′+n) is the disjoint union of incoming(M′) and incoming(n)
    /// for every 1 ≤ n ≤ M−M′
    pub partition_concat: bool,
    /// ⌈(M′+n)θ⌉ = ⌈M′θ⌉ + ⌈nθ⌉ for every 1 ≤ n ≤ M−M′
    pub ceil_additive: bool,
    /// the hull path of M is the path of M′ followed by a translate of the
    /// path of M−M′
    pub path_concat: bool,
    /// incoming(M′) is an initial segment of incoming(M)
    pub initial_segment: bool,
}

impl TfaeRecord {
    pub fn values(&self) -> [bool; 4] {
        [
            self.partition_concat,
            self.ceil_additive,
            self.path_concat,
            self.initial_segment,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let v = self.values();
        v.iter().all(|&x| x == v[0])
    }
}

pub fn tfae_check(theta: Theta, m_prime: u64, m_total: u64) -> Result<TfaeRecord> {
    assert!(m_prime <= m_total);
    let mut partition_concat = true;
    let mut ceil_additive = true;
    let base = incoming_partition(theta, m_prime)?;
    for n in 1..=m_total - m_prime {
        let mut union: Vec<u64> = base.parts().to_vec();
        union.extend_from_slice(incoming_partition(theta, n)?.parts());
        if Partition::new(union)? != incoming_partition(theta, m_prime + n)? {
            partition_concat = false;
        }
        if m_prime > 0 && theta.ceil_mult(m_prime + n)? != theta.ceil_mult(m_prime)? + theta.ceil_mult(n)? {
            ceil_additive = false;
        }
    }
    let left = hull_lattice_points(theta, m_prime)?;
    let right = hull_lattice_points(theta, m_total - m_prime)?;
    let shift = (
        m_prime as i64,
        if m_prime == 0 { 0 } else { theta.ceil_mult(m_prime)? },
    );
    let mut concat = left.clone();
    concat.extend(right.iter().skip(1).map(|p| (p.0 + shift.0, p.1 + shift.1)));
    let path_concat = concat == hull_lattice_points(theta, m_total)?;
    let initial_segment = is_initial_segment(&base, &incoming_partition(theta, m_total)?);
    Ok(TfaeRecord {
        partition_concat,
        ceil_additive,
        path_concat,
        initial_segment,
    })
}

/// The unique prefix reduction of the extremal pair at `M`: with
/// `incoming(M) = (a₁,…)` and `outgoing(M) = (b₁,…)` in nonincreasing
/// order, there is exactly one `m` with
/// `b₁+…+b_{m−1} < a₁ ≤ b₁+…+b_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndkeyStep {
    /// number of outgoing parts the first incoming part consumes
    pub prefix_len: usize,
    /// 1-based indices of the consumed prefix
    pub prefix_indices: Vec<usize>,
    /// `b₁+…+b_m − a₁`, the stub left over from the last consumed part
    pub leftover: u64,
    /// incoming partition of `M − a₁`
    pub reduced_in: Partition,
    /// outgoing partition of `M − a₁`
    pub reduced_out: Partition,
    /// whether every factor `δ_θ(a₁ − Σ_{j<n} b_j, b_n)` equals 1
    pub deltas_all_one: bool,
}

pub fn indkey_step(theta: Theta, m_total: u64) -> Result<IndkeyStep> {
    if m_total == 0 {
        return Err(Error::InvalidInput("prefix reduction needs M ≥ 1".into()));
    }
    let a = incoming_partition(theta, m_total)?;
    let b = outgoing_partition(theta, m_total)?;
    let a1 = a.parts()[0];
    let mut acc = 0u64;
    let mut m = 0usize;
    for (n, &bn) in b.parts().iter().enumerate() {
        if acc < a1 && a1 <= acc + bn {
            m = n + 1;
            break;
        }
        acc += bn;
    }
    debug_assert!(m >= 1);
    let prefix_sum: u64 = b.parts()[..m].iter().sum();
    let leftover = prefix_sum - a1;
    let mut deltas_all_one = true;
    let mut before = 0u64;
    for &bn in &b.parts()[..m] {
        if delta(theta, a1 - before, bn)? != 1 {
            deltas_all_one = false;
        }
        before += bn;
    }
    Ok(IndkeyStep {
        prefix_len: m,
        prefix_indices: (1..=m).collect(),
        leftover,
        reduced_in: incoming_partition(theta, m_total - a1)?,
        reduced_out: outgoing_partition(theta, m_total - a1)?,
        deltas_all_one,
    })
}

/// Checks that the prefix found by [`indkey_step`] is the *only* subset of
/// the outgoing parts satisfying the bracketing condition. Used by the
/// verification suites.
pub fn indkey_prefix_unique(theta: Theta, m_total: u64) -> Result<bool> {
    let a = incoming_partition(theta, m_total)?;
    let b = outgoing_partition(theta, m_total)?;
    let a1 = a.parts()[0];
    let l = b.len();
    let mut matches: Vec<Vec<usize>> = Vec::new();
    // subsets in index order; the bracketing condition prunes nothing here
    // because l stays tiny in the regime this is called
    for mask in 1u32..(1 << l) {
        let idx: Vec<usize> = (0..l).filter(|i| mask & (1 << i) != 0).collect();
        let total: u64 = idx.iter().map(|&i| b.parts()[i]).sum();
        let all_but_last: u64 = idx[..idx.len() - 1].iter().map(|&i| b.parts()[i]).sum();
        if all_but_last < a1 && a1 <= total {
            matches.push(idx);
        }
    }
    Ok(matches.len() == 1 && matches[0] == (0..matches[0].len()).collect::<Vec<_>>())
}
