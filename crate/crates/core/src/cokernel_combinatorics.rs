//! Winding numbers of the distinguished cokernel sections on tree edges,
//! rotation rates, the end-ordering matrix with its exact determinant
//! identity, and the index formulas for orbit covers.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};

use crate::partitions::OrbitKind;
use crate::theta_core::{ind_theta, EndData, Theta};
use crate::trees::{
    canonical_pairing, central_vertex, covering_degree, enumerate_end_set_families_with_cap, phi,
    side_lists, weight, Edge, EndSetFamily, OrientedWeightedTree, DEFAULT_LEAF_CAP,
};
use crate::{Error, Result};

/// Conley-Zehnder index of the `m`-fold cover: `m·n` for a hyperbolic orbit
/// rotating by `πn`, `2⌊mθ⌋+1` for an elliptic orbit of angle `2πθ`.
pub fn cz_index(kind: OrbitKind, m: u64) -> Result<i64> {
    match kind {
        OrbitKind::PositiveHyperbolic { rotation } | OrbitKind::NegativeHyperbolic { rotation } => {
            Ok(m as i64 * rotation)
        }
        OrbitKind::Elliptic(theta) => Ok(2 * theta.floor_mult(m)? + 1),
    }
}

/// Fredholm index of a connected genus-`g` branched cover with positive
/// ends `a` and negative ends `b`: `2g + ind_θ(a|b)` over an elliptic
/// orbit, `2g − 2 + (k+l)` over a hyperbolic one.
pub fn branched_cover_index(kind: OrbitKind, genus: u64, a: &[u64], b: &[u64]) -> Result<i64> {
    let plus: u64 = a.iter().sum();
    let minus: u64 = b.iter().sum();
    if plus != minus {
        return Err(Error::SumMismatch { plus, minus });
    }
    match kind {
        OrbitKind::Elliptic(theta) => Ok(2 * genus as i64 + ind_theta(theta, a, b)?),
        _ => Ok(2 * genus as i64 - 2 + (a.len() + b.len()) as i64),
    }
}

/// Whether `Σ⌈m_out θ⌉ − Σ⌊m_in θ⌋ = 1` at every internal vertex. The
/// identity holds on every tree of single-component data; data with more
/// components always has a vertex where it fails.
pub fn vertex_index_identity(theta: Theta, t: &OrientedWeightedTree) -> Result<bool> {
    for v in t.internal_vertices() {
        let mut s = 0i64;
        for e in t.outgoing(v) {
            s += theta.ceil_mult(e.mult)?;
        }
        for e in t.incoming(v) {
            s -= theta.floor_mult(e.mult)?;
        }
        if s != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Edge winding numbers of the section singled out by a leaf triple.
///
/// On the three paths from the central vertex of the triple to its leaves,
/// an edge of multiplicity `m` winds `⌈mθ⌉` when pointing away from the
/// center and `⌊mθ⌋` when pointing toward it; off those paths the away and
/// toward values shift by `+1` and `−1`.
#[derive(Debug, Clone)]
pub struct WindingAssignment {
    tree: OrientedWeightedTree,
    triple: (i64, i64, i64),
    center: usize,
    eta: BTreeMap<Edge, i64>,
}

impl WindingAssignment {
    pub fn tree(&self) -> &OrientedWeightedTree {
        &self.tree
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        self.triple
    }

    /// The central vertex of the triple.
    pub fn center(&self) -> usize {
        self.center
    }

    /// Winding number of one edge. Panics if the edge is not in the tree.
    pub fn eta(&self, e: &Edge) -> i64 {
        self.eta[e]
    }

    pub fn eta_map(&self) -> &BTreeMap<Edge, i64> {
        &self.eta
    }

    #[cfg(test)]
    fn nudge(&mut self, e: Edge, delta: i64) {
        *self.eta.get_mut(&e).unwrap() += delta;
    }
}

pub fn special_windings(
    theta: Theta,
    t: &OrientedWeightedTree,
    triple: (i64, i64, i64),
) -> Result<WindingAssignment> {
    let center = central_vertex(t, triple.0, triple.1, triple.2);
    let mut on_path: Vec<bool> = vec![false; t.edges().len()];
    for leaf in [triple.0, triple.1, triple.2] {
        let path = t.path_vertices(center, t.leaf_vertex(leaf).expect("triple leaf"));
        for w in path.windows(2) {
            for (i, e) in t.edges().iter().enumerate() {
                if (e.tail == w[0] && e.head == w[1]) || (e.tail == w[1] && e.head == w[0]) {
                    on_path[i] = true;
                }
            }
        }
    }
    // hop distance from the center orients every edge as away or toward
    let mut dist = vec![usize::MAX; t.vertex_count()];
    dist[center] = 0;
    let mut stack = vec![center];
    while let Some(x) = stack.pop() {
        for y in t.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                stack.push(y);
            }
        }
    }
    let mut eta = BTreeMap::new();
    for (i, e) in t.edges().iter().enumerate() {
        let away = dist[e.head] > dist[e.tail];
        let base = if away {
            theta.ceil_mult(e.mult)?
        } else {
            theta.floor_mult(e.mult)?
        };
        let shift = match (on_path[i], away) {
            (true, _) => 0,
            (false, true) => 1,
            (false, false) => -1,
        };
        eta.insert(*e, base + shift);
    }
    Ok(WindingAssignment {
        tree: t.clone(),
        triple,
        center,
        eta,
    })
}

/// Whether `Σ_out η − Σ_in η = deg(v) − 2` at every internal vertex, the
/// zero count of the section near the vertex.
pub fn vertex_balance_check(w: &WindingAssignment) -> bool {
    let t = &w.tree;
    for v in t.internal_vertices() {
        let (outs, ins) = (t.outgoing(v), t.incoming(v));
        let s: i64 = outs.iter().map(|e| w.eta(e)).sum::<i64>()
            - ins.iter().map(|e| w.eta(e)).sum::<i64>();
        if s != (outs.len() + ins.len()) as i64 - 2 {
            return false;
        }
    }
    true
}

/// `η(e_j)/m(e_j) − η(e_i)/m(e_i)` at `v`, where `e_i` and `e_j` are the
/// first edges from `v` toward leaves `i` and `j`; zero when `v` is not on
/// the path between the two leaves. Both leaves must be in the triple of
/// `w`.
pub fn rotation_rate(w: &WindingAssignment, v: usize, i: i64, j: i64) -> BigRational {
    let (ta, tb, tc) = w.triple;
    debug_assert!([ta, tb, tc].contains(&i) && [ta, tb, tc].contains(&j));
    let t = &w.tree;
    let vi = t.leaf_vertex(i).expect("leaf i");
    let vj = t.leaf_vertex(j).expect("leaf j");
    if !t.path_vertices(vi, vj).contains(&v) {
        return BigRational::zero();
    }
    let toward = |leaf: usize| -> Edge {
        let path = t.path_vertices(v, leaf);
        t.edge_between(path[0], path[1]).expect("path edge")
    };
    let (ei, ej) = (toward(vi), toward(vj));
    BigRational::new(BigInt::from(w.eta(&ej)), BigInt::from(ej.mult))
        - BigRational::new(BigInt::from(w.eta(&ei)), BigInt::from(ei.mult))
}

/// The row/column ordering of the ends: positive ends `1..N₊−1`, then each
/// set's entries above its minimum in decreasing order, then `N₊`, then
/// `−N₋`. The last set must contain `−N₋` as its minimum.
pub fn epsilon_order(family: &EndSetFamily, s: &EndData) -> Result<Vec<i64>> {
    let (pos, neg) = side_lists(s);
    let (n_plus, n_minus) = (pos.len() as i64, neg.len() as i64);
    let sets = family.sets();
    if sets.len() != pos.len() {
        return Err(Error::InvalidFamily(
            "family must have one set per positive end",
        ));
    }
    let mut eps: Vec<i64> = (1..n_plus).collect();
    for (i, set) in sets.iter().enumerate() {
        let min = *set
            .iter()
            .next()
            .ok_or(Error::InvalidFamily("family sets must be nonempty"))?;
        if i + 1 == sets.len() && min != -n_minus {
            return Err(Error::InvalidFamily(
                "last set must reach the lowest negative end",
            ));
        }
        let mut rest: Vec<i64> = set.iter().copied().filter(|&x| x != min).collect();
        rest.sort_unstable_by(|x, y| y.cmp(x));
        eps.extend(rest);
    }
    eps.push(n_plus);
    eps.push(-n_minus);
    if eps.len() != pos.len() + neg.len() {
        return Err(Error::InvalidFamily(
            "family sets must cover each hung end exactly once",
        ));
    }
    Ok(eps)
}

// Leaves reachable from v against the flow without passing any vertex
// holding a second incoming edge.
fn downward_targets(t: &OrientedWeightedTree, v: usize) -> Vec<i64> {
    let mut out = Vec::new();
    for e in t.incoming(v) {
        let mut cur = e.tail;
        loop {
            if let Some(l) = t.leaf_label(cur) {
                out.push(l);
                break;
            }
            let ins = t.incoming(cur);
            if ins.len() != 1 {
                break;
            }
            cur = ins[0].tail;
        }
    }
    out
}

// The column vertex for a hung negative end: keyed on the construction
// annotation, with the unbranched downward path as a checked invariant.
fn column_vertex(t: &OrientedWeightedTree, target: i64) -> Result<usize> {
    let v = t
        .joining_vertex_for(target)
        .ok_or(Error::InvalidFamily("end is not hung by a joining vertex"))?;
    debug_assert!(t.is_joining(v));
    debug_assert!(downward_targets(t, v).contains(&target));
    Ok(v)
}

/// Square matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    entries: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn from_rows(entries: Vec<Vec<BigRational>>) -> Result<RationalMatrix> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(RationalMatrix { entries })
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    /// Exact determinant: rows are scaled to integers, reduced by
    /// fraction-free elimination, and the scale divided back out.
    pub fn determinant(&self) -> BigRational {
        let n = self.entries.len();
        if n == 0 {
            return BigRational::one();
        }
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for row in &self.entries {
            let mut l = BigInt::one();
            for e in row {
                l = num::integer::lcm(l, e.denom().clone());
            }
            m.push(row.iter().map(|e| e.numer() * (&l / e.denom())).collect());
            scale *= &l;
        }
        BigRational::new(integer_determinant(m), scale)
    }
}

// Bareiss elimination; every division is exact.
fn integer_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

fn matrix_with_tree(
    theta: Theta,
    family: &EndSetFamily,
    s: &EndData,
) -> Result<(RationalMatrix, OrientedWeightedTree)> {
    let (pos, neg) = side_lists(s);
    let n = pos.len() + neg.len();
    if n <= 2 {
        return Err(Error::NotSupported("the matrix needs at least three ends"));
    }
    let t = phi(family, s)?;
    let eps = epsilon_order(family, s)?;
    let (n_plus, n_minus) = (pos.len(), neg.len() as i64);
    let mut cols = Vec::with_capacity(n - 2);
    for stage in 1..n_plus {
        cols.push(
            t.splitting_vertex_of_stage(stage)
                .ok_or(Error::InvalidFamily("missing splitting stage"))?,
        );
    }
    for k in n_plus..n - 1 {
        cols.push(column_vertex(&t, eps[k - 1])?);
    }
    let mut entries = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let ek = eps[k - 1];
        let w = special_windings(theta, &t, (ek, n_plus as i64, -n_minus))?;
        // the dominant end sits on the side the central vertex faces
        let dk = if t.is_joining(w.center()) {
            n_plus as i64
        } else {
            -n_minus
        };
        entries.push(
            cols.iter()
                .map(|&vl| rotation_rate(&w, vl, dk, ek))
                .collect(),
        );
    }
    Ok((RationalMatrix { entries }, t))
}

/// The `(N−2)×(N−2)` matrix of rotation rates attached to an end-set
/// family: one row per end `ε₁..ε_{N−2}`, columns at the splitting vertices
/// in construction order followed by the joining vertices of the hung ends
/// in `ε` order.
pub fn matrix_a(theta: Theta, family: &EndSetFamily, s: &EndData) -> Result<RationalMatrix> {
    matrix_with_tree(theta, family, s).map(|(m, _)| m)
}

/// Checks `det(A) · ∏_e m(e) = (−1)^{N₋−1} · W_θ(T, P)` exactly, where `T`
/// is the tree of the family and `P` its canonical pairing.
pub fn det_identity_check(theta: Theta, family: &EndSetFamily, s: &EndData) -> Result<bool> {
    let (matrix, t) = matrix_with_tree(theta, family, s)?;
    let lhs = matrix.determinant() * BigRational::from_integer(BigInt::from(covering_degree(&t)));
    let pairing = canonical_pairing(&t)?;
    let mut rhs = weight(theta, &t, &pairing)?;
    let (_, neg) = side_lists(s);
    if (neg.len() - 1) % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs == BigRational::from_integer(rhs))
}

/// `f_θ(a|b)` evaluated through determinants:
/// `Σ_E (−1)^{N₋−1} det(A(E)) · ∏_e m(e)` over all end-set families.
///
/// Needs at least three ends; meaningful on single-component data.
pub fn f_via_determinants(theta: Theta, a: &[u64], b: &[u64]) -> Result<BigInt> {
    f_via_determinants_with_cap(theta, a, b, DEFAULT_LEAF_CAP)
}

pub fn f_via_determinants_with_cap(
    theta: Theta,
    a: &[u64],
    b: &[u64],
    cap: usize,
) -> Result<BigInt> {
    if a.len() + b.len() <= 2 {
        return Err(Error::NotSupported(
            "the determinant route needs at least three ends",
        ));
    }
    let s = EndData::unprimed(a.to_vec(), b.to_vec())?;
    let flip = (b.len() - 1) % 2 == 1;
    let mut total = BigRational::zero();
    for family in enumerate_end_set_families_with_cap(&s, cap)? {
        let (matrix, t) = matrix_with_tree(theta, &family, &s)?;
        let term =
            matrix.determinant() * BigRational::from_integer(BigInt::from(covering_degree(&t)));
        total += if flip { -term } else { term };
    }
    if !total.is_integer() {
        return Err(Error::InvalidInput(
            "determinant sum did not reduce to an integer".into(),
        ));
    }
    Ok(total.to_integer())
}
