//! The gluing coefficients: the order-sensitive kernel `f_θ` (by recursion
//! and independently by tree sum), the full `c_θ` with its base cases and
//! decomposition sum, the hyperbolic coefficients, and the signed product
//! counting the ends of the glued moduli space.

use std::collections::HashMap;

use itertools::Itertools;
use num::{BigInt, BigUint, One, Zero};

use crate::partitions::{
    enumerate_theta_decompositions, orbit_partitions, partition_factorial, OrbitKind,
    DEFAULT_DECOMP_CAP,
};
use crate::theta_core::{delta, kappa, EndData, Theta};
use crate::trees::{canonical_pairing, phi, weight, DEFAULT_LEAF_CAP};
use crate::{Error, Result};

type Memo = HashMap<(Vec<u64>, Vec<u64>), BigInt>;

/// `f_θ(a | b)` by the defining recursion on the first entry of `a`.
///
/// The sum runs over index subsets `I = {i₁ < … < i_q}` of `b` with
/// `b_{i₁}+…+b_{i_{q−1}} < a₁ ≤ b_{i₁}+…+b_{i_q}`, the final inequality
/// strict unless `a₁` is the last entry; each subset contributes the product
/// of `δ_θ(a₁ − prefix, b_{i_n})` times the value on the reduced data, where
/// the overflow `Σ_I b − a₁` re-enters the list at the position `b_{i_q}`
/// held. Order matters on both sides; memoization keys preserve it.
pub fn f_theta(theta: Theta, a: &[u64], b: &[u64]) -> Result<BigInt> {
    check_sums(a, b)?;
    let mut memo = Memo::new();
    f_rec(theta, a, b, &mut memo)
}

fn check_sums(a: &[u64], b: &[u64]) -> Result<()> {
    let plus: u64 = a.iter().sum();
    let minus: u64 = b.iter().sum();
    if plus != minus {
        return Err(Error::SumMismatch { plus, minus });
    }
    Ok(())
}

fn f_rec(theta: Theta, a: &[u64], b: &[u64], memo: &mut Memo) -> Result<BigInt> {
    if a.is_empty() {
        debug_assert!(b.is_empty());
        return Ok(BigInt::one());
    }
    let key = (a.to_vec(), b.to_vec());
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let (k, l, a1) = (a.len(), b.len(), a[0]);
    let mut total = BigInt::zero();
    for q in 1..=l {
        for idx in (0..l).combinations(q) {
            let vals: Vec<u64> = idx.iter().map(|&i| b[i]).collect();
            let mut prefix = vec![0u64];
            for &v in &vals {
                prefix.push(prefix.last().unwrap() + v);
            }
            if prefix[q - 1] >= a1 {
                continue;
            }
            // equality with the full subset sum is allowed only when a₁ is
            // the last positive entry
            if (k == 1 && a1 > prefix[q]) || (k > 1 && a1 >= prefix[q]) {
                continue;
            }
            let mut w = BigInt::one();
            for n in 1..=q {
                w *= BigInt::from(delta(theta, a1 - prefix[n - 1], vals[n - 1])?);
            }
            let mut rest: Vec<(usize, u64)> = (0..l)
                .filter(|i| !idx.contains(i))
                .map(|i| (i, b[i]))
                .collect();
            if k > 1 {
                let tail_sum: u64 = a[1..].iter().sum();
                let rest_sum: u64 = rest.iter().map(|r| r.1).sum();
                rest.push((idx[q - 1], tail_sum - rest_sum));
                rest.sort_by_key(|r| r.0);
            }
            let b_next: Vec<u64> = rest.into_iter().map(|r| r.1).collect();
            total += f_rec(theta, &a[1..], &b_next, memo)? * w;
        }
    }
    memo.insert(key, total.clone());
    Ok(total)
}

/// Reorders prime-free data into the form the single-component coefficient
/// consumes: `a` ascending by `⌈aθ⌉/a`, `b` descending by `⌊bθ⌋/b`, both
/// stably.
pub fn reorder_unprimed(theta: Theta, a: &[u64], b: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut aw: Vec<(u64, i64)> = Vec::with_capacity(a.len());
    for &x in a {
        aw.push((x, theta.ceil_mult(x)?));
    }
    aw.sort_by(|&(x, cx), &(y, cy)| (cx as i128 * y as i128).cmp(&(cy as i128 * x as i128)));
    let mut bw: Vec<(u64, i64)> = Vec::with_capacity(b.len());
    for &x in b {
        bw.push((x, theta.floor_mult(x)?));
    }
    bw.sort_by(|&(x, fx), &(y, fy)| (fy as i128 * x as i128).cmp(&(fx as i128 * y as i128)));
    Ok((
        aw.into_iter().map(|p| p.0).collect(),
        bw.into_iter().map(|p| p.0).collect(),
    ))
}

// Single-component coefficient: the caller guarantees κ_θ = 1. Dispatch on
// the number of pinned entries.
fn c_single(theta: Theta, s: &EndData) -> Result<BigInt> {
    debug_assert_eq!(kappa(theta, s)?, 1);
    let (kp, lp) = (s.a_prime().len(), s.b_prime().len());
    if kp + lp == 0 {
        let (a2, b2) = reorder_unprimed(theta, s.a(), s.b())?;
        return f_theta(theta, &a2, &b2);
    }
    if kp + lp == 1 {
        // the pinned entry goes last on its side
        let (mut a2, mut b2) = reorder_unprimed(theta, s.a(), s.b())?;
        if kp == 1 {
            a2.push(s.a_prime()[0]);
        } else {
            b2.push(s.b_prime()[0]);
        }
        return f_theta(theta, &a2, &b2);
    }
    if s.a().is_empty() && s.b().is_empty() && kp == 1 && lp == 1 {
        // balance forces the two pinned ends equal
        return Ok(BigInt::from(s.a_prime()[0]));
    }
    Ok(BigInt::zero())
}

/// The elliptic gluing coefficient `c_θ(S)`: a sum over decomposition
/// classes of `S` into `κ_θ(S)` balanced components of the product of
/// single-component values. Empty data gives 1; no decomposition gives 0.
pub fn c_theta(theta: Theta, s: &EndData) -> Result<BigInt> {
    c_theta_with_cap(theta, s, DEFAULT_DECOMP_CAP)
}

pub fn c_theta_with_cap(theta: Theta, s: &EndData, cap: usize) -> Result<BigInt> {
    if s.is_empty() {
        return Ok(BigInt::one());
    }
    let mut total = BigInt::zero();
    for class in enumerate_theta_decompositions(theta, s, cap)? {
        let mut w = BigInt::one();
        for comp in class.component_data(s)? {
            w *= c_single(theta, &comp)?;
            if w.is_zero() {
                break;
            }
        }
        total += w;
    }
    Ok(total)
}

/// The hyperbolic gluing coefficient: zero unless the two sides agree as
/// multisets and the kind's parity rule holds (positive hyperbolic wants
/// distinct entries, negative hyperbolic all-odd entries); otherwise
/// `∏ m^{r(m)} · r(m)!` over the distinct entries.
pub fn c_hyperbolic(kind: OrbitKind, plus: &[u64], minus: &[u64]) -> Result<BigInt> {
    check_sums(plus, minus)?;
    let positive = match kind {
        OrbitKind::PositiveHyperbolic { .. } => true,
        OrbitKind::NegativeHyperbolic { .. } => false,
        OrbitKind::Elliptic(_) => {
            return Err(Error::InvalidInput(
                "hyperbolic coefficient needs a hyperbolic orbit kind".into(),
            ))
        }
    };
    let mut sp = plus.to_vec();
    let mut sm = minus.to_vec();
    sp.sort_unstable();
    sm.sort_unstable();
    if sp != sm {
        return Ok(BigInt::zero());
    }
    if positive && sp.windows(2).any(|w| w[0] == w[1]) {
        return Ok(BigInt::zero());
    }
    if !positive && sp.iter().any(|&m| m % 2 == 0) {
        return Ok(BigInt::zero());
    }
    let mut out = BigInt::one();
    let mut i = 0;
    while i < sp.len() {
        let m = sp[i];
        let mut r = 0u32;
        while i < sp.len() && sp[i] == m {
            r += 1;
            i += 1;
        }
        out *= BigInt::from(m).pow(r);
        for f in 1..=r as u64 {
            out *= BigInt::from(f);
        }
    }
    Ok(out)
}

/// Brute-force stand-in for [`c_hyperbolic`]: counts multiplicity-preserving
/// bijections between the two sides and multiplies by the product of all
/// multiplicities. Exponential in the side length; testing only.
pub fn c_hyperbolic_brute(kind: OrbitKind, plus: &[u64], minus: &[u64]) -> Result<BigInt> {
    check_sums(plus, minus)?;
    let positive = match kind {
        OrbitKind::PositiveHyperbolic { .. } => true,
        OrbitKind::NegativeHyperbolic { .. } => false,
        OrbitKind::Elliptic(_) => {
            return Err(Error::InvalidInput(
                "hyperbolic coefficient needs a hyperbolic orbit kind".into(),
            ))
        }
    };
    if positive && {
        let mut sp = plus.to_vec();
        sp.sort_unstable();
        sp.windows(2).any(|w| w[0] == w[1])
    } {
        return Ok(BigInt::zero());
    }
    if !positive && plus.iter().any(|&m| m % 2 == 0) {
        return Ok(BigInt::zero());
    }
    let n = plus.len();
    if n != minus.len() {
        return Ok(BigInt::zero());
    }
    let mut matchings = 0u64;
    for perm in (0..n).permutations(n) {
        if (0..n).all(|i| plus[i] == minus[perm[i]]) {
            matchings += 1;
        }
    }
    let mut out = BigInt::from(matchings);
    for &m in plus {
        out *= BigInt::from(m);
    }
    Ok(out)
}

/// End multiplicities one orbit contributes to a gluing: unprimed entries
/// are free ends of the two curves, primed entries the ends pinned to the
/// breaking.
#[derive(Debug, Clone)]
pub struct OrbitEnds {
    pub kind: OrbitKind,
    pub a: Vec<u64>,
    pub a_prime: Vec<u64>,
    pub b: Vec<u64>,
    pub b_prime: Vec<u64>,
}

/// Arguments of the signed gluing count: per-orbit end data plus the two
/// curve signs.
#[derive(Debug, Clone)]
pub struct GluingInput {
    pub orbits: Vec<OrbitEnds>,
    pub eps_plus: i8,
    pub eps_minus: i8,
}

/// `ε₊ ε₋ ∏_γ c_γ`, with `c_γ` elliptic or hyperbolic by orbit kind.
pub fn glue_count(input: &GluingInput) -> Result<BigInt> {
    if input.eps_plus.abs() != 1 || input.eps_minus.abs() != 1 {
        return Err(Error::InvalidInput("curve signs must be ±1".into()));
    }
    let mut out = BigInt::from((input.eps_plus * input.eps_minus) as i64);
    for orbit in &input.orbits {
        let s = EndData::new(
            orbit.a.clone(),
            orbit.a_prime.clone(),
            orbit.b.clone(),
            orbit.b_prime.clone(),
        )?;
        let factor = match orbit.kind {
            OrbitKind::Elliptic(theta) => c_theta(theta, &s)?,
            kind => {
                let plus: Vec<u64> = s.plus_side().collect();
                let minus: Vec<u64> = s.minus_side().collect();
                c_hyperbolic(kind, &plus, &minus)?
            }
        };
        out *= factor;
        if out.is_zero() {
            return Ok(out);
        }
    }
    Ok(out)
}

/// The factorial weight a gluing contributes to the count of boundary
/// points: `∏_γ P^out_γ(n_γ⁺)! · P^in_γ(n_γ⁻)!` over `(kind, n⁺, n⁻)`
/// records.
pub fn ech_glue_factor(orbits: &[(OrbitKind, u64, u64)]) -> Result<BigUint> {
    let mut out = BigUint::one();
    for &(kind, n_plus, n_minus) in orbits {
        let (_, outgoing) = orbit_partitions(kind, n_plus)?;
        let (incoming, _) = orbit_partitions(kind, n_minus)?;
        out *= partition_factorial(&outgoing);
        out *= partition_factorial(&incoming);
    }
    Ok(out)
}

/// `f_θ(a | b)` as a sum of canonical-pairing weights over admissible trees,
/// generated through the end-set-family bijection.
///
/// The tree formulation assumes at least three ends; the two-end case
/// `(a | a)` is the bare-edge degenerate cover, returned as `a` to match the
/// recursion.
pub fn f_theta_via_trees(theta: Theta, a: &[u64], b: &[u64]) -> Result<BigInt> {
    f_theta_via_trees_with_cap(theta, a, b, DEFAULT_LEAF_CAP)
}

pub fn f_theta_via_trees_with_cap(
    theta: Theta,
    a: &[u64],
    b: &[u64],
    cap: usize,
) -> Result<BigInt> {
    check_sums(a, b)?;
    if a.is_empty() {
        return Ok(BigInt::one());
    }
    if a.len() + b.len() == 2 {
        return Ok(BigInt::from(a[0]));
    }
    let s = EndData::unprimed(a.to_vec(), b.to_vec())?;
    let mut total = BigInt::zero();
    for family in crate::trees::enumerate_end_set_families_with_cap(&s, cap)? {
        let t = phi(&family, &s)?;
        let p = canonical_pairing(&t)?;
        total += weight(theta, &t, &p)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn th(p: i64, q: i64, g: u64) -> Theta {
        Theta::new(p, q, g).unwrap()
    }

    fn f(theta: Theta, a: &[u64], b: &[u64]) -> i64 {
        let v = f_theta(theta, a, b).unwrap();
        i64::try_from(&v).unwrap()
    }

    fn c(theta: Theta, a: &[u64], ap: &[u64], b: &[u64], bp: &[u64]) -> i64 {
        let s = EndData::new(a.to_vec(), ap.to_vec(), b.to_vec(), bp.to_vec()).unwrap();
        i64::try_from(&c_theta(theta, &s).unwrap()).unwrap()
    }

    #[test]
    fn f_base_cases() {
        assert_eq!(f(th(2, 5, 4), &[], &[]), 1);
        for a in 1..=7 {
            assert_eq!(f(th(5, 8, 7), &[a], &[a]), a as i64);
        }
        assert_eq!(f(th(2, 5, 4), &[2], &[1, 1]), 1);
    }

    #[test]
    fn f_frozen_values() {
        // values pinned against an independent implementation
        assert_eq!(f(th(2, 5, 4), &[1, 1], &[1, 1]), 0);
        assert_eq!(f(th(2, 5, 4), &[3], &[1, 1, 1]), 2);
        assert_eq!(f(th(2, 5, 4), &[2, 1], &[1, 1, 1]), 0);
        assert_eq!(f(th(3, 7, 6), &[3, 1], &[2, 2]), 8);
        assert_eq!(f(th(3, 7, 6), &[2, 2], &[1, 3]), 5);
        assert_eq!(f(th(3, 7, 6), &[4], &[2, 2]), 8);
        assert_eq!(f(th(3, 7, 6), &[3, 2], &[1, 4]), 13);
        assert_eq!(f(th(3, 7, 6), &[2, 2, 1], &[4, 1]), 0);
        assert_eq!(f(th(5, 8, 7), &[3, 3, 1], &[5, 2]), 1);
        assert_eq!(f(th(5, 13, 6), &[4, 2], &[3, 3]), 8);
        assert_eq!(f(th(7, 16, 8), &[5, 3], &[4, 4]), 63);
        assert_eq!(f(th(7, 16, 8), &[4, 3, 1], &[6, 2]), 32);
    }

    #[test]
    fn f_is_order_sensitive_and_symmetric() {
        let t = th(3, 7, 6);
        assert_ne!(f(t, &[2, 2], &[1, 3]), f(t, &[2, 2], &[3, 1]));
        for (a, b) in [
            (vec![3u64, 1], vec![2u64, 2]),
            (vec![2, 2], vec![1, 3]),
            (vec![4], vec![2, 2]),
        ] {
            assert_eq!(
                f_theta(t, &a, &b).unwrap(),
                f_theta(t.negate(), &b, &a).unwrap()
            );
        }
    }

    #[test]
    fn f_rejects_unbalanced_input() {
        assert!(matches!(
            f_theta(th(2, 5, 4), &[2], &[1]),
            Err(Error::SumMismatch { .. })
        ));
    }

    #[test]
    fn reorder_examples() {
        // 5/8: ⌈θ⌉/1 = 1, ⌈3θ⌉/3 = 2/3 → the 3s go first
        let (a2, b2) = reorder_unprimed(th(5, 8, 7), &[1, 3, 3], &[2, 5]).unwrap();
        assert_eq!(a2, vec![3, 3, 1]);
        assert_eq!(b2, vec![5, 2]);
    }

    #[test]
    fn c_base_and_frozen_values() {
        assert_eq!(c(th(2, 5, 4), &[], &[], &[], &[]), 1);
        for a in 1..=7 {
            assert_eq!(c(th(5, 8, 7), &[a], &[], &[a], &[]), a as i64);
        }
        assert_eq!(c(th(2, 5, 4), &[2], &[], &[1, 1], &[]), 1);
        assert_eq!(c(th(2, 5, 4), &[1, 1], &[], &[1, 1], &[]), 2);
        assert_eq!(c(th(2, 5, 4), &[2, 1], &[], &[1, 1, 1], &[]), 3);
        assert_eq!(c(th(2, 5, 4), &[], &[2], &[], &[2]), 2);
        assert_eq!(c(th(2, 5, 4), &[2], &[1], &[1, 1, 1], &[]), 3);
        assert_eq!(c(th(2, 5, 4), &[1, 1], &[1], &[1, 1, 1], &[]), 6);
        assert_eq!(c(th(3, 7, 6), &[2, 2], &[], &[2, 2], &[]), 8);
        assert_eq!(c(th(3, 7, 6), &[2, 2], &[1], &[2, 2, 1], &[]), 8);
        assert_eq!(c(th(5, 8, 7), &[3, 3, 1], &[], &[5, 2], &[]), 1);
        assert_eq!(c(th(5, 8, 7), &[3, 1], &[2], &[5, 1], &[]), 2);
        assert_eq!(c(th(5, 8, 7), &[], &[2, 2], &[2, 2], &[]), 8);
        assert_eq!(c(th(5, 13, 6), &[3, 2], &[2], &[4, 2, 1], &[]), 0);
    }

    #[test]
    fn c_single_block_against_small_angle() {
        // θ below 1/a₁ leaves a single subset in the recursion: the whole of b
        let t = th(1, 10, 9);
        assert_eq!(c(t, &[6], &[], &[3, 2, 1], &[]), 6);
        assert_eq!(c(t, &[5], &[], &[1, 2, 2], &[]), 4);
        assert_eq!(c(t, &[4], &[], &[1, 1, 1, 1], &[]), 1);
    }

    #[test]
    fn hyperbolic_values() {
        let pos = OrbitKind::positive_hyperbolic(2).unwrap();
        let neg = OrbitKind::negative_hyperbolic(1).unwrap();
        assert_eq!(c_hyperbolic(pos, &[1, 1], &[1, 1]).unwrap(), BigInt::zero());
        assert_eq!(c_hyperbolic(neg, &[2], &[2]).unwrap(), BigInt::zero());
        assert_eq!(c_hyperbolic(neg, &[3, 1], &[3, 1]).unwrap(), BigInt::from(3));
        assert_eq!(
            c_hyperbolic(pos, &[2, 1], &[1, 2]).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            c_hyperbolic(neg, &[1, 1, 1], &[1, 1, 1]).unwrap(),
            BigInt::from(6)
        );
        assert_eq!(c_hyperbolic(pos, &[2, 1], &[3]).unwrap(), BigInt::zero());
        assert!(c_hyperbolic(OrbitKind::Elliptic(th(2, 5, 4)), &[1], &[1]).is_err());
    }

    #[test]
    fn hyperbolic_matches_brute_force() {
        let pos = OrbitKind::positive_hyperbolic(4).unwrap();
        let neg = OrbitKind::negative_hyperbolic(3).unwrap();
        let sides: &[&[u64]] = &[
            &[1],
            &[3],
            &[1, 2],
            &[1, 1],
            &[3, 1],
            &[1, 1, 1],
            &[2, 2, 1],
            &[3, 3, 1],
            &[1, 2, 3],
        ];
        for &plus in sides {
            for &minus in sides {
                if plus.iter().sum::<u64>() != minus.iter().sum::<u64>() {
                    continue;
                }
                for kind in [pos, neg] {
                    assert_eq!(
                        c_hyperbolic(kind, plus, minus).unwrap(),
                        c_hyperbolic_brute(kind, plus, minus).unwrap(),
                        "{kind:?} {plus:?} {minus:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn glue_count_products_and_signs() {
        let mut input = GluingInput {
            orbits: vec![OrbitEnds {
                kind: OrbitKind::Elliptic(th(2, 5, 4)),
                a: vec![2],
                a_prime: vec![],
                b: vec![1, 1],
                b_prime: vec![],
            }],
            eps_plus: 1,
            eps_minus: 1,
        };
        assert_eq!(glue_count(&input).unwrap(), BigInt::one());
        input.eps_minus = -1;
        assert_eq!(glue_count(&input).unwrap(), BigInt::from(-1));
        input.orbits.push(OrbitEnds {
            kind: OrbitKind::positive_hyperbolic(2).unwrap(),
            a: vec![1, 1],
            a_prime: vec![],
            b: vec![1, 1],
            b_prime: vec![],
        });
        // the repeated positive-hyperbolic entry zeroes the whole product
        assert_eq!(glue_count(&input).unwrap(), BigInt::zero());
        input.eps_plus = 2;
        assert!(glue_count(&input).is_err());
    }

    #[test]
    fn ech_factor_values() {
        assert_eq!(ech_glue_factor(&[]).unwrap(), BigUint::one());
        let ell = OrbitKind::Elliptic(th(5, 8, 7));
        // outgoing partition of 7 at 5/8 is (5,2): factorial product 10
        assert_eq!(
            ech_glue_factor(&[(ell, 7, 0)]).unwrap(),
            BigUint::from(10u32)
        );
        assert_eq!(ech_glue_factor(&[(ell, 0, 0)]).unwrap(), BigUint::one());
        let neg = OrbitKind::negative_hyperbolic(1).unwrap();
        // incoming partition of 5 is (2,2,1): 2²·2!·1 = 8
        assert_eq!(
            ech_glue_factor(&[(neg, 0, 5)]).unwrap(),
            BigUint::from(8u32)
        );
    }

    #[test]
    fn tree_sum_agrees_with_recursion() {
        for (p, q, a, b) in [
            (2i64, 5i64, vec![2u64], vec![1u64, 1]),
            (2, 5, vec![3], vec![1, 1, 1]),
            (2, 5, vec![1, 1], vec![2]),
            (3, 7, vec![3, 1], vec![2, 2]),
            (3, 7, vec![2, 2], vec![1, 3]),
            (5, 13, vec![4, 2], vec![3, 3]),
            (7, 16, vec![4, 3, 1], vec![6, 2]),
        ] {
            let total: u64 = a.iter().sum();
            let t = Theta::new(p, q, total).unwrap();
            assert_eq!(
                f_theta(t, &a, &b).unwrap(),
                f_theta_via_trees(t, &a, &b).unwrap(),
                "θ={p}/{q}, ({a:?}|{b:?})"
            );
        }
        // two-end convention
        assert_eq!(
            f_theta_via_trees(th(5, 8, 7), &[5], &[5]).unwrap(),
            BigInt::from(5)
        );
    }

    proptest! {
        #[test]
        fn f_symmetry_under_negation(
            p in 1i64..12, q in 13i64..29,
            a in proptest::collection::vec(1u64..4, 1..4),
            split in 0u64..100,
        ) {
            let Ok(t) = Theta::new(p, q, 12) else { return Ok(()) };
            let total: u64 = a.iter().sum();
            if total > 12 { return Ok(()); }
            // split the total into a two-part b
            let b = if total > 1 {
                let cut = 1 + split % (total - 1);
                vec![cut, total - cut]
            } else {
                vec![1]
            };
            prop_assert_eq!(
                f_theta(t, &a, &b).unwrap(),
                f_theta(t.negate(), &b, &a).unwrap()
            );
        }

        #[test]
        fn c_reorder_invariance_small(
            p in 1i64..10, q in 11i64..23,
            a in proptest::collection::vec(1u64..4, 1..3),
            b in proptest::collection::vec(1u64..4, 1..3),
        ) {
            let Ok(t) = Theta::new(p, q, 10) else { return Ok(()) };
            let (sa, sb): (u64, u64) = (a.iter().sum(), b.iter().sum());
            if sa != sb || sa > 10 { return Ok(()); }
            let s0 = EndData::unprimed(a.clone(), b.clone()).unwrap();
            let want = c_theta(t, &s0).unwrap();
            let mut ar = a.clone();
            ar.reverse();
            let mut br = b.clone();
            br.reverse();
            let s1 = EndData::unprimed(ar, br).unwrap();
            prop_assert_eq!(c_theta(t, &s1).unwrap(), want);
        }
    }
}
