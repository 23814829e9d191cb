//! Batch verification: replays the library's identities over sweeps bounded
//! by the configured caps, fanning out across worker threads. Failures come
//! back as minimal counterexamples (angle, data, and the two disagreeing
//! values). Cases are checked in a canonical order and reported in it, so
//! output does not depend on thread scheduling.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Result};
use itertools::Itertools;
use num::bigint::BigInt;
use num::rational::BigRational;
use rayon::prelude::*;

use gluecoeff_core::coefficients::{
    c_hyperbolic, c_hyperbolic_brute, c_theta_with_cap, f_theta, f_theta_via_trees_with_cap,
};
use gluecoeff_core::cokernel_combinatorics::{
    det_identity_check, f_via_determinants_with_cap, matrix_a, vertex_index_identity,
};
use gluecoeff_core::partitions::{
    enumerate_theta_decompositions, ge_theta, ge_theta_ops, incoming_partition,
    incoming_partition_lattice, indkey_prefix_unique, indkey_step, is_initial_segment,
    outgoing_partition, outgoing_partition_lattice, partition_factorial, tfae_check, OrbitKind,
    Partition,
};
use gluecoeff_core::theta_core::{kappa, EndData, Theta};
use gluecoeff_core::trees::{
    enumerate_end_set_families_with_cap, enumerate_trees_with_cap, is_admissible, phi,
};

pub struct VerifyConfig {
    pub max_m: u64,
    pub max_n: usize,
    pub node_cap: usize,
    pub seed: u64,
    /// Extra sweep angles, already validated against the run's guard.
    pub extra_thetas: Vec<(i64, i64)>,
}

pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

pub const SUITE_NAMES: [&str; 11] = [
    "coefficients",
    "truncation",
    "routes",
    "reordering",
    "partitions",
    "order",
    "reduction",
    "determinants",
    "index-identity",
    "hyperbolic",
    "bijection",
];

// splitmix64, written out so that equal seeds give equal sweeps on every
// platform and toolchain
fn next_rand(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sweep angles guarded for every multiplicity up to the M cap: six
/// generated with denominators just above the cap, then the user's extras.
pub fn sweep_thetas(cfg: &VerifyConfig) -> Result<Vec<Theta>> {
    let guard = cfg.max_m.max(1);
    let mut out: Vec<Theta> = Vec::new();
    let push = |t: Theta, out: &mut Vec<Theta>| {
        if !out
            .iter()
            .any(|x| x.numerator() == t.numerator() && x.denominator() == t.denominator())
        {
            out.push(t);
        }
    };
    let mut state = cfg.seed;
    let mut q = guard as i64 + 1;
    while out.len() < 6 {
        let mut p = (next_rand(&mut state) % (q as u64 - 1).max(1)) as i64 + 1;
        for _ in 0..q {
            if num::integer::gcd(p, q) == 1 {
                break;
            }
            p = p % (q - 1) + 1;
        }
        if num::integer::gcd(p, q) == 1 {
            push(Theta::new(p, q, guard)?, &mut out);
        }
        q += 1;
    }
    for &(p, q) in &cfg.extra_thetas {
        push(Theta::new(p, q, guard)?, &mut out);
    }
    Ok(out)
}

/// Nonincreasing partitions of `m`; the empty partition for `m = 0`.
fn partitions_of(m: u64) -> Vec<Vec<u64>> {
    fn rec(left: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for next in (1..=left.min(max)).rev() {
            cur.push(next);
            rec(left - next, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m.max(1), &mut Vec::new(), &mut out);
    out
}

/// Ordered tuples of `k` positive integers summing to `m`.
fn compositions_of(m: u64, k: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=left - (k as u64 - 1) {
            cur.push(first);
            rec(left - first, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && m >= k as u64 {
        rec(m, k, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone)]
struct GridInstance {
    theta: Theta,
    a: Vec<u64>,
    b: Vec<u64>,
}

// Single-component unprimed pairs up to the caps, against every sweep angle.
fn build_grid(cfg: &VerifyConfig, thetas: &[Theta]) -> Vec<GridInstance> {
    let mut out = Vec::new();
    if cfg.max_n < 2 || cfg.max_m < 2 {
        return out;
    }
    for m in 2..=cfg.max_m {
        let mut pairs = Vec::new();
        for k in 1..cfg.max_n {
            for l in 1..=(cfg.max_n - k) {
                for a in compositions_of(m, k) {
                    for b in compositions_of(m, l) {
                        pairs.push((a.clone(), b));
                    }
                }
            }
        }
        for &t in thetas {
            for (a, b) in &pairs {
                let s = EndData::unprimed(a.clone(), b.clone()).expect("balanced by construction");
                if kappa(t, &s).expect("multiplicities within guard") == 1 {
                    out.push(GridInstance {
                        theta: t,
                        a: a.clone(),
                        b: b.clone(),
                    });
                }
            }
        }
    }
    out
}

// Runs one suite's cases across the worker pool; the collected failure list
// keeps the canonical case order.
fn run_cases<C, F>(
    name: &'static str,
    cases: Vec<C>,
    progress: &AtomicUsize,
    check: F,
) -> SuiteOutcome
where
    C: Sync,
    F: Fn(&C) -> Option<String> + Sync,
{
    let failures: Vec<String> = cases
        .par_iter()
        .map(|c| {
            let outcome = check(c);
            progress.fetch_add(1, Ordering::Relaxed);
            outcome
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SuiteOutcome {
        name,
        cases: cases.len(),
        failures,
    }
}

// Error-tolerant check body: a core error inside a case is itself a failure.
fn flat(ctx: &str, r: gluecoeff_core::Result<Option<String>>) -> Option<String> {
    match r {
        Ok(v) => v,
        Err(e) => Some(format!("{ctx}: error: {e}")),
    }
}

enum CoeffCase {
    Full { a: u64, theta: Theta },
    Small { a1: u64, b: Vec<u64>, theta: Theta },
    Split { theta: Theta },
    Extremal { m: u64, theta: Theta },
}

fn suite_coefficients(
    cfg: &VerifyConfig,
    thetas: &[Theta],
    progress: &AtomicUsize,
) -> SuiteOutcome {
    let mut cases = Vec::new();
    for a in 1..=cfg.max_m {
        for &theta in thetas {
            cases.push(CoeffCase::Full { a, theta });
        }
    }
    for a1 in 1..=cfg.max_m.min(12) {
        let q = a1 as i64;
        let smalls = [
            Theta::new(1, q + 1, a1).expect("denominator exceeds guard"),
            Theta::new(1, 2 * q + 1, a1).expect("denominator exceeds guard"),
            Theta::new(2, 2 * q + 1, a1).expect("denominator exceeds guard"),
        ];
        for b in partitions_of(a1) {
            for &theta in &smalls {
                cases.push(CoeffCase::Small {
                    a1,
                    b: b.clone(),
                    theta,
                });
            }
        }
    }
    for q in 3..=17i64 {
        for p in 1..q {
            if 2 * p < q && num::integer::gcd(p, q) == 1 {
                cases.push(CoeffCase::Split {
                    theta: Theta::new(p, q, 2).expect("denominator exceeds guard"),
                });
            }
        }
    }
    for m in 0..=cfg.max_m {
        for &theta in thetas {
            cases.push(CoeffCase::Extremal { m, theta });
        }
    }
    let cap = cfg.node_cap;
    run_cases("coefficients", cases, progress, move |case| match case {
        CoeffCase::Full { a, theta } => flat(
            &format!("theta={theta} S={a}|{a}"),
            (|| {
                let s = EndData::unprimed(vec![*a], vec![*a])?;
                let got = c_theta_with_cap(*theta, &s, cap)?;
                Ok((got != BigInt::from(*a))
                    .then(|| format!("theta={theta} c({a}|{a})={got}, want {a}")))
            })(),
        ),
        CoeffCase::Small { a1, b, theta } => flat(
            &format!("theta={theta} S={a1}|{b:?}"),
            (|| {
                let s = EndData::unprimed(vec![*a1], b.clone())?;
                let got = c_theta_with_cap(*theta, &s, cap)?;
                let want = BigInt::from(b.iter().product::<u64>());
                Ok((got != want)
                    .then(|| format!("theta={theta} c({a1}|{b:?})={got}, want {want}")))
            })(),
        ),
        CoeffCase::Split { theta } => flat(
            &format!("theta={theta} S=2|1,1"),
            (|| {
                let s = EndData::unprimed(vec![2], vec![1, 1])?;
                let got = c_theta_with_cap(*theta, &s, cap)?;
                Ok((got != BigInt::from(1))
                    .then(|| format!("theta={theta} c(2|1,1)={got}, want 1")))
            })(),
        ),
        CoeffCase::Extremal { m, theta } => flat(
            &format!("theta={theta} M={m}"),
            (|| {
                let pin = incoming_partition(*theta, *m)?;
                let pout = outgoing_partition(*theta, *m)?;
                let s = EndData::unprimed(pin.parts().to_vec(), pout.parts().to_vec())?;
                let got = c_theta_with_cap(*theta, &s, cap)?;
                Ok((got != BigInt::from(1))
                    .then(|| format!("theta={theta} c({pin}|{pout})={got}, want 1")))
            })(),
        ),
    })
}

fn suite_truncation(cfg: &VerifyConfig, thetas: &[Theta], progress: &AtomicUsize) -> SuiteOutcome {
    let mut cases = Vec::new();
    for m in 0..=cfg.max_m.min(12) {
        for &theta in thetas {
            cases.push((m, theta));
        }
    }
    let cap = cfg.node_cap;
    run_cases("truncation", cases, progress, move |&(m, theta)| {
        flat(
            &format!("theta={theta} M={m}"),
            (|| {
                let pin_m = incoming_partition(theta, m)?;
                let pout_m = outgoing_partition(theta, m)?;
                for mp in 0..=m {
                    let pin_mp = incoming_partition(theta, mp)?;
                    if !is_initial_segment(&pin_mp, &pin_m) {
                        continue;
                    }
                    let rest = outgoing_partition(theta, m - mp)?;
                    let s = EndData::new(
                        pin_mp.parts().to_vec(),
                        rest.parts().to_vec(),
                        pout_m.parts().to_vec(),
                        vec![],
                    )?;
                    let got = c_theta_with_cap(theta, &s, cap)?;
                    let want = BigInt::from(partition_factorial(&rest));
                    if got != want {
                        return Ok(Some(format!(
                            "theta={theta} M={m} M+={mp}: c={got}, want {want}"
                        )));
                    }
                }
                for mm in 0..=m {
                    let pout_mm = outgoing_partition(theta, mm)?;
                    if !is_initial_segment(&pout_mm, &pout_m) {
                        continue;
                    }
                    let rest = incoming_partition(theta, m - mm)?;
                    let s = EndData::new(
                        pin_m.parts().to_vec(),
                        vec![],
                        pout_mm.parts().to_vec(),
                        rest.parts().to_vec(),
                    )?;
                    let got = c_theta_with_cap(theta, &s, cap)?;
                    let want = BigInt::from(partition_factorial(&rest));
                    if got != want {
                        return Ok(Some(format!(
                            "theta={theta} M={m} M-={mm}: c={got}, want {want}"
                        )));
                    }
                }
                for mp in 1..m {
                    let pin_mp = incoming_partition(theta, mp)?;
                    if !is_initial_segment(&pin_mp, &pin_m) {
                        continue;
                    }
                    for mm in 1..m {
                        let pout_mm = outgoing_partition(theta, mm)?;
                        if !is_initial_segment(&pout_mm, &pout_m) {
                            continue;
                        }
                        let s = EndData::new(
                            pin_mp.parts().to_vec(),
                            outgoing_partition(theta, m - mp)?.parts().to_vec(),
                            pout_mm.parts().to_vec(),
                            incoming_partition(theta, m - mm)?.parts().to_vec(),
                        )?;
                        for d in enumerate_theta_decompositions(theta, &s, cap)? {
                            let has = d.components.iter().any(|c| {
                                c.a.is_empty()
                                    && c.b.is_empty()
                                    && c.a_prime.len() == 1
                                    && c.b_prime.len() == 1
                            });
                            if !has {
                                return Ok(Some(format!(
                                    "theta={theta} M={m} M+={mp} M-={mm}: \
                                     a decomposition has no pinned-pair component"
                                )));
                            }
                        }
                    }
                }
                Ok(None)
            })(),
        )
    })
}

fn suite_routes(cfg: &VerifyConfig, grid: &[GridInstance], progress: &AtomicUsize) -> SuiteOutcome {
    let leaf_cap = cfg.max_n;
    let node_cap = cfg.node_cap;
    run_cases("routes", grid.to_vec(), progress, move |inst| {
        let GridInstance { theta, a, b } = inst;
        let ctx = format!("theta={theta} S={a:?}|{b:?}");
        flat(
            &ctx,
            (|| {
                let f1 = f_theta(*theta, a, b)?;
                let f2 = f_theta_via_trees_with_cap(*theta, a, b, leaf_cap)?;
                if f1 != f2 {
                    return Ok(Some(format!("{ctx}: recursion={f1} trees={f2}")));
                }
                if a.len() + b.len() > 2 {
                    let f3 = f_via_determinants_with_cap(*theta, a, b, leaf_cap)?;
                    if f1 != f3 {
                        return Ok(Some(format!("{ctx}: recursion={f1} determinants={f3}")));
                    }
                }
                let neg = theta.negate();
                let g = f_theta(neg, b, a)?;
                if f1 != g {
                    return Ok(Some(format!("{ctx}: f={f1} but mirrored f={g}")));
                }
                let s = EndData::unprimed(a.clone(), b.clone())?;
                let r = EndData::unprimed(b.clone(), a.clone())?;
                let cs = c_theta_with_cap(*theta, &s, node_cap)?;
                let cr = c_theta_with_cap(neg, &r, node_cap)?;
                if cs != cr {
                    return Ok(Some(format!("{ctx}: c={cs} but mirrored c={cr}")));
                }
                if a.len() >= 2 {
                    let mut swapped = a.clone();
                    swapped.swap(0, 1);
                    let mut merged = vec![a[0] + a[1]];
                    merged.extend_from_slice(&a[2..]);
                    let lhs = f1 - f_theta(*theta, &swapped, b)?;
                    let factor = BigInt::from(a[1]) * theta.ceil_mult(a[0])?
                        - BigInt::from(a[0]) * theta.ceil_mult(a[1])?;
                    let rhs = factor * f_theta(*theta, &merged, b)?;
                    if lhs != rhs {
                        return Ok(Some(format!("{ctx}: swap defect {lhs} != {rhs}")));
                    }
                }
                Ok(None)
            })(),
        )
    })
}

const REORDER_DATA: [(&[u64], &[u64], &[u64], &[u64]); 12] = [
    (&[2, 1], &[], &[1, 1, 1], &[]),
    (&[1, 3, 3], &[], &[2, 5], &[]),
    (&[3], &[2], &[1, 2], &[2]),
    (&[2, 2], &[1], &[4], &[1]),
    (&[4, 2], &[], &[3, 2, 1], &[]),
    (&[1, 1], &[1], &[2], &[1]),
    (&[5], &[], &[2, 2, 1], &[]),
    (&[2, 2, 1], &[], &[4, 1], &[]),
    (&[3, 1], &[2], &[4, 2], &[]),
    (&[1], &[2], &[3], &[]),
    (&[2, 1], &[1], &[2, 2], &[]),
    (&[3, 2], &[], &[1, 4], &[]),
];

fn orderings(list: &[u64]) -> Vec<Vec<u64>> {
    let set: BTreeSet<Vec<u64>> = list.iter().copied().permutations(list.len()).collect();
    if set.is_empty() {
        vec![vec![]]
    } else {
        set.into_iter().collect()
    }
}

fn suite_reordering(cfg: &VerifyConfig, thetas: &[Theta], progress: &AtomicUsize) -> SuiteOutcome {
    let mut cases = Vec::new();
    for &(a, ap, b, bp) in REORDER_DATA.iter() {
        let total: u64 = a.iter().sum::<u64>() + ap.iter().sum::<u64>();
        if total > cfg.max_m {
            continue;
        }
        for &theta in thetas.iter().take(3) {
            cases.push((a, ap, b, bp, theta));
        }
    }
    let cap = cfg.node_cap;
    run_cases("reordering", cases, progress, move |&(a, ap, b, bp, theta)| {
        let ctx = format!("theta={theta} S={a:?};{ap:?}|{b:?};{bp:?}");
        flat(
            &ctx,
            (|| {
                let base = c_theta_with_cap(
                    theta,
                    &EndData::new(a.to_vec(), ap.to_vec(), b.to_vec(), bp.to_vec())?,
                    cap,
                )?;
                for pa in orderings(a) {
                    for pap in orderings(ap) {
                        for pb in orderings(b) {
                            for pbp in orderings(bp) {
                                let s =
                                    EndData::new(pa.clone(), pap.clone(), pb.clone(), pbp.clone())?;
                                let got = c_theta_with_cap(theta, &s, cap)?;
                                if got != base {
                                    return Ok(Some(format!(
                                        "{ctx}: reordered {pa:?};{pap:?}|{pb:?};{pbp:?} \
                                         gives {got}, want {base}"
                                    )));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            })(),
        )
    })
}

enum PartCase {
    Sweep { m: u64, theta: Theta },
    Figure,
}

fn suite_partitions(cfg: &VerifyConfig, thetas: &[Theta], progress: &AtomicUsize) -> SuiteOutcome {
    let mut cases = vec![PartCase::Figure];
    for m in 0..=cfg.max_m {
        for &theta in thetas {
            cases.push(PartCase::Sweep { m, theta });
        }
    }
    run_cases("partitions", cases, progress, |case| match case {
        PartCase::Figure => flat(
            "figure partitions",
            (|| {
                let t = Theta::new(5, 8, 7)?;
                let pin = incoming_partition(t, 7)?;
                let pout = outgoing_partition(t, 7)?;
                Ok((pin.parts() != [3, 3, 1] || pout.parts() != [5, 2])
                    .then(|| format!("theta=5/8 M=7: in={pin} out={pout}")))
            })(),
        ),
        PartCase::Sweep { m, theta } => flat(
            &format!("theta={theta} M={m}"),
            (|| {
                let m = *m;
                let theta = *theta;
                let pin = incoming_partition(theta, m)?;
                let pout = outgoing_partition(theta, m)?;
                if pin != incoming_partition_lattice(theta, m)? {
                    return Ok(Some(format!(
                        "theta={theta} M={m}: greedy incoming {pin} differs from lattice path"
                    )));
                }
                if pout != outgoing_partition_lattice(theta, m)? {
                    return Ok(Some(format!(
                        "theta={theta} M={m}: greedy outgoing {pout} differs from lattice path"
                    )));
                }
                if m >= 1 {
                    let mut cs = 0i64;
                    for &x in pin.parts() {
                        cs += theta.ceil_mult(x)?;
                    }
                    let mut fs = 0i64;
                    for &x in pout.parts() {
                        fs += theta.floor_mult(x)?;
                    }
                    if cs != theta.ceil_mult(m)? || fs != theta.floor_mult(m)? {
                        return Ok(Some(format!(
                            "theta={theta} M={m}: index sums {cs}/{fs} do not match"
                        )));
                    }
                }
                Ok(None)
            })(),
        ),
    })
}

enum OrderCase {
    Pairs { m: u64, theta: Theta },
    Tfae { m: u64, theta: Theta },
}

fn suite_order(cfg: &VerifyConfig, thetas: &[Theta], progress: &AtomicUsize) -> SuiteOutcome {
    let mut cases = Vec::new();
    for m in 0..=cfg.max_m.min(10) {
        for &theta in thetas {
            cases.push(OrderCase::Pairs { m, theta });
        }
    }
    for m in 0..=cfg.max_m {
        for &theta in thetas {
            cases.push(OrderCase::Tfae { m, theta });
        }
    }
    let cap = cfg.node_cap;
    run_cases("order", cases, progress, move |case| match case {
        OrderCase::Pairs { m, theta } => flat(
            &format!("theta={theta} M={m}"),
            (|| {
                let parts = partitions_of(*m);
                for p in &parts {
                    for q in &parts {
                        let pp = Partition::new(p.clone())?;
                        let qq = Partition::new(q.clone())?;
                        let by_decomposition = ge_theta(*theta, &pp, &qq, cap)?;
                        let by_moves = ge_theta_ops(*theta, &pp, &qq, cap)?;
                        if by_decomposition != by_moves {
                            return Ok(Some(format!(
                                "theta={theta} {pp} >= {qq}: decomposition says \
                                 {by_decomposition}, moves say {by_moves}"
                            )));
                        }
                    }
                }
                Ok(None)
            })(),
        ),
        OrderCase::Tfae { m, theta } => flat(
            &format!("theta={theta} M={m}"),
            (|| {
                for mp in 0..=*m {
                    let rec = tfae_check(*theta, mp, *m)?;
                    if !rec.all_agree() {
                        return Ok(Some(format!(
                            "theta={theta} M'={mp} M={m}: prefix conditions disagree {:?}",
                            rec.values()
                        )));
                    }
                }
                Ok(None)
            })(),
        ),
    })
}

fn suite_reduction(cfg: &VerifyConfig, thetas: &[Theta], progress: &AtomicUsize) -> SuiteOutcome {
    let mut cases = Vec::new();
    for m in 1..=cfg.max_m {
        for &theta in thetas {
            cases.push((m, theta));
        }
    }
    run_cases("reduction", cases, progress, |&(m, theta)| {
        flat(
            &format!("theta={theta} M={m}"),
            (|| {
                let a = incoming_partition(theta, m)?;
                let b = outgoing_partition(theta, m)?;
                let step = indkey_step(theta, m)?;
                if !step.deltas_all_one {
                    return Ok(Some(format!("theta={theta} M={m}: a delta factor exceeds 1")));
                }
                if step.reduced_in.parts() != &a.parts()[1..] {
                    return Ok(Some(format!(
                        "theta={theta} M={m}: reduced incoming {} is not the tail of {a}",
                        step.reduced_in
                    )));
                }
                let mut rest: Vec<u64> = b.parts()[step.prefix_len..].to_vec();
                if step.leftover > 0 {
                    rest.push(step.leftover);
                }
                rest.sort_unstable_by(|x, y| y.cmp(x));
                if step.reduced_out.parts() != rest {
                    return Ok(Some(format!(
                        "theta={theta} M={m}: reduced outgoing {} is not the stub merge",
                        step.reduced_out
                    )));
                }
                if !indkey_prefix_unique(theta, m)? {
                    return Ok(Some(format!(
                        "theta={theta} M={m}: bracketing prefix is not unique"
                    )));
                }
                Ok(None)
            })(),
        )
    })
}

enum DetCase {
    Hand,
    Grid(GridInstance),
}

fn suite_determinants(
    cfg: &VerifyConfig,
    grid: &[GridInstance],
    progress: &AtomicUsize,
) -> SuiteOutcome {
    let mut cases = vec![DetCase::Hand];
    cases.extend(
        grid.iter()
            .filter(|g| g.a.len() + g.b.len() > 2)
            .cloned()
            .map(DetCase::Grid),
    );
    let leaf_cap = cfg.max_n;
    run_cases("determinants", cases, progress, move |case| match case {
        DetCase::Hand => flat(
            "hand-checked 1x1 matrix",
            (|| {
                let t = Theta::new(2, 5, 2)?;
                let s = EndData::unprimed(vec![2], vec![1, 1])?;
                let fams = enumerate_end_set_families_with_cap(&s, 3)?;
                if fams.len() != 1 {
                    return Ok(Some(format!("expected one family, found {}", fams.len())));
                }
                let m = matrix_a(t, &fams[0], &s)?;
                let want = BigRational::new(BigInt::from(-1), BigInt::from(2));
                if m.dimension() != 1 || m.determinant() != want {
                    return Ok(Some(format!(
                        "theta=2/5 S=2|1,1: determinant {} instead of -1/2",
                        m.determinant()
                    )));
                }
                if !det_identity_check(t, &fams[0], &s)? {
                    return Ok(Some("theta=2/5 S=2|1,1: identity fails".into()));
                }
                Ok(None)
            })(),
        ),
        DetCase::Grid(inst) => {
            let GridInstance { theta, a, b } = inst;
            let ctx = format!("theta={theta} S={a:?}|{b:?}");
            flat(
                &ctx,
                (|| {
                    let s = EndData::unprimed(a.clone(), b.clone())?;
                    for fam in enumerate_end_set_families_with_cap(&s, leaf_cap)? {
                        if !det_identity_check(*theta, &fam, &s)? {
                            return Ok(Some(format!(
                                "{ctx}: det * degree != signed weight for {:?}",
                                fam.sets()
                            )));
                        }
                    }
                    Ok(None)
                })(),
            )
        }
    })
}

enum IndexCase {
    Grid(GridInstance),
    Control,
}

fn suite_index_identity(
    cfg: &VerifyConfig,
    grid: &[GridInstance],
    progress: &AtomicUsize,
) -> SuiteOutcome {
    let mut cases = vec![IndexCase::Control];
    cases.extend(grid.iter().cloned().map(IndexCase::Grid));
    let leaf_cap = cfg.max_n;
    run_cases("index-identity", cases, progress, move |case| match case {
        IndexCase::Control => flat(
            "two-component control",
            (|| {
                let t = Theta::new(2, 5, 2)?;
                let s = EndData::unprimed(vec![1, 1], vec![1, 1])?;
                let trees = enumerate_trees_with_cap(&s, false, 4)?;
                if trees.is_empty() {
                    return Ok(Some("control enumerated no trees".into()));
                }
                for tree in trees {
                    if vertex_index_identity(t, &tree)? {
                        return Ok(Some(
                            "theta=2/5 S=1,1|1,1: identity holds on a tree but must not".into(),
                        ));
                    }
                }
                Ok(None)
            })(),
        ),
        IndexCase::Grid(inst) => {
            let GridInstance { theta, a, b } = inst;
            let ctx = format!("theta={theta} S={a:?}|{b:?}");
            flat(
                &ctx,
                (|| {
                    let s = EndData::unprimed(a.clone(), b.clone())?;
                    for tree in enumerate_trees_with_cap(&s, false, leaf_cap)? {
                        if !vertex_index_identity(*theta, &tree)? {
                            return Ok(Some(format!("{ctx}: identity fails on an enumerated tree")));
                        }
                    }
                    Ok(None)
                })(),
            )
        }
    })
}

fn suite_hyperbolic(cfg: &VerifyConfig, progress: &AtomicUsize) -> SuiteOutcome {
    let kinds = [
        OrbitKind::positive_hyperbolic(2).expect("even rotation"),
        OrbitKind::negative_hyperbolic(1).expect("odd rotation"),
    ];
    let mut cases = Vec::new();
    for total in 1..=cfg.max_m.min(7) {
        for plus in partitions_of(total) {
            for minus in partitions_of(total) {
                for &kind in &kinds {
                    cases.push((kind, plus.clone(), minus.clone()));
                }
            }
        }
    }
    run_cases("hyperbolic", cases, progress, |(kind, plus, minus)| {
        flat(
            &format!("{kind:?} {plus:?}|{minus:?}"),
            (|| {
                let fast = c_hyperbolic(*kind, plus, minus)?;
                let slow = c_hyperbolic_brute(*kind, plus, minus)?;
                Ok((fast != slow).then(|| {
                    format!("{kind:?} {plus:?}|{minus:?}: closed form {fast}, brute force {slow}")
                }))
            })(),
        )
    })
}

fn suite_bijection(
    cfg: &VerifyConfig,
    grid: &[GridInstance],
    progress: &AtomicUsize,
) -> SuiteOutcome {
    let pairs: BTreeSet<(Vec<u64>, Vec<u64>)> = grid
        .iter()
        .filter(|g| g.a.len() + g.b.len() > 2)
        .map(|g| (g.a.clone(), g.b.clone()))
        .collect();
    let leaf_cap = cfg.max_n;
    run_cases(
        "bijection",
        pairs.into_iter().collect(),
        progress,
        move |(a, b)| {
            let ctx = format!("S={a:?}|{b:?}");
            flat(
                &ctx,
                (|| {
                    let s = EndData::unprimed(a.clone(), b.clone())?;
                    let fams = enumerate_end_set_families_with_cap(&s, leaf_cap)?;
                    let images: BTreeSet<String> = fams
                        .iter()
                        .map(|fam| Ok(phi(fam, &s)?.canonical_key()))
                        .collect::<gluecoeff_core::Result<_>>()?;
                    if images.len() != fams.len() {
                        return Ok(Some(format!("{ctx}: family images collide")));
                    }
                    let admissible: BTreeSet<String> = enumerate_trees_with_cap(&s, true, leaf_cap)?
                        .into_iter()
                        .filter(is_admissible)
                        .map(|tree| tree.canonical_key())
                        .collect();
                    Ok((images != admissible).then(|| {
                        format!(
                            "{ctx}: {} family images, {} admissible trees",
                            images.len(),
                            admissible.len()
                        )
                    }))
                })(),
            )
        },
    )
}

/// Resolves suite names ("all" expands to every suite), then runs them in
/// canonical order and returns their outcomes in that order.
pub fn run_suites(
    selected: &[String],
    cfg: &VerifyConfig,
    progress: &AtomicUsize,
) -> Result<Vec<SuiteOutcome>> {
    let wanted: Vec<&'static str> = if selected.is_empty() || selected.iter().any(|n| n == "all") {
        SUITE_NAMES.to_vec()
    } else {
        for n in selected {
            if !SUITE_NAMES.contains(&n.as_str()) {
                bail!(
                    "unknown suite `{n}`; available: {}, or `all`",
                    SUITE_NAMES.join(", ")
                );
            }
        }
        SUITE_NAMES
            .iter()
            .copied()
            .filter(|s| selected.iter().any(|n| n == s))
            .collect()
    };
    let thetas = sweep_thetas(cfg)?;
    let needs_grid = wanted
        .iter()
        .any(|n| matches!(*n, "routes" | "determinants" | "index-identity" | "bijection"));
    let grid = if needs_grid {
        build_grid(cfg, &thetas)
    } else {
        Vec::new()
    };
    let mut out = Vec::new();
    for name in wanted {
        let outcome = match name {
            "coefficients" => suite_coefficients(cfg, &thetas, progress),
            "truncation" => suite_truncation(cfg, &thetas, progress),
            "routes" => suite_routes(cfg, &grid, progress),
            "reordering" => suite_reordering(cfg, &thetas, progress),
            "partitions" => suite_partitions(cfg, &thetas, progress),
            "order" => suite_order(cfg, &thetas, progress),
            "reduction" => suite_reduction(cfg, &thetas, progress),
            "determinants" => suite_determinants(cfg, &grid, progress),
            "index-identity" => suite_index_identity(cfg, &grid, progress),
            "hyperbolic" => suite_hyperbolic(cfg, progress),
            "bijection" => suite_bijection(cfg, &grid, progress),
            _ => unreachable!("suite names are validated above"),
        };
        out.push(outcome);
    }
    Ok(out)
}
