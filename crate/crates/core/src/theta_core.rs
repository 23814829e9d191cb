//! The guarded angle and the four arithmetic primitives built on it.
//!
//! Every formula in this crate consumes an angle θ only through `⌈mθ⌉` and
//! `⌊mθ⌋`. A reduced rational `p/q` is indistinguishable from an irrational
//! for those queries as long as `mθ` never lands on an integer, and since
//! `gcd(p,q) = 1` that happens exactly when `q | m`. [`Theta`] therefore
//! carries a `guard_bound` with `q > guard_bound`, and every evaluation
//! checks its multiplicity against the guard. Out-of-range queries are hard
//! errors, never coerced.

use crate::{Error, Result};

/// Exact rational stand-in for an irrational angle, certified for all
/// multiplicities up to `guard_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Theta {
    num: i64,
    den: i64,
    guard: u64,
}

impl std::fmt::Display for Theta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Theta {
    /// Builds `p/q` in lowest terms, certified for multiplicities `≤ guard`.
    ///
    /// Fails with [`Error::GuardViolation`] when the reduced denominator is
    /// not strictly larger than `guard`: such an angle hits an integer at
    /// some multiplicity in range.
    pub fn new(p: i64, q: i64, guard: u64) -> Result<Theta> {
        if q <= 0 {
            return Err(Error::InvalidInput(format!(
                "denominator must be positive, got {q}"
            )));
        }
        if guard == 0 {
            return Err(Error::InvalidInput("guard bound must be positive".into()));
        }
        let g = gcd(p, q).max(1);
        let (num, den) = (p / g, q / g);
        if (den as u64) <= guard {
            return Err(Error::GuardViolation {
                theta: format!("{num}/{den}"),
                m: guard,
                guard: den as u64 - 1,
            });
        }
        Ok(Theta { num, den, guard })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn guard_bound(&self) -> u64 {
        self.guard
    }

    /// `−θ`, certified for the same range. `⌈m(−θ)⌉ = −⌊mθ⌋`, which is how
    /// all "outgoing" quantities reduce to "incoming" ones.
    pub fn negate(&self) -> Theta {
        Theta {
            num: -self.num,
            den: self.den,
            guard: self.guard,
        }
    }

    fn check(&self, m: u64) -> Result<()> {
        if m == 0 || m > self.guard {
            return Err(Error::GuardViolation {
                theta: self.to_string(),
                m,
                guard: self.guard,
            });
        }
        Ok(())
    }

    /// Exact `⌈mθ⌉` for `1 ≤ m ≤ guard_bound`.
    pub fn ceil_mult(&self, m: u64) -> Result<i64> {
        self.check(m)?;
        let p = self.num as i128 * m as i128;
        let q = self.den as i128;
        Ok((p.div_euclid(q) + 1) as i64)
    }

    /// Exact `⌊mθ⌋` for `1 ≤ m ≤ guard_bound`.
    pub fn floor_mult(&self, m: u64) -> Result<i64> {
        self.check(m)?;
        let p = self.num as i128 * m as i128;
        let q = self.den as i128;
        Ok(p.div_euclid(q) as i64)
    }

    /// `⌈mθ⌉` for signed `m` with `1 ≤ |m| ≤ guard_bound`. Signed flows at
    /// paired vertices point either way, so both signs must stay exact.
    pub fn ceil_mult_signed(&self, m: i64) -> Result<i64> {
        self.check(m.unsigned_abs())?;
        let p = self.num as i128 * m as i128;
        let q = self.den as i128;
        Ok((p.div_euclid(q) + 1) as i64)
    }

    /// `⌊mθ⌋` for signed `m` with `1 ≤ |m| ≤ guard_bound`.
    pub fn floor_mult_signed(&self, m: i64) -> Result<i64> {
        self.check(m.unsigned_abs())?;
        let p = self.num as i128 * m as i128;
        let q = self.den as i128;
        Ok(p.div_euclid(q) as i64)
    }

    // div_euclid floors toward −∞, and mθ is never an integer in range,
    // so ceil = floor + 1 without a separate remainder branch.
}

/// `δ_θ(a,b) := b⌈aθ⌉ − a⌊bθ⌋`. Always ≥ 1 for guarded positive `a`, `b`.
pub fn delta(theta: Theta, a: u64, b: u64) -> Result<i64> {
    Ok(b as i64 * theta.ceil_mult(a)? - a as i64 * theta.floor_mult(b)?)
}

/// The end-multiplicity data `S = (a₁..a_k ; a'₁..a'_{k'} | b₁..b_l ; b'₁..b'_{l'})`.
///
/// Unprimed entries are free to reorder (the coefficient reorders them
/// itself); primed entries mark ends pinned by the gluing construction.
/// Construction enforces the sum condition `Σa + Σa' = Σb + Σb'` and
/// positivity of every entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndData {
    a: Vec<u64>,
    a_prime: Vec<u64>,
    b: Vec<u64>,
    b_prime: Vec<u64>,
}

impl EndData {
    pub fn new(a: Vec<u64>, a_prime: Vec<u64>, b: Vec<u64>, b_prime: Vec<u64>) -> Result<EndData> {
        for &x in a.iter().chain(&a_prime).chain(&b).chain(&b_prime) {
            if x == 0 {
                return Err(Error::InvalidInput(
                    "multiplicities must be positive".into(),
                ));
            }
        }
        let plus: u64 = a.iter().chain(&a_prime).sum();
        let minus: u64 = b.iter().chain(&b_prime).sum();
        if plus != minus {
            return Err(Error::SumMismatch { plus, minus });
        }
        Ok(EndData {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// Prime-free data `(a | b)`.
    pub fn unprimed(a: Vec<u64>, b: Vec<u64>) -> Result<EndData> {
        EndData::new(a, vec![], b, vec![])
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn a_prime(&self) -> &[u64] {
        &self.a_prime
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn b_prime(&self) -> &[u64] {
        &self.b_prime
    }

    /// Total multiplicity `M` of either side.
    pub fn total(&self) -> u64 {
        self.a.iter().chain(&self.a_prime).sum()
    }

    /// All positive-side entries, unprimed first.
    pub fn plus_side(&self) -> impl Iterator<Item = u64> + '_ {
        self.a.iter().chain(&self.a_prime).copied()
    }

    /// All negative-side entries, unprimed first.
    pub fn minus_side(&self) -> impl Iterator<Item = u64> + '_ {
        self.b.iter().chain(&self.b_prime).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.a_prime.is_empty() && self.b.is_empty() && self.b_prime.is_empty()
    }
}

/// `κ_θ(S) = Σ⌈a_iθ⌉ + Σ⌈a'_iθ⌉ − Σ⌊b_jθ⌋ − Σ⌊b'_jθ⌋`.
///
/// Under the sum condition this is at least 1: it counts the components any
/// index-zero cover with end data `S` must break into.
pub fn kappa(theta: Theta, s: &EndData) -> Result<u64> {
    let mut acc: i64 = 0;
    for m in s.plus_side() {
        acc += theta.ceil_mult(m)?;
    }
    for m in s.minus_side() {
        acc -= theta.floor_mult(m)?;
    }
    debug_assert!(acc >= 1 || s.is_empty());
    Ok(acc as u64)
}

/// `ind_θ(a | b) = 2(Σ⌈a_iθ⌉ − Σ⌊b_jθ⌋ − 1)`; for prime-free data this is
/// `2·κ_θ − 2`.
pub fn ind_theta(theta: Theta, a: &[u64], b: &[u64]) -> Result<i64> {
    let plus: u64 = a.iter().sum();
    let minus: u64 = b.iter().sum();
    if plus != minus {
        return Err(Error::SumMismatch { plus, minus });
    }
    let mut acc: i64 = -1;
    for &m in a {
        acc += theta.ceil_mult(m)?;
    }
    for &m in b {
        acc -= theta.floor_mult(m)?;
    }
    Ok(2 * acc)
}
