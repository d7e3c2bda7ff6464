//! Truncated arithmetic in `∏_q Z_q*` and the mapping torus over `C_p`.
//!
//! A [`TruncatedProfiniteUnit`] keeps one residue modulo `q^{k_q}` for each
//! prime in its [`PrecisionProfile`]. The fiber of `Y_Q → X_Q` over `C_p`
//! is `p^Z \ (H × R_+*)` with `H = ∏_{q≠p} Z_q*`; points are normalised to
//! the fundamental domain `1 <= t < p`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, gcd, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Per-prime truncation exponents `q ↦ k_q >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PrecisionProfile {
    entries: BTreeMap<u64, u32>,
}

impl PrecisionProfile {
    pub fn new(entries: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let entries: BTreeMap<u64, u32> = entries.into_iter().collect();
        for (&q, &k) in &entries {
            if !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
            if k == 0 {
                return Err(Error::InvalidPrecision { prime: q });
            }
            if q.checked_pow(k).is_none() {
                return Err(Error::PrecisionOverflow { prime: q, exponent: k });
            }
        }
        Ok(PrecisionProfile { entries })
    }

    /// The same exponent `k` at every prime in `primes`.
    pub fn uniform(primes: impl IntoIterator<Item = u64>, k: u32) -> Result<Self> {
        Self::new(primes.into_iter().map(|q| (q, k)))
    }

    pub fn single(q: u64, k: u32) -> Result<Self> {
        Self::new([(q, k)])
    }

    pub fn entries(&self) -> &BTreeMap<u64, u32> {
        &self.entries
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn contains(&self, q: u64) -> bool {
        self.entries.contains_key(&q)
    }

    /// `q^{k_q}`.
    pub fn modulus(&self, q: u64) -> u64 {
        q.pow(self.entries[&q])
    }

    /// Whether `coarser` keeps a subset of primes at no higher precision.
    pub fn refines(&self, coarser: &PrecisionProfile) -> bool {
        coarser
            .entries
            .iter()
            .all(|(q, k)| self.entries.get(q).is_some_and(|mine| mine >= k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TruncatedProfiniteUnit {
    profile: PrecisionProfile,
    residues: BTreeMap<u64, u64>,
}

impl TruncatedProfiniteUnit {
    pub fn new(profile: PrecisionProfile, residues: BTreeMap<u64, u64>) -> Result<Self> {
        if residues.keys().ne(profile.entries.keys()) {
            return Err(Error::ProfileMismatch);
        }
        let residues = residues
            .into_iter()
            .map(|(q, r)| {
                let m = profile.modulus(q);
                let r = r % m;
                if gcd(r, q) != 1 {
                    return Err(Error::NotAUnit {
                        value: r as i128,
                        modulus: m,
                    });
                }
                Ok((q, r))
            })
            .collect::<Result<_>>()?;
        Ok(TruncatedProfiniteUnit { profile, residues })
    }

    pub fn identity(profile: &PrecisionProfile) -> Self {
        TruncatedProfiniteUnit {
            residues: profile.primes().map(|q| (q, 1 % profile.modulus(q))).collect(),
            profile: profile.clone(),
        }
    }

    /// Image of an integer prime to every supported `q`.
    pub fn from_integer(n: i128, profile: &PrecisionProfile) -> Result<Self> {
        let residues = profile
            .primes()
            .map(|q| {
                let m = profile.modulus(q);
                let r = arith::reduce_signed(n, m);
                if gcd(r, q) != 1 {
                    return Err(Error::NotAUnit { value: n, modulus: m });
                }
                Ok((q, r))
            })
            .collect::<Result<_>>()?;
        Ok(TruncatedProfiniteUnit {
            profile: profile.clone(),
            residues,
        })
    }

    pub fn profile(&self) -> &PrecisionProfile {
        &self.profile
    }

    pub fn residues(&self) -> &BTreeMap<u64, u64> {
        &self.residues
    }

    pub fn residue(&self, q: u64) -> Option<u64> {
        self.residues.get(&q).copied()
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|(&q, &r)| r == 1 % self.profile.modulus(q))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.profile != other.profile {
            return Err(Error::ProfileMismatch);
        }
        Ok(self.zip_with(other, mul_mod))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64, u64) -> u64) -> Self {
        TruncatedProfiniteUnit {
            residues: self
                .residues
                .iter()
                .map(|(&q, &a)| (q, f(a, other.residues[&q], self.profile.modulus(q))))
                .collect(),
            profile: self.profile.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        TruncatedProfiniteUnit {
            residues: self
                .residues
                .iter()
                .map(|(&q, &a)| (q, arith::inv_mod(a, self.profile.modulus(q)).expect("unit")))
                .collect(),
            profile: self.profile.clone(),
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let e = n.unsigned_abs();
        TruncatedProfiniteUnit {
            residues: base
                .residues
                .iter()
                .map(|(&q, &a)| (q, pow_mod(a, e, self.profile.modulus(q))))
                .collect(),
            profile: self.profile.clone(),
        }
    }

    /// Reduce to a coarser profile (ring map `Z/q^{k+1} → Z/q^k`).
    pub fn truncate(&self, coarser: &PrecisionProfile) -> Result<Self> {
        if !self.profile.refines(coarser) {
            return Err(Error::ProfileMismatch);
        }
        Ok(TruncatedProfiniteUnit {
            residues: coarser
                .primes()
                .map(|q| (q, self.residues[&q] % coarser.modulus(q)))
                .collect(),
            profile: coarser.clone(),
        })
    }
}

/// The diagonal image of `p` in `∏_{q ∈ profile} (Z/q^{k_q})*`, i.e. the
/// Frobenius of `p` in the abelianised fundamental group of `Spec Z_(p)`.
pub fn diagonal_embed(p: u64, profile: &PrecisionProfile) -> Result<TruncatedProfiniteUnit> {
    if profile.contains(p) {
        return Err(Error::SelfLinkingUndefined(p));
    }
    TruncatedProfiniteUnit::from_integer(p as i128, profile)
}

/// `lcm` of the component orders.
pub fn multiplicative_order(u: &TruncatedProfiniteUnit) -> u64 {
    u.residues.iter().fold(1u64, |acc, (&q, &r)| {
        let k = u.profile.entries[&q];
        let m = u.profile.modulus(q);
        let phi = q.pow(k - 1) * (q - 1);
        arith::lcm(acc, arith::order_dividing(r, m, phi))
    })
}

/// Evidence that `n ↦ p^n` is injective into `(Z/q^k)*` up to the order of
/// `p`: the powers `p^n`, `0 <= n < horizon`, are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkingWitness {
    pub p: u64,
    pub q: u64,
    pub precision: u32,
    pub residue: u64,
    pub order: u64,
    pub witness_horizon: u64,
    pub distinct: bool,
}

pub fn injectivity_witness(p: u64, q: u64, k: u32, bound: u64) -> Result<LinkingWitness> {
    if p == q {
        return Err(Error::SelfLinkingUndefined(p));
    }
    let profile = PrecisionProfile::single(q, k)?;
    let u = TruncatedProfiniteUnit::from_integer(p as i128, &profile)?;
    let order = multiplicative_order(&u);
    let horizon = bound.min(order);
    let m = profile.modulus(q);
    let residue = u.residues[&q];
    let mut seen = HashSet::new();
    let mut cur = 1 % m;
    let mut distinct = true;
    for _ in 0..horizon {
        distinct &= seen.insert(cur);
        cur = mul_mod(cur, residue, m);
    }
    Ok(LinkingWitness {
        p,
        q,
        precision: k,
        residue,
        order,
        witness_horizon: horizon,
        distinct,
    })
}

/// CSV matrix with rows `p` and columns `q`; each off-diagonal cell is
/// `residue:order` for `p mod q^k`, diagonal cells are `-`.
pub fn linking_table_csv(primes: &[u64], k: u32) -> Result<String> {
    let mut out = String::from("p\\q");
    for q in primes {
        write!(out, ",{q}").unwrap();
    }
    out.push('\n');
    for &p in primes {
        write!(out, "{p}").unwrap();
        for &q in primes {
            if p == q {
                out.push_str(",-");
            } else {
                let w = injectivity_witness(p, q, k, u64::MAX)?;
                write!(out, ",{}:{}", w.residue, w.order).unwrap();
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// A point of `p^Z \ (H × R_+*)` in canonical form `(h, t)`, `1 <= t < p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MappingTorusPoint {
    pub excluded_prime: u64,
    pub h: TruncatedProfiniteUnit,
    #[serde(with = "rational")]
    pub t: Rational,
}

impl MappingTorusPoint {
    pub fn new(p: u64, h: TruncatedProfiniteUnit, t: Rational) -> Result<Self> {
        if h.profile.contains(p) {
            return Err(Error::SelfLinkingUndefined(p));
        }
        if t < Rational::one() || t >= rational::from_u64(p) {
            return Err(Error::InvalidScale);
        }
        Ok(MappingTorusPoint {
            excluded_prime: p,
            h,
            t,
        })
    }
}

/// Output of [`reduce_to_fundamental_domain`]: the canonical point and the
/// exponent `n` with `p^n <= λ < p^{n+1}` that was divided out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub point: MappingTorusPoint,
    pub shift: i64,
}

/// Unique `n` with `p^n <= λ < p^{n+1}`.
pub fn floor_log(p: u64, lambda: &Rational) -> i64 {
    let pr = rational::from_u64(p);
    let mut n = 0i64;
    let mut lo = Rational::one();
    while &lo > lambda {
        lo /= &pr;
        n -= 1;
    }
    loop {
        let hi = &lo * &pr;
        if &hi > lambda {
            break;
        }
        lo = hi;
        n += 1;
    }
    n
}

/// Multiply `(h, λ)` by `p^{-n}` so that `t = λ/p^n ∈ [1, p)`; the group
/// coordinate becomes `h·(diag p)^{-n}`.
pub fn reduce_to_fundamental_domain(
    p: u64,
    h: &TruncatedProfiniteUnit,
    lambda: &Rational,
) -> Result<Reduction> {
    if !lambda.is_positive() || lambda.is_zero() {
        return Err(Error::InvalidScale);
    }
    let diag = diagonal_embed(p, h.profile())?;
    let n = floor_log(p, lambda);
    let t = lambda * rational::prime_power(p, -n);
    let h2 = h.mul(&diag.pow(-n))?;
    Ok(Reduction {
        point: MappingTorusPoint::new(p, h2, t)?,
        shift: n,
    })
}

/// One loop around `C_p`: the group coordinate is multiplied by `diag p`.
pub fn monodromy_action(pt: &MappingTorusPoint) -> MappingTorusPoint {
    let diag = diagonal_embed(pt.excluded_prime, pt.h.profile()).expect("profile excludes p");
    MappingTorusPoint {
        excluded_prime: pt.excluded_prime,
        h: pt.h.mul(&diag).expect("same profile"),
        t: pt.t.clone(),
    }
}

/// Smallest number of loops returning `pt` to itself.
pub fn monodromy_period(pt: &MappingTorusPoint) -> u64 {
    let mut n = 1;
    let mut cur = monodromy_action(pt);
    while &cur != pt {
        cur = monodromy_action(&cur);
        n += 1;
    }
    n
}
