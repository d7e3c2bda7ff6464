//! Exact arithmetic in `(Z/mZ)*` and its quotients.
//!
//! Subgroups are stored by full element enumeration and quotients carry a
//! lookup table from residues to canonical coset representatives (the least
//! positive integer in the coset). All target moduli are small enough that
//! this is the simplest correct representation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, mul_mod};
use crate::error::{Error, Result};

/// A positive modulus `m >= 1`. `m = 1` is the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidModulus);
        }
        Ok(Modulus(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `phi(m)`, the order of `(Z/mZ)*`.
    pub fn totient(self) -> u64 {
        arith::totient(self.0)
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(m: u64) -> Result<Self> {
        Modulus::new(m)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `(Z/mZ)*`, stored reduced into `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitResidue {
    modulus: Modulus,
    value: u64,
}

impl UnitResidue {
    pub fn new(value: i128, modulus: Modulus) -> Result<Self> {
        let v = arith::reduce_signed(value, modulus.0);
        if gcd(v, modulus.0) != 1 {
            return Err(Error::NotAUnit {
                value,
                modulus: modulus.0,
            });
        }
        Ok(UnitResidue { modulus, value: v })
    }

    pub fn one(modulus: Modulus) -> Self {
        UnitResidue {
            modulus,
            value: 1 % modulus.0,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.value == 1 % self.modulus.0
    }

    pub fn mul(&self, other: &UnitResidue) -> UnitResidue {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        UnitResidue {
            modulus: self.modulus,
            value: mul_mod(self.value, other.value, self.modulus.0),
        }
    }

    pub fn inv(&self) -> UnitResidue {
        let v = arith::inv_mod(self.value, self.modulus.0).expect("units are invertible");
        UnitResidue {
            modulus: self.modulus,
            value: v,
        }
    }

    pub fn pow(&self, e: u64) -> UnitResidue {
        UnitResidue {
            modulus: self.modulus,
            value: arith::pow_mod(self.value, e, self.modulus.0),
        }
    }

    /// Image under `(Z/mZ)* -> (Z/dZ)*` for `d | m`.
    pub fn reduce_to(&self, d: Modulus) -> UnitResidue {
        assert_eq!(self.modulus.0 % d.0, 0, "{d} does not divide {}", self.modulus);
        UnitResidue {
            modulus: d,
            value: self.value % d.0,
        }
    }
}

impl fmt::Display for UnitResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// All units modulo `m` in ascending order. For `m = 1` this is the single
/// class `0`, which is the identity.
pub fn unit_group(m: Modulus) -> Vec<UnitResidue> {
    (0..m.0)
        .filter(|&v| gcd(v, m.0) == 1)
        .map(|value| UnitResidue { modulus: m, value })
        .collect()
}

/// Multiplicative order of a unit.
pub fn element_order(x: &UnitResidue) -> u64 {
    arith::order_dividing(x.value, x.modulus.0, x.modulus.totient())
}

/// Split `x mod m1*m2` into its components modulo coprime `m1` and `m2`.
pub fn crt_split(x: &UnitResidue, m1: Modulus, m2: Modulus) -> (UnitResidue, UnitResidue) {
    assert_eq!(gcd(m1.0, m2.0), 1);
    assert_eq!(m1.0 * m2.0, x.modulus.0);
    (x.reduce_to(m1), x.reduce_to(m2))
}

/// Inverse of [`crt_split`].
pub fn crt_combine(a: &UnitResidue, b: &UnitResidue) -> UnitResidue {
    let (m1, m2) = (a.modulus.0, b.modulus.0);
    assert_eq!(gcd(m1, m2), 1);
    let m = m1 * m2;
    // x = a + m1 * ((b - a) * m1^{-1} mod m2)
    let inv = arith::inv_mod(m1 % m2, m2).unwrap_or(0);
    let diff = arith::reduce_signed(b.value as i128 - a.value as i128, m2);
    let t = mul_mod(diff, inv, m2);
    UnitResidue {
        modulus: Modulus(m),
        value: (a.value + m1 * t) % m,
    }
}

/// A subgroup of `(Z/mZ)*`, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    modulus: Modulus,
    elements: Vec<u64>,
}

/// Membership bitmap over `[0, m)`.
fn bitmap(m: u64, elements: &[u64]) -> Vec<bool> {
    let mut bits = vec![false; m as usize];
    for &e in elements {
        bits[e as usize] = true;
    }
    bits
}

/// Extend the subgroup `h` (given as list plus bitmap) by the element `x`.
fn adjoin(m: u64, h: &mut Vec<u64>, bits: &mut [bool], x: u64) {
    if bits[x as usize] {
        return;
    }
    let base = h.clone();
    let mut power = x;
    while !bits[power as usize] {
        for &y in &base {
            let z = mul_mod(power, y, m);
            bits[z as usize] = true;
            h.push(z);
        }
        power = mul_mod(power, x, m);
    }
}

impl Subgroup {
    /// Validate and build a subgroup from an explicit element list.
    pub fn new(modulus: Modulus, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let m = modulus.0;
        let set: BTreeSet<u64> = elements.into_iter().map(|e| e % m).collect();
        let not_subgroup = |reason: String| Error::NotASubgroup {
            modulus: m,
            reason,
        };
        if !set.contains(&(1 % m)) {
            return Err(not_subgroup("missing identity".into()));
        }
        if let Some(&bad) = set.iter().find(|&&e| gcd(e, m) != 1) {
            return Err(not_subgroup(format!("{bad} is not a unit")));
        }
        let elements: Vec<u64> = set.into_iter().collect();
        // A finite subset containing 1 is a subgroup iff it equals the
        // subgroup it generates.
        let closure = Self::closure_of(modulus, &elements);
        if closure.len() != elements.len() {
            return Err(not_subgroup(format!(
                "generates a subgroup of order {} from {} elements",
                closure.len(),
                elements.len()
            )));
        }
        Ok(Subgroup { modulus, elements })
    }

    fn closure_of(modulus: Modulus, gens: &[u64]) -> Vec<u64> {
        let m = modulus.0;
        let one = 1 % m;
        let mut h = vec![one];
        let mut bits = bitmap(m, &h);
        for &g in gens {
            adjoin(m, &mut h, &mut bits, g % m);
        }
        h.sort_unstable();
        h
    }

    pub fn trivial(modulus: Modulus) -> Self {
        Subgroup {
            modulus,
            elements: vec![1 % modulus.0],
        }
    }

    pub fn full(modulus: Modulus) -> Self {
        Subgroup {
            modulus,
            elements: unit_group(modulus).iter().map(|u| u.value).collect(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.elements.binary_search(&(value % self.modulus.0)).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        assert_eq!(self.modulus, other.modulus);
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// Adjoin one more element.
    pub fn join_element(&self, x: u64) -> Subgroup {
        let m = self.modulus.0;
        let mut h = self.elements.clone();
        let mut bits = bitmap(m, &h);
        adjoin(m, &mut h, &mut bits, x % m);
        h.sort_unstable();
        Subgroup {
            modulus: self.modulus,
            elements: h,
        }
    }

    /// Preimage under `(Z/MZ)* -> (Z/mZ)*` where `m | M`.
    pub fn lift_to(&self, big: Modulus) -> Subgroup {
        assert_eq!(big.0 % self.modulus.0, 0, "{} does not divide {big}", self.modulus);
        let elements = unit_group(big)
            .into_iter()
            .filter(|u| self.contains(u.value % self.modulus.0))
            .map(|u| u.value)
            .collect();
        Subgroup {
            modulus: big,
            elements,
        }
    }

    /// Image under `(Z/mZ)* -> (Z/dZ)*` where `d | m`.
    pub fn reduce_to(&self, d: Modulus) -> Subgroup {
        assert_eq!(self.modulus.0 % d.0, 0);
        let set: BTreeSet<u64> = self.elements.iter().map(|e| e % d.0).collect();
        Subgroup {
            modulus: d,
            elements: set.into_iter().collect(),
        }
    }
}

/// Smallest subgroup containing `generators`.
pub fn subgroup_generated(modulus: Modulus, generators: &[UnitResidue]) -> Result<Subgroup> {
    for g in generators {
        if g.modulus != modulus || gcd(g.value, modulus.0) != 1 {
            return Err(Error::InvalidGenerator {
                value: g.value,
                modulus: modulus.0,
            });
        }
    }
    let gens: Vec<u64> = generators.iter().map(|g| g.value).collect();
    Ok(Subgroup {
        modulus,
        elements: Subgroup::closure_of(modulus, &gens),
    })
}

/// Same as [`subgroup_generated`] with raw integer generators.
pub fn subgroup_generated_by_values(modulus: Modulus, generators: &[u64]) -> Result<Subgroup> {
    let units = generators
        .iter()
        .map(|&g| {
            UnitResidue::new(g as i128, modulus).map_err(|_| Error::InvalidGenerator {
                value: g,
                modulus: modulus.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    subgroup_generated(modulus, &units)
}

/// Every subgroup of `(Z/mZ)*`, ordered by size and then elements.
pub fn all_subgroups(modulus: Modulus) -> Vec<Subgroup> {
    let units: Vec<u64> = unit_group(modulus).iter().map(|u| u.value).collect();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let start = Subgroup::trivial(modulus);
    seen.insert(start.elements.clone());
    let mut queue = vec![start];
    let mut out = Vec::new();
    while let Some(h) = queue.pop() {
        for &x in &units {
            if h.contains(x) {
                continue;
            }
            let bigger = h.join_element(x);
            if seen.insert(bigger.elements.clone()) {
                queue.push(bigger);
            }
        }
        out.push(h);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.elements.cmp(&b.elements)));
    out
}

/// An element of a quotient `(Z/mZ)*/W`, named by its canonical
/// (least positive) coset representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    #[serde(skip)]
    modulus: Modulus,
    rep: u64,
}

impl GroupElement {
    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

/// Build an element from a representative already known to be canonical.
pub(crate) fn group_element_unchecked(modulus: Modulus, rep: u64) -> GroupElement {
    GroupElement { modulus, rep }
}

const NO_CLASS: u32 = u32::MAX;

/// The quotient `(Z/mZ)*/W` with canonical coset representatives.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    modulus: Modulus,
    kernel: Subgroup,
    cosets: Vec<u64>,
    class_of: Vec<u32>,
}

impl PartialEq for QuotientGroup {
    fn eq(&self, other: &Self) -> bool {
        self.kernel == other.kernel
    }
}

impl Eq for QuotientGroup {}

/// Quotient of `(Z/mZ)*` by a verified subgroup.
pub fn quotient(kernel: &Subgroup) -> QuotientGroup {
    QuotientGroup::new(kernel.clone())
}

/// Quotient by an element list that is validated as a subgroup first.
pub fn quotient_by_elements(modulus: Modulus, kernel: &[u64]) -> Result<QuotientGroup> {
    Ok(QuotientGroup::new(Subgroup::new(modulus, kernel.iter().copied())?))
}

impl QuotientGroup {
    pub fn new(kernel: Subgroup) -> Self {
        let modulus = kernel.modulus;
        let m = modulus.0;
        let mut class_of = vec![NO_CLASS; m as usize];
        let mut cosets = Vec::new();
        for u in unit_group(modulus) {
            if class_of[u.value as usize] != NO_CLASS {
                continue;
            }
            let idx = cosets.len() as u32;
            cosets.push(u.value);
            for &w in &kernel.elements {
                class_of[mul_mod(u.value, w, m) as usize] = idx;
            }
        }
        QuotientGroup {
            modulus,
            kernel,
            cosets,
            class_of,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    /// Canonical coset representatives in ascending order.
    pub fn representatives(&self) -> &[u64] {
        &self.cosets
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.cosets
            .iter()
            .map(|&rep| GroupElement {
                modulus: self.modulus,
                rep,
            })
            .collect()
    }

    /// Canonical representative of the coset of `value`, if it is a unit.
    pub fn canon(&self, value: u64) -> Option<u64> {
        let c = self.class_of[(value % self.modulus.0) as usize];
        (c != NO_CLASS).then(|| self.cosets[c as usize])
    }

    /// Index of the coset of `value` within [`Self::representatives`].
    pub fn class_index(&self, value: u64) -> Option<usize> {
        let c = self.class_of[(value % self.modulus.0) as usize];
        (c != NO_CLASS).then_some(c as usize)
    }

    /// The quotient map applied to a unit of the same modulus.
    pub fn project(&self, u: &UnitResidue) -> GroupElement {
        assert_eq!(u.modulus, self.modulus, "mixed moduli");
        GroupElement {
            modulus: self.modulus,
            rep: self.canon(u.value).expect("units have a class"),
        }
    }

    /// The class of an integer, which must be coprime to `m`.
    pub fn element(&self, value: i128) -> Result<GroupElement> {
        let u = UnitResidue::new(value, self.modulus)?;
        Ok(self.project(&u))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.modulus == self.modulus && self.canon(g.rep) == Some(g.rep)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            modulus: self.modulus,
            rep: self.cosets[0],
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        g.rep == self.cosets[0]
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let v = mul_mod(a.rep, b.rep, self.modulus.0);
        GroupElement {
            modulus: self.modulus,
            rep: self.canon(v).expect("product of units"),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let v = arith::inv_mod(a.rep, self.modulus.0).expect("unit");
        GroupElement {
            modulus: self.modulus,
            rep: self.canon(v).expect("inverse of unit"),
        }
    }

    pub fn pow(&self, a: &GroupElement, e: u64) -> GroupElement {
        let v = arith::pow_mod(a.rep, e, self.modulus.0);
        GroupElement {
            modulus: self.modulus,
            rep: self.canon(v).expect("power of unit"),
        }
    }

    /// Order of `a` in the quotient.
    pub fn element_order(&self, a: &GroupElement) -> u64 {
        let mut n = 1;
        let mut cur = *a;
        while !self.is_identity(&cur) {
            cur = self.mul(&cur, a);
            n += 1;
        }
        n
    }

    /// Residues in the coset named by `g`, ascending.
    pub fn coset_members(&self, g: &GroupElement) -> Vec<u64> {
        let m = self.modulus.0;
        let mut out: Vec<u64> = self
            .kernel
            .elements
            .iter()
            .map(|&w| mul_mod(g.rep, w, m))
            .collect();
        out.sort_unstable();
        out
    }

    /// The cyclic subgroup generated by `g`, as sorted representatives.
    pub fn cyclic_subgroup(&self, g: &GroupElement) -> Vec<GroupElement> {
        let mut out = vec![self.identity()];
        let mut cur = *g;
        while !self.is_identity(&cur) {
            out.push(cur);
            cur = self.mul(&cur, g);
        }
        out.sort();
        out
    }

    /// Cosets of the subgroup `h` (given by its elements) in this group,
    /// each sorted, listed by ascending least representative.
    pub fn cosets_of(&self, h: &[GroupElement]) -> Vec<Vec<GroupElement>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in self.elements() {
            if seen.contains(&g) {
                continue;
            }
            let mut coset: Vec<GroupElement> = h.iter().map(|x| self.mul(&g, x)).collect();
            coset.sort();
            coset.dedup();
            seen.extend(coset.iter().copied());
            out.push(coset);
        }
        out
    }
}
