//! Finite tables of Bruhat–Schwartz functions on products of `Q_p`.
//!
//! A local function at `p` is modelled on a window `(j, k)`: it vanishes off
//! `p^{-j} Z_p` and is constant on cosets of `p^k Z_p`, so it is a table of
//! `p^{j+k}` values. Cell `a` stands for the coset `p^{-j} a + p^k Z_p`.
//! Functions on several places are stored expanded over the product grid,
//! places ascending, last place varying fastest. The archimedean factor is a
//! symbolic tag and is never evaluated.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, mul_mod};
use crate::error::{Error, Result};
use crate::place::PlaceSet;
use crate::rational::{self, Rational};

pub const DEFAULT_ARCHIMEDEAN_MARKER: &str = "phi_inf";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalWindow {
    pub prime: u64,
    pub outer: u32,
    pub inner: u32,
}

impl LocalWindow {
    pub fn new(prime: u64, outer: u32, inner: u32) -> Result<Self> {
        if !arith::is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        let w = LocalWindow { prime, outer, inner };
        w.checked_size()
            .ok_or_else(|| Error::InvalidTable(format!("window ({outer},{inner}) at {prime} too large")))?;
        Ok(w)
    }

    /// The window `(0, 0)`: one cell, the coset `Z_p` itself.
    pub fn integers(prime: u64) -> Self {
        LocalWindow { prime, outer: 0, inner: 0 }
    }

    fn checked_size(&self) -> Option<u64> {
        arith::checked_pow(self.prime, self.outer + self.inner)
    }

    /// Number of cells, `p^{j+k}`.
    pub fn size(&self) -> u64 {
        self.checked_size().expect("validated window")
    }

    /// Whether cell `a` lies inside `Z_p`.
    pub fn cell_in_integers(&self, a: u64) -> bool {
        a % self.prime.pow(self.outer) == 0
    }
}

/// A function on one `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalBSFunction {
    window: LocalWindow,
    values: Vec<Rational>,
}

impl LocalBSFunction {
    pub fn new(window: LocalWindow, values: Vec<Rational>) -> Result<Self> {
        if values.len() as u64 != window.size() {
            return Err(Error::InvalidTable(format!(
                "window at {} has {} cells, got {} values",
                window.prime,
                window.size(),
                values.len()
            )));
        }
        Ok(LocalBSFunction { window, values })
    }

    /// `1_{Z_p}`.
    pub fn indicator_of_integers(p: u64) -> Self {
        LocalBSFunction {
            window: LocalWindow::integers(p),
            values: vec![Rational::one()],
        }
    }

    /// Indicator of the listed cells of `window`.
    pub fn indicator(window: LocalWindow, cells: &[u64]) -> Result<Self> {
        let mut values = vec![Rational::zero(); window.size() as usize];
        for &a in cells {
            let slot = values
                .get_mut(a as usize)
                .ok_or_else(|| Error::InvalidTable(format!("cell {a} outside window")))?;
            *slot = Rational::one();
        }
        Ok(LocalBSFunction { window, values })
    }

    pub fn window(&self) -> LocalWindow {
        self.window
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// Upper bounds on table shapes accepted from external input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridLimits {
    pub max_outer: u32,
    pub max_inner: u32,
    pub max_places: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        GridLimits {
            max_outer: 4,
            max_inner: 4,
            max_places: 3,
        }
    }
}

impl GridLimits {
    pub fn check(&self, f: &ProductBSFunction) -> Result<()> {
        if f.windows.len() > self.max_places {
            return Err(Error::InvalidTable(format!(
                "{} places exceeds limit {}",
                f.windows.len(),
                self.max_places
            )));
        }
        for w in &f.windows {
            if w.outer > self.max_outer || w.inner > self.max_inner {
                return Err(Error::InvalidTable(format!(
                    "window ({},{}) at {} exceeds limits ({},{})",
                    w.outer, w.inner, w.prime, self.max_outer, self.max_inner
                )));
            }
        }
        Ok(())
    }
}

/// A finite linear combination of pure tensors, expanded over the product
/// grid of its finite places.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBSFunction {
    windows: Vec<LocalWindow>,
    values: Vec<Rational>,
    archimedean_marker: String,
}

#[derive(Serialize, Deserialize)]
struct ProductJson {
    windows: Vec<LocalWindow>,
    values: Vec<String>,
    #[serde(default = "default_marker")]
    archimedean_marker: String,
}

fn default_marker() -> String {
    DEFAULT_ARCHIMEDEAN_MARKER.to_string()
}

impl ProductBSFunction {
    pub fn new(windows: Vec<LocalWindow>, values: Vec<Rational>) -> Result<Self> {
        Self::with_marker(windows, values, DEFAULT_ARCHIMEDEAN_MARKER)
    }

    pub fn with_marker(windows: Vec<LocalWindow>, values: Vec<Rational>, marker: &str) -> Result<Self> {
        if windows.windows(2).any(|w| w[0].prime >= w[1].prime) {
            return Err(Error::InvalidTable("places must be distinct and ascending".into()));
        }
        let mut cells: u64 = 1;
        for w in &windows {
            LocalWindow::new(w.prime, w.outer, w.inner)?;
            cells = cells
                .checked_mul(w.size())
                .filter(|&c| c <= 1 << 24)
                .ok_or_else(|| Error::InvalidTable("product grid too large".into()))?;
        }
        if values.len() as u64 != cells {
            return Err(Error::InvalidTable(format!("grid has {cells} cells, got {} values", values.len())));
        }
        Ok(ProductBSFunction {
            windows,
            values,
            archimedean_marker: marker.to_string(),
        })
    }

    /// A function with no finite places: a constant times the marker.
    pub fn scalar(c: Rational) -> Self {
        ProductBSFunction {
            windows: Vec::new(),
            values: vec![c],
            archimedean_marker: default_marker(),
        }
    }

    pub fn pure_tensor(factors: &[LocalBSFunction]) -> Result<Self> {
        let mut sorted: Vec<&LocalBSFunction> = factors.iter().collect();
        sorted.sort_by_key(|f| f.window.prime);
        let windows: Vec<LocalWindow> = sorted.iter().map(|f| f.window).collect();
        let mut values = vec![Rational::one()];
        for f in &sorted {
            values = values
                .iter()
                .flat_map(|a| f.values.iter().map(move |b| a * b))
                .collect();
        }
        Self::new(windows, values)
    }

    /// Build a table by evaluating `cell` on every multi-index.
    pub fn from_fn(windows: Vec<LocalWindow>, mut cell: impl FnMut(&[u64]) -> Rational) -> Result<Self> {
        let shape = ProductBSFunction::new(windows.clone(), vec![Rational::zero(); grid_len(&windows)?])?;
        let values = (0..shape.values.len()).map(|i| cell(&shape.decode(i))).collect();
        Self::new(windows, values)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let raw: ProductJson = serde_json::from_str(json).map_err(|e| Error::Parse(format!("table JSON: {e}")))?;
        let values = raw.values.iter().map(|s| rational::parse(s)).collect::<Result<_>>()?;
        Self::with_marker(raw.windows, values, &raw.archimedean_marker)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ProductJson {
            windows: self.windows.clone(),
            values: self.values.iter().map(rational::format).collect(),
            archimedean_marker: self.archimedean_marker.clone(),
        })
        .expect("serializable")
    }

    pub fn windows(&self) -> &[LocalWindow] {
        &self.windows
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn archimedean_marker(&self) -> &str {
        &self.archimedean_marker
    }

    pub fn places(&self) -> Vec<u64> {
        self.windows.iter().map(|w| w.prime).collect()
    }

    pub fn window_at(&self, v: u64) -> Option<LocalWindow> {
        self.windows.iter().copied().find(|w| w.prime == v)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    fn place_index(&self, v: u64) -> Result<usize> {
        self.windows
            .iter()
            .position(|w| w.prime == v)
            .ok_or(Error::PlaceNotPresent(v))
    }

    fn decode(&self, mut flat: usize) -> Vec<u64> {
        let mut idx = vec![0u64; self.windows.len()];
        for (slot, w) in idx.iter_mut().zip(&self.windows).rev() {
            let n = w.size() as usize;
            *slot = (flat % n) as u64;
            flat /= n;
        }
        idx
    }

    fn encode(&self, idx: &[u64]) -> usize {
        idx.iter()
            .zip(&self.windows)
            .fold(0usize, |acc, (&a, w)| acc * w.size() as usize + a as usize)
    }

    pub fn value_at(&self, idx: &[u64]) -> &Rational {
        &self.values[self.encode(idx)]
    }

    /// Lemma-style test at `v`: zero off `Z_v`, and constant across the
    /// `v`-cells inside `Z_v`.
    pub fn is_factorable_at(&self, v: u64) -> Result<bool> {
        let i = self.place_index(v)?;
        let w = self.windows[i];
        Ok((0..self.values.len()).all(|flat| {
            let mut idx = self.decode(flat);
            let value = &self.values[flat];
            if !w.cell_in_integers(idx[i]) {
                return value.is_zero();
            }
            idx[i] = 0;
            value == self.value_at(&idx)
        }))
    }

    /// `g(y) = f(0_v, y)`, defined when `f = 1_{Z_v} ⊗ g`.
    pub fn factor_out(&self, v: u64) -> Result<Self> {
        if !self.is_factorable_at(v)? {
            return Err(Error::NotFactorable(v));
        }
        let i = self.place_index(v)?;
        let mut windows = self.windows.clone();
        windows.remove(i);
        let values = (0..self.values.len())
            .filter(|&flat| self.decode(flat)[i] == 0)
            .map(|flat| self.values[flat].clone())
            .collect();
        Self::with_marker(windows, values, &self.archimedean_marker)
    }

    /// `1_{Z_v} ⊗ self`.
    pub fn extend(&self, v: u64) -> Result<Self> {
        self.extend_with_window(LocalWindow::new(v, 0, 0)?)
    }

    /// `1_{Z_v} ⊗ self`, tabulated on a chosen window at `v`.
    pub fn extend_with_window(&self, w: LocalWindow) -> Result<Self> {
        if self.place_index(w.prime).is_ok() {
            return Err(Error::PlaceAlreadyPresent(w.prime));
        }
        let pos = self.windows.partition_point(|x| x.prime < w.prime);
        let mut windows = self.windows.clone();
        windows.insert(pos, w);
        let marker = self.archimedean_marker.clone();
        let mut out = Self::from_fn(windows, |idx| {
            if !w.cell_in_integers(idx[pos]) {
                return Rational::zero();
            }
            let mut rest = idx.to_vec();
            rest.remove(pos);
            self.value_at(&rest).clone()
        })?;
        out.archimedean_marker = marker;
        Ok(out)
    }

    /// The same function on a finer window `(outer, inner)` at `v`.
    pub fn refine(&self, v: u64, outer: u32, inner: u32) -> Result<Self> {
        let i = self.place_index(v)?;
        let old = self.windows[i];
        if outer < old.outer || inner < old.inner {
            return Err(Error::InvalidTable(format!("cannot coarsen window at {v}")));
        }
        let new = LocalWindow::new(v, outer, inner)?;
        let step = v.pow(outer - old.outer);
        let old_size = old.size();
        let mut windows = self.windows.clone();
        windows[i] = new;
        let mut out = Self::from_fn(windows, |idx| {
            if idx[i] % step != 0 {
                return Rational::zero();
            }
            let mut o = idx.to_vec();
            o[i] = (idx[i] / step) % old_size;
            self.value_at(&o).clone()
        })?;
        out.archimedean_marker = self.archimedean_marker.clone();
        Ok(out)
    }

    /// Bring two functions onto one grid: missing places are tensored with
    /// `1_{Z_v}`, then windows are refined to the common maximum.
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        let mut a = self.clone();
        let mut b = other.clone();
        for v in other.places() {
            if a.place_index(v).is_err() {
                a = a.extend(v)?;
            }
        }
        for v in self.places() {
            if b.place_index(v).is_err() {
                b = b.extend(v)?;
            }
        }
        for v in a.places() {
            let (wa, wb) = (a.window_at(v).unwrap(), b.window_at(v).unwrap());
            let (j, k) = (wa.outer.max(wb.outer), wa.inner.max(wb.inner));
            a = a.refine(v, j, k)?;
            b = b.refine(v, j, k)?;
        }
        Ok((a, b))
    }

    /// Equality as functions, irrespective of the grids chosen.
    pub fn equivalent(&self, other: &Self) -> bool {
        match self.align(other) {
            Ok((a, b)) => a.values == b.values && a.archimedean_marker == b.archimedean_marker,
            Err(_) => false,
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&Rational, &Rational) -> Rational, marker: String) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| op(x, y)).collect();
        Self::with_marker(a.windows, values, &marker)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.archimedean_marker != other.archimedean_marker {
            return Err(Error::InvalidTable("archimedean factors differ".into()));
        }
        self.zip_with(other, |x, y| x + y, self.archimedean_marker.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ProductBSFunction {
            windows: self.windows.clone(),
            values: self.values.iter().map(|x| x * c).collect(),
            archimedean_marker: self.archimedean_marker.clone(),
        }
    }

    /// Pointwise product; the archimedean tags multiply symbolically.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let marker = if self.archimedean_marker == other.archimedean_marker {
            self.archimedean_marker.clone()
        } else {
            format!("{}*{}", self.archimedean_marker, other.archimedean_marker)
        };
        self.zip_with(other, |x, y| x * y, marker)
    }

    /// `x ↦ f(q^{-1} x)` at every finite place. Primes of `q` missing from
    /// the table are first tensored in as `1_{Z_v}`.
    pub fn twist(&self, q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidTable("twist by zero".into()));
        }
        let mut f = self.clone();
        for p in prime_support(q)? {
            if f.place_index(p).is_err() {
                f = f.extend(p)?;
            }
        }
        for v in f.places() {
            let (n, u) = rational::split_valuation(q, v);
            let w = f.window_at(v).unwrap();
            let outer = w.outer.max(n.max(0) as u32);
            let inner = w.inner.max((-n).max(0) as u32);
            f = f.refine(v, outer, inner)?;
            let i = f.place_index(v)?;
            let modulus = f.windows[i].size();
            let u_inv = arith::inv_mod(rational::unit_residue(&u, modulus), modulus).expect("unit");
            let new_window = LocalWindow::new(v, (outer as i64 - n) as u32, (inner as i64 + n) as u32)?;
            let mut windows = f.windows.clone();
            windows[i] = new_window;
            let src = f.clone();
            f = Self::from_fn(windows, |idx| {
                let mut o = idx.to_vec();
                o[i] = mul_mod(u_inv, idx[i], modulus);
                src.value_at(&o).clone()
            })?;
            f.archimedean_marker = src.archimedean_marker.clone();
        }
        Ok(f)
    }
}

fn grid_len(windows: &[LocalWindow]) -> Result<usize> {
    windows
        .iter()
        .try_fold(1u64, |acc, w| acc.checked_mul(w.checked_size()?))
        .filter(|&c| c <= 1 << 24)
        .map(|c| c as usize)
        .ok_or_else(|| Error::InvalidTable("product grid too large".into()))
}

/// Primes dividing numerator or denominator of `q`, for `q` with small
/// prime factors.
fn prime_support(q: &Rational) -> Result<Vec<u64>> {
    let mut out = BTreeSet::new();
    for part in [q.numer().abs(), q.denom().clone()] {
        let n: u64 = part
            .try_into()
            .map_err(|_| Error::InvalidTable(format!("twist {q} too large")))?;
        out.extend(arith::prime_divisors(n));
    }
    Ok(out.into_iter().collect())
}

/// Whether `q` is `±∏ p^n` with every `p` a finite prime of `S`.
pub fn is_s_unit(q: &Rational, places: &PlaceSet) -> bool {
    if q.is_zero() {
        return false;
    }
    [q.numer().abs(), q.denom().clone()].into_iter().all(|mut n| {
        for &p in places.finite_primes() {
            let pb = BigInt::from(p);
            while (&n % &pb).is_zero() {
                n /= &pb;
            }
        }
        n.is_one()
    })
}

/// Membership of `f` in `O(T^c)`: factorable at every place of `f` not in `T`.
pub fn is_member_outside(f: &ProductBSFunction, t: &BTreeSet<u64>) -> bool {
    f.places()
        .into_iter()
        .filter(|v| !t.contains(v))
        .all(|v| f.is_factorable_at(v).expect("place of f"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlueReport {
    pub intersection: BTreeSet<u64>,
    pub memberships: Vec<bool>,
    pub premise: bool,
    pub member_at_intersection: bool,
    /// `premise ⇒ member_at_intersection`.
    pub consistent: bool,
}

/// Evaluate both sides of the gluing statement for `S = ∩ S_j`. An empty
/// list has intersection equal to the places of `f`.
pub fn sheaf_glue_check(f: &ProductBSFunction, s_list: &[BTreeSet<u64>]) -> GlueReport {
    let all: BTreeSet<u64> = f.places().into_iter().collect();
    let intersection = s_list
        .iter()
        .fold(all, |acc, s| acc.intersection(s).copied().collect());
    let memberships: Vec<bool> = s_list.iter().map(|s| is_member_outside(f, s)).collect();
    let premise = memberships.iter().all(|&m| m);
    let member_at_intersection = is_member_outside(f, &intersection);
    GlueReport {
        intersection,
        premise,
        consistent: !premise || member_at_intersection,
        member_at_intersection,
        memberships,
    }
}

/// `Σ f_q U_q`, keys distinct, zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CrossProductElement {
    terms: BTreeMap<Rational, ProductBSFunction>,
}

impl CrossProductElement {
    pub fn new(terms: impl IntoIterator<Item = (Rational, ProductBSFunction)>) -> Result<Self> {
        let mut out = CrossProductElement::default();
        for (q, f) in terms {
            out.add_term(q, f)?;
        }
        Ok(out)
    }

    pub fn single(q: Rational, f: ProductBSFunction) -> Result<Self> {
        Self::new([(q, f)])
    }

    fn add_term(&mut self, q: Rational, f: ProductBSFunction) -> Result<()> {
        if q.is_zero() {
            return Err(Error::InvalidTable("cross-product key 0".into()));
        }
        let sum = match self.terms.remove(&q) {
            Some(g) => g.add(&f)?,
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(q, sum);
        }
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<Rational, ProductBSFunction> {
        &self.terms
    }

    /// `(Σ f_q U_q)(Σ h_r U_r) = Σ f_q · (h_r ∘ q^{-1}) U_{qr}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = CrossProductElement::default();
        for (q, f) in &self.terms {
            for (r, h) in &other.terms {
                out.add_term(q * r, f.mul(&h.twist(q)?)?)?;
            }
        }
        Ok(out)
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .all(|(q, f)| other.terms.get(q).is_some_and(|g| f.equivalent(g)))
    }
}

/// Keys in `Γ_S` and every coefficient factorable off `S`.
pub fn crossproduct_membership(h: &CrossProductElement, places: &PlaceSet) -> bool {
    h.terms
        .iter()
        .all(|(q, f)| is_s_unit(q, places) && is_member_outside(f, places.finite_primes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        rational::from_i64(n)
    }

    fn w(p: u64, j: u32, k: u32) -> LocalWindow {
        LocalWindow::new(p, j, k).unwrap()
    }

    fn table(p: u64, j: u32, k: u32, vals: &[i64]) -> ProductBSFunction {
        ProductBSFunction::new(vec![w(p, j, k)], vals.iter().map(|&v| r(v)).collect()).unwrap()
    }

    fn one_zp(p: u64) -> ProductBSFunction {
        ProductBSFunction::scalar(Rational::one()).extend(p).unwrap()
    }

    #[test]
    fn factorable_examples() {
        let g = table(3, 0, 1, &[1, 0, 2]);
        assert!(g.extend(2).unwrap().is_factorable_at(2).unwrap());
        // Supported on 2^{-1}Z_2 \ Z_2.
        assert!(!table(2, 1, 0, &[0, 1]).is_factorable_at(2).unwrap());
        // Indicator of 1 + 2Z_2.
        assert!(!table(2, 0, 1, &[0, 1]).is_factorable_at(2).unwrap());
        assert!(!table(2, 1, 1, &[1, 0, 0, 0]).is_factorable_at(2).unwrap());
        assert!(table(2, 1, 1, &[1, 0, 1, 0]).is_factorable_at(2).unwrap());
        assert_eq!(g.is_factorable_at(2), Err(Error::PlaceNotPresent(2)));
    }

    #[test]
    fn factor_out_examples() {
        let f = one_zp(2).extend(3).unwrap();
        assert!(f.factor_out(2).unwrap().equivalent(&one_zp(3)));
        let delta = table(3, 1, 1, &[0, 0, 0, 0, 5, 0, 0, 0, 0]);
        let f = delta.extend_with_window(w(2, 2, 1)).unwrap();
        assert_eq!(f.factor_out(2).unwrap(), delta);
        assert_eq!(table(2, 0, 1, &[0, 1]).factor_out(2), Err(Error::NotFactorable(2)));
    }

    #[test]
    fn extend_examples() {
        let one = ProductBSFunction::scalar(Rational::one());
        assert_eq!(one.extend(2).unwrap(), table(2, 0, 0, &[1]));
        let g = table(5, 1, 0, &[1, 0, 0, 3, 0]);
        assert_eq!(g.extend(2).unwrap().factor_out(2).unwrap(), g);
        assert_eq!(
            g.extend(2).unwrap().extend(3).unwrap(),
            g.extend(3).unwrap().extend(2).unwrap()
        );
        assert_eq!(g.extend(5), Err(Error::PlaceAlreadyPresent(5)));
    }

    /// Oracle: `1_{Z_v} ⊗ g` evaluated coset by coset from the definition.
    #[test]
    fn extend_matches_pointwise_tensor() {
        let g = table(3, 1, 1, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        for (j, k) in [(0, 0), (1, 0), (0, 2), (2, 1)] {
            let f = g.extend_with_window(w(2, j, k)).unwrap();
            for a in 0..2u64.pow(j + k) {
                for b in 0..9u64 {
                    let x_in_z2 = a % 2u64.pow(j) == 0;
                    let expect = if x_in_z2 { r(b as i64 + 1) } else { r(0) };
                    assert_eq!(f.value_at(&[a, b]), &expect);
                }
            }
        }
    }

    #[test]
    fn refine_preserves_function() {
        let f = table(2, 1, 1, &[1, 2, 3, 4]);
        let g = f.refine(2, 2, 3).unwrap();
        assert!(f.equivalent(&g));
        // Cell a of (2,3) is x = a/4; x = 1/2 + y with y ∈ 2Z_2 has old cell 1.
        assert_eq!(g.value_at(&[2]), &r(2));
        assert_eq!(g.value_at(&[1]), &r(0));
        assert!(f.refine(2, 0, 1).is_err());
    }

    #[test]
    fn twist_examples() {
        // 1_{Z_p}(x/p) = 1_{pZ_p}(x).
        let t = one_zp(3).twist(&r(3)).unwrap();
        assert!(t.equivalent(&table(3, 0, 1, &[1, 0, 0])));
        // 1_{Z_p}(p x) = 1_{p^{-1}Z_p}(x).
        let t = one_zp(3).twist(&Rational::new(1.into(), 3.into())).unwrap();
        assert!(t.equivalent(&table(3, 1, 0, &[1, 1, 1])));
        // At 3, the unit 2 swaps cells 1 and 2; at 2, 1_{Z_2} becomes 1_{2Z_2}.
        let t = table(3, 0, 1, &[0, 1, 0]).twist(&r(2)).unwrap();
        let expect = ProductBSFunction::pure_tensor(&[
            LocalBSFunction::indicator(w(2, 0, 1), &[0]).unwrap(),
            LocalBSFunction::indicator(w(3, 0, 1), &[2]).unwrap(),
        ])
        .unwrap();
        assert!(t.equivalent(&expect));
        // Untouched primes of q appear as 1_{qZ_q}.
        let t = ProductBSFunction::scalar(Rational::one()).twist(&r(2)).unwrap();
        assert!(t.equivalent(&table(2, 0, 1, &[1, 0])));
        assert!(table(2, 0, 1, &[1, 2]).twist(&r(-1)).unwrap().equivalent(&table(2, 0, 1, &[1, 2])));
    }

    #[test]
    fn twist_is_an_action() {
        let f = table(2, 1, 2, &[1, 2, 3, 4, 5, 6, 7, 8]).extend_with_window(w(3, 1, 1)).unwrap();
        let f = f.add(&table(3, 0, 2, &[1, 0, 0, 2, 0, 0, 3, 0, 0])).unwrap();
        for (a, b) in [(2, 3), (-6, 1), (4, -9)] {
            let (qa, qb) = (r(a), Rational::new(b.into(), 1.into()).recip());
            let lhs = f.twist(&qb).unwrap().twist(&qa).unwrap();
            let rhs = f.twist(&(&qa * &qb)).unwrap();
            assert!(lhs.equivalent(&rhs));
        }
        assert!(f.twist(&Rational::one()).unwrap().equivalent(&f));
    }

    #[test]
    fn glue_examples() {
        let fully = one_zp(2).extend(3).unwrap();
        let s1 = BTreeSet::from([2]);
        let s2 = BTreeSet::from([3]);
        let rep = sheaf_glue_check(&fully, &[s1.clone(), s2.clone()]);
        assert!(rep.member_at_intersection && rep.premise && rep.consistent);

        // Factorable at 3 but not at 2.
        let f = table(2, 0, 1, &[0, 1]).extend(3).unwrap();
        let rep = sheaf_glue_check(&f, &[s1, s2]);
        assert_eq!(rep.memberships, vec![true, false]);
        assert!(!rep.premise);
        assert!(rep.consistent);
        assert!(rep.intersection.is_empty());
        assert!(!rep.member_at_intersection);
    }

    #[test]
    fn membership_examples() {
        let s23 = PlaceSet::new([2, 3]).unwrap();
        let f = one_zp(2).extend(3).unwrap();
        let h = CrossProductElement::single(Rational::one(), f.clone()).unwrap();
        assert!(crossproduct_membership(&h, &s23));
        let h = CrossProductElement::single(r(5), f.clone()).unwrap();
        assert!(!crossproduct_membership(&h, &s23));
        let h = CrossProductElement::single(Rational::new((-9).into(), 2.into()), f.clone()).unwrap();
        assert!(crossproduct_membership(&h, &s23));
        let global = PlaceSet::new([]).unwrap();
        assert!(crossproduct_membership(&CrossProductElement::single(r(-1), f.clone()).unwrap(), &global));
        assert!(!crossproduct_membership(&CrossProductElement::single(r(2), f.clone()).unwrap(), &global));
        let not_fact = table(2, 0, 1, &[0, 1]);
        let h = CrossProductElement::single(Rational::one(), not_fact).unwrap();
        assert!(!crossproduct_membership(&h, &PlaceSet::new([3]).unwrap()));
        assert!(crossproduct_membership(&h, &PlaceSet::new([2]).unwrap()));
    }

    #[test]
    fn json_round_trip_and_limits() {
        let f = table(2, 1, 1, &[1, 0, 1, 0]).extend(3).unwrap();
        let back = ProductBSFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(GridLimits::default().check(&f).is_ok());
        let big = ProductBSFunction::scalar(Rational::one()).extend_with_window(w(2, 5, 0)).unwrap();
        assert!(GridLimits::default().check(&big).is_err());
        assert!(ProductBSFunction::from_json(r#"{"windows":[{"prime":2,"outer":1,"inner":0}],"values":["1"]}"#).is_err());
        assert!(ProductBSFunction::new(vec![w(3, 0, 0), w(2, 0, 0)], vec![r(1)]).is_err());
    }

    fn grid_23() -> impl Strategy<Value = (LocalWindow, LocalWindow)> {
        (0u32..=2, 0u32..=2, 0u32..=1, 0u32..=1).prop_map(|(a, b, c, d)| (w(2, a, b), w(3, c, d)))
    }

    /// A random function of the form `1_{Z_5} ⊗ g` with `g` on places 2, 3.
    fn factorable_at_5() -> impl Strategy<Value = ProductBSFunction> {
        grid_23().prop_flat_map(|(w2, w3)| {
            let n = (w2.size() * w3.size()) as usize;
            prop::collection::vec(-3i64..=3, n).prop_map(move |vals| {
                ProductBSFunction::new(vec![w2, w3], vals.into_iter().map(r).collect())
                    .unwrap()
                    .extend(5)
                    .unwrap()
            })
        })
    }

    fn s_unit_key() -> impl Strategy<Value = Rational> {
        (any::<bool>(), -2i64..=2, -2i64..=2).prop_map(|(neg, a, b)| {
            let q = rational::prime_power(2, a) * rational::prime_power(3, b);
            if neg {
                -q
            } else {
                q
            }
        })
    }

    fn member_element() -> impl Strategy<Value = CrossProductElement> {
        prop::collection::vec((s_unit_key(), factorable_at_5()), 1..=2)
            .prop_map(|terms| CrossProductElement::new(terms).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn extend_factor_out_round_trip(f in factorable_at_5()) {
            prop_assert!(f.is_factorable_at(5).unwrap());
            let g = f.factor_out(5).unwrap();
            prop_assert_eq!(g.extend(5).unwrap(), f);
        }

        #[test]
        fn linearity(f in factorable_at_5(), g in factorable_at_5(), a in -3i64..=3, b in -3i64..=3) {
            let comb = f.scale(&r(a)).add(&g.scale(&r(b))).unwrap();
            prop_assert!(comb.is_factorable_at(5).unwrap());
            let lhs = comb.factor_out(5).unwrap();
            let rhs = f.factor_out(5).unwrap().scale(&r(a)).add(&g.factor_out(5).unwrap().scale(&r(b))).unwrap();
            prop_assert!(lhs.equivalent(&rhs));
        }

        #[test]
        fn presheaf_law(f in factorable_at_5()) {
            let g = f.factor_out(5).unwrap();
            let one_step = g.extend(5).unwrap().extend(7).unwrap();
            let other = g.extend(7).unwrap().extend(5).unwrap();
            prop_assert_eq!(&one_step, &other);
            let to_7 = g.extend(7).unwrap();
            prop_assert!(to_7.is_factorable_at(7).unwrap());
            prop_assert!(to_7.factor_out(7).unwrap().equivalent(&g));
        }

        #[test]
        fn glue_never_inconsistent(
            (w2, w3) in grid_23(),
            inner5 in 0u32..=1,
            vals in prop::collection::vec(prop::sample::select(vec![0i64, 0, 1]), 720),
            subsets in prop::collection::vec(prop::sample::subsequence(vec![2u64, 3, 5], 0..=3), 1..=3),
        ) {
            let windows = vec![w2, w3, w(5, 0, inner5)];
            let n = (w2.size() * w3.size() * windows[2].size()) as usize;
            let f = ProductBSFunction::new(windows, vals[..n].iter().map(|&v| r(v)).collect()).unwrap();
            let s_list: Vec<BTreeSet<u64>> = subsets.into_iter().map(|s| s.into_iter().collect()).collect();
            let rep = sheaf_glue_check(&f, &s_list);
            prop_assert!(rep.consistent);
        }

        #[test]
        fn membership_is_multiplicative(h1 in member_element(), h2 in member_element()) {
            let s = PlaceSet::new([2, 3]).unwrap();
            prop_assert!(crossproduct_membership(&h1, &s));
            prop_assert!(crossproduct_membership(&h2, &s));
            let prod = h1.mul(&h2).unwrap();
            prop_assert!(crossproduct_membership(&prod, &s));
        }

        #[test]
        fn convolution_is_associative(h1 in member_element(), h2 in member_element(), h3 in member_element()) {
            let lhs = h1.mul(&h2).unwrap().mul(&h3).unwrap();
            let rhs = h1.mul(&h2.mul(&h3).unwrap()).unwrap();
            prop_assert!(lhs.equivalent(&rhs));
        }
    }
}
