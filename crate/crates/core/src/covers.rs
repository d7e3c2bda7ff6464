//! Ramification, Frobenius monodromy and fiber structure of the cover
//! attached to an abelian extension.
//!
//! Over the periodic orbit `C_p` of an unramified prime the cover is the
//! mapping torus of multiplication by `Frob_p = chi(p)` on `G`; its
//! components are the cosets of `<Frob_p>`, each a circle of length
//! `ord(Frob_p)·log p`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{self, is_prime};
use crate::error::{Error, Result};
use crate::extension::{AbelianExtensionSpec, ExtensionJson};
use crate::place::{Place, PlaceSet};
use crate::residue::{unit_group, GroupElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationReport {
    pub ramified_finite_primes: Vec<u64>,
    pub always_ramified_archimedean: bool,
    pub smallest_unramified_outside_set: PlaceSet,
}

/// Primes `p | m` with `chi(Z_p*) ≠ {1}`. The image of `Z_p*` in
/// `(Z/mZ)*` is the set of units `≡ 1 mod m/p^{v_p(m)}`.
pub fn ramification_set(ext: &AbelianExtensionSpec) -> RamificationReport {
    let m = ext.modulus().get();
    let units = unit_group(ext.modulus());
    let ramified: Vec<u64> = arith::factorize(m)
        .into_iter()
        .filter(|&(p, e)| {
            let rest = m / p.pow(e);
            units
                .iter()
                .filter(|u| u.value() % rest == 1 % rest)
                .any(|u| !ext.kernel().contains(u.value()))
        })
        .map(|(p, _)| p)
        .collect();
    RamificationReport {
        smallest_unramified_outside_set: PlaceSet::new(ramified.iter().copied()).expect("primes"),
        ramified_finite_primes: ramified,
        always_ramified_archimedean: true,
    }
}

/// `Frob_p = chi(p)` for a prime not dividing the conductor.
pub fn frobenius(ext: &AbelianExtensionSpec, p: u64) -> Result<GroupElement> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let f = ext.conductor();
    if f % p == 0 {
        return Err(Error::RamifiedPrime { prime: p, conductor: f });
    }
    ext.chi_of_integer(p as i128)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircleLength {
    /// Length is `multiplier · log(log_of)`.
    pub multiplier: u64,
    pub log_of: u64,
}

impl CircleLength {
    pub fn value(&self) -> f64 {
        self.multiplier as f64 * (self.log_of as f64).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Least representative in the coset.
    pub label: u64,
    /// Coset members in monodromy order `g, g·F, g·F², …`.
    pub cycle: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverFiberReport {
    pub ext: ExtensionJson,
    pub prime: u64,
    pub degree: usize,
    pub monodromy: u64,
    pub residue_degree: u64,
    pub component_count: u64,
    pub circle_length: CircleLength,
    pub components: Vec<Component>,
}

/// The restriction of the cover to `C_p`.
pub fn cover_fiber_over_cp(ext: &AbelianExtensionSpec, p: u64) -> Result<CoverFiberReport> {
    let frob = frobenius(ext, p)?;
    let g = ext.galois_group();
    let f = g.element_order(&frob);
    let h = g.cyclic_subgroup(&frob);
    let components: Vec<Component> = g
        .cosets_of(&h)
        .into_iter()
        .map(|coset| {
            let start = coset[0];
            let mut cycle = vec![start.rep()];
            let mut cur = g.mul(&start, &frob);
            while cur != start {
                cycle.push(cur.rep());
                cur = g.mul(&cur, &frob);
            }
            Component {
                label: start.rep(),
                cycle,
            }
        })
        .collect();
    Ok(CoverFiberReport {
        ext: ext.to_json(),
        prime: p,
        degree: ext.degree(),
        monodromy: frob.rep(),
        residue_degree: f,
        component_count: components.len() as u64,
        circle_length: CircleLength {
            multiplier: f,
            log_of: p,
        },
        components,
    })
}

/// Format a positive real to six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

impl CoverFiberReport {
    /// DOT drawing of the mapping torus: one circle per component, nodes are
    /// the fiber points joined by the monodromy.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let len = &self.circle_length;
        writeln!(out, "digraph mapping_torus {{").unwrap();
        writeln!(
            out,
            "  label=\"cover over C_{}: {} component(s), monodromy [{}]\";",
            self.prime, self.component_count, self.monodromy
        )
        .unwrap();
        writeln!(out, "  node [shape=circle];").unwrap();
        for (i, c) in self.components.iter().enumerate() {
            writeln!(out, "  subgraph cluster_{i} {{").unwrap();
            writeln!(
                out,
                "    label=\"[{}]  len = {}·log {} ≈ {}\";",
                c.label,
                len.multiplier,
                len.log_of,
                sig6(len.value())
            )
            .unwrap();
            for r in &c.cycle {
                writeln!(out, "    g{r} [label=\"{r}\"];").unwrap();
            }
            for (j, r) in c.cycle.iter().enumerate() {
                let next = c.cycle[(j + 1) % c.cycle.len()];
                writeln!(out, "    g{r} -> g{next};").unwrap();
            }
            writeln!(out, "  }}").unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArchimedeanFiber {
    pub chi_minus_one: u64,
    pub cosets: Vec<Vec<u64>>,
}

impl ArchimedeanFiber {
    pub fn size(&self) -> usize {
        self.cosets.len()
    }
}

/// The fiber over `C_∞`, the coset space `G/<chi(-1)>`.
pub fn archimedean_fiber(ext: &AbelianExtensionSpec) -> ArchimedeanFiber {
    let g = ext.galois_group();
    let c = ext.chi_of_integer(-1).expect("-1 is a unit");
    let h = g.cyclic_subgroup(&c);
    ArchimedeanFiber {
        chi_minus_one: c.rep(),
        cosets: g
            .cosets_of(&h)
            .into_iter()
            .map(|cs| cs.iter().map(GroupElement::rep).collect())
            .collect(),
    }
}

/// A point of `X_Q` described by its zero set `Z(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StrataPoint {
    pub zero_places: BTreeSet<Place>,
}

impl StrataPoint {
    pub fn new(zero_places: impl IntoIterator<Item = Place>) -> Self {
        StrataPoint {
            zero_places: zero_places.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerReport {
    pub stabilizer: Vec<u64>,
    pub fiber_size: usize,
    pub acts_freely: bool,
}

/// `chi(∏_{v∈Z(x)} Z_v*)` and the resulting fiber `G/chi(H)`.
pub fn fiber_stabilizer(ext: &AbelianExtensionSpec, x: &StrataPoint) -> Result<StabilizerReport> {
    if x.zero_places.contains(&Place::Infinity) {
        return Err(Error::ArchimedeanZeroUnsupported);
    }
    let m = ext.modulus().get();
    let zero_part: u64 = x
        .zero_places
        .iter()
        .filter_map(Place::prime)
        .map(|p| p.pow(arith::valuation(m, p)))
        .product();
    let rest = m / zero_part;
    let g = ext.galois_group();
    let stab: BTreeSet<u64> = unit_group(ext.modulus())
        .iter()
        .filter(|u| u.value() % rest == 1 % rest)
        .map(|u| g.project(u).rep())
        .collect();
    let stabilizer: Vec<u64> = stab.into_iter().collect();
    Ok(StabilizerReport {
        fiber_size: g.order() / stabilizer.len(),
        acts_freely: stabilizer.len() == 1,
        stabilizer,
    })
}

/// Whether `C(chi) ⊆ S`. `S` must contain `∞`.
pub fn is_unramified_outside(ext: &AbelianExtensionSpec, places: &[Place]) -> Result<bool> {
    if !places.contains(&Place::Infinity) {
        return Err(Error::MissingArchimedeanPlace);
    }
    Ok(ramification_set(ext)
        .ramified_finite_primes
        .iter()
        .all(|p| places.contains(&Place::Finite(*p))))
}

/// Tally of `Frob_p` over unramified primes `p <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityHistogram {
    pub bound: u64,
    pub unramified_primes: u64,
    pub nontrivial: u64,
    /// Count per group element, keyed by canonical representative.
    pub counts: BTreeMap<u64, u64>,
}

impl DensityHistogram {
    fn empty(ext: &AbelianExtensionSpec, bound: u64) -> Self {
        DensityHistogram {
            bound,
            unramified_primes: 0,
            nontrivial: 0,
            counts: ext.galois_group().representatives().iter().map(|&r| (r, 0)).collect(),
        }
    }

    /// Combine two partial tallies. Order-independent.
    pub fn merge(mut self, other: &DensityHistogram) -> Self {
        self.unramified_primes += other.unramified_primes;
        self.nontrivial += other.nontrivial;
        for (k, v) in &other.counts {
            *self.counts.entry(*k).or_insert(0) += v;
        }
        self
    }

    pub fn nontrivial_fraction(&self) -> f64 {
        if self.unramified_primes == 0 {
            return 0.0;
        }
        self.nontrivial as f64 / self.unramified_primes as f64
    }

    pub fn class_fraction(&self, rep: u64) -> f64 {
        if self.unramified_primes == 0 {
            return 0.0;
        }
        self.counts.get(&rep).copied().unwrap_or(0) as f64 / self.unramified_primes as f64
    }
}

const DENSITY_WORKERS: usize = 4;

/// Frobenius distribution over primes up to `bound`, sieved once and
/// tallied in parallel chunks.
pub fn density_scan(ext: &AbelianExtensionSpec, bound: u64) -> Result<DensityHistogram> {
    if bound < 2 {
        return Err(Error::InvalidBound);
    }
    let conductor = ext.conductor();
    let primes: Vec<u64> = arith::primes_up_to(bound)
        .into_iter()
        .filter(|p| conductor % p != 0)
        .collect();
    let chunk = primes.len().div_ceil(DENSITY_WORKERS).max(1);
    let partials: Vec<DensityHistogram> = std::thread::scope(|scope| {
        let handles: Vec<_> = primes
            .chunks(chunk)
            .map(|ps| {
                scope.spawn(move || {
                    let g = ext.galois_group();
                    let mut h = DensityHistogram::empty(ext, bound);
                    for &p in ps {
                        let frob = ext.chi_of_integer(p as i128).expect("unramified");
                        h.unramified_primes += 1;
                        if !g.is_identity(&frob) {
                            h.nontrivial += 1;
                        }
                        *h.counts.get_mut(&frob.rep()).expect("element") += 1;
                    }
                    h
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });
    Ok(partials
        .iter()
        .fold(DensityHistogram::empty(ext, bound), |acc, h| acc.merge(h)))
}
