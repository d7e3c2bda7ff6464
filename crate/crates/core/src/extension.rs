//! Finite abelian extensions of `Q` in kernel-subgroup normal form.
//!
//! An extension `L` is recorded as a defining modulus `m` together with the
//! subgroup `W ⊆ (Z/mZ)*` fixing `L` inside `Q(ζ_m)`. The Galois group is
//! `G = (Z/mZ)*/W` and the Artin map `chi` is the quotient map. The modulus
//! need not be the conductor; comparisons always lift to a common modulus.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, lcm};
use crate::error::{Error, Result};
use crate::residue::{all_subgroups, group_element_unchecked, unit_group, GroupElement, Modulus, QuotientGroup, Subgroup, UnitResidue};

/// `{ "modulus": m, "kernel": [...] }`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub modulus: u64,
    pub kernel: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ExtensionJson", into = "ExtensionJson")]
pub struct AbelianExtensionSpec {
    galois: QuotientGroup,
    conductor: OnceLock<u64>,
}

impl TryFrom<ExtensionJson> for AbelianExtensionSpec {
    type Error = Error;
    fn try_from(j: ExtensionJson) -> Result<Self> {
        AbelianExtensionSpec::new(j.modulus, j.kernel)
    }
}

impl From<AbelianExtensionSpec> for ExtensionJson {
    fn from(e: AbelianExtensionSpec) -> Self {
        ExtensionJson {
            modulus: e.modulus().get(),
            kernel: e.kernel().elements().to_vec(),
        }
    }
}

impl AbelianExtensionSpec {
    pub fn new(modulus: u64, kernel: impl IntoIterator<Item = u64>) -> Result<Self> {
        let m = Modulus::new(modulus)?;
        Ok(Self::from_subgroup(Subgroup::new(m, kernel)?))
    }

    pub fn from_subgroup(kernel: Subgroup) -> Self {
        AbelianExtensionSpec {
            galois: QuotientGroup::new(kernel),
            conductor: OnceLock::new(),
        }
    }

    /// `Q` itself.
    pub fn rational() -> Self {
        Self::from_subgroup(Subgroup::trivial(Modulus::new(1).unwrap()))
    }

    /// `Q(ζ_m)`.
    pub fn cyclotomic(m: u64) -> Result<Self> {
        Ok(Self::from_subgroup(Subgroup::trivial(Modulus::new(m)?)))
    }

    /// `Q(√d)`, with kernel the units on which the Kronecker character of the
    /// field discriminant is `+1`.
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidExtension("quadratic:0 is not a field".into()));
        }
        let core = squarefree_part(d);
        if core == 1 {
            return Err(Error::InvalidExtension(format!(
                "quadratic:{d} is Q itself (d is a square)"
            )));
        }
        let disc = if core.rem_euclid(4) == 1 { core } else { 4 * core };
        let m = Modulus::new(disc.unsigned_abs())?;
        let kernel = unit_group(m)
            .into_iter()
            .filter(|u| kronecker(disc, u.value()) == 1)
            .map(|u| u.value());
        Ok(Self::from_subgroup(Subgroup::new(m, kernel)?))
    }

    /// Parse `cyclotomic:m`, `quadratic:d`, `rational`, or inline JSON.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let j: ExtensionJson =
                serde_json::from_str(s).map_err(|e| Error::Parse(format!("extension JSON: {e}")))?;
            return j.try_into();
        }
        if s == "rational" || s == "Q" {
            return Ok(Self::rational());
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unrecognised extension spec `{s}`")))?;
        match kind {
            "cyclotomic" => {
                let m = arg
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("cyclotomic modulus `{arg}`: {e}")))?;
                Self::cyclotomic(m)
            }
            "quadratic" => {
                let d = arg
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("quadratic radicand `{arg}`: {e}")))?;
                Self::quadratic(d)
            }
            _ => Err(Error::Parse(format!("unknown extension kind `{kind}`"))),
        }
    }

    pub fn to_json(&self) -> ExtensionJson {
        self.clone().into()
    }

    pub fn modulus(&self) -> Modulus {
        self.galois.modulus()
    }

    pub fn kernel(&self) -> &Subgroup {
        self.galois.kernel()
    }

    pub fn galois_group(&self) -> &QuotientGroup {
        &self.galois
    }

    /// `[L:Q] = phi(m)/|W|`.
    pub fn degree(&self) -> usize {
        self.galois.order()
    }

    /// Smallest divisor `d` of `m` such that every unit `≡ 1 (mod d)` lies in
    /// the kernel.
    pub fn conductor(&self) -> u64 {
        *self.conductor.get_or_init(|| {
            let m = self.modulus().get();
            let units = unit_group(self.modulus());
            arith::divisors(m)
                .into_iter()
                .find(|&d| {
                    units
                        .iter()
                        .filter(|u| u.value() % d == 1 % d)
                        .all(|u| self.kernel().contains(u.value()))
                })
                .unwrap_or(m)
        })
    }

    /// The same field presented at a multiple `big` of the current modulus.
    pub fn lift_to(&self, big: Modulus) -> Self {
        Self::from_subgroup(self.kernel().lift_to(big))
    }

    /// The same field presented at its conductor.
    pub fn at_conductor(&self) -> Self {
        let f = Modulus::new(self.conductor()).unwrap();
        Self::from_subgroup(self.kernel().reduce_to(f))
    }

    /// `chi(u)` for a unit at any modulus divisible by the conductor.
    pub fn chi(&self, u: &UnitResidue) -> Result<GroupElement> {
        let m = self.modulus().get();
        let big = u.modulus().get();
        if big % m == 0 {
            return Ok(self.galois.project(&u.reduce_to(self.modulus())));
        }
        let f = self.conductor();
        if big % f != 0 {
            return Err(Error::IncompatibleModulus {
                modulus: big,
                conductor: f,
            });
        }
        self.chi_of_integer(u.value() as i128)
    }

    /// `chi(n)` for an integer `n` prime to the conductor. The value depends
    /// only on `n mod conductor`.
    pub fn chi_of_integer(&self, n: i128) -> Result<GroupElement> {
        let m = self.modulus().get();
        let r = arith::reduce_signed(n, m);
        if gcd(r, m) == 1 {
            return self.galois.element(r as i128);
        }
        let f = self.conductor();
        let rf = arith::reduce_signed(n, f);
        if gcd(rf, f) != 1 {
            return Err(Error::NotAUnit { value: n, modulus: f });
        }
        let lifted = arith::lift_coprime(rf, f, m).ok_or(Error::NotAUnit { value: n, modulus: f })?;
        self.galois.element(lifted as i128)
    }

    /// Whether `self ⊆ other`, i.e. `W(other) ⊆ W(self)` at the common modulus.
    pub fn is_subfield_of(&self, other: &Self) -> bool {
        let (a, b) = lift_to_common_modulus(self, other);
        b.kernel().is_subgroup_of(a.kernel())
    }

    /// Compact description used in messages.
    pub fn describe(&self) -> String {
        let k = self.kernel().elements();
        if k.len() <= 12 {
            format!("(m={}, W={:?})", self.modulus(), k)
        } else {
            format!("(m={}, |W|={})", self.modulus(), k.len())
        }
    }
}

impl PartialEq for AbelianExtensionSpec {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = lift_to_common_modulus(self, other);
        a.kernel() == b.kernel()
    }
}

impl Eq for AbelianExtensionSpec {}

impl FromStr for AbelianExtensionSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for AbelianExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Re-express both extensions at `lcm(m1, m2)`.
pub fn lift_to_common_modulus(
    e1: &AbelianExtensionSpec,
    e2: &AbelianExtensionSpec,
) -> (AbelianExtensionSpec, AbelianExtensionSpec) {
    let (m1, m2) = (e1.modulus().get(), e2.modulus().get());
    if m1 == m2 {
        return (e1.clone(), e2.clone());
    }
    let big = Modulus::new(lcm(m1, m2)).unwrap();
    (e1.lift_to(big), e2.lift_to(big))
}

/// All subfields of `Q(ζ_m)`, one per subgroup of `(Z/mZ)*`.
pub fn cyclotomic_subfields(m: u64) -> Result<Vec<AbelianExtensionSpec>> {
    let modulus = Modulus::new(m)?;
    Ok(all_subgroups(modulus)
        .into_iter()
        .map(AbelianExtensionSpec::from_subgroup)
        .collect())
}

fn squarefree_part(d: i64) -> i64 {
    let sign = d.signum();
    let core: u64 = arith::factorize(d.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    sign * core as i64
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(d/n)` for `n > 0`.
fn kronecker(d: i64, n: u64) -> i32 {
    let mut n = n;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    result * jacobi(d, n)
}

/// A field embedding `σ = ι∘k : L1 → L2`, with `ι` the inclusion and `k` a
/// Galois automorphism of `L1`.
#[derive(Clone, Debug)]
pub struct ExtensionMorphism {
    source: AbelianExtensionSpec,
    target: AbelianExtensionSpec,
    twist: GroupElement,
}

impl ExtensionMorphism {
    pub fn new(
        source: AbelianExtensionSpec,
        target: AbelianExtensionSpec,
        twist: GroupElement,
    ) -> Result<Self> {
        if !source.is_subfield_of(&target) {
            return Err(Error::NotASubfield {
                source_desc: source.describe(),
                target_desc: target.describe(),
            });
        }
        if !source.galois_group().contains(&twist) {
            return Err(Error::InvalidTwist { rep: twist.rep() });
        }
        Ok(ExtensionMorphism {
            source,
            target,
            twist,
        })
    }

    pub fn inclusion(source: AbelianExtensionSpec, target: AbelianExtensionSpec) -> Result<Self> {
        let twist = source.galois_group().identity();
        Self::new(source, target, twist)
    }

    pub fn identity(ext: AbelianExtensionSpec) -> Self {
        let twist = ext.galois_group().identity();
        ExtensionMorphism {
            source: ext.clone(),
            target: ext,
            twist,
        }
    }

    pub fn source(&self) -> &AbelianExtensionSpec {
        &self.source
    }

    pub fn target(&self) -> &AbelianExtensionSpec {
        &self.target
    }

    pub fn twist(&self) -> GroupElement {
        self.twist
    }

    /// Galois restriction `r: Gal(L2/Q) → Gal(L1/Q)`.
    pub fn restrict(&self, g: &GroupElement) -> GroupElement {
        restrict(&self.target, &self.source, g)
    }

    /// `ρ_σ(g) = r(g)·k`.
    pub fn induced_cover_map(&self) -> CoverMap {
        let g1 = self.source.galois_group();
        let table = self
            .target
            .galois_group()
            .elements()
            .into_iter()
            .map(|g| (g.rep(), g1.mul(&self.restrict(&g), &self.twist).rep()))
            .collect();
        CoverMap {
            domain_modulus: self.target.modulus(),
            codomain_modulus: self.source.modulus(),
            table,
        }
    }

    /// Exhaustively check `chi1(w)·ρ(g) = ρ(chi2(w)·g)` over all units `w`
    /// modulo `lcm(m1, m2)` and all `g ∈ G2`.
    pub fn is_equivariant(&self) -> bool {
        let rho = self.induced_cover_map();
        let (g1, g2) = (self.source.galois_group(), self.target.galois_group());
        let big = Modulus::new(lcm(self.source.modulus().get(), self.target.modulus().get())).unwrap();
        unit_group(big).iter().all(|w| {
            let c1 = self.source.chi(w).expect("unit");
            let c2 = self.target.chi(w).expect("unit");
            g2.elements()
                .iter()
                .all(|g| g1.mul(&c1, &rho.apply(g)) == rho.apply(&g2.mul(&c2, g)))
        })
    }
}

fn restrict(big: &AbelianExtensionSpec, small: &AbelianExtensionSpec, g: &GroupElement) -> GroupElement {
    // Any representative of g is a unit mod m2, hence prime to the conductor
    // of the subfield; chi1 does not depend on the choice.
    debug_assert_eq!(g.modulus(), big.modulus());
    small
        .chi_of_integer(g.rep() as i128)
        .expect("representatives are prime to the subfield conductor")
}

/// `σ' ∘ σ` for `s1 = σ: L1 → L2` and `s2 = σ': L2 → L3`, with twist
/// `k'' = r(k')·k`.
pub fn compose_morphisms(s1: &ExtensionMorphism, s2: &ExtensionMorphism) -> Result<ExtensionMorphism> {
    if s1.target != s2.source {
        return Err(Error::CompositionMismatch);
    }
    let k_prime = restrict(&s2.source, &s1.source, &s2.twist);
    let twist = s1.source.galois_group().mul(&k_prime, &s1.twist);
    Ok(ExtensionMorphism {
        source: s1.source.clone(),
        target: s2.target.clone(),
        twist,
    })
}

/// A map `G2 → G1` between Galois groups, tabulated on canonical
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverMap {
    domain_modulus: Modulus,
    codomain_modulus: Modulus,
    table: BTreeMap<u64, u64>,
}

impl CoverMap {
    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        group_element_unchecked(self.codomain_modulus, self.table[&g.rep()])
    }

    pub fn table(&self) -> &BTreeMap<u64, u64> {
        &self.table
    }

    /// `self ∘ inner`, where `inner`'s codomain is this map's domain.
    pub fn after(&self, inner: &CoverMap) -> CoverMap {
        assert_eq!(inner.codomain_modulus, self.domain_modulus);
        CoverMap {
            domain_modulus: inner.domain_modulus,
            codomain_modulus: self.codomain_modulus,
            table: inner
                .table
                .iter()
                .map(|(&g, &h)| (g, self.table[&h]))
                .collect(),
        }
    }
}
