//! Rank solving for cyclic six-term exact sequences.
//!
//! With `r_i = rank im(f_i)` for the map `f_i : N_i → N_{i+1}`, exactness and
//! additivity of rank give `rank N_i = r_{i-1} + r_i`. Map annotations pin
//! further `r_i`. Bounds are propagated to a fixpoint, then any remaining
//! finite box is enumerated.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    #[serde(default)]
    pub rank: Option<u64>,
    #[serde(default = "yes")]
    pub torsion_free: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapProperty {
    Zero,
    Injective,
    Surjective,
    ImageRank(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapAnnotation {
    #[serde(default)]
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub properties: Vec<MapProperty>,
}

/// Six nodes in cyclic order and the six maps between neighbours; after
/// validation `maps[i]` runs from `nodes[i]` to `nodes[i+1 mod 6]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonInstance {
    pub nodes: Vec<NodeSpec>,
    pub maps: Vec<MapAnnotation>,
}

fn node(name: &str, rank: Option<u64>) -> NodeSpec {
    NodeSpec {
        name: name.into(),
        rank,
        torsion_free: true,
    }
}

fn map(name: &str, from: &str, to: &str, properties: &[MapProperty]) -> MapAnnotation {
    MapAnnotation {
        name: name.into(),
        from: from.into(),
        to: to.into(),
        properties: properties.to_vec(),
    }
}

impl HexagonInstance {
    /// The sequence for `0 → A_∅ → A → B → 0` with `S = {p, q, ∞}`:
    /// `K_0(A_∅) = 0`, `K_1(A_∅) = Z`, `K_0(B) = Z^4`, `K_1(B) = Z^2`, and
    /// `δ_0` surjective when `with_connecting_surjection` is set.
    pub fn paper_pq(with_connecting_surjection: bool) -> Self {
        let delta0: &[MapProperty] = if with_connecting_surjection {
            &[MapProperty::Surjective]
        } else {
            &[]
        };
        HexagonInstance {
            nodes: vec![
                node("K0(A_empty)", Some(0)),
                node("K0(A)", None),
                node("K0(B)", Some(4)),
                node("K1(A_empty)", Some(1)),
                node("K1(A)", None),
                node("K1(B)", Some(2)),
            ],
            maps: vec![
                map("iota_*", "K0(A_empty)", "K0(A)", &[]),
                map("rho_*", "K0(A)", "K0(B)", &[]),
                map("delta_0", "K0(B)", "K1(A_empty)", delta0),
                map("iota_*", "K1(A_empty)", "K1(A)", &[]),
                map("rho_*", "K1(A)", "K1(B)", &[]),
                map("delta_1", "K1(B)", "K0(A_empty)", &[]),
            ],
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let hex: HexagonInstance =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("hexagon JSON: {e}")))?;
        hex.validated()
    }

    /// Check the cyclic shape and annotation consistency; reorder maps so
    /// that `maps[i]` leaves `nodes[i]`.
    pub fn validated(mut self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidHexagon(m));
        if self.nodes.len() != 6 || self.maps.len() != 6 {
            return bad(format!("need 6 nodes and 6 maps, got {} and {}", self.nodes.len(), self.maps.len()));
        }
        let names: BTreeSet<&str> = self.nodes.iter().map(|n| n.name.as_str()).collect();
        if names.len() != 6 {
            return bad("node names must be distinct".into());
        }
        let mut ordered = Vec::with_capacity(6);
        for i in 0..6 {
            let (from, to) = (&self.nodes[i].name, &self.nodes[(i + 1) % 6].name);
            let found: Vec<&MapAnnotation> = self.maps.iter().filter(|m| &m.from == from).collect();
            match found.as_slice() {
                [m] if &m.to == to => ordered.push((*m).clone()),
                [m] => return bad(format!("map out of {from} goes to {}, expected {to}", m.to)),
                [] => return bad(format!("no map out of {from}")),
                _ => return bad(format!("several maps out of {from}")),
            }
        }
        self.maps = ordered;
        for (i, m) in self.maps.iter().enumerate() {
            let src = self.nodes[i].rank;
            let dst = self.nodes[(i + 1) % 6].rank;
            let props = &m.properties;
            let has = |p: MapProperty| props.contains(&p);
            let images: BTreeSet<u64> = props
                .iter()
                .filter_map(|p| match p {
                    MapProperty::ImageRank(k) => Some(*k),
                    _ => None,
                })
                .collect();
            let label = format!("{} : {} -> {}", m.name, m.from, m.to);
            if images.len() > 1 {
                return bad(format!("{label}: several image ranks"));
            }
            let image = images.iter().next().copied().or(if has(MapProperty::Zero) { Some(0) } else { None });
            if has(MapProperty::Zero) && images.iter().any(|&k| k != 0) {
                return bad(format!("{label}: zero map with nonzero image rank"));
            }
            if has(MapProperty::Injective) {
                if let (Some(k), Some(s)) = (image, src) {
                    if k != s {
                        return bad(format!("{label}: injective but image rank {k} != source rank {s}"));
                    }
                }
            }
            if has(MapProperty::Surjective) {
                if let (Some(k), Some(t)) = (image, dst) {
                    if k != t {
                        return bad(format!("{label}: surjective but image rank {k} != target rank {t}"));
                    }
                }
            }
            if let Some(k) = image {
                if src.is_some_and(|s| k > s) || dst.is_some_and(|t| k > t) {
                    return bad(format!("{label}: image rank {k} exceeds an endpoint rank"));
                }
            }
        }
        Ok(self)
    }

    fn map_label(&self, i: usize) -> String {
        format!("{}: {} -> {}", self.maps[i].name, self.maps[i].from, self.maps[i].to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankAssignment {
    pub node: String,
    pub rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageRankAssignment {
    pub map: String,
    pub image_rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcome {
    Determined {
        ranks: Vec<RankAssignment>,
        image_ranks: Vec<ImageRankAssignment>,
        euler_characteristic: i64,
    },
    Underdetermined {
        /// Image ranks that are not pinned down.
        free_parameters: Vec<String>,
        /// Dimension of the affine hull of the solution set.
        dimension: usize,
        /// Every solution, when the solution set is finite.
        solutions: Option<Vec<Vec<RankAssignment>>>,
        /// Node ranks common to all solutions.
        determined_ranks: Vec<RankAssignment>,
    },
    Inconsistent {
        violated: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub outcome: SolveOutcome,
    pub trace: Vec<String>,
}

/// `Σ_{i∈vars} r_i = rhs`, labelled by the fact it encodes.
#[derive(Clone, Debug)]
struct Constraint {
    vars: Vec<usize>,
    rhs: u64,
    reason: String,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self.vars.iter().map(|i| format!("r{i}")).collect();
        write!(f, "{} = {}  ({})", lhs.join(" + "), self.rhs, self.reason)
    }
}

fn constraints(hex: &HexagonInstance) -> Vec<Constraint> {
    let mut out = Vec::new();
    for i in 0..6 {
        let prev = (i + 5) % 6;
        let next = (i + 1) % 6;
        if let Some(n) = hex.nodes[i].rank {
            out.push(Constraint {
                vars: vec![prev, i],
                rhs: n,
                reason: format!("exactness at {}: rank = rank im(in) + rank im(out)", hex.nodes[i].name),
            });
        }
        let label = hex.map_label(i);
        for p in &hex.maps[i].properties {
            match *p {
                MapProperty::Zero => out.push(Constraint {
                    vars: vec![i],
                    rhs: 0,
                    reason: format!("{label} is zero"),
                }),
                MapProperty::ImageRank(k) => out.push(Constraint {
                    vars: vec![i],
                    rhs: k,
                    reason: format!("{label} has image rank {k}"),
                }),
                // Injective: the incoming image, which is the kernel, has rank 0.
                MapProperty::Injective => out.push(Constraint {
                    vars: vec![prev],
                    rhs: 0,
                    reason: format!("{label} is injective"),
                }),
                // Surjective: the outgoing kernel is everything, the next image is 0.
                MapProperty::Surjective => out.push(Constraint {
                    vars: vec![next],
                    rhs: 0,
                    reason: format!("{label} is surjective"),
                }),
            }
        }
    }
    out
}

fn node_ranks(hex: &HexagonInstance, r: &[u64; 6]) -> Vec<RankAssignment> {
    (0..6)
        .map(|i| RankAssignment {
            node: hex.nodes[i].name.clone(),
            rank: r[(i + 5) % 6] + r[i],
        })
        .collect()
}

fn euler(ranks: &[RankAssignment]) -> i64 {
    ranks
        .iter()
        .enumerate()
        .map(|(i, a)| if i % 2 == 0 { a.rank as i64 } else { -(a.rank as i64) })
        .sum()
}

/// Rank of a small integer matrix by fraction-free elimination.
fn matrix_rank(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let (a, b) = (rows[rank][c], rows[r][c]);
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x = *x * a - y * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Box enumeration is refused above this many points.
const ENUMERATION_LIMIT: u64 = 1 << 20;

pub fn solve(hex: &HexagonInstance) -> Result<SolveReport> {
    let hex = hex.clone().validated()?;
    let cons = constraints(&hex);
    let mut trace: Vec<String> = cons.iter().map(|c| format!("constraint {c}")).collect();
    let mut lo = [0u64; 6];
    let mut hi = [u64::MAX; 6];

    let inconsistent = |violated: String, mut trace: Vec<String>| {
        trace.push(format!("inconsistent: {violated}"));
        Ok(SolveReport {
            outcome: SolveOutcome::Inconsistent { violated },
            trace,
        })
    };

    let mut changed = true;
    while changed {
        changed = false;
        for c in &cons {
            let sum_lo: u64 = c.vars.iter().map(|&v| lo[v]).sum();
            if sum_lo > c.rhs {
                return inconsistent(c.to_string(), trace);
            }
            for &v in &c.vars {
                let others_lo = sum_lo - lo[v];
                let others_hi = c
                    .vars
                    .iter()
                    .filter(|&&w| w != v)
                    .try_fold(0u64, |acc, &w| acc.checked_add(hi[w]));
                let new_hi = c.rhs - others_lo;
                let new_lo = others_hi.map_or(0, |h| c.rhs.saturating_sub(h));
                let was_fixed = lo[v] == hi[v];
                if new_hi < hi[v] {
                    hi[v] = new_hi;
                    changed = true;
                }
                if new_lo > lo[v] {
                    lo[v] = new_lo;
                    changed = true;
                }
                if lo[v] > hi[v] {
                    return inconsistent(c.to_string(), trace);
                }
                if !was_fixed && lo[v] == hi[v] {
                    trace.push(format!("r{v} = {} from {}", lo[v], c));
                }
            }
        }
    }

    let free: Vec<usize> = (0..6).filter(|&v| lo[v] != hi[v]).collect();
    let param_names: Vec<String> = free.iter().map(|&v| format!("rank im({})", hex.map_label(v))).collect();

    let bounded = free.iter().all(|&v| hi[v] != u64::MAX);
    let box_size = free
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(hi[v].checked_sub(lo[v])?.checked_add(1)?));
    let solutions: Option<Vec<[u64; 6]>> = match box_size {
        Some(n) if bounded && n <= ENUMERATION_LIMIT => {
            let mut sols = Vec::new();
            let mut r = lo;
            'outer: loop {
                if cons.iter().all(|c| c.vars.iter().map(|&v| r[v]).sum::<u64>() == c.rhs) {
                    sols.push(r);
                }
                for &v in &free {
                    if r[v] < hi[v] {
                        r[v] += 1;
                        continue 'outer;
                    }
                    r[v] = lo[v];
                }
                break;
            }
            Some(sols)
        }
        _ => None,
    };

    match solutions.as_deref() {
        Some([]) => {
            let violated = "no nonnegative integer solution to the propagated constraints".to_string();
            inconsistent(violated, trace)
        }
        Some([r]) => {
            let ranks = node_ranks(&hex, r);
            let chi = euler(&ranks);
            assert_eq!(chi, 0, "alternating rank sum of an exact hexagon");
            trace.push(format!("euler characteristic {chi}"));
            let image_ranks = (0..6)
                .map(|i| ImageRankAssignment {
                    map: hex.map_label(i),
                    image_rank: r[i],
                })
                .collect();
            Ok(SolveReport {
                outcome: SolveOutcome::Determined {
                    ranks,
                    image_ranks,
                    euler_characteristic: chi,
                },
                trace,
            })
        }
        Some(sols) => {
            for s in sols {
                assert_eq!(euler(&node_ranks(&hex, s)), 0);
            }
            let base = sols[0];
            let diffs: Vec<Vec<i64>> = sols[1..]
                .iter()
                .map(|s| (0..6).map(|i| s[i] as i64 - base[i] as i64).collect())
                .collect();
            let dimension = matrix_rank(diffs);
            let all: Vec<Vec<RankAssignment>> = sols.iter().map(|s| node_ranks(&hex, s)).collect();
            let determined_ranks = (0..6)
                .filter(|&i| all.iter().all(|s| s[i].rank == all[0][i].rank))
                .map(|i| all[0][i].clone())
                .collect();
            let moving: Vec<String> = free
                .iter()
                .zip(&param_names)
                .filter(|(&v, _)| sols.iter().any(|s| s[v] != base[v]))
                .map(|(_, n)| n.clone())
                .collect();
            trace.push(format!("{} solutions, affine dimension {dimension}", sols.len()));
            Ok(SolveReport {
                outcome: SolveOutcome::Underdetermined {
                    free_parameters: moving,
                    dimension,
                    solutions: Some(all),
                    determined_ranks,
                },
                trace,
            })
        }
        None => {
            // Unbounded: dimension of the solution lattice of the equations
            // restricted to the unfixed image ranks.
            let rows: Vec<Vec<i64>> = cons
                .iter()
                .filter(|c| c.vars.iter().any(|v| free.contains(v)))
                .map(|c| free.iter().map(|v| i64::from(c.vars.contains(v))).collect())
                .collect();
            let dimension = free.len() - matrix_rank(rows);
            let determined_ranks = (0..6)
                .filter(|&i| free.iter().all(|&v| v != i && v != (i + 5) % 6))
                .map(|i| RankAssignment {
                    node: hex.nodes[i].name.clone(),
                    rank: lo[(i + 5) % 6] + lo[i],
                })
                .collect();
            trace.push(format!("unbounded solution set, dimension {dimension}"));
            Ok(SolveReport {
                outcome: SolveOutcome::Underdetermined {
                    free_parameters: param_names,
                    dimension,
                    solutions: None,
                    determined_ranks,
                },
                trace,
            })
        }
    }
}

/// The instance with every node rank and image rank filled in from a
/// determined solve.
pub fn solved_instance(hex: &HexagonInstance, report: &SolveReport) -> Option<HexagonInstance> {
    let SolveOutcome::Determined { ranks, image_ranks, .. } = &report.outcome else {
        return None;
    };
    let mut out = hex.clone().validated().ok()?;
    for (n, a) in out.nodes.iter_mut().zip(ranks) {
        n.rank = Some(a.rank);
    }
    for (m, a) in out.maps.iter_mut().zip(image_ranks) {
        m.properties.retain(|p| !matches!(p, MapProperty::ImageRank(_)));
        m.properties.push(MapProperty::ImageRank(a.image_rank));
    }
    Some(out)
}

/// For a fully specified instance: every node rank equals incoming plus
/// outgoing image rank, and every annotation holds. Returns `false` when
/// something is missing.
pub fn verify_exactness(hex: &HexagonInstance) -> bool {
    let Ok(hex) = hex.clone().validated() else {
        return false;
    };
    let mut r = [0u64; 6];
    for (i, m) in hex.maps.iter().enumerate() {
        let img = m.properties.iter().find_map(|p| match p {
            MapProperty::ImageRank(k) => Some(*k),
            MapProperty::Zero => Some(0),
            _ => None,
        });
        match img {
            Some(k) => r[i] = k,
            None => return false,
        }
    }
    let mut n = [0u64; 6];
    for (i, node) in hex.nodes.iter().enumerate() {
        match node.rank {
            Some(k) => n[i] = k,
            None => return false,
        }
    }
    constraints(&hex)
        .iter()
        .all(|c| c.vars.iter().map(|&v| r[v]).sum::<u64>() == c.rhs)
        && (0..6).all(|i| n[i] == r[(i + 5) % 6] + r[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_of(ranks: &[RankAssignment], name: &str) -> u64 {
        ranks.iter().find(|a| a.node == name).unwrap().rank
    }

    fn fully_known(ranks: [u64; 6], images: [u64; 6]) -> HexagonInstance {
        let mut hex = HexagonInstance::paper_pq(false);
        for (n, k) in hex.nodes.iter_mut().zip(ranks) {
            n.rank = Some(k);
        }
        for (m, k) in hex.maps.iter_mut().zip(images) {
            m.properties = vec![MapProperty::ImageRank(k)];
        }
        hex
    }

    #[test]
    fn paper_instance_is_determined() {
        let hex = HexagonInstance::paper_pq(true);
        let rep = solve(&hex).unwrap();
        let SolveOutcome::Determined { ranks, euler_characteristic, .. } = &rep.outcome else {
            panic!("{rep:?}");
        };
        assert_eq!(rank_of(ranks, "K0(A)"), 3);
        assert_eq!(rank_of(ranks, "K1(A)"), 2);
        assert_eq!(*euler_characteristic, 0);
        let solved = solved_instance(&hex, &rep).unwrap();
        assert!(verify_exactness(&solved));
        let mut perturbed = solved.clone();
        perturbed.nodes[1].rank = Some(4);
        assert!(!verify_exactness(&perturbed));
    }

    #[test]
    fn without_surjection_one_parameter_remains() {
        let rep = solve(&HexagonInstance::paper_pq(false)).unwrap();
        let SolveOutcome::Underdetermined { free_parameters, dimension, solutions, determined_ranks } = &rep.outcome
        else {
            panic!("{rep:?}");
        };
        assert_eq!(*dimension, 1);
        assert_eq!(free_parameters.len(), 3);
        let sols = solutions.as_ref().unwrap();
        assert_eq!(sols.len(), 2);
        let k0: BTreeSet<u64> = sols.iter().map(|s| rank_of(s, "K0(A)")).collect();
        assert_eq!(k0, BTreeSet::from([3, 4]));
        assert_eq!(rank_of(determined_ranks, "K0(B)"), 4);
    }

    #[test]
    fn trivial_instances() {
        // 0 → Z → Z → 0 → 0 → 0 with the middle map an isomorphism.
        let hex = fully_known([0, 1, 1, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert!(verify_exactness(&hex));
        let rep = solve(&hex).unwrap();
        let SolveOutcome::Determined { ranks, .. } = rep.outcome else { panic!() };
        assert_eq!(ranks.iter().map(|a| a.rank).collect::<Vec<_>>(), vec![0, 1, 1, 0, 0, 0]);
        assert!(verify_exactness(&fully_known([0; 6], [0; 6])));
        assert!(!verify_exactness(&fully_known([0, 1, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0])));
    }

    #[test]
    fn inconsistent_and_malformed() {
        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps[3].properties.push(MapProperty::Injective);
        // ι_* on K_1 injective forces δ_0 = 0, contradicting surjectivity onto Z.
        let rep = solve(&hex).unwrap();
        assert!(matches!(rep.outcome, SolveOutcome::Inconsistent { .. }), "{rep:?}");

        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps.pop();
        assert!(matches!(solve(&hex), Err(Error::InvalidHexagon(_))));

        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps[0].to = "K1(B)".into();
        assert!(matches!(solve(&hex), Err(Error::InvalidHexagon(_))));

        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps[1].properties = vec![MapProperty::Zero, MapProperty::ImageRank(2)];
        assert!(matches!(solve(&hex), Err(Error::InvalidHexagon(_))));

        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps[2].properties.push(MapProperty::ImageRank(3));
        assert!(matches!(solve(&hex), Err(Error::InvalidHexagon(_))));
    }

    #[test]
    fn unbounded_instance_reports_dimension() {
        let mut hex = HexagonInstance::paper_pq(false);
        for n in &mut hex.nodes {
            n.rank = None;
        }
        let rep = solve(&hex).unwrap();
        let SolveOutcome::Underdetermined { dimension, solutions, .. } = rep.outcome else { panic!() };
        assert_eq!(dimension, 6);
        assert!(solutions.is_none());
    }

    #[test]
    fn maps_may_be_listed_in_any_order() {
        let mut hex = HexagonInstance::paper_pq(true);
        hex.maps.reverse();
        let a = solve(&hex).unwrap();
        let b = solve(&HexagonInstance::paper_pq(true)).unwrap();
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn json_schema_round_trip() {
        let hex = HexagonInstance::paper_pq(true);
        let json = serde_json::to_string(&hex).unwrap();
        assert!(json.contains(r#""properties":["surjective"]"#));
        assert_eq!(HexagonInstance::from_json(&json).unwrap(), hex);
        let with_image = r#"{"nodes":[{"name":"a","rank":1},{"name":"b"},{"name":"c","rank":0},{"name":"d","rank":0},{"name":"e","rank":0},{"name":"f","rank":0}],
            "maps":[{"from":"a","to":"b","properties":[{"image_rank":1}]},{"from":"b","to":"c"},{"from":"c","to":"d"},{"from":"d","to":"e"},{"from":"e","to":"f"},{"from":"f","to":"a"}]}"#;
        let hex = HexagonInstance::from_json(with_image).unwrap();
        let SolveOutcome::Determined { ranks, .. } = solve(&hex).unwrap().outcome else { panic!() };
        assert_eq!(rank_of(&ranks, "b"), 1);
    }

    /// Oracle: brute force over all image-rank vectors in `[0, 4]^6`.
    #[test]
    fn solver_agrees_with_bruteforce_on_small_instances() {
        let mut checked = 0;
        for mask in 0u32..64 {
            for seed in 0u64..6 {
                let ranks: [u64; 6] = std::array::from_fn(|i| (seed + 3 * i as u64 * (i as u64 + seed)) % 4);
                let mut hex = fully_known(ranks, [0; 6]);
                for m in &mut hex.maps {
                    m.properties.clear();
                }
                for (i, n) in hex.nodes.iter_mut().enumerate() {
                    if mask & (1 << i) == 0 {
                        n.rank = None;
                    }
                }
                if mask.count_ones() < 4 {
                    continue;
                }
                let brute: Vec<[u64; 6]> = (0..4u64.pow(6))
                    .map(|code| std::array::from_fn(|i| (code / 4u64.pow(i as u32)) % 4))
                    .filter(|r: &[u64; 6]| (0..6).all(|i| hex.nodes[i].rank.is_none_or(|n| n == r[(i + 5) % 6] + r[i])))
                    .collect();
                let rep = solve(&hex).unwrap();
                match rep.outcome {
                    SolveOutcome::Determined { .. } => assert_eq!(brute.len(), 1),
                    SolveOutcome::Inconsistent { .. } => assert!(brute.is_empty()),
                    SolveOutcome::Underdetermined { solutions: Some(s), .. } => assert_eq!(s.len(), brute.len()),
                    SolveOutcome::Underdetermined { solutions: None, .. } => {}
                }
                checked += 1;
            }
        }
        assert!(checked > 100);
    }
}
