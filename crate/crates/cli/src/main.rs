//! `adelic`: command-line front end for the `adelic-covers` library.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use adelic_covers::covers::{cover_fiber_over_cp, density_scan, ramification_set};
use adelic_covers::extension::AbelianExtensionSpec;
use adelic_covers::ktheory::{self, HexagonInstance, SolveOutcome};
use adelic_covers::place::{Place, PlaceSet};
use adelic_covers::profinite::{injectivity_witness, linking_table_csv};
use adelic_covers::schwartz::{GridLimits, ProductBSFunction};
use adelic_covers::semilocal::{self, SemilocalAdele, DEFAULT_PRECISION};
use adelic_covers::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "adelic", version, about = "Abelian covers of the adele class space of Q")]
struct Cli {
    /// TOML file with defaults, e.g. `precision = 6`. Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Components of the cover over the periodic orbit of a prime.
    Cover {
        /// `cyclotomic:m`, `quadratic:d`, `rational`, or `{"modulus":m,"kernel":[...]}`.
        #[arg(long)]
        ext: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Shorthand for `--format dot`.
        #[arg(long)]
        dot: bool,
    },
    /// Ramified places and the smallest set outside which the cover is unramified.
    Ramify {
        #[arg(long)]
        ext: String,
    },
    /// Frobenius distribution over unramified primes up to a bound.
    Density {
        #[arg(long)]
        ext: String,
        #[arg(long)]
        bound: u64,
    },
    /// Image of the Frobenius of p in (Z/q^k)*.
    Linking {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        precision: Option<u32>,
        /// Maximal number of powers checked for distinctness.
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// CSV matrix of `p mod q^k : order` for a list of primes.
    LinkingTable {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Zero set and codimension of a semilocal adele.
    Strata {
        #[arg(long)]
        places: String,
        /// JSON object of rational strings, e.g. `{"2":"12","3":"0","inf":"-5/2"}`.
        #[arg(long)]
        adele: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Canonical mapping-torus form of an adele on the orbit of one prime.
    Reduce {
        #[arg(long)]
        places: String,
        #[arg(long)]
        orbit_prime: u64,
        #[arg(long)]
        adele: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Factorization test of a product Bruhat–Schwartz table.
    SchwartzCheck {
        /// Table JSON, inline or a file path.
        #[arg(long)]
        table: String,
        /// Place to test; all places when omitted.
        #[arg(long)]
        place: Option<u64>,
    },
    /// Solve ranks around a six-term exact sequence.
    Ktheory {
        /// `paper-pq`, `paper-pq-bare` (no surjectivity input), or JSON inline / file path.
        #[arg(long)]
        instance: String,
    },
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    precision: Option<u32>,
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

/// Inline text, or the contents of a file when the argument names one.
fn inline_or_file(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read `{arg}`: {e}")))
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn fraction(num: u64, den: u64) -> String {
    if den == 0 {
        return "0".into();
    }
    adelic_covers::rational::format(&num_ratio(num, den))
}

fn num_ratio(num: u64, den: u64) -> adelic_covers::rational::Rational {
    adelic_covers::rational::from_u64(num) / adelic_covers::rational::from_u64(den)
}

fn run(cli: Cli) -> Result<String, Failure> {
    let config = load_config(cli.config.as_ref())?;
    let precision = |flag: Option<u32>| flag.or(config.precision).unwrap_or(DEFAULT_PRECISION);
    match cli.command {
        Command::Cover { ext, prime, format, dot } => {
            let ext = AbelianExtensionSpec::parse(&ext)?;
            let report = cover_fiber_over_cp(&ext, prime)?;
            if dot || format == Format::Dot {
                Ok(report.to_dot())
            } else {
                Ok(pretty(&serde_json::to_value(&report).expect("serializable")))
            }
        }
        Command::Ramify { ext } => {
            let ext = AbelianExtensionSpec::parse(&ext)?;
            let r = ramification_set(&ext);
            Ok(pretty(&json!({
                "ext": ext.to_json(),
                "conductor": ext.conductor(),
                "degree": ext.degree(),
                "ramified_finite_primes": r.ramified_finite_primes,
                "always_ramified_archimedean": r.always_ramified_archimedean,
                "smallest_unramified_outside_set": r.smallest_unramified_outside_set,
            })))
        }
        Command::Density { ext, bound } => {
            let ext = AbelianExtensionSpec::parse(&ext)?;
            let h = density_scan(&ext, bound)?;
            let counts: BTreeMap<String, u64> = h.counts.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            Ok(pretty(&json!({
                "ext": ext.to_json(),
                "bound": h.bound,
                "degree": ext.degree(),
                "unramified_primes": h.unramified_primes,
                "nontrivial": h.nontrivial,
                "nontrivial_fraction": fraction(h.nontrivial, h.unramified_primes),
                "expected_nontrivial_fraction": fraction(ext.degree() as u64 - 1, ext.degree() as u64),
                "counts": counts,
            })))
        }
        Command::Linking { p, q, precision: k, bound } => {
            let w = injectivity_witness(p, q, precision(k), bound)?;
            Ok(pretty(&serde_json::to_value(&w).expect("serializable")))
        }
        Command::LinkingTable { primes, precision: k } => Ok(linking_table_csv(&primes, precision(k))?),
        Command::Strata { places, adele, precision: k } => {
            let places = PlaceSet::parse(&places)?;
            let a = SemilocalAdele::parse_json(&places, &inline_or_file(&adele)?, precision(k))?;
            let st = semilocal::strata(&a);
            let orbit: Vec<String> = st.zero_places.iter().map(Place::to_string).collect();
            Ok(pretty(&json!({
                "places": places,
                "Z": st.zero_places,
                "nu": st.nu,
                "orbit": format!("{{{}}}", orbit.join(",")),
                "section": semilocal::section_rho(&a).components(),
            })))
        }
        Command::Reduce { places, orbit_prime, adele, precision: k } => {
            let places = PlaceSet::parse(&places)?;
            let k = precision(k);
            let a = SemilocalAdele::parse_json(&places, &inline_or_file(&adele)?, k)?;
            let r = semilocal::reduce_orbit_cp(&a, orbit_prime)?;
            let h: BTreeMap<String, u64> = r
                .point
                .h
                .residues()
                .iter()
                .map(|(q, u)| (q.to_string(), *u))
                .collect();
            let moduli: BTreeMap<String, u64> = r
                .point
                .h
                .profile()
                .primes()
                .map(|q| (q.to_string(), r.point.h.profile().modulus(q)))
                .collect();
            Ok(pretty(&json!({
                "places": places,
                "orbit_prime": orbit_prime,
                "precision": k,
                "h": h,
                "h_moduli": moduli,
                "t": adelic_covers::rational::format(&r.point.t),
                "shift": r.shift,
            })))
        }
        Command::SchwartzCheck { table, place } => {
            let f = ProductBSFunction::from_json(&inline_or_file(&table)?)?;
            GridLimits::default().check(&f)?;
            let places = match place {
                Some(v) => vec![v],
                None => f.places(),
            };
            let mut results = Vec::new();
            for v in places {
                let factorable = f.is_factorable_at(v)?;
                let factor = if factorable {
                    let g: Value = serde_json::from_str(&f.factor_out(v)?.to_json()).expect("valid JSON");
                    g
                } else {
                    Value::Null
                };
                results.push(json!({ "place": v, "factorable": factorable, "factor": factor }));
            }
            Ok(pretty(&json!({
                "places": f.places(),
                "results": results,
            })))
        }
        Command::Ktheory { instance } => {
            let hex = match instance.as_str() {
                "paper-pq" => HexagonInstance::paper_pq(true),
                "paper-pq-bare" => HexagonInstance::paper_pq(false),
                other => HexagonInstance::from_json(&inline_or_file(other)?)?,
            };
            let report = ktheory::solve(&hex)?;
            let mut out = serde_json::to_value(&report).expect("serializable");
            if let SolveOutcome::Determined { ranks, .. } = &report.outcome {
                let solved: BTreeMap<&str, u64> = hex
                    .nodes
                    .iter()
                    .filter(|n| n.rank.is_none())
                    .filter_map(|n| ranks.iter().find(|a| a.node == n.name).map(|a| (n.name.as_str(), a.rank)))
                    .collect();
                out["solved"] = json!(solved);
            }
            Ok(pretty(&out))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", error_kind(&e));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
