use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 1")]
    InvalidModulus,
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: i128, modulus: u64 },
    #[error("generator {value} is not coprime to {modulus}")]
    InvalidGenerator { value: u64, modulus: u64 },
    #[error("element set modulo {modulus} is not a subgroup: {reason}")]
    NotASubgroup { modulus: u64, reason: String },
    #[error("residue modulus {modulus} is not a multiple of the conductor {conductor}")]
    IncompatibleModulus { modulus: u64, conductor: u64 },
    #[error("invalid extension spec: {0}")]
    InvalidExtension(String),
    #[error("field {source_desc} is not contained in {target_desc}")]
    NotASubfield {
        source_desc: String,
        target_desc: String,
    },
    #[error("twist {rep} is not an element of the source Galois group")]
    InvalidTwist { rep: u64 },
    #[error("morphisms cannot be composed: target of the first differs from source of the second")]
    CompositionMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {prime} is ramified (divides conductor {conductor})")]
    RamifiedPrime { prime: u64, conductor: u64 },
    #[error("stabilizer undefined when the archimedean place is a zero place")]
    ArchimedeanZeroUnsupported,
    #[error("place set must contain the archimedean place")]
    MissingArchimedeanPlace,
    #[error("density bound must be at least 2")]
    InvalidBound,
    #[error("prime {0} is both the base and the linked prime")]
    SelfLinkingUndefined(u64),
    #[error("precision exponent must be at least 1 (prime {prime})")]
    InvalidPrecision { prime: u64 },
    #[error("{prime}^{exponent} does not fit in 64 bits")]
    PrecisionOverflow { prime: u64, exponent: u32 },
    #[error("precision profiles differ")]
    ProfileMismatch,
    #[error("scale must be a positive rational")]
    InvalidScale,
    #[error("adele components do not match the place set: {0}")]
    PlaceMismatch(String),
    #[error("prime {0} is not in the place set")]
    PrimeNotInPlaceSet(u64),
    #[error("adele does not lie on the periodic orbit of {prime}")]
    NotOnOrbitCp { prime: u64 },
    #[error("place {0} is not present in the function")]
    PlaceNotPresent(u64),
    #[error("place {0} is already present in the function")]
    PlaceAlreadyPresent(u64),
    #[error("function is not of the form 1_Z{0} (x) g")]
    NotFactorable(u64),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid hexagon: {0}")]
    InvalidHexagon(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
