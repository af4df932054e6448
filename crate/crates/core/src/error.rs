use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("Legendre symbol ({numerator}/{p}) is not defined by this routine for p = {p}")]
    ExcludedPrime { numerator: i64, p: u64 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),

    #[error("generator {0} has non-unit determinant")]
    NonUnitDeterminant(String),

    #[error("matrices over different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),

    #[error("SL2(Z/{n}Z) has {count} elements, above the enumeration cap of {cap}")]
    CapExceeded { n: u64, count: u64, cap: u64 },

    #[error("invalid subgroup spec: {0}")]
    InvalidSpec(String),

    #[error("{what}: {numerator} is not divisible by {denominator}")]
    NotIntegral {
        what: &'static str,
        numerator: i64,
        denominator: i64,
    },

    #[error("genus assembly gave a negative value for (i, e2, e3, einf) = {0:?}")]
    NegativeGenus((u64, u64, u64, u64)),

    #[error("no inert quadratic algebra found for modulus {0} within the search bound")]
    AlgebraSearchExhausted(u64),

    #[error("no S4 subgroup of PGL2(F_{0}) found")]
    S4NotFound(u64),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
