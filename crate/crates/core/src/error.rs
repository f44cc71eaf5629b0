use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what}: {value} is not a probability")]
    InvalidProbability { what: String, value: f64 },
    #[error("row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: f64 },
    #[error("{users} users exceeds the supported maximum of {max}")]
    TooManyUsers { users: usize, max: usize },
    #[error("operation needs a single-user channel, got {users} users")]
    NotSingleUser { users: usize },
    #[error("invalid rate {0}")]
    InvalidRate(f64),
    #[error("rates of user {user} are not strictly increasing")]
    RatesNotIncreasing { user: usize },
    #[error("user {user} has no rate points")]
    EmptyRateProfile { user: usize },
    #[error("operation region is empty")]
    EmptyRegion,
    #[error("region member {member}: {reason}")]
    BadRegionMember { member: usize, reason: String },
    #[error("subset must be a proper subset of the users")]
    FullSubset,
    #[error("invalid optimizer configuration: {0}")]
    InvalidOptimizer(&'static str),
    #[error("invalid threshold parameters: rho={rho}, s={s}")]
    InvalidThreshold { rho: f64, s: f64 },
    #[error("empty representative set for grid cell")]
    EmptyRepresentativeSet,
    #[error("invalid rate grid for user {user}: {reason}")]
    InvalidGrid { user: usize, reason: String },
    #[error("codebook needs {required} symbols, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("exact enumeration needs {size} evaluations, limit is {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },
    #[error("codeword length must be at least 1")]
    ZeroLength,
    #[error("{0}")]
    Invalid(String),
}
