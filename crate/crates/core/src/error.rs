use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input to a Hermitian routine is not square.
    NotSquare {
        rows: usize,
        cols: usize,
    },
    /// Largest elementwise deviation from Hermitian symmetry exceeded the tolerance.
    NotHermitian {
        asymmetry: f64,
    },
    /// A value that must be strictly positive was not.
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },
    /// Antenna counts must all be at least one.
    InvalidDims,
    ShapeMismatch {
        matrix: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NonFinite {
        what: &'static str,
    },
    InvalidPower {
        what: &'static str,
        value: f64,
    },
    NegativeBudget(f64),
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Mode spectra violate the bounds the solver relies on.
    InvalidSpectrum {
        what: &'static str,
        index: usize,
        value: f64,
    },
    /// H2 has rank zero: no relay transform can carry information.
    RelayPathDead,
    Unsorted {
        which: &'static str,
    },
    InvalidSymbolRate(f64),
    OracleTooLarge {
        modes: usize,
    },
    InvalidGridStep(f64),
    /// The two algebraically equivalent capacity expressions disagree.
    FormMismatch {
        direct: f64,
        rewritten: f64,
    },
    Numerical {
        context: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            Error::NotHermitian { asymmetry } => {
                write!(f, "matrix is not Hermitian (max asymmetry {asymmetry:e})")
            }
            Error::NonPositive { what, index, value } => {
                write!(f, "{what}[{index}] = {value} must be strictly positive")
            }
            Error::InvalidDims => write!(f, "antenna counts t, r, s, u must all be >= 1"),
            Error::ShapeMismatch {
                matrix,
                expected,
                found,
            } => write!(
                f,
                "{matrix} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Error::NonFinite { what } => write!(f, "{what} contains a non-finite entry"),
            Error::InvalidPower { what, value } => write!(f, "invalid power {what} = {value}"),
            Error::NegativeBudget(p) => write!(f, "relay power budget {p} is negative"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::InvalidSpectrum { what, index, value } => {
                write!(f, "{what}[{index}] = {value} is out of range")
            }
            Error::RelayPathDead => {
                write!(
                    f,
                    "relay path dead: H2 has rank zero, fall back to the direct link"
                )
            }
            Error::Unsorted { which } => {
                write!(f, "sequence {which} is not nonnegative and nonincreasing")
            }
            Error::InvalidSymbolRate(r) => write!(f, "symbol rate {r} must lie in (0, 1]"),
            Error::OracleTooLarge { modes } => {
                write!(f, "oracle supports at most 4 modes, got {modes}")
            }
            Error::InvalidGridStep(h) => write!(f, "grid step {h} must lie in (0, 1]"),
            Error::FormMismatch { direct, rewritten } => {
                write!(f, "capacity forms disagree: {direct} vs {rewritten} bits")
            }
            Error::Numerical { context } => write!(f, "numerical failure in {context}"),
        }
    }
}

impl core::error::Error for Error {}
