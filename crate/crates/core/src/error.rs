use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial must be monic of degree 2 or 3, got degree {0}")]
    UnsupportedDegree(usize),

    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(i64),

    #[error("polynomial is reducible over Q (integer root {0})")]
    Reducible(i64),

    #[error("polynomial has no real root greater than 1")]
    NoDominantRoot,

    #[error("coefficient overflow while {0}")]
    Overflow(&'static str),

    #[error("element has {got} coordinates, base has degree {want}")]
    CoordinateCount { got: usize, want: usize },

    #[error("division by zero element")]
    DivisionByZero,

    #[error("operation requires a degree-{want} base, got degree {got}")]
    DegreeMismatch { got: usize, want: usize },

    #[error("operation requires a Pisot unit base")]
    NotPisotUnit,

    #[error("{what} must lie in [0, 1)")]
    OutOfUnitInterval { what: &'static str },

    #[error("digit {digit} is outside the alphabet 0..={max}")]
    DigitOutOfRange { digit: i64, max: i64 },

    #[error("period must be non-empty")]
    EmptyPeriod,

    #[error("orbit budget of {budget} steps exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("requested precision {0} is below what f64 intervals can certify")]
    PrecisionTooFine(f64),

    #[error("cell size must be positive")]
    BadCellSize,

    #[error("point enclosure width {width} exceeds half the cell size {cell}")]
    PointsTooWide { width: f64, cell: f64 },

    #[error("raster region is degenerate or too large ({0} cells)")]
    BadRegion(u64),

    #[error("point cloud would exceed the node budget ({estimate} nodes > {budget})")]
    CloudTooLarge { estimate: u64, budget: u64 },

    #[error("subtile index {index} out of range (base has {count} gap classes)")]
    SubtileIndex { index: usize, count: usize },

    #[error("denominator too large for the fast orbit engine")]
    DenominatorTooLarge,

    #[error("operation requires a base with a complex conjugate pair")]
    NotComplex,

    #[error("invalid probe: {0}")]
    BadProbe(&'static str),

    #[error("probe point ({x}, {y}) falls outside the raster margin")]
    ProbeOutsideRaster { x: f64, y: f64 },

    #[error("invalid scan range: need 0 <= lo < hi <= 1")]
    BadScanRange,

    #[error("parse error: {0}")]
    Parse(String),
}
