/// Numerical tolerances used by every approximate check.
///
/// Exact data (conformal weights, central charges, multiplicities) is never
/// compared with a tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance for real-valued invariants (unitarity, FPdim balance, ...).
    pub check: f64,
    /// Maximum distance of a pre-rounding Verlinde value from an integer.
    pub verlinde: f64,
    /// Magnitudes below this are snapped to zero in generated S-matrices.
    pub snap: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        check: 1e-9,
        verlinde: 1e-6,
        snap: 1e-13,
    };

    pub fn with_check(check: f64) -> Self {
        Tolerances {
            check,
            ..Self::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
