use serde::{Deserialize, Serialize};

/// An analytic fidelity or probability bound, kept alongside its unclamped value.
///
/// Closed-form bounds routinely go negative (or above one) outside their
/// asymptotic regime; such bounds are trivial and reported as clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl Bound {
    pub fn new(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Bound { value, raw, clamped: value != raw }
    }

    /// A clamped bound carries no information.
    pub fn is_trivial(&self) -> bool {
        self.clamped || self.value == 0.0
    }
}

impl From<Bound> for f64 {
    fn from(b: Bound) -> f64 {
        b.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_both_sides() {
        assert_eq!(Bound::new(-0.3).value, 0.0);
        assert!(Bound::new(-0.3).clamped);
        assert_eq!(Bound::new(1.2).value, 1.0);
        let b = Bound::new(0.4);
        assert!(!b.clamped && !b.is_trivial());
        assert_eq!(f64::from(b), 0.4);
    }
}
