use serde::Serialize;

use crate::error::{invalid, Result};

/// Global numerical tolerances.
///
/// Every rank decision, positivity test and spectral window in the crate reads
/// its threshold from one of these fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolerancePolicy {
    /// Relative singular-value cutoff for numerical rank.
    pub rank_rel: f64,
    /// Relative allowance for negative eigenvalues of PSD operators.
    pub psd_rel: f64,
    /// Absolute deviation allowed in `Σ A_k†A_k = 1`.
    pub tp_abs: f64,
    /// Relative modulus window that defines the peripheral spectrum.
    pub peripheral_rel: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { rank_rel: 1e-10, psd_rel: 1e-9, tp_abs: 1e-9, peripheral_rel: 1e-8 }
    }
}

impl TolerancePolicy {
    pub fn new(rank_rel: f64, psd_rel: f64, tp_abs: f64, peripheral_rel: f64) -> Result<Self> {
        let pol = Self { rank_rel, psd_rel, tp_abs, peripheral_rel };
        pol.check()?;
        Ok(pol)
    }

    pub fn with_rank_rel(self, rank_rel: f64) -> Result<Self> {
        Self::new(rank_rel, self.psd_rel, self.tp_abs, self.peripheral_rel)
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("rank_rel", self.rank_rel),
            ("psd_rel", self.psd_rel),
            ("tp_abs", self.tp_abs),
            ("peripheral_rel", self.peripheral_rel),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(format!("tolerance {name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert!(TolerancePolicy::default().check().is_ok());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(TolerancePolicy::new(0.0, 1e-9, 1e-9, 1e-8).is_err());
        assert!(TolerancePolicy::new(1e-10, 1.0, 1e-9, 1e-8).is_err());
        assert!(TolerancePolicy::default().with_rank_rel(f64::NAN).is_err());
    }
}
