use crate::error::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbKind {
    /// dBm, converted to watts.
    PowerDbm,
    /// dBi or plain dB, converted to a linear ratio.
    GainDbi,
}

pub fn to_linear(value: f64, kind: DbKind) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cannot convert non-finite decibel value {value}"
        )));
    }
    Ok(match kind {
        DbKind::PowerDbm => 10f64.powf((value - 30.0) / 10.0),
        DbKind::GainDbi => 10f64.powf(value / 10.0),
    })
}

/// Inverse of [`to_linear`]. The linear value must be positive and finite.
pub fn from_linear(value: f64, kind: DbKind) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cannot express {value} in decibels"
        )));
    }
    Ok(match kind {
        DbKind::PowerDbm => 10.0 * value.log10() + 30.0,
        DbKind::GainDbi => 10.0 * value.log10(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_conversions() {
        let p = to_linear(46.0, DbKind::PowerDbm).unwrap();
        assert!((p - 39.810717055349734).abs() < 1e-12);
        assert_eq!(to_linear(0.0, DbKind::GainDbi).unwrap(), 1.0);
        assert!((to_linear(30.0, DbKind::GainDbi).unwrap() - 1000.0).abs() < 1e-9);
        assert!((to_linear(30.0, DbKind::PowerDbm).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(to_linear(f64::NAN, DbKind::GainDbi).is_err());
        assert!(to_linear(f64::INFINITY, DbKind::PowerDbm).is_err());
        assert!(from_linear(0.0, DbKind::GainDbi).is_err());
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -200.0f64..200.0, power in any::<bool>()) {
            let kind = if power { DbKind::PowerDbm } else { DbKind::GainDbi };
            let back = from_linear(to_linear(x, kind).unwrap(), kind).unwrap();
            let scale = x.abs().max(1.0);
            prop_assert!((back - x).abs() <= 1e-12 * scale);
        }
    }
}
