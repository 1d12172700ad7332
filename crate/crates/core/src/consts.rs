//! Physical and 802.11ad constants shared across modules.

/// Propagation speed used throughout (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// DMG control / single-carrier chip rate (Hz).
pub const CHIP_RATE_HZ: f64 = 1.76e9;

/// Chip interval T_c (s).
pub const CHIP_INTERVAL_S: f64 = 1.0 / CHIP_RATE_HZ;

/// Carrier frequency (Hz).
pub const CARRIER_HZ: f64 = 60.0e9;

/// Carrier wavelength (m), 5 mm at 60 GHz.
pub const WAVELENGTH_M: f64 = SPEED_OF_LIGHT / CARRIER_HZ;

/// Range bin width c*T_c/2 (m).
pub const RANGE_BIN_M: f64 = SPEED_OF_LIGHT * CHIP_INTERVAL_S / 2.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wavelength_is_five_mm() {
        assert!((WAVELENGTH_M - 0.005).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn db_round_trip(db in -200.0f64..200.0) {
            let back = linear_to_db(db_to_linear(db));
            prop_assert!((back - db).abs() <= 1e-9 * db.abs().max(1.0));
        }

        #[test]
        fn linear_round_trip(lin in 1e-15f64..1e15) {
            let back = db_to_linear(linear_to_db(lin));
            prop_assert!(((back - lin) / lin).abs() < 1e-9);
        }
    }
}
