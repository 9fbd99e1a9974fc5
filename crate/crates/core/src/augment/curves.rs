//! Per-bin magnitude curves and the time-domain wobble envelope.

use std::f64::consts::{LN_2, PI};

use crate::audio::db_to_amplitude;

/// Low-pass magnitude gain `1 / (1 + (f/fc)^p)`.
pub fn lowpass_gain(f_hz: f64, fc_hz: f64, slope_p: f64) -> f64 {
    1.0 / (1.0 + (f_hz / fc_hz).powf(slope_p))
}

/// Low-frequency shelf: `10^(boost_db/20)` at DC, fading linearly to unity at `corner_hz`.
pub fn shelf_gain(f_hz: f64, boost_db: f64, corner_hz: f64) -> f64 {
    if f_hz >= corner_hz {
        return 1.0;
    }
    let dc = db_to_amplitude(boost_db);
    dc + (1.0 - dc) * (f_hz / corner_hz)
}

/// Sinusoidal ripple across frequency, clamped at zero.
pub fn ripple_gain(f_hz: f64, period_hz: f64, depth: f64) -> f64 {
    (1.0 + depth * (2.0 * PI * f_hz / period_hz).sin()).max(0.0)
}

/// Gaussian dip in log-frequency, `scoop_db` deep at `center_hz` with bandwidth `center_hz / q`.
pub fn scoop_gain(f_hz: f64, scoop_db: f64, center_hz: f64, q: f64) -> f64 {
    if f_hz <= 0.0 {
        return 1.0;
    }
    let x = (f_hz / center_hz).ln() * q / LN_2;
    10f64.powf(scoop_db / 20.0 * (-x * x).exp())
}

/// `1 - depth * (0.5 + 0.5 sin(2π rate t))`.
pub fn wobble_gain(t_s: f64, rate_hz: f64, depth: f64) -> f64 {
    1.0 - depth * (0.5 + 0.5 * (2.0 * PI * rate_hz * t_s).sin())
}
