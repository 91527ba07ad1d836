//! Photon flux model: the scene, its analytic statistics and exact sampling.

mod analytic;
mod pulse;
mod sampling;
mod scene;

pub use analytic::{
    alpha, first_photon_amplitudes, first_photon_cdf, first_photon_density, first_photon_mean,
    laser_mean_time, linear_cdf, linear_density, linear_mean, max_sustainable_flux,
    multi_photon_probability, tof_from_mu, FirstPhotonAmplitudes,
};
pub use pulse::{LaserPulse, PulseShape};
pub use sampling::{sample_first_arrival, sample_photon_stream, PhotonStream};
pub use scene::SceneConfig;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Round-trip time of flight for a target at `distance` metres.
pub fn tof_for_distance(distance: f64) -> f64 {
    2.0 * distance / SPEED_OF_LIGHT
}

/// Mean photons per pulse that give a per-window detection probability of
/// `rate` for a lone laser echo (inverts the Poisson zero class).
pub fn photons_for_detection_rate(rate: f64) -> f64 {
    -(-rate).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_tof() {
        assert!((tof_for_distance(3.8) - 25.35e-9).abs() < 0.005e-9);
    }

    #[test]
    fn detection_rate_inversion() {
        assert!((photons_for_detection_rate(0.9) - 10f64.ln()).abs() < 1e-12);
        assert!((photons_for_detection_rate(0.9) - 2.303).abs() < 1e-3);
    }
}
