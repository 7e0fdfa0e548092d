//! Decay of the wavefunction along the asymptotes of the integration contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QesError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Asymptote `x = −ρe^{iφ}` (left) or `x = ρe^{−iφ}` (right), bent below the real axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourRay {
    pub side: Side,
    pub phi: f64,
    pub rho: f64,
}

impl ContourRay {
    pub fn new(side: Side, phi: f64, rho: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < PI / 3.0) {
            return Err(QesError::Domain(format!("ray angle must lie in (0, pi/3), got {phi}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(QesError::Domain(format!("ray radius must be positive, got {rho}")));
        }
        Ok(ContourRay { side, phi, rho })
    }

    pub fn point(&self) -> Complex64 {
        match self.side {
            Side::Right => Complex64::from_polar(self.rho, -self.phi),
            Side::Left => -Complex64::from_polar(self.rho, self.phi),
        }
    }
}

/// `Re[−(i/3)x³]/ρ³` along the ray; negative means decay.
pub fn decay_rate(ray: &ContourRay) -> f64 {
    decay_rate_at(ray.phi)
}

/// Same rate for any angle, boundaries included. Both sides give `−sin(3φ)/3`.
pub fn decay_rate_at(phi: f64) -> f64 {
    let r = -(3.0 * phi).sin() / 3.0;
    if r.abs() <= 4.0 * f64::EPSILON {
        0.0
    } else {
        r
    }
}

/// `ψ(x) = exp(−ix³/3 − βx²/2 − iγx) Σ ω_n (ix)^{n−ℓ}` on the principal branch.
pub fn wavefunction(x: Complex64, ell: f64, beta: f64, gamma: f64, omega: &[Complex64]) -> Complex64 {
    let i = Complex64::i();
    let ix = i * x;
    let phase = -i * x * x * x / 3.0 - beta * x * x / 2.0 - i * gamma * x;
    let series: Complex64 = omega
        .iter()
        .enumerate()
        .map(|(n, w)| w * ix.powc(Complex64::new(n as f64 - ell, 0.0)))
        .sum();
    phase.exp() * series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        assert!((decay_rate_at(PI / 6.0) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(decay_rate_at(PI / 3.0), 0.0);
        assert!(decay_rate_at(1e-9).abs() < 1e-8);
        assert!(decay_rate_at(1e-9) < 0.0);
    }

    #[test]
    fn wedge() {
        for k in 1..300 {
            let phi = k as f64 * (PI / 3.0) / 300.0;
            assert!(decay_rate_at(phi) < 0.0, "{phi}");
        }
        assert!(decay_rate_at(0.0) >= 0.0);
        assert!(decay_rate_at(PI / 3.0) >= 0.0);
    }

    #[test]
    fn ray_validation() {
        assert!(ContourRay::new(Side::Left, 0.0, 1.0).is_err());
        assert!(ContourRay::new(Side::Right, PI / 3.0, 1.0).is_err());
        assert!(ContourRay::new(Side::Right, 0.3, -1.0).is_err());
        let r = ContourRay::new(Side::Left, 0.3, 2.0).unwrap();
        assert_eq!(decay_rate(&r), decay_rate_at(0.3));
    }

    #[test]
    fn both_sides_share_the_rate() {
        for side in [Side::Left, Side::Right] {
            let ray = ContourRay::new(side, 0.4, 3.0).unwrap();
            let x = ray.point();
            let direct = (-Complex64::i() * x * x * x / 3.0).re / 27.0;
            assert!((direct - decay_rate(&ray)).abs() < 1e-12);
        }
    }

    #[test]
    fn wavefunction_decays_inside_wedge() {
        // N = 0 closed form at ell = 3, beta = 1, gamma = 2
        let omega = [Complex64::new(1.0, 0.0)];
        for side in [Side::Left, Side::Right] {
            let mags: Vec<f64> = [3.0, 5.0, 8.0]
                .iter()
                .map(|&rho| {
                    let x = ContourRay::new(side, PI / 6.0, rho).unwrap().point();
                    wavefunction(x, 3.0, 1.0, 2.0, &omega).norm()
                })
                .collect();
            assert!(mags[0] > mags[1] && mags[1] > mags[2], "{mags:?}");
        }
    }
}
