//! Binary hypothesis test between the noise-limited regime (H0: signal plus
//! Gaussian noise, received power `φ + σ²·χ²₁`) and the interference-limited
//! regime (H1: shifted exponential fitted to the mean received power).

use crate::error::{Error, Result};
use crate::interference::{dbm_to_watts, InterferenceModel};
use crate::numerics::{
    erf, erfc, erfc_inv, find_root, integrate_pieces, ln_gamma_unchecked, reg_lower_gamma,
    Tolerance,
};
use crate::system::SystemConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Thermal noise floor in dBm/Hz at room temperature.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Thermal noise power (W) over `bandwidth` Hz.
pub fn thermal_noise_watts(bandwidth: f64) -> f64 {
    dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Noise variance σ², equal to the mean noise power (W).
    pub sigma2: f64,
    /// Mean received power of the desired signal φ (W).
    pub phi: f64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::config("sigma2", self.sigma2, "must be finite and > 0"));
        }
        if !(self.phi >= 0.0) || !self.phi.is_finite() {
            return Err(Error::config("phi", self.phi, "must be finite and >= 0"));
        }
        Ok(())
    }

    fn u(&self, y: f64) -> f64 {
        (y - self.phi) / (2.0 * self.sigma2)
    }
}

/// H0 density of the received power; zero at and below φ.
pub fn h0_pdf(y: f64, noise: &NoiseConfig) -> f64 {
    if !(y > noise.phi) {
        return 0.0;
    }
    let u = noise.u(y);
    (-u).exp() / (PI.sqrt() * (2.0 * noise.sigma2 * (y - noise.phi)).sqrt())
}

pub fn h0_cdf(y: f64, noise: &NoiseConfig) -> f64 {
    if !(y > noise.phi) {
        return 0.0;
    }
    erf(noise.u(y).sqrt())
}

/// Upper tail `1 - h0_cdf`, kept accurate far into the tail.
pub fn h0_sf(y: f64, noise: &NoiseConfig) -> f64 {
    if !(y > noise.phi) {
        return 1.0;
    }
    erfc(noise.u(y).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Root of `(λφ+1)e^{-λφ} - E[y]λ² = 0`.
    #[default]
    PaperEquation,
    /// Shifted-exponential mean identity `λ = 1/(E[y] - φ)`.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeFit {
    /// Rate of the shifted exponential (1/W).
    pub lambda: f64,
    pub mode: FitMode,
    /// E[y] the fit was made against (W).
    pub mean_used: f64,
}

fn paper_equation(lambda: f64, mean_y: f64, phi: f64) -> f64 {
    (lambda * phi + 1.0) * (-lambda * phi).exp() - mean_y * lambda * lambda
}

/// Fit the H1 shifted exponential to the mean received power.
pub fn fit_me_lambda(mean_y: f64, phi: f64, mode: FitMode) -> Result<MeFit> {
    if !(mean_y > phi) || !mean_y.is_finite() || !(phi >= 0.0) {
        return Err(Error::InfeasibleFit { mean_y, phi });
    }
    let lambda = match mode {
        FitMode::ClosedForm => 1.0 / (mean_y - phi),
        FitMode::PaperEquation => {
            let scale = phi.max(mean_y - phi);
            let tol = Tolerance {
                rel: 1e-15,
                abs: 1e-13,
                max_iter: 500,
            };
            find_root(
                |l| paper_equation(l, mean_y, phi),
                1e-12 / scale,
                1e12 / scale,
                tol,
            )?
        }
    };
    Ok(MeFit {
        lambda,
        mode,
        mean_used: mean_y,
    })
}

impl MeFit {
    /// Residual of the defining equation at the fitted λ.
    pub fn residual(&self, phi: f64) -> f64 {
        match self.mode {
            FitMode::ClosedForm => phi + 1.0 / self.lambda - self.mean_used,
            FitMode::PaperEquation => paper_equation(self.lambda, self.mean_used, phi),
        }
    }
}

/// H1 density `λ e^{-λ(y-φ)}` on `[φ, ∞)`.
pub fn h1_pdf(y: f64, fit: &MeFit, phi: f64) -> f64 {
    if y < phi {
        return 0.0;
    }
    fit.lambda * (-fit.lambda * (y - phi)).exp()
}

/// Natural log of the likelihood ratio h1/h0 at `y > φ`.
pub fn ln_lrt(y: f64, fit: &MeFit, noise: &NoiseConfig) -> Result<f64> {
    if !(y > noise.phi) {
        return Err(Error::Domain(format!(
            "likelihood ratio needs y > phi, got y = {y:e}, phi = {:e}",
            noise.phi
        )));
    }
    let s2 = noise.sigma2;
    let t = y - noise.phi;
    Ok((2.0 * PI.sqrt() * s2 * fit.lambda).ln()
        + (0.5 / s2 - fit.lambda) * t
        + 0.5 * (t / (2.0 * s2)).ln())
}

/// Likelihood ratio h1/h0 at `y > φ`; overflows to +inf far above the noise floor.
pub fn lrt(y: f64, fit: &MeFit, noise: &NoiseConfig) -> Result<f64> {
    let value = ln_lrt(y, fit, noise)?.exp();
    #[cfg(debug_assertions)]
    {
        if noise.u(y) < 1e3 {
            let (h1, h0) = (h1_pdf(y, fit, noise.phi), h0_pdf(y, noise));
            if h0 > 0.0 && h1 > 0.0 && value.is_finite() && value > 0.0 {
                debug_assert!(((h1 / h0) / value - 1.0).abs() < 1e-9);
            }
        }
    }
    Ok(value)
}

/// Neyman-Pearson threshold η′ with false-alarm probability exactly `beta_th`.
pub fn np_threshold(beta_th: f64, noise: &NoiseConfig) -> Result<f64> {
    if !(beta_th > 0.0 && beta_th <= 1.0) {
        return Err(Error::Domain(format!(
            "significance level {beta_th} outside (0, 1]; beta = 0 needs an infinite threshold"
        )));
    }
    let x = erfc_inv(beta_th)?;
    Ok(2.0 * noise.sigma2 * x * x + noise.phi)
}

/// P_D = e^{-λ(η′-φ)}, the H1 exceedance probability of the threshold.
pub fn detection_probability(fit: &MeFit, eta_prime: f64, phi: f64) -> f64 {
    (-fit.lambda * (eta_prime - phi).max(0.0)).exp()
}

/// Area under the likelihood-ratio curve, kept in log form because the ratio
/// grows like `e^{y/(2σ²)}` whenever λ < 1/(2σ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtArea {
    pub ln_area: f64,
    /// `exp(ln_area)`; +inf when that overflows.
    pub area: f64,
    pub y_max: f64,
}

/// Default upper integration limit φ + 20·max(2σ², 1/λ).
pub fn default_lrt_y_max(fit: &MeFit, noise: &NoiseConfig) -> f64 {
    noise.phi + 20.0 * (2.0 * noise.sigma2).max(1.0 / fit.lambda)
}

/// ∫_φ^{y_max} lrt(y) dy.
pub fn lrt_area(fit: &MeFit, noise: &NoiseConfig, y_max: Option<f64>) -> Result<LrtArea> {
    let y_max = y_max.unwrap_or_else(|| default_lrt_y_max(fit, noise));
    if !(y_max > noise.phi) {
        return Err(Error::Domain(format!(
            "lrt_area needs y_max > phi, got {y_max:e} <= {:e}",
            noise.phi
        )));
    }
    let s2 = noise.sigma2;
    let span = y_max - noise.phi;
    let c = 0.5 / s2 - fit.lambda;
    // lrt(φ+t) = A e^{ct} √t with ln A below; ln_i = ln ∫_0^span e^{ct} √t dt
    let ln_a = (2.0 * PI.sqrt() * s2 * fit.lambda).ln() - 0.5 * (2.0 * s2).ln();
    let ln_i = if c == 0.0 {
        (2.0 / 3.0f64).ln() + 1.5 * span.ln()
    } else if c < 0.0 {
        let k = -c;
        -1.5 * k.ln() + ln_gamma_unchecked(1.5) + reg_lower_gamma(1.5, k * span)?.ln()
    } else {
        // s = c(span - t) moves the dominant upper end to s = 0
        let k = c * span;
        let upper = k.min(60.0);
        let mut pts = vec![0.0];
        if upper > 1.0 {
            pts.push(1.0);
        }
        pts.push(upper);
        let tol = Tolerance {
            rel: 1e-12,
            abs: 0.0,
            max_iter: 2000,
        };
        let j = integrate_pieces(|s| (-s).exp() * (1.0 - s / k).max(0.0).sqrt(), &pts, tol)?;
        k - c.ln() + 0.5 * span.ln() + j.value.ln()
    };
    let ln_area = ln_a + ln_i;
    Ok(LrtArea {
        ln_area,
        area: ln_area.exp(),
        y_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub beta: f64,
    pub p_f: f64,
    pub p_d: f64,
}

/// ROC points for the NP test at each significance level, sorted by P_F.
pub fn roc_curve(fit: &MeFit, noise: &NoiseConfig, betas: &[f64]) -> Result<Vec<RocPoint>> {
    let mut out = betas
        .iter()
        .map(|&beta| {
            let eta = np_threshold(beta, noise)?;
            Ok(RocPoint {
                beta,
                p_f: beta,
                p_d: detection_probability(fit, eta, noise.phi),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.p_f.total_cmp(&b.p_f));
    Ok(out)
}

/// ROC point for an explicit threshold; reaches P_F values below the
/// smallest representable significance level.
pub fn roc_point_at_threshold(fit: &MeFit, noise: &NoiseConfig, eta_prime: f64) -> RocPoint {
    let p_f = h0_sf(eta_prime, noise);
    RocPoint {
        beta: p_f,
        p_f,
        p_d: detection_probability(fit, eta_prime, noise.phi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoiseLimited,
    InterferenceLimited,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NoiseLimited => "noise_limited",
            Verdict::InterferenceLimited => "interference_limited",
        }
    }
}

/// P_D above which a location is reported as interference-limited.
pub const VERDICT_P_D: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub eta_prime: f64,
    pub beta_th: f64,
    pub p_d: f64,
    pub lrt_area: f64,
    pub ln_lrt_area: f64,
    pub verdict: Verdict,
}

pub fn detect(fit: &MeFit, noise: &NoiseConfig, beta_th: f64) -> Result<DetectionResult> {
    let eta_prime = np_threshold(beta_th, noise)?;
    let p_d = detection_probability(fit, eta_prime, noise.phi);
    let area = lrt_area(fit, noise, None)?;
    Ok(DetectionResult {
        eta_prime,
        beta_th,
        p_d,
        lrt_area: area.area,
        ln_lrt_area: area.ln_area,
        verdict: if p_d > VERDICT_P_D {
            Verdict::InterferenceLimited
        } else {
            Verdict::NoiseLimited
        },
    })
}

/// Source of the blockage probability in a regime sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p_b")]
pub enum BlockageSource {
    /// Closed-form blockage model at each location.
    #[default]
    Model,
    /// A fixed probability everywhere (0 reproduces the no-blockage variant).
    Fixed(f64),
}

/// One location of a regime map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    pub v0: f64,
    pub p_b: Option<f64>,
    pub mean_y: Option<f64>,
    pub fit: Option<MeFit>,
    pub detection: Option<DetectionResult>,
    /// E[y] did not exceed φ; reported as noise-limited.
    pub infeasible: bool,
    pub error: Option<String>,
}

impl RegimePoint {
    pub fn verdict(&self) -> Option<Verdict> {
        if self.infeasible {
            Some(Verdict::NoiseLimited)
        } else {
            self.detection.map(|d| d.verdict)
        }
    }
}

fn regime_point(sys: &SystemConfig, v0: f64, beta_th: f64, source: BlockageSource) -> RegimePoint {
    let mut point = RegimePoint {
        v0,
        p_b: None,
        mean_y: None,
        fit: None,
        detection: None,
        infeasible: false,
        error: None,
    };
    let run = |point: &mut RegimePoint| -> Result<()> {
        let sys = sys.with_v0(v0);
        sys.geometry.validate()?;
        let p_b = match source {
            BlockageSource::Model => sys.blockage_result()?.p_b,
            BlockageSource::Fixed(p) => p,
        };
        point.p_b = Some(p_b);
        let model = InterferenceModel::new(sys.channel, sys.geometry, sys.band, sys.spectral, 1)?;
        let mean_y = model.mean_received_power(sys.noise.phi, p_b)?;
        point.mean_y = Some(mean_y);
        let fit = match fit_me_lambda(mean_y, sys.noise.phi, sys.fit_mode) {
            Err(Error::InfeasibleFit { .. }) => {
                point.infeasible = true;
                return Ok(());
            }
            other => other?,
        };
        point.fit = Some(fit);
        point.detection = Some(detect(&fit, &sys.noise, beta_th)?);
        Ok(())
    };
    if let Err(e) = run(&mut point) {
        point.error = Some(e.to_string());
    }
    point
}

/// Evaluate the detector at each receiver distance in `v0_grid`, in parallel.
/// Results keep the grid order; a failing location records its error.
pub fn regime_map(
    sys: &SystemConfig,
    v0_grid: &[f64],
    beta_th: f64,
    source: BlockageSource,
) -> Vec<RegimePoint> {
    v0_grid
        .par_iter()
        .map(|&v0| regime_point(sys, v0, beta_th, source))
        .collect()
}
