//! Spectral side of the interference model: the distribution of the
//! frequency offset between a random interferer and the receiver, and the
//! overlap Υ(ω) between an interferer's PSD and the receiver filter.
//!
//! The PSD integrates to one and the filter is peak-normalized, so Υ is the
//! fraction of an interferer's transmit power captured by the receiver.

use crate::error::{Error, Result};
use crate::numerics::{erf, erfc, integrate_pieces, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    /// Lower band edge f_s (Hz).
    pub f_s: f64,
    /// Upper band edge f_e (Hz).
    pub f_e: f64,
    /// Receiver center frequency f₀ (Hz).
    pub f_0: f64,
    /// Receiver filter bandwidth W (Hz).
    pub bandwidth: f64,
}

impl BandConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_s < self.f_e) || !self.f_e.is_finite() || !self.f_s.is_finite() {
            return Err(Error::config("f_s", self.f_s, "band edges must satisfy f_s < f_e"));
        }
        if !(self.f_0 >= self.f_s && self.f_0 <= self.f_e) {
            return Err(Error::config("f_0", self.f_0, "must lie inside [f_s, f_e]"));
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(Error::config("bandwidth", self.bandwidth, "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.f_e - self.f_s
    }

    /// (min, max) of |f_e - f₀| and |f_s - f₀|.
    pub fn offset_breakpoints(&self) -> (f64, f64) {
        let up = (self.f_e - self.f_0).abs();
        let down = (self.f_s - self.f_0).abs();
        (up.min(down), up.max(down))
    }
}

/// Interferer power spectral density, unit area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Psd {
    Gaussian { std: f64 },
    Rectangular { width: f64 },
}

impl Psd {
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Psd::Gaussian { std } => {
                let z = x / std;
                (-0.5 * z * z).exp() / (std * (2.0 * PI).sqrt())
            }
            Psd::Rectangular { width } => {
                if x.abs() <= 0.5 * width {
                    1.0 / width
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width outside of which the density is zero in double precision.
    fn half_support(&self) -> f64 {
        match *self {
            Psd::Gaussian { std } => 40.0 * std,
            Psd::Rectangular { width } => 0.5 * width,
        }
    }

    fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            Psd::Gaussian { std } => ("psd.std", std),
            Psd::Rectangular { width } => ("psd.width", width),
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::config(name, v, "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Receiver matched filter. The raised-cosine occupies exactly `[-W/2, W/2]`
/// (symbol rate `W / (1 + rolloff)`); rolloff 0 is the brick-wall response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Filter {
    RaisedCosine { rolloff: f64 },
}

impl Filter {
    /// Flat passband half-width for filter bandwidth `w`.
    fn passband_edge(&self, w: f64) -> f64 {
        match *self {
            Filter::RaisedCosine { rolloff } => 0.5 * w * (1.0 - rolloff) / (1.0 + rolloff),
        }
    }

    /// |H(x)|², peak-normalized.
    pub fn power_response(&self, x: f64, w: f64) -> f64 {
        let ax = x.abs();
        let edge = 0.5 * w;
        if ax > edge {
            return 0.0;
        }
        match *self {
            Filter::RaisedCosine { rolloff } => {
                let pass = self.passband_edge(w);
                if ax <= pass || rolloff == 0.0 {
                    1.0
                } else {
                    let symbol_period = (1.0 + rolloff) / w;
                    let h = 0.5
                        * (1.0 + (PI * symbol_period / rolloff * (ax - pass)).cos());
                    h * h
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Filter::RaisedCosine { rolloff } => {
                if !(0.0..=1.0).contains(&rolloff) {
                    return Err(Error::config("filter.rolloff", rolloff, "must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub psd: Psd,
    pub filter: Filter,
}

impl SpectralModel {
    /// Gaussian PSD with σ = W/4 through a brick-wall (RC-0) filter.
    pub fn gaussian_rc0(bandwidth: f64) -> Self {
        Self {
            psd: Psd::Gaussian {
                std: 0.25 * bandwidth,
            },
            filter: Filter::RaisedCosine { rolloff: 0.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.psd.validate()?;
        self.filter.validate()
    }

    /// Offset beyond which Υ is identically zero in double precision.
    pub fn overlap_support(&self, bandwidth: f64) -> f64 {
        0.5 * bandwidth + self.psd.half_support()
    }

    /// Closed-form Υ(ω) for the brick-wall filter, when one exists.
    pub fn overlap_closed_form(&self, omega: f64, bandwidth: f64) -> Option<f64> {
        let Filter::RaisedCosine { rolloff } = self.filter;
        if rolloff != 0.0 {
            return None;
        }
        let w = omega.abs();
        let half = 0.5 * bandwidth;
        Some(match self.psd {
            Psd::Gaussian { std } => {
                let s = SQRT_2 * std;
                if w <= half {
                    0.5 * (erf((half + w) / s) + erf((half - w) / s))
                } else {
                    // both arguments positive: difference of tails avoids cancellation
                    0.5 * (erfc((w - half) / s) - erfc((w + half) / s))
                }
            }
            Psd::Rectangular { width } => {
                let lo = (w - 0.5 * width).max(-half);
                let hi = (w + 0.5 * width).min(half);
                ((hi - lo).max(0.0) / width).min(1.0)
            }
        })
    }
}

/// Density of the absolute frequency offset ω = |f_i - f₀| for f_i uniform in the band.
pub fn frequency_offset_pdf(omega: f64, band: &BandConfig) -> f64 {
    let (near, far) = band.offset_breakpoints();
    if !(omega > 0.0) || omega > far {
        0.0
    } else if omega <= near {
        2.0 / band.span()
    } else {
        1.0 / band.span()
    }
}

/// Spectral overlap Υ(ω) = ∫_{-W/2}^{W/2} Φ(x - ω) |H(x)|² dx, by quadrature.
pub fn upsilon(omega: f64, band: &BandConfig, model: &SpectralModel, tol: Tolerance) -> Result<f64> {
    let w = omega.abs();
    let half = 0.5 * band.bandwidth;
    let reach = model.psd.half_support();
    let lo = (-half).max(w - reach);
    let hi = half.min(w + reach);
    if !(lo < hi) {
        return Ok(0.0);
    }
    let mut pts = vec![lo];
    let pass = model.filter.passband_edge(band.bandwidth);
    let mut kinks = vec![-pass, pass, w];
    if let Psd::Rectangular { width } = model.psd {
        kinks.push(w - 0.5 * width);
        kinks.push(w + 0.5 * width);
    }
    kinks.sort_by(f64::total_cmp);
    pts.extend(kinks.into_iter().filter(|&k| k > lo && k < hi));
    pts.push(hi);
    pts.dedup();
    let q = integrate_pieces(
        |x| model.psd.density(x - w) * model.filter.power_response(x, band.bandwidth),
        &pts,
        tol,
    )?;
    Ok(q.value.clamp(0.0, 1.0))
}

pub(crate) fn overlap_tol() -> Tolerance {
    Tolerance {
        rel: 1e-12,
        abs: 1e-16,
        max_iter: 2000,
    }
}
