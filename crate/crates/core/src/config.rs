//! Versioned JSON run configuration.
//!
//! Parameters that fix the physical scenario (disk radius, band, pathloss,
//! fading, power, beamwidth, interferer count, obstacle density) are required.
//! Everything else has a default, and every defaulted field is listed in
//! [`RunConfig::defaulted`] so outputs can echo it.

use crate::blockage::{BlockageConfig, CombineMode, GeometryConfig};
use crate::detector::{thermal_noise_watts, FitMode, NoiseConfig};
use crate::error::{Error, Result};
use crate::interference::{dbm_to_watts, ChannelConfig, SeriesControl};
use crate::spectral::{BandConfig, Filter, Psd, SpectralModel};
use crate::system::SystemConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_V0_M: f64 = 0.0;
pub const DEFAULT_EPS_MIN_M: f64 = 0.1;
pub const DEFAULT_D_S_M: f64 = 0.2;
pub const DEFAULT_D_E_M: f64 = 0.8;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 100e6;
pub const DEFAULT_P: f64 = 0.5;
pub const DEFAULT_LINK_DISTANCE_M: f64 = 1.0;
pub const DEFAULT_BETA_TH: f64 = 0.1;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub radius_m: Option<f64>,
    pub v0_norm_m: Option<f64>,
    /// Full beamwidth 2θ in degrees.
    pub beamwidth_deg: Option<f64>,
    pub eps_min_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockageSection {
    pub rho: Option<f64>,
    pub d_s_m: Option<f64>,
    pub d_e_m: Option<f64>,
    pub mode: Option<CombineMode>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub f_s_hz: Option<f64>,
    pub f_e_hz: Option<f64>,
    pub f_0_hz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsdSection {
    Gaussian { std_hz: f64 },
    Rectangular { width_hz: f64 },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    pub psd: Option<PsdSection>,
    pub rolloff: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub alpha: Option<f64>,
    pub m: Option<f64>,
    pub q_dbm: Option<f64>,
    pub q_watts: Option<f64>,
    pub n_interferers: Option<u64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub sigma2_watts: Option<f64>,
    pub sigma2_dbm: Option<f64>,
    pub phi_watts: Option<f64>,
    pub phi_dbm: Option<f64>,
    /// Desired-link distance; φ = q·d^{-α}·Υ(0) when φ is not given directly.
    pub link_distance_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub fit_mode: Option<FitMode>,
    pub beta_th: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub v0_grid_m: Option<Vec<f64>>,
    pub rho_list: Option<Vec<f64>>,
    pub n_list: Option<Vec<u64>>,
    pub beta_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// The file as written, before defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub blockage: BlockageSection,
    #[serde(default)]
    pub band: BandSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub series: Option<SeriesControl>,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub v0_grid: Vec<f64>,
    pub rho_list: Vec<f64>,
    pub n_list: Vec<u64>,
    pub beta_grid: Vec<f64>,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub beta_th: f64,
    pub sweep: Sweep,
    pub trials: u64,
    pub seed: u64,
    /// Dotted paths of every field filled from a default.
    pub defaulted: Vec<String>,
    /// SHA-256 of the config text, lowercase hex.
    pub sha256: String,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(field, "missing", "required field"))
}

struct Defaults(Vec<String>);

impl Defaults {
    fn take<T>(&mut self, value: Option<T>, field: &str, default: T) -> T {
        value.unwrap_or_else(|| {
            self.0.push(field.to_string());
            default
        })
    }
}

fn at_most_one(fields: &[(&str, bool)]) -> Result<()> {
    let given: Vec<&str> = fields.iter().filter(|f| f.1).map(|f| f.0).collect();
    if given.len() > 1 {
        return Err(Error::config(
            given[1],
            "set",
            &format!("conflicts with `{}`; give exactly one", given[0]),
        ));
    }
    Ok(())
}

fn non_empty<T>(v: &[T], field: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::config(field, "[]", "sweep grid must be non-empty"));
    }
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl ConfigFile {
    pub fn resolve(self, sha256: String) -> Result<RunConfig> {
        let version = required(self.schema_version, "schema_version")?;
        if version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                version,
                &format!("only version {SCHEMA_VERSION} is supported"),
            ));
        }
        let mut d = Defaults(Vec::new());

        let g = self.geometry;
        let radius = required(g.radius_m, "geometry.radius_m")?;
        let beamwidth = required(g.beamwidth_deg, "geometry.beamwidth_deg")?;
        let geometry = GeometryConfig {
            radius,
            v0_norm: d.take(g.v0_norm_m, "geometry.v0_norm_m", DEFAULT_V0_M),
            theta: (0.5 * beamwidth).to_radians(),
            eps_min: d.take(g.eps_min_m, "geometry.eps_min_m", DEFAULT_EPS_MIN_M),
        };

        let b = self.blockage;
        let blockage = BlockageConfig {
            rho: required(b.rho, "rho")?,
            d_s: d.take(b.d_s_m, "blockage.d_s_m", DEFAULT_D_S_M),
            d_e: d.take(b.d_e_m, "blockage.d_e_m", DEFAULT_D_E_M),
            mode: d.take(b.mode, "blockage.mode", CombineMode::default()),
        };

        let bs = self.band;
        let band = BandConfig {
            f_s: required(bs.f_s_hz, "band.f_s_hz")?,
            f_e: required(bs.f_e_hz, "band.f_e_hz")?,
            f_0: required(bs.f_0_hz, "band.f_0_hz")?,
            bandwidth: d.take(bs.bandwidth_hz, "band.bandwidth_hz", DEFAULT_BANDWIDTH_HZ),
        };

        let sp = self.spectral;
        let psd = match d.take(
            sp.psd,
            "spectral.psd",
            PsdSection::Gaussian {
                std_hz: 0.25 * band.bandwidth,
            },
        ) {
            PsdSection::Gaussian { std_hz } => Psd::Gaussian { std: std_hz },
            PsdSection::Rectangular { width_hz } => Psd::Rectangular { width: width_hz },
        };
        let spectral = SpectralModel {
            psd,
            filter: Filter::RaisedCosine {
                rolloff: d.take(sp.rolloff, "spectral.rolloff", 0.0),
            },
        };

        let c = self.channel;
        at_most_one(&[("q_dbm", c.q_dbm.is_some()), ("q_watts", c.q_watts.is_some())])?;
        let q = match (c.q_dbm, c.q_watts) {
            (Some(dbm), None) => dbm_to_watts(dbm),
            (None, Some(w)) => w,
            _ => return Err(Error::config("q_dbm", "missing", "give exactly one of q_dbm, q_watts")),
        };
        let channel = ChannelConfig {
            alpha: required(c.alpha, "channel.alpha")?,
            m: required(c.m, "channel.m")?,
            q,
            n_interferers: required(c.n_interferers, "channel.n_interferers")?,
            p: d.take(c.p, "channel.p", DEFAULT_P),
        };

        let n = self.noise;
        at_most_one(&[
            ("sigma2_watts", n.sigma2_watts.is_some()),
            ("sigma2_dbm", n.sigma2_dbm.is_some()),
        ])?;
        at_most_one(&[
            ("phi_watts", n.phi_watts.is_some()),
            ("phi_dbm", n.phi_dbm.is_some()),
            ("link_distance_m", n.link_distance_m.is_some()),
        ])?;
        let sigma2 = match (n.sigma2_watts, n.sigma2_dbm) {
            (Some(w), _) => w,
            (_, Some(dbm)) => dbm_to_watts(dbm),
            _ => {
                d.0.push("noise.sigma2_watts".into());
                thermal_noise_watts(band.bandwidth)
            }
        };
        let phi = match (n.phi_watts, n.phi_dbm) {
            (Some(w), _) => w,
            (_, Some(dbm)) => dbm_to_watts(dbm),
            _ => {
                let dist = d.take(n.link_distance_m, "noise.link_distance_m", DEFAULT_LINK_DISTANCE_M);
                if !(dist > 0.0) {
                    return Err(Error::config("link_distance_m", dist, "must be > 0"));
                }
                spectral.validate()?;
                let center = spectral
                    .overlap_closed_form(0.0, band.bandwidth)
                    .map(Ok)
                    .unwrap_or_else(|| {
                        crate::spectral::upsilon(0.0, &band, &spectral, crate::spectral::overlap_tol())
                    })?;
                channel.q * dist.powf(-channel.alpha) * center
            }
        };
        let noise = NoiseConfig { sigma2, phi };

        let series = d.take(self.series, "series", SeriesControl::default());
        let det = self.detector;
        let fit_mode = d.take(det.fit_mode, "detector.fit_mode", FitMode::default());
        let beta_th = d.take(det.beta_th, "detector.beta_th", DEFAULT_BETA_TH);
        if !(beta_th > 0.0 && beta_th <= 1.0) {
            return Err(Error::config("beta_th", beta_th, "must lie in (0, 1]"));
        }

        let system = SystemConfig {
            geometry,
            blockage,
            band,
            spectral,
            channel,
            noise,
            series,
            fit_mode,
        };
        system.validate()?;

        let sw = self.sweep;
        let sweep = Sweep {
            v0_grid: d.take(sw.v0_grid_m, "sweep.v0_grid_m", vec![geometry.v0_norm]),
            rho_list: d.take(sw.rho_list, "sweep.rho_list", vec![blockage.rho]),
            n_list: d.take(sw.n_list, "sweep.n_list", vec![channel.n_interferers]),
            beta_grid: d.take(
                sw.beta_grid,
                "sweep.beta_grid",
                (1..=100).map(|k| k as f64 / 100.0).collect(),
            ),
        };
        non_empty(&sweep.v0_grid, "v0_grid_m")?;
        non_empty(&sweep.rho_list, "rho_list")?;
        non_empty(&sweep.n_list, "n_list")?;
        non_empty(&sweep.beta_grid, "beta_grid")?;
        for &v0 in &sweep.v0_grid {
            geometry.with_v0(v0).validate()?;
        }
        for &rho in &sweep.rho_list {
            BlockageConfig { rho, ..blockage }.validate()?;
        }
        for &beta in &sweep.beta_grid {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::config("beta_grid", beta, "entries must lie in (0, 1]"));
            }
        }

        let sim = self.simulation;
        let trials = d.take(sim.trials, "simulation.trials", DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::config("trials", 0, "must be >= 1"));
        }
        let seed = d.take(sim.seed, "simulation.seed", DEFAULT_SEED);

        Ok(RunConfig {
            system,
            beta_th,
            sweep,
            trials,
            seed,
            defaulted: d.0,
            sha256,
        })
    }
}

/// Parse and resolve configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde names the offending field inside backticks when it can
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains('`'))
            .unwrap_or("<document>")
            .to_string();
        Error::Config {
            field,
            value: "<json>".into(),
            constraint: msg,
        }
    })?;
    file.resolve(hex(&Sha256::digest(text.as_bytes())))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
