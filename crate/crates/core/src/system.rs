//! Bundle of every physical parameter needed to evaluate one receiver location.

use crate::blockage::{blockage_probability, BlockageConfig, BlockageResult, GeometryConfig};
use crate::detector::{FitMode, NoiseConfig};
use crate::error::Result;
use crate::interference::{ChannelConfig, InterferenceModel, SeriesControl};
use crate::spectral::{BandConfig, SpectralModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub geometry: GeometryConfig,
    pub blockage: BlockageConfig,
    pub band: BandConfig,
    pub spectral: SpectralModel,
    pub channel: ChannelConfig,
    pub noise: NoiseConfig,
    pub series: SeriesControl,
    pub fit_mode: FitMode,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.blockage.validate()?;
        self.band.validate()?;
        self.spectral.validate()?;
        self.channel.validate()?;
        self.noise.validate()?;
        self.series.validate()
    }

    pub fn with_v0(&self, v0_norm: f64) -> Self {
        Self {
            geometry: self.geometry.with_v0(v0_norm),
            ..*self
        }
    }

    pub fn blockage_result(&self) -> Result<BlockageResult> {
        blockage_probability(&self.blockage, &self.geometry)
    }

    /// Interference model with tables prepared up to `series.n_max`.
    pub fn interference_model(&self) -> Result<InterferenceModel> {
        InterferenceModel::new(
            self.channel,
            self.geometry,
            self.band,
            self.spectral,
            self.series.n_max,
        )
    }
}
