//! Probabilistic regression models used by the acquisition functions.

mod gp;
mod prf;

pub use gp::{
    fit_gp, fit_gp_warm, gp_log_marginal_likelihood, refine_gp, GpFitOptions, GpHyperparameters, GpModel, TargetScaling,
    LENGTHSCALE_BOUNDS, NOISE_VARIANCE_BOUNDS, SIGNAL_VARIANCE_BOUNDS,
};
pub use prf::{fit_prf, PrfModel, PrfOptions, Tree, MIN_VARIANCE};

use crate::space::Encoding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SurrogateKind {
    #[serde(rename = "GP")]
    Gp,
    #[serde(rename = "PRF")]
    Prf,
}

impl SurrogateKind {
    /// Input encoding each model family expects.
    pub fn encoding(self) -> Encoding {
        match self {
            SurrogateKind::Gp => Encoding::OneHot,
            SurrogateKind::Prf => Encoding::Index,
        }
    }
}

/// A fitted surrogate of either family.
#[derive(Debug, Clone)]
pub enum SurrogateModel {
    Gp(GpModel),
    Prf(PrfModel),
}

impl SurrogateModel {
    /// Predictive `(mean, variance)` at an encoded point.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        match self {
            SurrogateModel::Gp(m) => m.predict(x),
            SurrogateModel::Prf(m) => m.predict(x),
        }
    }

    pub fn kind(&self) -> SurrogateKind {
        match self {
            SurrogateModel::Gp(_) => SurrogateKind::Gp,
            SurrogateModel::Prf(_) => SurrogateKind::Prf,
        }
    }

    pub fn encoding(&self) -> Encoding {
        self.kind().encoding()
    }
}
