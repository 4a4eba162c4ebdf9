//! A fitted model of either family, tagged with its provenance.

use crate::regression::AlmonModel;
use crate::thermal::{RcParameters, RcTopology};

#[derive(Debug, Clone)]
pub enum ModelKind {
    Rc {
        topology: RcTopology,
        params: RcParameters,
    },
    Almon(AlmonModel),
}

/// A model ready for evaluation, carrying the labels reports need.
#[derive(Debug, Clone)]
pub struct FittedModel {
    /// Estimation method label ("NLS", "BE", "MLE", "ALS", "truth", ...).
    pub method: String,
    /// Architecture label ("R-1", ..., "R-A", "C-A", "custom").
    pub architecture: String,
    pub training_days: u32,
    pub kind: ModelKind,
}

impl FittedModel {
    pub fn rc(
        method: impl Into<String>,
        architecture: impl Into<String>,
        training_days: u32,
        topology: RcTopology,
        params: RcParameters,
    ) -> FittedModel {
        FittedModel {
            method: method.into(),
            architecture: architecture.into(),
            training_days,
            kind: ModelKind::Rc { topology, params },
        }
    }

    pub fn almon(
        method: impl Into<String>,
        architecture: impl Into<String>,
        training_days: u32,
        model: AlmonModel,
    ) -> FittedModel {
        FittedModel {
            method: method.into(),
            architecture: architecture.into(),
            training_days,
            kind: ModelKind::Almon(model),
        }
    }

    pub fn trace_id(&self, sim: super::SimType) -> String {
        format!(
            "{}_{}_{}d_{}",
            self.method, self.architecture, self.training_days, sim
        )
    }
}
