use serde::{Deserialize, Serialize};

/// Reason a result was produced outside the validity window of its formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    OutsideDeepTail,
    NearCritical,
    ShallowLevel,
    PercolationThreshold,
    OutsideReducedWindow,
    DivergentRelaxation,
    NotStronglyCorrelated,
    ExtentTooSmall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainWarning {
    pub code: WarningCode,
    pub message: String,
}

impl DomainWarning {
    pub fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}
