use design::DesignError;
use lptv_core::CoreError;
use noise::NoiseError;
use thiserror::Error;
use time_sim::SimError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("experiment failed: {0}")]
    Experiment(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Experiment(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParams(_) => CliError::Config(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Core(c) => c.into(),
            DesignError::InvalidGrid(_) | DesignError::InvalidNetwork(_) => CliError::Config(e.to_string()),
            DesignError::SingularGain { .. } => CliError::Degenerate(e.to_string()),
            DesignError::CenterNotBracketed { .. } | DesignError::BandNotCovered { .. } | DesignError::Infeasible(_) => {
                CliError::Experiment(e.to_string())
            }
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Core(c) => c.into(),
            SimError::InvalidDrive(_)
            | SimError::InvalidVaractor(_)
            | SimError::NonCommensurate { .. }
            | SimError::OffGrid { .. } => CliError::Config(e.to_string()),
            SimError::StepUnderflow { .. } => CliError::Degenerate(e.to_string()),
            SimError::NotSettled { .. } | SimError::Experiment(_) => CliError::Experiment(e.to_string()),
        }
    }
}

impl From<NoiseError> for CliError {
    fn from(e: NoiseError) -> Self {
        match e {
            NoiseError::Core(c) => c.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}
