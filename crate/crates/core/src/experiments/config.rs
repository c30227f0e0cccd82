use serde::{Deserialize, Serialize};

use super::{
    operator_from_rows, operator_to_rows, InitialState, Scenario, Solvers, DEFAULT_OUTPUT_DT,
};
use crate::error::{NjcError, Result};
use crate::model::ModelParams;
use crate::oracle::DEFAULT_STEP;

/// Schema version accepted in scenario files.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InitialStateField {
    Excited,
    Ground,
    DressedPlus,
    DressedMinus,
    /// Row-major `[re, im]` entries in the bare basis.
    Matrix([[[f64; 2]; 3]; 3]),
}

/// On-disk scenario description. Unknown keys are rejected.
///
/// ```json
/// {"spec_version": 1, "label": "fig3",
///  "params": {"omega": 1, "g": 0.1, "chi": 0.04, "gamma_plus": 0.004, "gamma_minus": 0.004},
///  "t_end": 2000, "dt": 0.5, "solvers": "both", "initial_state": "excited"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub spec_version: u32,
    #[serde(default)]
    pub label: Option<String>,
    pub params: ModelParams,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_step")]
    pub integrator_step: f64,
    #[serde(default = "default_solvers")]
    pub solvers: Solvers,
    #[serde(default = "default_initial")]
    initial_state: InitialStateField,
}

fn default_dt() -> f64 {
    DEFAULT_OUTPUT_DT
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_solvers() -> Solvers {
    Solvers::Both
}

fn default_initial() -> InitialStateField {
    InitialStateField::Excited
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        if config.spec_version != CONFIG_VERSION {
            return Err(NjcError::InvalidScenario(format!(
                "unsupported spec_version {}, expected {CONFIG_VERSION}",
                config.spec_version
            )));
        }
        Ok(config)
    }

    pub fn into_scenario(self) -> Scenario {
        let initial_state = match self.initial_state {
            InitialStateField::Excited => InitialState::Excited,
            InitialStateField::Ground => InitialState::Ground,
            InitialStateField::DressedPlus => InitialState::DressedPlus,
            InitialStateField::DressedMinus => InitialState::DressedMinus,
            InitialStateField::Matrix(rows) => InitialState::Matrix(operator_from_rows(&rows)),
        };
        Scenario {
            label: self.label.unwrap_or_else(|| "scenario".to_string()),
            params: self.params,
            t_end: self.t_end,
            dt: self.dt,
            integrator_step: self.integrator_step,
            solvers: self.solvers,
            initial_state,
        }
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let initial_state = match &s.initial_state {
            InitialState::Excited => InitialStateField::Excited,
            InitialState::Ground => InitialStateField::Ground,
            InitialState::DressedPlus => InitialStateField::DressedPlus,
            InitialState::DressedMinus => InitialStateField::DressedMinus,
            InitialState::Matrix(m) => InitialStateField::Matrix(operator_to_rows(m)),
        };
        ScenarioConfig {
            spec_version: CONFIG_VERSION,
            label: Some(s.label.clone()),
            params: s.params,
            t_end: s.t_end,
            dt: s.dt,
            integrator_step: s.integrator_step,
            solvers: s.solvers,
            initial_state,
        }
    }
}

impl Scenario {
    /// Parse and validate a scenario file.
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario = ScenarioConfig::from_json(text)?.into_scenario();
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ScenarioConfig::from_scenario(self))? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::preset;

    const FIG3: &str = r#"{"spec_version": 1, "label": "fig3",
        "params": {"omega": 1, "g": 0.1, "chi": 0.04, "gamma_plus": 0.004, "gamma_minus": 0.004},
        "t_end": 2000, "dt": 0.5, "solvers": "both", "initial_state": "excited"}"#;

    #[test]
    fn parses_fig3() {
        assert_eq!(Scenario::from_json(FIG3).unwrap(), preset("fig3").unwrap());
    }

    #[test]
    fn defaults() {
        let s = Scenario::from_json(
            r#"{"spec_version": 1, "t_end": 10,
                "params": {"omega": 1, "g": 0.1, "chi": 0, "gamma_plus": 0, "gamma_minus": 0}}"#,
        )
        .unwrap();
        assert_eq!(
            (s.dt, s.integrator_step, s.solvers),
            (0.5, 0.01, Solvers::Both)
        );
        assert_eq!(s.initial_state, InitialState::Excited);
    }

    #[test]
    fn round_trip() {
        let mut s = preset("fig2").unwrap();
        s.initial_state = InitialState::Matrix(InitialState::DressedMinus.density(&s.params));
        s.solvers = Solvers::Numeric;
        assert_eq!(Scenario::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn rejections() {
        let unknown = FIG3.replace("\"label\"", "\"colour\": 1, \"label\"");
        assert!(matches!(
            Scenario::from_json(&unknown),
            Err(NjcError::Json(_))
        ));
        let version = FIG3.replace("\"spec_version\": 1", "\"spec_version\": 2");
        assert!(matches!(
            Scenario::from_json(&version),
            Err(NjcError::InvalidScenario(_))
        ));
        let negative = FIG3.replace("\"g\": 0.1", "\"g\": -0.1");
        assert!(Scenario::from_json(&negative).is_err());
        let param_typo = FIG3.replace("\"chi\"", "\"kappa\"");
        assert!(Scenario::from_json(&param_typo).is_err());
        let coarse = FIG3.replace("\"dt\": 0.5", "\"dt\": 2");
        assert!(matches!(
            Scenario::from_json(&coarse),
            Err(NjcError::InvalidScenario(_))
        ));
    }
}
