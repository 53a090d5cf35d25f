use std::path::Path;

use mcgame::{Dataset, ModelSpec, Partition};
use serde::Serialize;

use crate::args::InputArgs;
use crate::CliError;

/// Which points to explain.
#[derive(Clone, Debug)]
pub enum Observations {
    /// 0-based row index.
    Row(usize),
    Point(Vec<f64>),
    AllRows,
}

/// How an observation is reported.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservationLabel {
    /// 1-based row index.
    Row(usize),
    Point(Vec<f64>),
}

impl ObservationLabel {
    pub fn csv_field(&self) -> String {
        match self {
            ObservationLabel::Row(r) => format!("row {r}"),
            ObservationLabel::Point(_) => "point".to_string(),
        }
    }
}

pub struct Inputs {
    pub model: ModelSpec,
    pub model_source: String,
    pub data: Dataset,
    pub data_path: String,
    pub observations: Observations,
    pub partition: Option<Partition>,
}

impl Inputs {
    pub fn load(args: &InputArgs) -> Result<Self, CliError> {
        let data = Dataset::from_csv_path(&args.data)?;
        let (model, model_source) = match (&args.model, &args.expression) {
            (Some(path), None) => (ModelSpec::from_json_path(path)?, display(path)),
            (None, Some(expr)) => (
                ModelSpec::parse_expression(expr, data.n_features())?,
                "inline".to_string(),
            ),
            _ => {
                return Err(CliError::usage(
                    "give exactly one of --model and --expression",
                ))
            }
        };
        if model.n() != data.n_features() {
            return Err(CliError::usage(format!(
                "model expects {} features but the dataset has {}",
                model.n(),
                data.n_features()
            )));
        }
        let obs = &args.observation;
        let observations = if let Some(row) = obs.row {
            if row == 0 || row > data.len() {
                return Err(CliError::usage(format!(
                    "--row {row} is outside 1..={}",
                    data.len()
                )));
            }
            Observations::Row(row - 1)
        } else if let Some(text) = &obs.point {
            let point = parse_point(text)?;
            if point.len() != model.n() {
                return Err(CliError::usage(format!(
                    "--point has {} coordinates, the model has {} features",
                    point.len(),
                    model.n()
                )));
            }
            Observations::Point(point)
        } else {
            Observations::AllRows
        };
        let partition = args
            .partition
            .as_deref()
            .map(|text| Partition::from_json(model.n(), text))
            .transpose()?;
        Ok(Inputs {
            model,
            model_source,
            data,
            data_path: display(&args.data),
            observations,
            partition,
        })
    }

    pub fn observation_count(&self) -> usize {
        match self.observations {
            Observations::AllRows => self.data.len(),
            _ => 1,
        }
    }

    /// The `k`-th observation to explain.
    pub fn observation(&self, k: usize) -> (ObservationLabel, &[f64]) {
        match &self.observations {
            Observations::Row(r) => (ObservationLabel::Row(r + 1), self.data.row(*r)),
            Observations::Point(p) => (ObservationLabel::Point(p.clone()), p),
            Observations::AllRows => (ObservationLabel::Row(k + 1), self.data.row(k)),
        }
    }

    pub fn observation_config(&self) -> serde_json::Value {
        match &self.observations {
            Observations::Row(r) => serde_json::json!({ "row": r + 1 }),
            Observations::Point(p) => serde_json::json!({ "point": p }),
            Observations::AllRows => serde_json::json!("all-rows"),
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::usage(format!(
                    "--point: {s:?} is not a finite number"
                ))),
            }
        })
        .collect()
}
