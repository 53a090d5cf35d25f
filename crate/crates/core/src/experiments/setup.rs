use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::distributions::{Distribution, MultivariateNormal};
use crate::coalition::Partition;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::game::{
    exact_coalitional_group, exact_linear_value, exact_quotient_shapley, exact_quotient_value,
    exact_two_step_group, ExactOptions, ExplainContext,
};
use crate::mc::{
    estimate_coalitional, estimate_linear, estimate_quotient, estimate_two_step, stream_rng,
    McOptions, StreamId, StreamKind,
};
use crate::model::ModelSpec;
use crate::weights::{CoalitionalWeightScheme, WeightScheme};

/// One of the six synthetic convergence studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "1a")]
    E1a,
    #[serde(rename = "1b")]
    E1b,
    #[serde(rename = "2a")]
    E2a,
    #[serde(rename = "2b")]
    E2b,
    #[serde(rename = "3a")]
    E3a,
    #[serde(rename = "3b")]
    E3b,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::E1a,
        ExperimentId::E1b,
        ExperimentId::E2a,
        ExperimentId::E2b,
        ExperimentId::E3a,
        ExperimentId::E3b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::E1a => "1a",
            ExperimentId::E1b => "1b",
            ExperimentId::E2a => "2a",
            ExperimentId::E2b => "2b",
            ExperimentId::E3a => "3a",
            ExperimentId::E3b => "3b",
        }
    }

    /// Predictor counts studied for this experiment.
    pub fn standard_p(self) -> &'static [usize] {
        match self {
            ExperimentId::E1a => &[4],
            ExperimentId::E2a | ExperimentId::E3a => &[6],
            ExperimentId::E1b => &[4, 5, 10, 16],
            ExperimentId::E2b | ExperimentId::E3b => &[6, 10, 14, 18],
        }
    }

    /// Smallest predictor count the model family is defined for.
    fn min_p(self) -> usize {
        match self {
            ExperimentId::E1a | ExperimentId::E1b => 4,
            ExperimentId::E2b | ExperimentId::E3b => 5,
            ExperimentId::E2a | ExperimentId::E3a => 6,
        }
    }

    fn fixed_p(self) -> bool {
        matches!(
            self,
            ExperimentId::E1a | ExperimentId::E2a | ExperimentId::E3a
        )
    }

    pub fn value(self) -> ExperimentValue {
        match self {
            ExperimentId::E1a => ExperimentValue::QuotientShapley,
            ExperimentId::E1b => ExperimentValue::Shapley,
            ExperimentId::E2a | ExperimentId::E2b => ExperimentValue::Owen,
            ExperimentId::E3a | ExperimentId::E3b => ExperimentValue::TwoStep,
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::contract(format!(
                    "unknown experiment {s:?}; expected one of 1a, 1b, 2a, 2b, 3a, 3b"
                ))
            })
    }
}

/// The game value an experiment estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentValue {
    QuotientShapley,
    Shapley,
    Owen,
    TwoStep,
}

/// What an experiment explains: a group (quotient values) or a feature. 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum Target {
    Group(usize),
    Feature(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Group(j) => write!(f, "S{}", j + 1),
            Target::Feature(i) => write!(f, "x{}", i + 1),
        }
    }
}

/// Parameters of one convergence study.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    /// Number of predictors.
    pub p: usize,
    /// Background dataset size.
    pub size: usize,
    /// Monte Carlo iteration counts.
    pub k_grid: Vec<u64>,
    pub runs: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    pub const DEFAULT_SIZE: usize = 100;
    pub const DEFAULT_RUNS: usize = 50;

    /// Defaults: 100 rows, `K ∈ {2^9, …, 2^14}`, 50 runs, the smallest standard `p`.
    pub fn new(id: ExperimentId, seed: u64) -> Self {
        ExperimentSpec {
            id,
            p: id.standard_p()[0],
            size: Self::DEFAULT_SIZE,
            k_grid: (9..=14).map(|r| 1u64 << r).collect(),
            runs: Self::DEFAULT_RUNS,
            seed,
        }
    }

    /// Sets `p`, which must be one of the experiment's standard values.
    pub fn with_p(mut self, p: usize) -> Result<Self> {
        if !self.id.standard_p().contains(&p) {
            return Err(Error::contract(format!(
                "experiment {} is defined for p in {:?}, got {p}; use with_any_p to override",
                self.id,
                self.id.standard_p()
            )));
        }
        self.p = p;
        Ok(self)
    }

    /// Sets any `p` the model family admits.
    pub fn with_any_p(mut self, p: usize) -> Result<Self> {
        if self.id.fixed_p() && p != self.id.standard_p()[0] {
            return Err(Error::contract(format!(
                "experiment {} has exactly {} predictors",
                self.id,
                self.id.standard_p()[0]
            )));
        }
        if p < self.id.min_p() || p > crate::coalition::MAX_PLAYERS {
            return Err(Error::contract(format!(
                "experiment {} needs between {} and 64 predictors, got {p}",
                self.id,
                self.id.min_p()
            )));
        }
        self.p = p;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ExperimentSpec::new(self.id, 0).with_any_p(self.p)?;
        if self.size == 0 {
            return Err(Error::contract("dataset size must be positive"));
        }
        if self.runs == 0 {
            return Err(Error::contract("run count must be positive"));
        }
        if self.k_grid.is_empty() || self.k_grid.contains(&0) {
            return Err(Error::contract(
                "iteration grid must be nonempty and positive",
            ));
        }
        Ok(())
    }
}

/// A generated experiment: background data, model, partition and target.
#[derive(Clone, Debug)]
pub struct GeneratedExperiment {
    pub spec: ExperimentSpec,
    pub data: Dataset,
    pub model: ModelSpec,
    pub partition: Partition,
    pub target: Target,
    pub value: ExperimentValue,
}

const LOGISTIC_CORE: &str = "-3*(x1 - 5) + 0.2*(x2 - 15) - 2*(x3 - 2/7) - 5*x4";

fn model_expression(id: ExperimentId, p: usize) -> String {
    let mut exponent = LOGISTIC_CORE.to_string();
    match id {
        ExperimentId::E1a => {}
        ExperimentId::E2a | ExperimentId::E3a => {
            exponent.push_str(" + x5 - 0.5*(pi - 1/pi) - x6");
        }
        ExperimentId::E1b | ExperimentId::E2b | ExperimentId::E3b => {
            for l in 5..=p {
                exponent.push_str(&format!(" + x{l}"));
            }
        }
    }
    format!("sqrt(6) / (1 + exp({exponent}))")
}

fn partition_for(id: ExperimentId, p: usize) -> Result<Partition> {
    match id {
        ExperimentId::E1a => Partition::from_one_based(4, &[vec![1, 2], vec![3], vec![4]]),
        ExperimentId::E1b => Partition::singletons(p),
        ExperimentId::E2a | ExperimentId::E3a => {
            Partition::from_one_based(6, &[vec![1, 2], vec![3], vec![4, 5, 6]])
        }
        ExperimentId::E2b | ExperimentId::E3b => {
            Partition::from_one_based(p, &[vec![1, 2], vec![3], vec![4], (5..=p).collect()])
        }
    }
}

fn target_for(id: ExperimentId) -> Target {
    match id {
        ExperimentId::E1a => Target::Group(0),
        ExperimentId::E1b => Target::Feature(0),
        ExperimentId::E2a | ExperimentId::E3a => Target::Feature(3),
        ExperimentId::E2b | ExperimentId::E3b => Target::Feature(4),
    }
}

/// Draws the background dataset and builds the model, partition and target of an experiment.
///
/// Rows are `X1 ~ Normal(5, 1)`, `X2 ~ Gamma(shape 3, scale |X1|)`,
/// `X3 ~ Beta(2, 5)`, `X4 ~ Uniform(-1, 1)` followed by the experiment's
/// extra predictors. The same spec always yields the same dataset.
pub fn gen_experiment(spec: &ExperimentSpec) -> Result<GeneratedExperiment> {
    spec.validate()?;
    let (id, p) = (spec.id, spec.p);
    let mut rng = stream_rng(spec.seed, StreamId::new(StreamKind::DataGeneration, 0, 0));
    let x1 = Distribution::normal(5.0, 1.0)?;
    let x3 = Distribution::beta(2.0, 5.0)?;
    let x4 = Distribution::uniform(-1.0, 1.0)?;
    let eps1 = Distribution::normal(0.0, 0.1f64.powi(2))?;
    let eps2 = Distribution::normal(0.0, 0.05f64.powi(2))?;
    let tail_normal = Distribution::normal(0.0, 3.0)?;
    let tail_mvn = match id {
        ExperimentId::E2b | ExperimentId::E3b => {
            Some(MultivariateNormal::exchangeable(p - 4, 0.0, 3.0, 0.1)?)
        }
        _ => None,
    };

    let mut rows = Vec::with_capacity(spec.size);
    for _ in 0..spec.size {
        let mut row = Vec::with_capacity(p);
        let a = x1.sample(&mut rng);
        row.push(a);
        row.push(
            Distribution::Gamma {
                shape: 3.0,
                scale: a.abs(),
            }
            .sample(&mut rng),
        );
        row.push(x3.sample(&mut rng));
        let d = x4.sample(&mut rng);
        row.push(d);
        match id {
            ExperimentId::E1a => {}
            ExperimentId::E2a | ExperimentId::E3a => {
                row.push(d.exp() + eps1.sample(&mut rng));
                row.push(d * d * (std::f64::consts::PI * d).sin() + eps2.sample(&mut rng));
            }
            ExperimentId::E1b => {
                for _ in 5..=p {
                    row.push(tail_normal.sample(&mut rng));
                }
            }
            ExperimentId::E2b | ExperimentId::E3b => {
                let mvn = tail_mvn.as_ref().expect("tail distribution");
                row.extend(mvn.sample(&mut rng));
            }
        }
        rows.push(row);
    }

    Ok(GeneratedExperiment {
        spec: spec.clone(),
        data: Dataset::from_rows(rows)?,
        model: ModelSpec::parse_expression(&model_expression(id, p), p)?,
        partition: partition_for(id, p)?,
        target: target_for(id),
        value: id.value(),
    })
}

impl GeneratedExperiment {
    fn context(&self, obs: usize) -> Result<ExplainContext<'_>> {
        if obs >= self.data.len() {
            return Err(Error::contract(format!(
                "observation {obs} out of range for {} rows",
                self.data.len()
            )));
        }
        ExplainContext::new(&self.model, &self.data, self.data.row(obs))
    }

    /// Exact value of the target at background row `obs`.
    pub fn exact_target(&self, obs: usize, opts: &ExactOptions) -> Result<f64> {
        let ctx = self.context(obs)?;
        let p = &self.partition;
        Ok(match (self.value, self.target) {
            (ExperimentValue::QuotientShapley, Target::Group(j)) => {
                exact_quotient_value(&ctx, p, &WeightScheme::Shapley, opts)?.values[j]
            }
            (ExperimentValue::Shapley, Target::Feature(i)) => {
                exact_linear_value(&ctx, &WeightScheme::Shapley, opts)?.values[i]
            }
            (ExperimentValue::Owen, Target::Feature(i)) => {
                let j = p.group_of(i);
                exact_coalitional_group(&ctx, p, &CoalitionalWeightScheme::owen(), j, opts)?
                    [p.local_index(i)]
            }
            (ExperimentValue::TwoStep, Target::Feature(i)) => {
                let j = p.group_of(i);
                let phi = exact_quotient_shapley(&ctx, p, opts)?;
                exact_two_step_group(&ctx, p, j, phi[j], opts)?[p.local_index(i)]
            }
            (value, target) => {
                return Err(Error::Internal(format!(
                    "no oracle for {value:?} at {target:?}"
                )))
            }
        })
    }

    /// Monte Carlo estimate of the target at background row `obs`.
    pub fn estimate_target(&self, obs: usize, opts: &McOptions) -> Result<Estimate> {
        let ctx = self.context(obs)?;
        let p = &self.partition;
        match (self.value, self.target) {
            (ExperimentValue::QuotientShapley, Target::Group(j)) => {
                estimate_quotient(&ctx, p, &WeightScheme::Shapley, j, opts)
            }
            (ExperimentValue::Shapley, Target::Feature(i)) => {
                estimate_linear(&ctx, &WeightScheme::Shapley, i, opts)
            }
            (ExperimentValue::Owen, Target::Feature(i)) => {
                estimate_coalitional(&ctx, p, &CoalitionalWeightScheme::owen(), i, opts)
            }
            (ExperimentValue::TwoStep, Target::Feature(i)) => estimate_two_step(&ctx, p, i, opts),
            (value, target) => Err(Error::Internal(format!(
                "no estimator for {value:?} at {target:?}"
            ))),
        }
    }
}
