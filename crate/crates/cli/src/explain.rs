use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use mcgame::game::{
    exact_coalitional_value, exact_linear_value, exact_quotient_value, exact_two_step,
    DEFAULT_EXACT_LIMIT,
};
use mcgame::mc::{mc_coalitional_value, mc_linear_value, mc_quotient_value, mc_two_step};
use mcgame::{
    AttributionVector, CoalitionalWeightScheme, ExactOptions, ExplainContext, ExplicitTable,
    McOptions, SamplerMode, WeightScheme,
};
use serde_json::json;

use crate::args::{
    ExactArgs, ExplainArgs, FormatArg, InputArgs, ModeArg, OutputArgs, SchemeArg, ValueArg,
};
use crate::inputs::{Inputs, ObservationLabel};
use crate::CliError;

const DEFAULT_ITERATIONS: u64 = 4096;

/// The flags of `explain` and `exact`, after the command-specific defaults.
struct Request<'a> {
    command: &'static str,
    value: ValueArg,
    input: &'a InputArgs,
    exact: bool,
    mode: Option<ModeArg>,
    iterations: Option<u64>,
    seed: Option<u64>,
    scheme: Option<SchemeArg>,
    weights: Option<&'a PathBuf>,
    limit: Option<usize>,
    output: &'a OutputArgs,
}

enum Method {
    Exact(ExactOptions),
    Sampled(McOptions),
}

pub fn cmd_explain(args: &ExplainArgs) -> Result<(), CliError> {
    run(Request {
        command: "explain",
        value: args.value,
        input: &args.input,
        exact: args.exact,
        mode: args.mode,
        iterations: args.iterations,
        seed: args.seed,
        scheme: args.scheme,
        weights: args.weights.as_ref(),
        limit: args.limit,
        output: &args.output,
    })
}

pub fn cmd_exact(args: &ExactArgs) -> Result<(), CliError> {
    run(Request {
        command: "exact",
        value: args.value,
        input: &args.input,
        exact: true,
        mode: None,
        iterations: None,
        seed: None,
        scheme: args.scheme,
        weights: args.weights.as_ref(),
        limit: args.limit,
        output: &args.output,
    })
}

/// Rejects flag combinations that do not describe a computation.
fn check_flags(req: &Request) -> Result<(), CliError> {
    let v = req.value;
    let value_name = serde_json::to_value(v).unwrap_or_default();
    let value_name = value_name.as_str().unwrap_or("value");
    if v.needs_partition() && req.input.partition.is_none() {
        return Err(CliError::usage(format!("{value_name} needs --partition")));
    }
    if !v.needs_partition() && req.input.partition.is_some() {
        return Err(CliError::usage(format!(
            "{value_name} does not take --partition"
        )));
    }
    if v == ValueArg::Linear && req.weights.is_none() {
        return Err(CliError::usage("linear needs --weights"));
    }
    if v == ValueArg::Linear && req.scheme.is_some() {
        return Err(CliError::usage(
            "linear takes its weights from --weights, not --scheme",
        ));
    }
    if !matches!(v, ValueArg::Linear | ValueArg::Quotient)
        && (req.scheme.is_some() || req.weights.is_some())
    {
        return Err(CliError::usage(format!(
            "{value_name} has fixed weights; --scheme and --weights apply to quotient and linear"
        )));
    }
    if req.exact {
        if req.mode.is_some() || req.iterations.is_some() || req.seed.is_some() {
            return Err(CliError::usage(
                "--mode, --iterations and --seed apply to Monte Carlo estimation, not --exact",
            ));
        }
    } else {
        if req.limit.is_some() {
            return Err(CliError::usage("--limit applies only to exact computation"));
        }
        if req.mode == Some(ModeArg::True) && req.iterations.is_some() {
            return Err(CliError::usage(
                "--iterations does not apply to --mode true, which makes one pass over the data",
            ));
        }
        if req.iterations == Some(0) {
            return Err(CliError::usage("--iterations must be at least 1"));
        }
    }
    Ok(())
}

fn resolve_scheme(req: &Request) -> Result<WeightScheme, CliError> {
    if let Some(path) = req.weights {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let table: ExplicitTable = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        return Ok(WeightScheme::table(table)?);
    }
    Ok(match (req.value, req.scheme) {
        (ValueArg::Banzhaf, _) | (_, Some(SchemeArg::Banzhaf)) => WeightScheme::Banzhaf,
        _ => WeightScheme::Shapley,
    })
}

fn resolve_method(req: &Request) -> Result<Method, CliError> {
    if req.exact {
        return Ok(Method::Exact(ExactOptions {
            limit: req.limit.unwrap_or(DEFAULT_EXACT_LIMIT),
        }));
    }
    let mode = match req.mode.unwrap_or(ModeArg::Empirical) {
        ModeArg::True => SamplerMode::TrueMarginal,
        ModeArg::Empirical => SamplerMode::empirical(req.iterations.unwrap_or(DEFAULT_ITERATIONS))?,
    };
    Ok(Method::Sampled(McOptions::new(mode, req.seed.unwrap_or(0))))
}

fn compute(
    req: &Request,
    inputs: &Inputs,
    scheme: &WeightScheme,
    method: &Method,
    x: &[f64],
) -> Result<AttributionVector, CliError> {
    let ctx = ExplainContext::new(&inputs.model, &inputs.data, x)?;
    let partition = inputs.partition.as_ref();
    let part = || partition.ok_or_else(|| CliError::internal("partition missing after validation"));
    let cw = match req.value {
        ValueArg::BanzhafOwen => CoalitionalWeightScheme::banzhaf_owen(),
        _ => CoalitionalWeightScheme::owen(),
    };
    Ok(match method {
        Method::Exact(opts) => match req.value {
            ValueArg::Shapley | ValueArg::Banzhaf | ValueArg::Linear => {
                exact_linear_value(&ctx, scheme, opts)?
            }
            ValueArg::Quotient => exact_quotient_value(&ctx, part()?, scheme, opts)?,
            ValueArg::Owen | ValueArg::BanzhafOwen => {
                exact_coalitional_value(&ctx, part()?, &cw, opts)?
            }
            ValueArg::TwoStep => exact_two_step(&ctx, part()?, opts)?,
        },
        Method::Sampled(opts) => match req.value {
            ValueArg::Shapley | ValueArg::Banzhaf | ValueArg::Linear => {
                mc_linear_value(&ctx, scheme, opts)?.attribution
            }
            ValueArg::Quotient => mc_quotient_value(&ctx, part()?, scheme, opts)?.attribution,
            ValueArg::Owen | ValueArg::BanzhafOwen => {
                mc_coalitional_value(&ctx, part()?, &cw, opts)?.attribution
            }
            ValueArg::TwoStep => mc_two_step(&ctx, part()?, opts)?.attribution,
        },
    })
}

fn labels(req: &Request, inputs: &Inputs) -> Vec<String> {
    match (req.value, &inputs.partition) {
        (ValueArg::Quotient, Some(p)) => (1..=p.m()).map(|j| format!("S{j}")).collect(),
        _ => inputs.data.names().to_vec(),
    }
}

fn run(req: Request) -> Result<(), CliError> {
    check_flags(&req)?;
    let scheme = resolve_scheme(&req)?;
    let method = resolve_method(&req)?;
    let inputs = Inputs::load(req.input)?;
    if let (Some(p), ValueArg::Quotient) = (&inputs.partition, req.value) {
        if let WeightScheme::Table(t) = &scheme {
            if t.n() != p.m() {
                return Err(CliError::usage(format!(
                    "weight table is for {} players but the partition has {} groups",
                    t.n(),
                    p.m()
                )));
            }
        }
    } else if let WeightScheme::Table(t) = &scheme {
        if t.n() != inputs.model.n() {
            return Err(CliError::usage(format!(
                "weight table is for {} players but the model has {} features",
                t.n(),
                inputs.model.n()
            )));
        }
    }
    let labels = labels(&req, &inputs);

    let method_config = match &method {
        Method::Exact(opts) => json!({ "mode": "exact", "limit": opts.limit }),
        Method::Sampled(opts) => match &opts.mode {
            SamplerMode::EmpiricalMarginal { iterations } => json!({
                "mode": "empirical-marginal", "iterations": iterations, "seed": opts.seed
            }),
            _ => {
                json!({ "mode": "true-marginal", "iterations": inputs.data.len(), "seed": opts.seed })
            }
        },
    };
    let config = json!({
        "command": req.command,
        "value": req.value,
        "scheme": scheme,
        "model": {
            "source": inputs.model_source,
            "config": inputs.model.to_config(),
        },
        "data": {
            "path": inputs.data_path,
            "rows": inputs.data.len(),
            "features": inputs.data.names(),
        },
        "observation": inputs.observation_config(),
        "partition": inputs.partition,
        "method": method_config,
        "labels": labels,
        "format": req.output.format,
    });

    let sink: Box<dyn Write> = match &req.output.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::usage(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut writer = ResultWriter::new(req.output.format, sink, &config, &labels, !req.exact)?;
    for k in 0..inputs.observation_count() {
        let (label, x) = inputs.observation(k);
        let attribution = compute(&req, &inputs, &scheme, &method, x)?;
        writer.write(&label, &attribution)?;
    }
    writer.finish()
}

/// Streams one record per observation as JSON or CSV.
struct ResultWriter {
    format: FormatArg,
    out: Box<dyn Write>,
    count: usize,
}

impl ResultWriter {
    fn new(
        format: FormatArg,
        mut out: Box<dyn Write>,
        config: &serde_json::Value,
        labels: &[String],
        with_stderr: bool,
    ) -> Result<Self, CliError> {
        match format {
            FormatArg::Json => {
                write!(
                    out,
                    "{{\"config\":{},\n\"results\":[",
                    serde_json::to_string(config)?
                )?;
            }
            FormatArg::Csv => {
                let mut header = vec!["observation".to_string()];
                header.extend(labels.iter().cloned());
                if with_stderr {
                    header.extend(labels.iter().map(|l| format!("{l}_stderr")));
                }
                let fields: Vec<String> = header.iter().map(|h| csv_quote(h)).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Ok(ResultWriter {
            format,
            out,
            count: 0,
        })
    }

    fn write(&mut self, label: &ObservationLabel, a: &AttributionVector) -> Result<(), CliError> {
        match self.format {
            FormatArg::Json => {
                let mut record = json!({
                    "observation": label,
                    "values": a.values,
                    "sum": a.sum(),
                });
                if let Some(se) = &a.stderr {
                    record["stderr"] = json!(se);
                }
                let sep = if self.count == 0 { "" } else { "," };
                write!(self.out, "{sep}\n{}", serde_json::to_string(&record)?)?;
            }
            FormatArg::Csv => {
                let mut fields = vec![csv_quote(&label.csv_field())];
                fields.extend(a.values.iter().map(|v| format!("{v:?}")));
                if let Some(se) = &a.stderr {
                    fields.extend(se.iter().map(|v| format!("{v:?}")));
                }
                writeln!(self.out, "{}", fields.join(","))?;
            }
        }
        self.count += 1;
        self.out.flush()?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        if self.format == FormatArg::Json {
            writeln!(self.out, "\n]}}")?;
        }
        self.out.flush()?;
        Ok(())
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
