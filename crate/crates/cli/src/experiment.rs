use mcgame::experiments::{run_convergence_with, write_outputs, ExperimentId, ExperimentSpec};

use crate::args::ExperimentArgs;
use crate::CliError;

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let id: ExperimentId = args.id.parse()?;
    if args.kmin > args.kmax || args.kmax > 40 {
        return Err(CliError::usage(format!(
            "need kmin <= kmax <= 40, got {}..{}",
            args.kmin, args.kmax
        )));
    }
    let mut spec = ExperimentSpec::new(id, args.seed);
    if let Some(p) = args.p {
        spec = if args.any_p {
            spec.with_any_p(p)?
        } else {
            spec.with_p(p)?
        };
    }
    spec.size = args.size;
    spec.runs = args.runs;
    spec.k_grid = (args.kmin..=args.kmax).map(|r| 1u64 << r).collect();
    spec.validate()?;

    let mut done = 0usize;
    let total = spec.k_grid.len() * spec.runs;
    let report = run_convergence_with(&spec, |row| {
        done += 1;
        if done.is_multiple_of(spec.runs) {
            eprintln!("K = {:>6}: {done}/{total} runs done", row.k);
        }
    })?;
    write_outputs(&report, &args.out_dir)?;

    let s = &report.summary;
    println!(
        "experiment {} ({:?}, target {}, p = {}, {} runs)",
        s.experiment, s.value, s.target, s.p, s.runs
    );
    for k in &s.per_k {
        println!(
            "K = {:>6}  MISE {:.4e} [{:.4e}, {:.4e}]  RMISE {:.4e}",
            k.k, k.mise_mean, k.mise_ci95[0], k.mise_ci95[1], k.rmise_mean
        );
    }
    match s.mise_slope {
        Some(slope) => println!("slope of log2 MISE on log2 K: {slope:.4}"),
        None => println!("slope of log2 MISE on log2 K: undefined for a single K"),
    }
    println!(
        "wrote {} and {}",
        args.out_dir.join("convergence.csv").display(),
        args.out_dir.join("summary.json").display()
    );
    Ok(())
}
