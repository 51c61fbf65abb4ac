use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lupi_svm::data::{load_sparse, synth_lupi, write_sparse, LupiDataset, SynthSpec};
use lupi_svm::trainers::{predict, train_one_vs_rest_jobs, MulticlassModel};
use lupi_svm::Error;

use crate::args::{BenchArgs, Cli, Command, EvalArgs, GenArgs, PredictArgs, SolverArgs, TrainArgs, TuneArgs};
use crate::bench::{run_bench, BenchConfig};
use crate::error::{CliError, CliResult};
use crate::model_file::{load_model, save_model};
use crate::tune::tune;

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Train(a) => cmd_train(&a, out),
        Command::Predict(a) => cmd_predict(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Tune(a) => cmd_tune(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Data(Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }))
}

fn check_solver(solver: &SolverArgs, privileged: Option<&Path>) -> CliResult<()> {
    solver.validate().map_err(CliError::Usage)?;
    if solver.method.uses_privileged() && privileged.is_none() {
        return Err(CliError::Usage(format!("--priv is required for --method {}", solver.method)));
    }
    Ok(())
}

/// Loads the training set; privileged rows only when the method uses them.
fn load_training(data: &Path, privileged: Option<&Path>, solver: &SolverArgs) -> CliResult<LupiDataset> {
    let privileged = if solver.method.uses_privileged() { privileged } else { None };
    Ok(LupiDataset::load(data, privileged)?)
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    check_solver(&a.solver, a.privileged.as_deref())?;
    let data = load_training(&a.data, a.privileged.as_deref(), &a.solver)?;
    let hp = a.solver.hyperparameters();
    let x = data.x_dense()?;
    let z = data.z_dense()?;
    let model = train_one_vs_rest_jobs(&x, z.as_ref(), &data.y, &hp, a.solver.method, a.solver.jobs)?;
    save_model(&a.model, &model)?;

    let mut report = format!(
        "trained {} on {} examples, {} classes\n",
        model.method,
        data.n(),
        model.classes.len()
    );
    for (label, binary) in model.classes.iter().zip(&model.binaries) {
        let Some(d) = &binary.diagnostics else { continue };
        report.push_str(&format!(
            "class {label}: dual objective {}, iterations {}, support vectors {}, converged {}{}\n",
            d.dual_objective,
            d.iterations,
            binary.coefficients.len(),
            d.converged,
            if d.bias_fallback { " (fallback bias)" } else { "" }
        ));
    }
    emit(out, &report)?;
    if !model.converged() {
        return Err(CliError::NotConverged(format!(
            "solver hit the iteration cap; model written to {} anyway",
            a.model.display()
        )));
    }
    Ok(())
}

fn load_for_model(model: &MulticlassModel, path: &Path) -> CliResult<(lupi_svm::linalg::DenseMatrix, Vec<i64>)> {
    let (x, labels) = load_sparse(path)?;
    Ok((x.to_dense(model.dim)?, labels))
}

fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let (x, _) = load_for_model(&model, &a.data)?;
    let predicted = predict(&model, &x)?;
    let text: String = predicted.iter().map(|l| format!("{l}\n")).collect();
    match &a.output {
        Some(path) => fs::write(path, text).map_err(|source| {
            CliError::Data(Error::Io {
                path: path.clone(),
                source,
            })
        }),
        None => emit(out, &text),
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let (x, labels) = load_for_model(&model, &a.data)?;
    let predicted = predict(&model, &x)?;
    let correct = predicted.iter().zip(&labels).filter(|(a, b)| a == b).count();
    let accuracy = 100.0 * correct as f64 / labels.len() as f64;
    emit(out, &format!("accuracy: {accuracy:.2} ({correct}/{})\n", labels.len()))
}

fn cmd_tune(a: &TuneArgs, out: &mut dyn Write) -> CliResult<()> {
    check_solver(&a.solver, a.privileged.as_deref())?;
    if !(a.holdout > 0.0 && a.holdout < 1.0) {
        return Err(CliError::Usage(format!("--holdout must lie in (0, 1), got {}", a.holdout)));
    }
    let data = load_training(&a.data, a.privileged.as_deref(), &a.solver)?;
    let report = tune(
        &data,
        a.solver.method,
        &a.solver.hyperparameters(),
        a.holdout,
        a.seed,
        a.solver.jobs,
    )?;
    emit(out, &format!("method {}\n{}", report.method, report.table()))
}

/// Paths written by `gen` for a prefix.
pub fn gen_paths(prefix: &Path) -> [PathBuf; 3] {
    let with = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    [with(".train"), with(".priv"), with(".test")]
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = SynthSpec {
        n: a.n,
        n_test: a.n_test,
        d: a.d,
        flip_probability: a.flip,
        privileged_noise: a.noise,
        privileged_dim: a.priv_dim,
        min_margin: a.min_margin,
        seed: a.seed,
    };
    let data = synth_lupi(&spec)?;
    let [train, privileged, test] = gen_paths(&a.output);
    write_sparse(&train, &data.train.x, Some(&data.train.y))?;
    let z = data.train.z.as_ref().expect("synthetic training data has privileged rows");
    write_sparse(&privileged, z, None)?;
    write_sparse(&test, &data.test.x, Some(&data.test.y))?;
    emit(
        out,
        &format!("{}\n{}\n{}\n", train.display(), privileged.display(), test.display()),
    )
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let solver = a.solver();
    solver.validate().map_err(CliError::Usage)?;
    if a.sizes.is_empty() || a.sizes.contains(&0) || a.seeds == 0 {
        return Err(CliError::Usage("--sizes and --seeds must be positive".into()));
    }
    let config = BenchConfig {
        sizes: a.sizes.clone(),
        seeds: a.seeds,
        base_seed: a.seed,
        synth: SynthSpec {
            n_test: a.n_test,
            flip_probability: a.flip,
            ..SynthSpec::default()
        },
        hp: solver.hyperparameters(),
        ..BenchConfig::default()
    };
    let report = run_bench(&config)?;
    emit(out, &report.table())?;
    match &a.output {
        Some(path) => fs::write(path, report.csv()).map_err(|source| {
            CliError::Data(Error::Io {
                path: path.clone(),
                source,
            })
        }),
        None => emit(out, &format!("\n{}", report.csv())),
    }
}
