use std::fs;
use std::path::Path;

use cavity_gbs::angular::{j3_operator, verify_eigenbasis_with, EigenbasisReport};
use cavity_gbs::fock::{make_gbs, FieldState, GbsParams, Ket, DEFAULT_N_MAX};
use cavity_gbs::protocol::{
    delta_exp, distinguish_orthogonal, feasibility_check, gt2_for, m2_range_for_gt,
    monte_carlo_samples, run_generation, run_measurement, summarize, timing_table,
    ErrorModel, FeasibilityInput, GenerationConfig, FIRST_ATOM_GT, M2_MAX, PROBE_GT,
};
use cavity_gbs::{C64, TOL};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{
    BasisArgs, Command, FeasibilityArgs, Format, GenerateArgs, GlobalArgs, MeasureArgs, SweepArgs,
    TimingArgs, Units,
};
use crate::error::CliError;
use crate::output::{csv_float, csv_table, digest, sig, to_json, OutputSet};

/// Smallest sample count accepted by `error-sweep`.
pub const MIN_SWEEP_SAMPLES: usize = 100;

/// Contents of `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub generation: GenerationConfig,
    pub error_model: ErrorModel,
}

/// Effective settings after merging the config file with global flags.
struct Context {
    global: GlobalArgs,
    config: RunConfig,
}

/// What a command hands back for printing and saving.
struct Rendered {
    json: String,
    text: String,
    csv: Option<String>,
}

pub fn run(command: Command, global: GlobalArgs) -> Result<(), CliError> {
    let ctx = Context::new(global)?;
    let (name, args) = match &command {
        Command::Generate(a) => ("generate", json!(a)),
        Command::Measure(a) => ("measure", json!(a)),
        Command::OptimizeTiming(a) => ("optimize-timing", json!(a)),
        Command::ErrorSweep(a) => ("error-sweep", json!(a)),
        Command::VerifyBasis(a) => ("verify-basis", json!(a)),
        Command::J3Spectrum(a) => ("j3-spectrum", json!(a)),
        Command::Feasibility(a) => ("feasibility", json!(a)),
    };
    let mut out = OutputSet::new(ctx.global.out.clone());
    let (rendered, verdict) = match command {
        Command::Generate(a) => generate(&ctx, &a, &mut out)?,
        Command::Measure(a) => measure(&ctx, &a, &mut out)?,
        Command::OptimizeTiming(a) => optimize_timing(&a, &mut out)?,
        Command::ErrorSweep(a) => error_sweep(&ctx, &a, &mut out)?,
        Command::VerifyBasis(a) => verify_basis(&a, &mut out)?,
        Command::J3Spectrum(a) => j3_spectrum(&a, &mut out)?,
        Command::Feasibility(a) => feasibility(&ctx, &a, &mut out)?,
    };

    let stdout = match ctx.global.format {
        Format::Json => rendered.json,
        Format::Text => rendered.text,
        Format::Csv => rendered
            .csv
            .ok_or_else(|| CliError::input(format!("{name} has no CSV output")))?,
    };
    print!("{stdout}");

    let seed = matches!(name, "error-sweep").then_some(ctx.config.error_model.seed);
    let inputs = json!({
        "command": name,
        "args": args,
        "config": ctx.config,
        "units": format!("{:?}", ctx.global.units).to_lowercase(),
    });
    out.finish(name, digest(&inputs)?, seed)?;
    verdict
}

impl Context {
    fn new(global: GlobalArgs) -> Result<Self, CliError> {
        let mut config = match &global.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        match global.units {
            Units::Gt => {
                if global.g.is_some() {
                    return Err(CliError::input("--g needs --units si"));
                }
                if config.generation.g != 1.0 {
                    return Err(CliError::input(
                        "config sets g; use --units si for dimensional couplings",
                    ));
                }
            }
            Units::Si => {
                if let Some(g) = global.g {
                    config.generation.g = g;
                }
            }
        }
        if let Some(omega) = global.omega {
            config.generation.omega = omega;
        }
        if let Some(seed) = global.seed {
            config.error_model.seed = seed;
        }
        Ok(Self { global, config })
    }

    fn time_label(&self) -> &'static str {
        match self.global.units {
            Units::Gt => "gT",
            Units::Si => "T [s]",
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("malformed config {}: {e}", path.display())))
}

fn generate(
    ctx: &Context,
    a: &GenerateArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let mut cfg = ctx.config.generation.clone();
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(phi1) = a.phi1 {
        cfg.phi1 = phi1;
    }
    if let Some(m2) = a.m2 {
        cfg.m2 = m2;
    }
    if let Some(n_max) = a.n_max {
        cfg.n_max = n_max;
    }
    if let Some(dt) = a.dt_gap {
        cfg.dt_gap = dt;
    }
    if a.gt1.is_some() {
        cfg.gt1 = a.gt1;
    }
    if a.gt2.is_some() {
        cfg.gt2 = a.gt2;
    }
    let r = run_generation(&cfg)?;

    let (t1, t2) = match ctx.global.units {
        Units::Gt => (r.gt1, r.gt2),
        Units::Si => (r.t1, r.t2),
    };
    let t = ctx.time_label();
    let lines = [
        ("target", format!("2GBS(N={}, p={}, phi={})", r.target.n, sig(r.target.p), sig(r.target.phi))),
        ("fidelity", sig(r.fidelity_to_target)),
        ("infidelity", sig(1.0 - r.fidelity_to_target)),
        ("P2", sig(r.p2)),
        ("delta", sig(r.delta)),
        (&format!("{t} atom 1"), sig(t1)),
        (&format!("{t} atom 2"), sig(t2)),
        ("leakage", sig(r.leakage)),
    ];
    let text: String = lines.iter().map(|(k, v)| format!("{k:<16}{v}\n")).collect();
    let rows: Vec<Vec<String>> = r
        .post_selected_field
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| vec![n.to_string(), csv_float(c.re), csv_float(c.im)])
        .collect();
    let csv = csv_table(&["n", "re", "im"], &rows);
    let json = to_json(&r);
    out.add("generation.json", json.clone());
    out.add("field.csv", csv.clone());
    out.add("summary.txt", text.clone());
    Ok((Rendered { json, text, csv: Some(csv) }, Ok(())))
}

fn parse_state_triple(spec: &str) -> Result<GbsParams, CliError> {
    let bad = || CliError::input(format!("--state expects \"N,p,phi\", got {spec:?}"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [n, p, phi] = parts.as_slice() else { return Err(bad()) };
    let n: usize = n.parse().map_err(|_| bad())?;
    let p: f64 = p.parse().map_err(|_| bad())?;
    let phi: f64 = phi.parse().map_err(|_| bad())?;
    Ok(GbsParams::new(n, p, phi)?)
}

fn load_field(a: &MeasureArgs) -> Result<FieldState, CliError> {
    let field = if let Some(path) = &a.state_file {
        let text = fs::read_to_string(path)
            .map_err(|source| CliError::Read { path: path.clone(), source })?;
        serde_json::from_str::<FieldState>(&text)
            .map_err(|e| CliError::input(format!("malformed state {}: {e}", path.display())))?
    } else {
        let params = parse_state_triple(a.state.as_deref().unwrap_or_default())?;
        make_gbs(params, params.n.max(DEFAULT_N_MAX))?
    };
    if field.n_max() < DEFAULT_N_MAX {
        Ok(field.padded(DEFAULT_N_MAX)?)
    } else {
        Ok(field)
    }
}

fn measure(
    ctx: &Context,
    a: &MeasureArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let field = load_field(a)?;
    let g = ctx.config.generation.g;
    let m = run_measurement(&field, a.p, a.phi, g)?;
    let d = distinguish_orthogonal(&field, a.p, a.phi, g)?;
    let text = format!(
        "P(up)           {}\nP(down)         {}\nverdict         {} (confidence {})\n",
        sig(m.prob_up),
        sig(m.prob_down),
        d.label,
        sig(d.confidence),
    );
    let csv = csv_table(
        &["outcome", "probability"],
        &[
            vec!["up".into(), csv_float(m.prob_up)],
            vec!["down".into(), csv_float(m.prob_down)],
        ],
    );
    let json = to_json(&json!({ "measurement": m, "discrimination": d }));
    out.add("measurement.json", json.clone());
    out.add("summary.txt", text.clone());
    Ok((Rendered { json, text, csv: Some(csv) }, Ok(())))
}

fn optimize_timing(
    a: &TimingArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let (lo, hi) = match (a.gt_min, a.gt_max) {
        (Some(min), Some(max)) => m2_range_for_gt(min, max)?,
        _ => (0, M2_MAX),
    };
    let table = timing_table(lo, hi)?;
    let best = table
        .iter()
        .copied()
        .reduce(|b, r| if r.sin_second > b.sin_second { r } else { b })
        .expect("non-empty range");

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| vec![r.m2.to_string(), csv_float(r.gt2), csv_float(r.sin_second), csv_float(r.delta)])
        .collect();
    let csv = csv_table(&["m2", "gT2", "sin", "delta"], &rows);

    let mut text = String::from("m2    gT2         sin(sqrt2 gT2)   delta\n");
    for r in &table {
        text += &format!("{:<5} {:<11} {:<16} {}\n", r.m2, sig(r.gt2), sig(r.sin_second), sig(r.delta));
    }
    text += &format!("best: m2 = {}, gT2 = {}, delta = {}\n", best.m2, sig(best.gt2), sig(best.delta));

    let json = to_json(&json!({ "best": best, "table": table }));
    out.add("timing.csv", csv.clone());
    out.add("timing.json", json.clone());
    Ok((Rendered { json, text, csv: Some(csv) }, Ok(())))
}

#[derive(Serialize)]
struct SweepRow {
    jitter: f64,
    delta_exp: f64,
    mean_infidelity: f64,
    std_infidelity: f64,
    mean_p2: f64,
    std_p2: f64,
    rms_delta: f64,
    samples_used: usize,
}

fn error_sweep(
    ctx: &Context,
    a: &SweepArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let samples = a.samples.unwrap_or(ctx.config.error_model.samples);
    if samples < MIN_SWEEP_SAMPLES {
        return Err(CliError::input(format!(
            "--samples must be at least {MIN_SWEEP_SAMPLES}, got {samples}"
        )));
    }
    if a.jitters.is_empty() {
        return Err(CliError::input("--jitters is empty"));
    }
    let cfg = &ctx.config.generation;
    let mut rows = Vec::new();
    for (k, &jitter) in a.jitters.iter().enumerate() {
        let model = ErrorModel { rel_timing_jitter: jitter, samples, ..ctx.config.error_model.clone() };
        let draws = monte_carlo_samples(cfg, &model)?;
        let report = summarize(&draws);
        rows.push(SweepRow {
            jitter,
            delta_exp: delta_exp(cfg.gt2(), jitter)?,
            mean_infidelity: report.mean_infidelity,
            std_infidelity: report.std_fidelity,
            mean_p2: report.mean_p2,
            std_p2: report.std_p2,
            rms_delta: report.rms_delta,
            samples_used: report.samples_used,
        });
        if a.write_samples {
            let sample_rows: Vec<Vec<String>> = draws
                .iter()
                .map(|s| {
                    vec![
                        s.sample.to_string(),
                        csv_float(s.eps_t1),
                        csv_float(s.eps_t2),
                        csv_float(s.fidelity),
                        csv_float(s.p2),
                        u8::from(s.detected).to_string(),
                    ]
                })
                .collect();
            out.add(
                format!("samples_{k}.csv"),
                csv_table(&["sample", "eps_t1", "eps_t2", "fidelity", "p2", "detected"], &sample_rows),
            );
        }
    }

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                csv_float(r.jitter),
                csv_float(r.delta_exp),
                csv_float(r.mean_infidelity),
                csv_float(r.std_infidelity),
                csv_float(r.mean_p2),
                csv_float(r.std_p2),
                csv_float(r.rms_delta),
                r.samples_used.to_string(),
            ]
        })
        .collect();
    let csv = csv_table(
        &[
            "jitter",
            "delta_exp",
            "mean_infidelity",
            "std_infidelity",
            "mean_p2",
            "std_p2",
            "rms_delta",
            "samples_used",
        ],
        &csv_rows,
    );
    let mut text = format!("p = {}, gT2 = {}, {samples} samples\n", sig(cfg.p), sig(cfg.gt2()));
    text += "jitter      delta_exp   MC 1-F      MC std      MC rms delta\n";
    for r in &rows {
        text += &format!(
            "{:<11} {:<11} {:<11} {:<11} {}\n",
            sig(r.jitter),
            sig(r.delta_exp),
            sig(r.mean_infidelity),
            sig(r.std_infidelity),
            sig(r.rms_delta)
        );
    }
    let json = to_json(&json!({
        "p": cfg.p,
        "gt2": cfg.gt2(),
        "samples": samples,
        "seed": ctx.config.error_model.seed,
        "rows": rows,
    }));
    out.add("error_sweep.csv", csv.clone());
    out.add("error_sweep.json", json.clone());
    Ok((Rendered { json, text, csv: Some(csv) }, Ok(())))
}

fn eigen_report(a: &BasisArgs) -> Result<EigenbasisReport, CliError> {
    let mut op = j3_operator(a.p, a.phi)?;
    if let Some(eps) = a.perturb {
        op = op.scaled(C64::new(1.0 + eps, 0.0));
    }
    Ok(verify_eigenbasis_with(&op, a.p, a.phi)?)
}

fn eigen_text(r: &EigenbasisReport) -> String {
    let spectrum: Vec<String> = r.eigenvalues.iter().map(|&v| sig(v)).collect();
    let mut text = format!("p = {}, phi = {}\nspectrum  [{}]\n", sig(r.p), sig(r.phi), spectrum.join(", "));
    let labels = ["2GBS(p,phi)      +1", "Gamma             0", "2GBS(1-p,pi+phi) -1"];
    for (label, res) in labels.iter().zip(r.residuals) {
        text += &format!("{label}  residual {}\n", sig(res));
    }
    text
}

fn verify_basis(
    a: &BasisArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let r = eigen_report(a)?;
    let pass = r.passes(TOL.algebraic);
    let text = format!("{}{}\n", eigen_text(&r), if pass { "PASS" } else { "FAIL" });
    let json = to_json(&json!({
        "p": r.p,
        "phi": r.phi,
        "eigenvalues": r.eigenvalues,
        "residuals": r.residuals,
        "tolerance": TOL.algebraic,
        "pass": pass,
    }));
    out.add("verify_basis.json", json.clone());
    let verdict = if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "J3 eigen-equations fail: max residual {}, spectrum error {}",
            sig(r.max_residual()),
            sig(r.spectrum_error())
        )))
    };
    Ok((Rendered { json, text, csv: None }, verdict))
}

fn j3_spectrum(
    a: &BasisArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let r = eigen_report(a)?;
    let json = to_json(&r);
    out.add("j3_spectrum.json", json.clone());
    Ok((Rendered { json, text: eigen_text(&r), csv: None }, Ok(())))
}

fn feasibility(
    ctx: &Context,
    a: &FeasibilityArgs,
    out: &mut OutputSet,
) -> Result<(Rendered, Result<(), CliError>), CliError> {
    let cfg = &ctx.config.generation;
    let times = match (&a.times, ctx.global.units) {
        (Some(t), _) => t.clone(),
        (None, Units::Si) => {
            let gt2 = cfg.gt2.unwrap_or_else(|| gt2_for(cfg.m2));
            [FIRST_ATOM_GT, gt2, PROBE_GT].iter().map(|gt| gt / cfg.g).collect()
        }
        (None, Units::Gt) => {
            return Err(CliError::input("give --times or use --units si with --g"));
        }
    };
    let sequence_duration = a
        .sequence_duration
        .unwrap_or_else(|| times.iter().sum::<f64>() + cfg.dt_gap);
    let input = FeasibilityInput {
        tau_at: a.tau_at,
        tau_cav: a.tau_cav,
        interaction_times: times,
        sequence_duration,
    };
    let r = feasibility_check(&input)?;
    let yes_no = |ok: bool| if ok { "ok" } else { "too long" };
    let text = format!(
        "interaction times   {} (margin tau_at {}, tau_cav {})\n\
         sequence            {} (margin {})\n\
         {}\n",
        yes_no(r.interactions_ok),
        sig(r.margins.atomic),
        sig(r.margins.cavity),
        yes_no(r.sequence_ok),
        sig(r.margins.sequence),
        if r.pass { "PASS" } else { "FAIL" },
    );
    let json = to_json(&json!({ "input": input, "report": r }));
    out.add("feasibility.json", json.clone());
    let verdict = if r.pass {
        Ok(())
    } else {
        Err(CliError::Verification("decay-free operation is not feasible".into()))
    };
    Ok((Rendered { json, text, csv: None }, verdict))
}
