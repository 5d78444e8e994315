//! Command-line front end: experiment configuration, simulation-vs-analysis
//! comparison tables, sweeps, outage-constrained sizing and frame-size
//! histograms, all exported as RFC-4180 CSV.

mod dist;
mod format;
mod report;
mod settings;

use clap::{Parser, Subcommand};
use format::{csv_field, sig9};
use ncarq::{
    monte_carlo, scheme_moments, size_secondary_load, validate_profile, FrameConfig, LinkProfile,
    ModelError, TruncationPolicy,
};
use report::{evaluate_point, ReportRow, REPORT_HEADER};
use settings::{CommonOpts, Settings};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ncarq",
    version,
    about = "Cooperative ARQ and network-coded retransmission: simulator and analytic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run with analytic columns for comparison.
    Simulate(CommonOpts),
    /// Analytic results only; consumes no randomness.
    Analyze(CommonOpts),
    /// Sweep one field over a range, one row per point and scheme.
    Sweep(CommonOpts),
    /// Largest secondary load meeting an outage target, per scheme.
    Size(CommonOpts),
    /// Frame-size histogram with fitted density and KS distance.
    Hist(CommonOpts),
}

/// Process exit codes: 2 config, 3 validation, 4 infeasible sizing.
enum CliError {
    Io(String),
    Config(String),
    Validation(String),
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Config(m) | CliError::Validation(m)
            | CliError::Infeasible(m) => m,
        }
    }
}

impl From<settings::ConfigError> for CliError {
    fn from(e: settings::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(opts) => run_point(&opts, false),
        Command::Analyze(opts) => run_point(&opts, true),
        Command::Sweep(opts) => run_sweep(&opts),
        Command::Size(opts) => run_size(&opts),
        Command::Hist(opts) => run_hist(&opts),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

fn write_output(path: Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
                }
            }
            std::fs::write(&path, content)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn validated_inputs(
    s: &Settings,
) -> Result<(LinkProfile, FrameConfig, TruncationPolicy), CliError> {
    let profile = s.profile()?;
    let config = s.frame_config()?;
    let policy = s.policy()?;
    validate_profile(profile, &config).map_err(|e| CliError::Validation(e.to_string()))?;
    policy.validate_against(&config).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok((profile, config, policy))
}

fn run_point(opts: &CommonOpts, analysis_only: bool) -> Result<(), CliError> {
    let s = settings::resolve(opts)?;
    let (profile, config, policy) = validated_inputs(&s)?;
    let trials = if analysis_only { 0 } else { s.trials };
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for &scheme in &s.schemes {
        let row = evaluate_point(scheme, profile, config, &policy, trials, s.seed);
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    write_output(s.out_path(), &out)
}

/// Fields a sweep may vary.
const SWEEPABLE: [&str; 8] = ["p1", "p2", "p12", "p21", "q", "np", "ns", "cap"];

fn run_sweep(opts: &CommonOpts) -> Result<(), CliError> {
    let s = settings::resolve(opts)?;
    let varying = s
        .varying
        .clone()
        .ok_or_else(|| CliError::Config("sweep requires `varying`".into()))?
        .to_ascii_lowercase();
    if !SWEEPABLE.contains(&varying.as_str()) {
        return Err(CliError::Config(format!(
            "cannot sweep `{varying}`; choose one of {SWEEPABLE:?}"
        )));
    }
    let start = s.start.ok_or_else(|| CliError::Config("sweep requires `start`".into()))?;
    let stop = s.stop.ok_or_else(|| CliError::Config("sweep requires `stop`".into()))?;
    let step = s.step.ok_or_else(|| CliError::Config("sweep requires `step`".into()))?;
    if !(step > 0.0) {
        return Err(CliError::Config(format!("sweep step must be positive, got {step}")));
    }
    if stop < start {
        return Err(CliError::Config(format!("empty sweep range [{start}, {stop}]")));
    }
    let is_probability = !matches!(varying.as_str(), "np" | "ns" | "cap");
    let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    let values: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    if is_probability && values.iter().any(|v| !(0.0..1.0).contains(v)) {
        return Err(CliError::Config(format!(
            "swept probabilities must stay inside [0, 1): {varying} range [{start}, {stop}]"
        )));
    }

    // the fixed part must be valid before sweeping
    let base_profile = s.profile()?;
    let np = s.np.ok_or_else(|| CliError::Config("missing packet count `np`".into()))?;
    let ns = s.ns.ok_or_else(|| CliError::Config("missing packet count `ns`".into()))?;
    if varying != "np" && varying != "ns" {
        let config = s.frame_config()?;
        validate_profile(base_profile, &config)
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }

    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for &value in &values {
        let mut profile = base_profile;
        let (mut np_point, mut ns_point, mut cap_point) = (np, ns, s.cap);
        match varying.as_str() {
            "p1" => profile.p1 = value,
            "p2" => profile.p2 = value,
            "p12" => profile.p12 = value,
            "p21" => profile.p21 = value,
            "q" => profile.q = value,
            "np" => np_point = value.round() as u32,
            "ns" => ns_point = value.round() as u32,
            "cap" => cap_point = Some(value.round() as u64),
            _ => unreachable!(),
        }
        let policy = match cap_point {
            Some(cap) => TruncationPolicy::capped(cap),
            None => TruncationPolicy::unbounded(),
        };
        for &scheme in &s.schemes {
            let row = match FrameConfig::new(np_point, ns_point) {
                Ok(config) => evaluate_point(scheme, profile, config, &policy, s.trials, s.seed),
                Err(e) => ReportRow {
                    scheme: scheme.to_string(),
                    p1: profile.p1,
                    p2: profile.p2,
                    p12: profile.p12,
                    p21: profile.p21,
                    q: profile.q,
                    np: np_point,
                    ns: ns_point,
                    cap: cap_point,
                    trials: s.trials,
                    seed: s.seed,
                    status: e.to_string(),
                    ..Default::default()
                },
            };
            out.push_str(&row.to_csv());
            out.push('\n');
        }
    }
    write_output(s.out_path(), &out)
}

const SIZE_HEADER: &str =
    "scheme,p1,p2,p12,p21,q,np,cap,pout,trials,seed,ns_max,outage_analytic,outage_sim,status";

fn run_size(opts: &CommonOpts) -> Result<(), CliError> {
    let s = settings::resolve(opts)?;
    let profile = s.profile()?;
    let np = s.np.ok_or_else(|| CliError::Config("missing packet count `np`".into()))?;
    let cap = s.cap.ok_or_else(|| CliError::Config("sizing requires a bounded `cap`".into()))?;
    let target = s.pout.unwrap_or(0.1);

    let mut out = String::from(SIZE_HEADER);
    out.push('\n');
    let mut any_infeasible = None;
    // boundary case: a cap equal to the primary load leaves room for an
    // empty secondary message only
    let size_at = |scheme: SchemeId| -> Result<u32, ModelError> {
        if cap == u64::from(np) && np > 0 {
            let config = FrameConfig { n_primary: np, n_secondary: 0 };
            let m = scheme_moments(scheme, &profile, &config)?.total;
            let outage = if m.std_dev() == 0.0 {
                if m.mean() <= cap as f64 { 0.0 } else { 1.0 }
            } else {
                ncarq::stats::std_normal_sf((cap as f64 - m.mean()) / m.std_dev())
            };
            if outage <= target {
                Ok(0)
            } else {
                Err(ModelError::Infeasible { n_primary: np, cap, target_outage: target })
            }
        } else {
            size_secondary_load(scheme, &profile, np, cap, target)
        }
    };
    for &scheme in &s.schemes {
        let prefix = format!(
            "{scheme},{},{},{},{},{},{np},{cap},{},{},{}",
            sig9(profile.p1),
            sig9(profile.p2),
            sig9(profile.p12),
            sig9(profile.p21),
            sig9(profile.q),
            sig9(target),
            s.trials,
            s.seed
        );
        match size_at(scheme) {
            Ok(ns_max) => {
                let config = FrameConfig { n_primary: np, n_secondary: ns_max };
                let analytic = scheme_moments(scheme, &profile, &config)
                    .map(|m| {
                        if m.total.std_dev() == 0.0 {
                            if m.total.mean() <= cap as f64 { 0.0 } else { 1.0 }
                        } else {
                            ncarq::stats::std_normal_sf((cap as f64 - m.total.mean()) / m.total.std_dev())
                        }
                    })
                    .unwrap_or(f64::NAN);
                let mc = if s.trials > 0 {
                    monte_carlo(
                        scheme,
                        &profile,
                        &config,
                        &TruncationPolicy::capped(cap),
                        s.trials,
                        s.seed,
                    )
                    .map(|summary| sig9(summary.outage_rate))
                    .unwrap_or_default()
                } else {
                    String::new()
                };
                out.push_str(&format!("{prefix},{ns_max},{},{mc},ok\n", sig9(analytic)));
            }
            Err(e @ ModelError::Infeasible { .. }) => {
                any_infeasible = Some(e.to_string());
                out.push_str(&format!("{prefix},,,,{}\n", csv_field(&e.to_string())));
            }
            Err(ModelError::Validation(e)) => {
                return Err(CliError::Validation(e.to_string()));
            }
            Err(e) => return Err(CliError::Validation(e.to_string())),
        }
    }
    write_output(s.out_path(), &out)?;
    match any_infeasible {
        Some(msg) => Err(CliError::Infeasible(msg)),
        None => Ok(()),
    }
}

fn run_hist(opts: &CommonOpts) -> Result<(), CliError> {
    let s = settings::resolve(opts)?;
    let (profile, config, policy) = validated_inputs(&s)?;
    if s.trials == 0 {
        return Err(CliError::Config("hist requires trials >= 1".into()));
    }
    if s.schemes.len() != 1 {
        return Err(CliError::Config(
            "hist plots one scheme at a time; pass --scheme ARQ|SNC|ANC".into(),
        ));
    }
    let scheme = s.schemes[0];
    let as_err = |e: ncarq::SimError| CliError::Validation(e.to_string());

    let mut out = String::from("B,frequency,fitted_density\n");
    match policy.cap() {
        None => {
            let summary = monte_carlo(scheme, &profile, &config, &policy, s.trials, s.seed)
                .map_err(as_err)?;
            let (mean, sd) = (summary.mean_total, summary.var_total.sqrt());
            for (&b, &freq) in &summary.histogram {
                let fit = if sd > 0.0 { dist::normal_mass_at(b, mean, sd) } else { f64::NAN };
                out.push_str(&format!(
                    "{b},{freq},{}\n",
                    if sd > 0.0 { sig9(fit) } else { String::new() }
                ));
            }
            eprintln!("scheme={scheme} mode=afs trials={}", s.trials);
            eprintln!("sample mean={} sd={}", sig9(mean), sig9(sd));
            match dist::ks_discretized_normal(&summary.histogram, mean, sd) {
                Some(ks) => eprintln!("ks_distance={}", sig9(ks)),
                None => eprintln!("ks_distance=not-applicable (degenerate sample)"),
            }
        }
        Some(cap) => {
            let summary = monte_carlo(scheme, &profile, &config, &policy, s.trials, s.seed)
                .map_err(as_err)?;
            // companion unbounded run fits the parent normal and predicts the
            // tail beyond the cap
            let parent = monte_carlo(
                scheme,
                &profile,
                &config,
                &TruncationPolicy::unbounded(),
                s.trials,
                s.seed,
            )
            .map_err(as_err)?;
            let (pm, psd) = (parent.mean_total, parent.var_total.sqrt());

            // histogram of completed frames only: outage frames all sit at the cap
            let mut completed = summary.histogram.clone();
            let outage_frames = (summary.outage_rate * s.trials as f64).round() as u64;
            if outage_frames > 0 {
                match completed.get_mut(&cap) {
                    Some(c) if *c > outage_frames => *c -= outage_frames,
                    _ => {
                        completed.remove(&cap);
                    }
                }
            }
            for (&b, &freq) in &completed {
                let fit = if psd > 0.0 {
                    dist::truncated_mass_at(b, pm, psd, cap)
                } else {
                    f64::NAN
                };
                out.push_str(&format!(
                    "{b},{freq},{}\n",
                    if psd > 0.0 { sig9(fit) } else { String::new() }
                ));
            }
            let analytic = scheme_moments(scheme, &profile, &config)
                .map(|m| {
                    ncarq::stats::std_normal_sf((cap as f64 - m.total.mean()) / m.total.std_dev())
                })
                .unwrap_or(f64::NAN);
            eprintln!("scheme={scheme} mode=tfs cap={cap} trials={}", s.trials);
            eprintln!("parent fit mean={} sd={}", sig9(pm), sig9(psd));
            eprintln!("outage_empirical={}", sig9(summary.outage_rate));
            if psd > 0.0 {
                let qfit = ncarq::stats::std_normal_sf((cap as f64 - pm) / psd);
                eprintln!("outage_qform_fit={}", sig9(qfit));
            }
            eprintln!("outage_qform_analytic={}", sig9(analytic));
            match dist::ks_discretized_truncated(&completed, pm, psd, cap) {
                Some(ks) => eprintln!("ks_distance={}", sig9(ks)),
                None => eprintln!("ks_distance=not-applicable (degenerate sample)"),
            }
        }
    }
    write_output(s.out_path(), &out)
}
