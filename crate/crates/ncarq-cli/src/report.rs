//! Report rows shared by `simulate`, `analyze` and `sweep`: every analytic
//! column is recomputable from the row's own inputs, and simulation columns
//! stay empty for analysis-only runs.

use crate::format::{csv_field, sig9};
use ncarq::{
    monte_carlo, throughput, FrameConfig, LinkProfile, Mode, SchemeId, TruncationPolicy,
};

pub const REPORT_HEADER: &str = "scheme,p1,p2,p12,p21,q,np,ns,cap,trials,seed,mean_B_sim,mean_B_analytic,eta_p_sim,eta_s_sim,eta_p_analytic,eta_s_analytic,outage_sim,outage_analytic,status";

#[derive(Debug, Clone, Default)]
pub struct ReportRow {
    pub scheme: String,
    pub p1: f64,
    pub p2: f64,
    pub p12: f64,
    pub p21: f64,
    pub q: f64,
    pub np: u32,
    pub ns: u32,
    pub cap: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    pub mean_b_sim: Option<f64>,
    pub mean_b_analytic: Option<f64>,
    pub eta_p_sim: Option<f64>,
    pub eta_s_sim: Option<f64>,
    pub eta_p_analytic: Option<f64>,
    pub eta_s_analytic: Option<f64>,
    pub outage_sim: Option<f64>,
    pub outage_analytic: Option<f64>,
    pub status: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        let cap = self.cap.map_or_else(|| "inf".to_string(), |c| c.to_string());
        [
            self.scheme.clone(),
            sig9(self.p1),
            sig9(self.p2),
            sig9(self.p12),
            sig9(self.p21),
            sig9(self.q),
            self.np.to_string(),
            self.ns.to_string(),
            cap,
            self.trials.to_string(),
            self.seed.to_string(),
            opt(self.mean_b_sim),
            opt(self.mean_b_analytic),
            opt(self.eta_p_sim),
            opt(self.eta_s_sim),
            opt(self.eta_p_analytic),
            opt(self.eta_s_analytic),
            opt(self.outage_sim),
            opt(self.outage_analytic),
            self.status.clone(),
        ]
        .map(|f| csv_field(&f))
        .join(",")
    }
}

/// Evaluate one (scheme, profile, workload, policy) point: analytic always,
/// Monte Carlo when `trials > 0`. Failures land in the status column.
pub fn evaluate_point(
    scheme: SchemeId,
    profile: LinkProfile,
    config: FrameConfig,
    policy: &TruncationPolicy,
    trials: u64,
    seed: u64,
) -> ReportRow {
    let mut row = ReportRow {
        scheme: scheme.to_string(),
        p1: profile.p1,
        p2: profile.p2,
        p12: profile.p12,
        p21: profile.p21,
        q: profile.q,
        np: config.n_primary,
        ns: config.n_secondary,
        cap: policy.cap(),
        trials,
        seed,
        status: "ok".to_string(),
        ..Default::default()
    };
    let mode = if policy.cap().is_some() { Mode::Tfs } else { Mode::Afs };

    match throughput(mode, scheme, &profile, &config, policy) {
        Ok(report) => {
            row.mean_b_analytic = Some(report.mean_frame);
            row.eta_p_analytic = Some(report.eta_primary);
            row.eta_s_analytic = Some(report.eta_secondary);
            row.outage_analytic = report.outage;
        }
        Err(e) => {
            row.status = e.to_string();
            return row;
        }
    }
    if trials == 0 {
        return row;
    }
    match monte_carlo(scheme, &profile, &config, policy, trials, seed) {
        Ok(summary) => {
            row.mean_b_sim = summary.mean_total_given_ok;
            row.eta_p_sim = summary.throughput_primary;
            row.eta_s_sim = summary.throughput_secondary;
            if mode == Mode::Tfs {
                row.outage_sim = Some(summary.outage_rate);
            }
        }
        Err(e) => row.status = e.to_string(),
    }
    row
}
