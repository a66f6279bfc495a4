//! Flat-file renderings of profiles, law tables, and sweeps.
//!
//! CSV is locale-free: `.` decimal point, `,` delimiter, `\n` line endings,
//! every number in its shortest round-trip form. JSON mirrors the CSV columns
//! as arrays next to a metadata object, and importing a profile JSON then
//! re-exporting it reproduces the bytes exactly.

use std::fmt::Write as _;

use qwalk_core::{limit_cdf, Coin, LimitLaw, RegimeParams, StationaryProfile, SweepRow};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    /// Coin entries a, b, c, d as [re, im] pairs.
    pub coin: [[f64; 2]; 4],
    pub xi: f64,
    pub omega: f64,
    pub regime: String,
    pub comfortability: f64,
    /// The M*theta target when xi was derived from one, else null.
    pub theta_star: Option<f64>,
    /// Display form of the comparison law, if any.
    pub law: Option<String>,
}

/// A profile table plus its provenance; the single source for both formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub metadata: ProfileMetadata,
    pub n: Vec<usize>,
    pub x: Vec<f64>,
    pub phi_norm_sq: Vec<f64>,
    pub mu: Vec<f64>,
    #[serde(rename = "F_M")]
    pub f_m: Vec<f64>,
    #[serde(rename = "F_limit")]
    pub f_limit: Option<Vec<f64>>,
    pub abs_diff: Option<Vec<f64>>,
}

impl ProfileDoc {
    /// Tabulates a profile against an optional law. Continuous laws are read
    /// at the row's own x = n/M; the geometric law lives on the raw site
    /// axis, so there F_limit is its CDF at n.
    pub fn build(
        profile: &StationaryProfile,
        law: Option<&LimitLaw>,
        coin: &Coin,
        params: &RegimeParams,
    ) -> Self {
        let m = profile.m();
        let mf = m as f64;
        let n: Vec<usize> = (0..m).collect();
        let x: Vec<f64> = n.iter().map(|&k| k as f64 / mf).collect();
        let f_m = profile.site_cdf().to_vec();
        let f_limit = law.map(|law| {
            n.iter()
                .map(|&k| {
                    let arg = if matches!(law, LimitLaw::Geometric { .. }) {
                        k as f64
                    } else {
                        k as f64 / mf
                    };
                    limit_cdf(law, arg)
                })
                .collect::<Vec<f64>>()
        });
        let abs_diff = f_limit
            .as_ref()
            .map(|fl| fl.iter().zip(&f_m).map(|(l, s)| (s - l).abs()).collect());
        let entries = coin.entries();
        ProfileDoc {
            metadata: ProfileMetadata {
                coin: [
                    [entries[0].re, entries[0].im],
                    [entries[1].re, entries[1].im],
                    [entries[2].re, entries[2].im],
                    [entries[3].re, entries[3].im],
                ],
                xi: params.xi(),
                omega: params.omega(),
                regime: params.region().to_string(),
                comfortability: profile.comfortability(),
                theta_star: params.theta_star(),
                law: law.map(|l| l.to_string()),
            },
            n,
            x,
            phi_norm_sq: profile.site_norm_sq().to_vec(),
            mu: profile.mu().to_vec(),
            f_m,
            f_limit,
            abs_diff,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x,phi_norm_sq,mu,F_M,F_limit,abs_diff\n");
        for i in 0..self.n.len() {
            let _ = write!(
                out,
                "{},{},{},{},{}",
                self.n[i], self.x[i], self.phi_norm_sq[i], self.mu[i], self.f_m[i]
            );
            match (&self.f_limit, &self.abs_diff) {
                (Some(fl), Some(ad)) => {
                    let _ = writeln!(out, ",{},{}", fl[i], ad[i]);
                }
                _ => out.push_str(",,\n"),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("profile doc serializes");
        text.push('\n');
        text
    }
}

/// Parses a profile previously exported as JSON.
pub fn import_profile_json(text: &str) -> Result<ProfileDoc, serde_json::Error> {
    serde_json::from_str(text)
}

/// One sweep row as exported; NaN (Bout has no angle) becomes null in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRowDoc {
    #[serde(rename = "M")]
    pub m: usize,
    pub regime: String,
    pub theta_star_effective: Option<f64>,
    pub ks: f64,
}

impl From<&SweepRow> for SweepRowDoc {
    fn from(row: &SweepRow) -> Self {
        SweepRowDoc {
            m: row.m,
            regime: row.regime.to_string(),
            theta_star_effective: if row.theta_star_effective.is_nan() {
                None
            } else {
                Some(row.theta_star_effective)
            },
            ks: row.ks,
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("M,regime,theta_star_effective,ks\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.m, row.regime, row.theta_star_effective, row.ks
        );
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let docs: Vec<SweepRowDoc> = rows.iter().map(SweepRowDoc::from).collect();
    let mut text = serde_json::to_string_pretty(&docs).expect("sweep rows serialize");
    text.push('\n');
    text
}

/// A tabulated law with a density (everything but the geometric family).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousLawDoc {
    pub law: String,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    #[serde(rename = "F_limit")]
    pub f_limit: Vec<f64>,
}

impl ContinuousLawDoc {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,density,F_limit\n");
        for i in 0..self.x.len() {
            let _ = writeln!(out, "{},{},{}", self.x[i], self.density[i], self.f_limit[i]);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("law doc serializes");
        text.push('\n');
        text
    }
}

/// The geometric law tabulated on sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLawDoc {
    pub law: String,
    pub j: Vec<usize>,
    pub pmf: Vec<f64>,
    #[serde(rename = "F_limit")]
    pub f_limit: Vec<f64>,
}

impl DiscreteLawDoc {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,pmf,F_limit\n");
        for i in 0..self.j.len() {
            let _ = writeln!(out, "{},{},{}", self.j[i], self.pmf[i], self.f_limit[i]);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("law doc serializes");
        text.push('\n');
        text
    }
}
