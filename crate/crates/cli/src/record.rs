//! On-disk formats: `report.json`, `series.csv` and `summary.csv`.

use std::fmt::Write as _;

use lognls_core::{ScenarioReport, Trajectory};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ConfigError,
    NumericalAbort,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::ConfigError => 2,
            Status::NumericalAbort => 3,
        }
    }

    /// The status a batch reports: configuration errors first, then
    /// numerical aborts, then scenario failures.
    pub fn worst(statuses: impl IntoIterator<Item = Status>) -> Status {
        let rank = |s: Status| match s {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::NumericalAbort => 2,
            Status::ConfigError => 3,
        };
        statuses
            .into_iter()
            .max_by_key(|s| rank(*s))
            .unwrap_or(Status::Pass)
    }
}

/// Everything `report.json` holds about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub scenario: String,
    pub status: Status,
    /// The resolved configuration, defaults included, in config-file syntax.
    pub config: String,
    pub report: Option<ScenarioReport>,
    /// Step at which the state stopped being finite.
    pub abort_step: Option<usize>,
    pub error: Option<String>,
    pub duration_seconds: f64,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

const AXES: [&str; 3] = ["var_x", "var_y", "var_z"];

pub fn series_header(dims: usize) -> String {
    let mut h = String::from("t,norm_sq,E_total,E_kin,E_ext,E_log");
    for name in &AXES[..dims] {
        h.push(',');
        h.push_str(name);
    }
    h
}

/// Scientific notation with 17 significant digits, enough to round-trip.
fn num(s: &mut String, v: f64) {
    let _ = write!(s, "{v:.16e}");
}

/// One row per recorded time; header only when there is no trajectory.
pub fn series_csv(dims: usize, trajectory: Option<&Trajectory>) -> String {
    let mut s = series_header(dims);
    s.push('\n');
    let Some(t) = trajectory else {
        return s;
    };
    for r in 0..t.len() {
        let e = &t.energy_series[r];
        let row = [t.times[r], t.norm_series[r], e.total, e.kinetic, e.external, e.logarithmic];
        for (i, v) in row.iter().chain(&t.variance_series[r]).enumerate() {
            if i > 0 {
                s.push(',');
            }
            num(&mut s, *v);
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub status: Status,
    pub max_discrepancy: Option<f64>,
    pub duration_seconds: f64,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("scenario,pass,max_discrepancy,duration\n");
    for row in rows {
        let _ = write!(s, "{},{},", row.name, row.status == Status::Pass);
        if let Some(d) = row.max_discrepancy {
            num(&mut s, d);
        }
        let _ = writeln!(s, ",{:.6}", row.duration_seconds);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_has_one_variance_column_per_axis() {
        assert_eq!(series_header(1), "t,norm_sq,E_total,E_kin,E_ext,E_log,var_x");
        assert_eq!(
            series_header(3),
            "t,norm_sq,E_total,E_kin,E_ext,E_log,var_x,var_y,var_z"
        );
    }

    #[test]
    fn numbers_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let mut s = String::new();
            num(&mut s, v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert!(digits >= 15);
        }
    }

    #[test]
    fn worst_status_prefers_config_errors() {
        use Status::*;
        assert_eq!(Status::worst([Pass, Pass]), Pass);
        assert_eq!(Status::worst([Pass, Fail]), Fail);
        assert_eq!(Status::worst([Fail, NumericalAbort]), NumericalAbort);
        assert_eq!(Status::worst([NumericalAbort, ConfigError, Fail]), ConfigError);
        assert_eq!(Status::worst([]), Pass);
    }

    #[test]
    fn summary_marks_failures() {
        let rows = [
            SummaryRow { name: "a".into(), status: Status::Pass, max_discrepancy: Some(0.5), duration_seconds: 1.0 },
            SummaryRow { name: "b".into(), status: Status::ConfigError, max_discrepancy: None, duration_seconds: 0.0 },
        ];
        let text = summary_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "scenario,pass,max_discrepancy,duration");
        assert_eq!(lines[1], "a,true,5.0000000000000000e-1,1.000000");
        assert_eq!(lines[2], "b,false,,0.000000");
    }
}
