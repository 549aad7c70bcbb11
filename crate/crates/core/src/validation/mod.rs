//! Experimental data ingestion, profile extraction, normalization, metrics
//! and reports.

pub mod dataset;
pub mod extract;
pub mod metrics;
pub mod report;

pub use dataset::{align_pressure_offset, load_experimental, parse_experimental, ExperimentalDataset, Profile, ProfileKind};
pub use extract::{denormalize, extract_centerline, extract_wall_pressure, normalize, Normalization, NormalizedProfile};
pub use metrics::{compute_eq, compute_ez, section_flow_rate, EQ_PANELS, EZ_EPSILON};
pub use report::{metrics_csv, parse_csv, write_report, MetricRow, ValidationReport};

/// `n` evenly spaced stations on `[a, b]`, both ends included.
pub fn stations(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// The 12 default metric stations on the chart range `[-0.1, 0.1]` m.
pub fn default_stations() -> Vec<f64> {
    stations(-0.1, 0.1, 12)
}
