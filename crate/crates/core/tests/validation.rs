mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::pipe_mesh;
use nozzlebench::error::Error;
use nozzlebench::fem::{Field, FunctionSpace};
use nozzlebench::solver::{flow_rate_from_reynolds, mean_velocity, FlowCase, NsSolver};
use nozzlebench::validation::report::{profile_csv, report_svg};
use nozzlebench::validation::{
    align_pressure_offset, compute_eq, compute_ez, denormalize, extract_centerline, extract_wall_pressure,
    load_experimental, normalize, parse_csv, parse_experimental, write_report, MetricRow, Normalization,
    NormalizedProfile, Profile, ProfileKind, ValidationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R: f64 = 0.006;
const L: f64 = 0.06;

fn pipe_space(order: usize) -> Arc<FunctionSpace> {
    Arc::new(FunctionSpace::new(pipe_mesh(R, L, 3, 8), order).unwrap())
}

fn pipe_case() -> FlowCase {
    FlowCase::new(pipe_mesh(R, L, 3, 8), 500.0, 0.004, 2.0 * R)
}

fn consts() -> Normalization {
    Normalization {
        mean_inlet: 0.05,
        mean_throat: 0.45,
        dynamic_pressure: 100.0,
    }
}

fn dataset(kind: ProfileKind, samples: Vec<(f64, f64)>) -> NormalizedProfile {
    NormalizedProfile {
        kind,
        samples,
        constants: consts(),
        reference: 0.0,
    }
}

fn velocity_like() -> NormalizedProfile {
    dataset(ProfileKind::Velocity, (0..21).map(|i| {
        let z = -0.1 + 0.01 * i as f64;
        (z, 2.0 + 8.0 * (-(z / 0.03).powi(2)).exp())
    }).collect())
}

#[test]
fn load_minimal_two_line_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("probe.txt");
    std::fs::write(&path, "0 1\n0.1 2").unwrap();
    let ds = load_experimental(&path, ProfileKind::Velocity).unwrap();
    assert_eq!(ds.samples, vec![(0.0, 1.0), (0.1, 2.0)]);
    assert_eq!(ds.label, "probe");
    assert!(ds.offset.is_none());
}

#[test]
fn comma_and_whitespace_formats_agree() {
    let ws = parse_experimental("-0.02 0.5\n0.0 0.7\n0.03 0.9\n", ProfileKind::Velocity, "a", "ws").unwrap();
    let csv = parse_experimental("arcLength,normalizedUz\n-0.02,0.5\n0.0,0.7\n0.03,0.9\n", ProfileKind::Velocity, "a", "csv")
        .unwrap();
    assert_eq!(ws, csv);
}

#[test]
fn unsorted_input_is_sorted_and_duplicates_averaged() {
    let ds = parse_experimental("0.3 3\n0.1 1\n0.2 2\n0.1 2\n", ProfileKind::Pressure, "x", "x").unwrap();
    assert_eq!(ds.samples, vec![(0.1, 1.5), (0.2, 2.0), (0.3, 3.0)]);
}

#[test]
fn malformed_and_short_files_rejected() {
    match parse_experimental("z,v\n0 1\n0.1 oops\n", ProfileKind::Velocity, "x", "f.csv") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_experimental("0 1\n0 2\n", ProfileKind::Velocity, "x", "x"),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        parse_experimental("0 1 2\n1 2 3\n", ProfileKind::Velocity, "x", "x"),
        Err(Error::Parse { line: 1, .. })
    ));
}

#[test]
fn pressure_alignment() {
    let zeroed = parse_experimental("-0.1 5\n0 0\n0.1 -5\n", ProfileKind::Pressure, "a", "a").unwrap();
    let once = align_pressure_offset(&zeroed, 0.0).unwrap();
    for (a, b) in once.samples.iter().zip(&zeroed.samples) {
        assert!((a.1 - b.1).abs() < 1e-12);
    }
    let constant = parse_experimental("-0.1 130.879\n0.05 130.879\n0.2 130.879\n", ProfileKind::Pressure, "c", "c").unwrap();
    assert!(align_pressure_offset(&constant, 0.0).unwrap().samples.iter().all(|s| s.1.abs() < 1e-12));

    let ds = parse_experimental("-0.1 40\n-0.02 31\n0.015 12\n0.1 -7\n", ProfileKind::Pressure, "d", "d").unwrap();
    let a1 = align_pressure_offset(&ds, 0.0).unwrap();
    assert!(a1.profile().interpolate(0.0).unwrap().abs() < 1e-12);
    let a2 = align_pressure_offset(&a1, 0.0).unwrap();
    for (x, y) in a1.samples.iter().zip(&a2.samples) {
        assert!((x.1 - y.1).abs() < 1e-12);
    }
    assert!((a1.offset.unwrap() - a2.offset.unwrap()).abs() < 1e-12);
    assert!(matches!(align_pressure_offset(&ds, 0.5), Err(Error::InvalidParameter(_))));
}

fn poiseuille_state(case: &FlowCase, order: usize) -> Field {
    let prof = case.inlet_profile().unwrap();
    let g = prof.pressure_gradient(case.mu);
    Field::interpolate(pipe_space(order), &|r, _| [0.0, prof.value(r)], &|_, z| g * (z - L))
}

#[test]
fn centerline_of_poiseuille_is_twice_mean_inlet() {
    let case = pipe_case();
    let (ui, _) = case.mean_velocities().unwrap();
    let f = poiseuille_state(&case, 1);
    let prof = extract_centerline(&f, &[0.05, 0.0, 0.013, 0.06, 0.031]).unwrap();
    let z: Vec<f64> = prof.samples.iter().map(|s| s.0).collect();
    assert_eq!(z, vec![0.0, 0.013, 0.031, 0.05, 0.06]);
    for (_, v) in &prof.samples {
        assert!((v / (2.0 * ui) - 1.0).abs() < 1e-8);
    }
    // inlet plane carries the imposed centerline value
    let st = NsSolver::new(case.clone()).unwrap().steady().unwrap();
    let c = extract_centerline(&st.field, &[0.0]).unwrap().samples[0].1;
    assert!((c - case.inlet_profile().unwrap().centerline()).abs() < 1e-14);
}

#[test]
fn extraction_outside_domain_names_sample() {
    let f = poiseuille_state(&pipe_case(), 1);
    match extract_centerline(&f, &[0.01, 0.2]) {
        Err(Error::NotFound(msg)) => assert!(msg.contains("0.2"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(extract_wall_pressure(&f, &|_| 0.01, &[0.01]), Err(Error::NotFound(_))));
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let m = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= m * a[c][j];
            }
            b[i] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (b[i] - (i + 1..n).map(|j| a[i][j] * x[j]).sum::<f64>()) / a[i][i];
    }
    x
}

/// Brute-force point location, then the quadratic through the six nodal
/// values fitted in monomials.
fn manual_uz(f: &Field, p: [f64; 2]) -> f64 {
    let space = f.space();
    let mesh = space.mesh();
    let map = space.velocity_map();
    for t in 0..mesh.n_triangles() {
        let c = mesh.triangle_coords(t);
        let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
        let l1 = ((p[0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (p[1] - c[0][1])) / det;
        let l2 = ((c[1][0] - c[0][0]) * (p[1] - c[0][1]) - (p[0] - c[0][0]) * (c[1][1] - c[0][1])) / det;
        if l1 < -1e-12 || l2 < -1e-12 || l1 + l2 > 1.0 + 1e-12 {
            continue;
        }
        let mono = |q: [f64; 2]| {
            let (x, y) = ((q[0] - c[0][0]) / R, (q[1] - c[0][1]) / R);
            vec![1.0, x, y, x * x, x * y, y * y]
        };
        let dofs = map.cell(t);
        let a: Vec<Vec<f64>> = dofs.iter().map(|&d| mono(map.coords()[d])).collect();
        let b: Vec<f64> = dofs.iter().map(|&d| f.coeffs[space.n_u() + d]).collect();
        let coef = solve_dense(a, b);
        return mono(p).iter().zip(&coef).map(|(m, c)| m * c).sum();
    }
    panic!("point {p:?} not in mesh");
}

#[test]
fn centerline_matches_manual_evaluation() {
    let space = pipe_space(1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let coeffs = (0..space.n_total()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = Field::new(space, coeffs).unwrap();
    let z: Vec<f64> = (0..37).map(|i| i as f64 * L / 36.0).collect();
    let prof = extract_centerline(&f, &z).unwrap();
    for &(z, v) in &prof.samples {
        let m = manual_uz(&f, [0.0, z]);
        assert!((v - m).abs() < 1e-10 * (1.0 + m.abs()), "z = {z}: {v} vs {m}");
    }
}

#[test]
fn wall_pressure_of_stokes_pipe_is_linear() {
    let mut case = pipe_case();
    case.convection = false;
    let st = NsSolver::new(case.clone()).unwrap().steady().unwrap();
    let z: Vec<f64> = (0..13).map(|i| 0.005 * i as f64).collect();
    let wall = extract_wall_pressure(&st.field, &|_| R, &z).unwrap();
    let g = case.inlet_profile().unwrap().pressure_gradient(case.mu);
    let scale = g.abs() * L;
    for &(z, p) in &wall.samples {
        assert!((p - g * (z - L)).abs() < 1e-8 * scale, "z = {z}");
    }
    let axis = extract_wall_pressure(&st.field, &|_| 0.0, &z).unwrap();
    for (a, b) in axis.samples.iter().zip(&wall.samples) {
        assert!((a.1 - b.1).abs() < 1e-6 * scale);
    }
    let flat = Field::interpolate(pipe_space(1), &|_, _| [0.0, 0.0], &|_, _| 3.25);
    let prof = extract_wall_pressure(&flat, &|_| R, &z).unwrap();
    assert!(prof.samples.iter().all(|s| (s.1 - 3.25).abs() < 1e-12));
}

#[test]
fn normalization_constants_of_the_reference_case() {
    let case = pipe_case();
    let c = Normalization::from_case(&case).unwrap();
    assert!((c.dynamic_pressure - 90.63).abs() < 0.1, "{}", c.dynamic_pressure);
    let q = flow_rate_from_reynolds(500.0, case.mu, case.rho, 0.004).unwrap();
    assert!((c.mean_inlet - mean_velocity(q, 0.012)).abs() < 1e-15);
    assert!((c.mean_throat / c.mean_inlet - 9.0).abs() < 1e-12);

    let unit = Profile {
        kind: ProfileKind::Velocity,
        samples: vec![(-0.1, c.mean_inlet), (0.0, c.mean_inlet), (0.1, c.mean_inlet)],
    };
    assert!(normalize(&unit, c).unwrap().samples.iter().all(|s| (s.1 - 1.0).abs() < 1e-15));

    let linear = Profile {
        kind: ProfileKind::Pressure,
        samples: vec![(-0.05, 17.0 + 250.0), (0.0, 17.0), (0.08, 17.0 - 400.0)],
    };
    let n = normalize(&linear, c).unwrap();
    assert!(n.interpolate(0.0).unwrap().abs() < 1e-15);
    assert_eq!(n.reference, 17.0);
    let back = denormalize(&n);
    for (a, b) in back.samples.iter().zip(&linear.samples) {
        assert!((a.1 - b.1).abs() <= 1e-12 * b.1.abs());
    }
    let uncovered = Profile {
        kind: ProfileKind::Pressure,
        samples: vec![(0.01, 1.0), (0.02, 2.0)],
    };
    assert!(matches!(normalize(&uncovered, c), Err(Error::InvalidParameter(_))));
}

#[test]
fn eq_of_exact_poiseuille_and_truncated_section() {
    let case = pipe_case();
    let q = case.flow_rate().unwrap();
    let f = poiseuille_state(&case, 1);
    let sections = [0.0, 0.007, 0.021, 0.04, 0.06];
    let eq = compute_eq(&f, q, &|_| R, &sections).unwrap();
    assert!(eq.iter().all(|&(_, e)| e <= 1e-8), "{eq:?}");

    let mut rev = sections;
    rev.reverse();
    let eq_rev = compute_eq(&f, q, &|_| R, &rev).unwrap();
    for (a, b) in eq.iter().zip(eq_rev.iter().rev()) {
        assert_eq!(a, b);
    }

    let u = 0.3;
    let uniform = Field::interpolate(pipe_space(1), &|_, _| [0.0, u], &|_, _| 0.0);
    let half = compute_eq(&uniform, u * PI * R * R, &|_| R / 2.0, &[0.03]).unwrap();
    assert!((half[0].1 - 75.0).abs() < 1e-9, "{half:?}");

    assert!(matches!(compute_eq(&f, q, &|_| R, &[0.5]), Err(Error::NotFound(_))));
}

#[test]
fn ez_oracles() {
    let computed = velocity_like();
    let locs: Vec<f64> = (0..12).map(|i| -0.1 + 0.2 * i as f64 / 11.0).collect();
    let same = compute_ez(&computed, &[computed.clone()], &locs).unwrap();
    assert!(same.iter().all(|&(_, e)| e == 0.0));

    let scaled = dataset(ProfileKind::Velocity, computed.samples.iter().map(|&(z, v)| (z, 1.1 * v)).collect());
    for (_, e) in compute_ez(&computed, &[scaled.clone()], &locs).unwrap() {
        assert!((e - 0.1 / 1.1).abs() < 1e-12);
    }

    let lo = dataset(ProfileKind::Velocity, computed.samples.iter().map(|&(z, v)| (z, v - 0.25)).collect());
    let hi = dataset(ProfileKind::Velocity, computed.samples.iter().map(|&(z, v)| (z, v + 0.25)).collect());
    let sym = compute_ez(&computed, &[lo.clone(), hi.clone()], &locs).unwrap();
    assert!(sym.iter().all(|&(_, e)| e < 1e-14), "{sym:?}");

    let sets = [lo.clone(), scaled.clone(), hi.clone()];
    let a = compute_ez(&computed, &sets, &locs).unwrap();
    let b = compute_ez(&computed, &[hi.clone(), lo.clone(), scaled.clone()], &locs).unwrap();
    assert_eq!(a, b);
    let dup = compute_ez(&computed, &[scaled.clone(), scaled.clone()], &locs).unwrap();
    let single = compute_ez(&computed, &[scaled], &locs).unwrap();
    assert_eq!(dup, single);

    let partial = dataset(ProfileKind::Velocity, vec![(0.0, 1.0), (0.05, 1.0)]);
    assert!(matches!(compute_ez(&computed, &[partial], &[-0.05]), Err(Error::InsufficientData(_))));
}

fn sample_report() -> ValidationReport {
    let v = velocity_like();
    let p = dataset(ProfileKind::Pressure, (0..9).map(|i| {
        let z = -0.08 + 0.02 * i as f64;
        (z, -z * 37.123456789 + (z * 91.0).sin())
    }).collect());
    let exp = dataset(ProfileKind::Velocity, vec![(-0.05, 2.1), (0.0, 9.5), (0.05, 3.3)]);
    ValidationReport {
        case_summary: vec![("re_throat".into(), "500".into()), ("label".into(), "a <b> & c".into())],
        velocity: Some(v),
        velocity_datasets: vec![("lab,one".into(), exp)],
        pressure: Some(p),
        metrics: (0..12).map(|i| MetricRow {
            z: -0.1 + 0.2 * i as f64 / 11.0,
            ez: if i % 3 == 0 { None } else { Some(0.123456789012345 * i as f64) },
            eq: Some(1.0 / (1.0 + i as f64)),
        }).collect(),
        ..Default::default()
    }
}

#[test]
fn empty_report_has_header_rows_only() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_report(&ValidationReport::default(), dir.path()).unwrap();
    assert_eq!(files.len(), 5);
    assert_eq!(std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap(), "z,E_z,E_Q\n");
    for name in ["profiles_velocity.csv", "profiles_pressure.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 1, "{name}");
        assert!(text.starts_with("z,computed_norm"));
    }
    roxmltree::Document::parse(&std::fs::read_to_string(dir.path().join("report.svg")).unwrap()).unwrap();
}

#[test]
fn report_csv_round_trip_and_svg() {
    let rep = sample_report();
    let dir = tempfile::tempdir().unwrap();
    write_report(&rep, dir.path()).unwrap();

    let (header, rows) = parse_csv(&std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap()).unwrap();
    assert_eq!(header, ["z", "E_z", "E_Q"]);
    assert_eq!(rows.len(), rep.metrics.len());
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * b.abs().max(1e-300),
        (None, None) => true,
        _ => false,
    };
    for (row, m) in rows.iter().zip(&rep.metrics) {
        assert!(close(row[0], Some(m.z)) && close(row[1], m.ez) && close(row[2], m.eq), "{row:?} {m:?}");
    }

    let text = std::fs::read_to_string(dir.path().join("profiles_velocity.csv")).unwrap();
    assert_eq!(text, profile_csv(rep.velocity.as_ref(), &rep.velocity_datasets));
    let (header, rows) = parse_csv(&text).unwrap();
    assert_eq!(header.len(), 3);
    let v = rep.velocity.as_ref().unwrap();
    for (row, &(z, val)) in rows.iter().zip(&v.samples) {
        assert!(close(row[0], Some(z)) && close(row[1], Some(val)));
        assert!(close(row[2], rep.velocity_datasets[0].1.interpolate(z)));
    }
    let (_, rows) = parse_csv(&std::fs::read_to_string(dir.path().join("profiles_pressure.csv")).unwrap()).unwrap();
    for (row, &(_, val)) in rows.iter().zip(&rep.pressure.as_ref().unwrap().samples) {
        assert!(close(row[1], Some(val)));
    }

    let svg = std::fs::read_to_string(dir.path().join("report.svg")).unwrap();
    assert_eq!(svg, report_svg(&rep));
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("E_z") && summary.contains("E_Q"));
}

#[test]
fn unwritable_report_directory_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    assert!(matches!(write_report(&sample_report(), &file.join("sub")), Err(Error::Io { .. })));
}
