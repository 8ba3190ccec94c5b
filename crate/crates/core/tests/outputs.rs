use std::fs;
use std::path::Path;

use ddcd::scenario::output::{DIAGNOSTICS_FILE, DIAGNOSTICS_HEADER, ELEMENTS_FILE, FAILURE_FILE, SUMMARY_FILE, TRAJECTORY_FILE};
use ddcd::scenario::{preset, run_scenario, FailureReport, OutputWriter, RunSummary, Scenario, EXIT_SOLVER};
use ddcd::Error;

fn short_ex1(dir: &Path) -> Scenario {
    preset("ex1", Some(0.01), Some(0.05), Some(dir.to_path_buf()))
        .unwrap()
        .build(None, "ex1")
        .unwrap()
}

fn read_rows(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    let rows = r.records().map(|x| x.unwrap()).collect();
    (header, rows)
}

#[test]
fn run_writes_all_streams() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_ex1(dir.path());
    let (summary, traj) = run_scenario(&scenario).unwrap();
    assert_eq!(summary.steps, 5);
    assert_eq!(traj.len(), 6);

    let (h, rows) = read_rows(&dir.path().join(TRAJECTORY_FILE));
    assert_eq!(h.len(), 1 + 12 * 21);
    assert_eq!(&h[0], "t");
    assert_eq!(&h[1], "n1_phi_x");
    assert_eq!(&h[12 * 10 + 4], "n11_d1_x");
    assert_eq!(rows.len(), 6);
    let q_last: Vec<f64> = rows[5].iter().skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(q_last.as_slice(), traj.last().unwrap().q.as_slice());

    let (h, rows) = read_rows(&dir.path().join(ELEMENTS_FILE));
    assert_eq!(h.iter().collect::<Vec<_>>()[1..4], ["el8_e1", "el8_e2", "el8_e3"]);
    assert_eq!(&h[12], "el8_s6");
    assert_eq!(rows.len(), 6);

    let (h, rows) = read_rows(&dir.path().join(DIAGNOSTICS_FILE));
    assert_eq!(h.iter().collect::<Vec<_>>(), DIAGNOSTICS_HEADER);
    assert_eq!(rows.len(), 6);
    assert!(rows[0].iter().skip(1).take(9).all(|v| v.parse::<f64>().unwrap() == 0.0));
    assert!(rows[0][10].parse::<f64>().unwrap() <= 1e-14);
    assert_eq!(&rows[0][11], "0");
    let iterations: usize = rows[3][11].parse().unwrap();
    assert!(iterations >= 1);

    let parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(parsed["steps"], 5);
    assert_eq!(parsed["scenario"], "ex1");
    assert!(!dir.path().join(FAILURE_FILE).exists());
    let _: &RunSummary = &summary;
}

#[test]
fn diagnostics_are_bitwise_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_scenario(&short_ex1(a.path())).unwrap();
    run_scenario(&short_ex1(b.path())).unwrap();
    for file in [TRAJECTORY_FILE, ELEMENTS_FILE, DIAGNOSTICS_FILE] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn rows_are_flushed_as_steps_complete() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_ex1(dir.path());
    let sim = &scenario.simulation;
    let mut writer = OutputWriter::create(&scenario.output, sim.mesh.n_nodes()).unwrap();
    let diag = dir.path().join(DIAGNOSTICS_FILE);
    let outcome = sim.run(&mut |rec| {
        writer.write(rec)?;
        let lines = fs::read_to_string(&diag).unwrap().lines().count();
        assert_eq!(lines, rec.step + 2);
        Ok(())
    });
    assert!(outcome.error.is_none());
}

#[test]
fn solver_failure_keeps_partial_output_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ex1", Some(0.01), Some(0.05), Some(dir.path().to_path_buf())).unwrap();
    cfg.solver.max_iterations = 1;
    let scenario = cfg.build(None, "ex1").unwrap();
    let err = run_scenario(&scenario).unwrap_err();
    assert_eq!(ddcd::scenario::exit_code(&err), EXIT_SOLVER);
    let Error::Step { step, .. } = &err else { panic!("step error expected, got {err}") };
    assert_eq!(*step, 1);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(FAILURE_FILE)).unwrap()).unwrap();
    assert_eq!(report["step"], 1);
    assert_eq!(report["steps_completed"], 0);
    assert_eq!(report["residual_history"].as_array().unwrap().len(), 2);
    let (_, rows) = read_rows(&dir.path().join(DIAGNOSTICS_FILE));
    assert_eq!(rows.len(), 1, "initial state stays on disk");
    assert!(!dir.path().join(SUMMARY_FILE).exists());
    let _ = FailureReport::new("x", &err, 0);
}

#[test]
fn unloaded_beam_reports_zero_momenta() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ex2", Some(0.01), Some(0.1), Some(dir.path().to_path_buf())).unwrap();
    cfg.loads.nodal.clear();
    let (summary, traj) = run_scenario(&cfg.build(None, "rest").unwrap()).unwrap();
    for rec in &traj.records {
        let m = rec.momenta;
        assert!(m.l.amax() <= 1e-14 && m.j_minus.amax() <= 1e-14 && m.j_plus.amax() <= 1e-14);
    }
    assert_eq!(summary.stationary.l, [0.0; 3]);
}
