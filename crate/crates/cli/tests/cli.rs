use std::path::Path;
use std::process::{Command, Output};

fn conlaw(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conlaw")).args(args).env("CONLAW_OUTPUT_ROOT", root).output().expect("spawn conlaw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mesh_info_prints_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["mesh-info", "--mesh", "square:4:periodic"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("cells,faces,vertices,h,max_regularity_ratio"));
    assert!(lines.next().unwrap().starts_with("32,48,"));
    let refined = stdout(&conlaw(dir.path(), &["mesh-info", "--mesh", "interval:0:1:10:outflow", "--refine", "2"]));
    assert!(refined.lines().nth(1).unwrap().starts_with("40,41,41,"));
}

#[test]
fn converge_writes_report_under_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(&cfg, "# shock study\nmesh = interval:-1:1:20:outflow\nlevels = 3\nmin_rate = 0.45\n").unwrap();
    let o = conlaw(dir.path(), &["converge", "--config", cfg.to_str().unwrap(), "--output", "shock"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("shock/report.csv")).unwrap();
    assert_eq!(report, stdout(&o));
    assert!(report.contains("# status = pass"));
    assert!(dir.path().join("shock/rate.dat").exists());
}

#[test]
fn unmet_rate_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["converge", "--mesh", "interval:-1:1:20:outflow", "--levels", "2", "--set", "min_rate=5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("# status = fail"));
}

#[test]
fn bad_configuration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["converge", "--set", "levels=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2 levels"));
    assert_eq!(conlaw(dir.path(), &["run", "--set", "nonsense"]).status.code(), Some(2));
}

#[test]
fn run_dumps_fields_and_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["run", "--mesh", "interval:-1:1:40:outflow", "--output-times", "0.1,0.2", "--vtk", "-o", "r"]);
    assert!(o.status.success());
    for i in 0..4 {
        assert!(dir.path().join(format!("r/field_{i}.dat")).exists());
        assert!(dir.path().join(format!("r/field_{i}.vtk")).exists());
    }
    let text = stdout(&o);
    assert!(text.starts_with("record,t,min,max,mass\n"));
    assert!(text.contains("# max_principle_violation = 0e0"));
}

#[test]
fn entropy_audit_passes_for_monotone_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["entropy-audit", "--mesh", "interval:-1:1:20:outflow", "--levels", "2", "--set", "flux_rule=engquist_osher"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("level,h,steps,max_positive_residual,worst_k\n"));
    assert!(dir.path().join("entropy-audit/entropy_steps.csv").exists());
}

#[test]
fn kinetic_audit_from_config_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--problem", "riemann_rarefaction", "--mesh", "interval:-1:1:20:periodic", "--t-final", "0.2"];
    let mut args = vec!["kinetic-audit", "--levels", "3"];
    args.extend(common);
    let o = conlaw(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);

    let mut args = vec!["run", "--output-times", "0.1", "-o", "traj"];
    args.extend(common);
    assert!(conlaw(dir.path(), &args).status.success());
    let dumps: Vec<String> = (0..3).map(|i| dir.path().join(format!("traj/field_{i}.dat")).display().to_string()).collect();
    let mut args = vec!["kinetic-audit", "--dumps"];
    args.extend(dumps.iter().map(String::as_str));
    args.extend(common);
    let o = conlaw(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split(',').count(), 5);
}

#[test]
fn young_audit_reports_each_level() {
    let dir = tempfile::tempdir().unwrap();
    let o = conlaw(dir.path(), &["young-audit", "--problem", "riemann_rarefaction", "--mesh", "interval:-1:1:32:periodic", "--levels", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("level,h,max_variance,max_nonlinearity_gap,initial_consistency\n"));
    assert_eq!(text.lines().count(), 4);
}
